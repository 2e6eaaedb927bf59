"""Conforming triangular meshes with edge topology, region tags and boundary tags.

Conventions
-----------
* Triangles are stored counter-clockwise; local edge ``i`` is opposite vertex ``i``
  and runs from vertex ``i+1`` to vertex ``i+2``.
* Edges are stored as ``(lo, hi)`` node pairs.  The global edge normal is the
  ``lo -> hi`` direction rotated by -90 degrees, i.e. ``(dy, -dx) / length``.
* ``edge_sign[t, i]`` is +1 when the global normal of local edge ``i`` points
  out of triangle ``t`` and -1 otherwise.

Mesh file grammar (UTF-8, LF)::

    pfb-mesh 1
    nodes N
    <id> <x> <y>                       (N lines, ids 0..N-1)
    triangles T
    <id> <v0> <v1> <v2> <region>       (T lines, region is an integer)
    edges E
    <id> <lo> <hi> <tag>               (E lines, tag "-" for untagged edges)

Blank lines and lines starting with ``#`` are ignored.  Coordinates are written
with ``repr`` so that save/load is an exact round trip.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial import Delaunay

from .errors import (
    GeometryError,
    IncompleteBoundaryError,
    InvalidArgumentError,
    MeshParseError,
)

NO_TAG = None


def _readonly(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    points: np.ndarray  # (N, 2)
    triangles: np.ndarray  # (T, 3), counter-clockwise
    edges: np.ndarray  # (E, 2), lo < hi
    tri_edges: np.ndarray  # (T, 3), local edge i opposite vertex i
    edge_tris: np.ndarray  # (E, 2), second entry -1 on the boundary
    regions: np.ndarray  # (T,) int region tags
    boundary_tags: tuple = field(default=())  # length E, str or None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_triangles(cls, points, triangles, regions=None, boundary_tags=None):
        """Build the edge topology from raw node coordinates and connectivity.

        Clockwise triangles are flipped.  ``boundary_tags`` may be a mapping
        ``(lo, hi) -> tag`` or a full per-edge sequence matching the sorted
        edge order.
        """
        points = np.asarray(points, dtype=float)
        tris = np.array(triangles, dtype=np.int64, copy=True)
        if points.ndim != 2 or points.shape[1] != 2:
            raise InvalidArgumentError("points must have shape (N, 2)")
        if tris.ndim != 2 or tris.shape[1] != 3 or len(tris) == 0:
            raise InvalidArgumentError("triangles must have shape (T, 3), T >= 1")
        if not np.all(np.isfinite(points)):
            raise InvalidArgumentError("node coordinates must be finite")
        if tris.min() < 0 or tris.max() >= len(points):
            raise InvalidArgumentError("triangle references a missing node")

        area2 = _signed_area2(points, tris)
        flip = area2 < 0
        tris[flip] = tris[flip][:, [0, 2, 1]]
        area2 = np.abs(area2)
        e = points[tris[:, [1, 2, 0]]] - points[tris[:, [2, 0, 1]]]
        lmax2 = np.max(np.sum(e * e, axis=2), axis=1)
        bad = area2 <= 2e-14 * lmax2
        if np.any(bad):
            raise GeometryError(f"degenerate triangle(s): {np.flatnonzero(bad)[:5].tolist()}")

        local = np.stack([tris[:, [1, 2]], tris[:, [2, 0]], tris[:, [0, 1]]], axis=1)
        flat = np.sort(local.reshape(-1, 2), axis=1)
        edges, inverse = np.unique(flat, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        tri_edges = inverse.reshape(-1, 3)

        counts = np.bincount(inverse, minlength=len(edges))
        if np.any(counts > 2):
            raise GeometryError("non-manifold edge shared by more than two triangles")
        edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
        owner = np.repeat(np.arange(len(tris)), 3)
        order = np.argsort(inverse, kind="stable")
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        sorted_owner = owner[order]
        edge_tris[:, 0] = sorted_owner[starts]
        two = counts == 2
        edge_tris[two, 1] = sorted_owner[starts[two] + 1]

        if regions is None:
            regions = np.zeros(len(tris), dtype=np.int64)
        regions = np.asarray(regions, dtype=np.int64)
        if regions.shape != (len(tris),):
            raise InvalidArgumentError("regions must have one entry per triangle")

        if boundary_tags is None:
            tags = (NO_TAG,) * len(edges)
        elif isinstance(boundary_tags, dict):
            lookup = {tuple(sorted(k)): v for k, v in boundary_tags.items()}
            tags = tuple(lookup.get((int(a), int(b)), NO_TAG) for a, b in edges)
        else:
            tags = tuple(boundary_tags)
            if len(tags) != len(edges):
                raise InvalidArgumentError("boundary_tags must have one entry per edge")

        return cls(
            points=_readonly(points, float),
            triangles=_readonly(tris, np.int64),
            edges=_readonly(edges, np.int64),
            tri_edges=_readonly(tri_edges, np.int64),
            edge_tris=_readonly(edge_tris, np.int64),
            regions=_readonly(regions, np.int64),
            boundary_tags=tags,
        )

    # -- sizes ----------------------------------------------------------------

    @property
    def n_nodes(self):
        return len(self.points)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    # -- geometry -------------------------------------------------------------

    @cached_property
    def corners(self):
        """Vertex coordinates per triangle, shape (T, 3, 2)."""
        return self.points[self.triangles]

    @cached_property
    def signed_areas(self):
        return 0.5 * _signed_area2(self.points, self.triangles)

    @cached_property
    def areas(self):
        return np.abs(self.signed_areas)

    @cached_property
    def centroids(self):
        return self.corners.mean(axis=1)

    @cached_property
    def edge_vectors(self):
        return self.points[self.edges[:, 1]] - self.points[self.edges[:, 0]]

    @cached_property
    def edge_lengths(self):
        return np.hypot(self.edge_vectors[:, 0], self.edge_vectors[:, 1])

    @cached_property
    def edge_normals(self):
        """Global unit normals: lo->hi direction rotated by -90 degrees."""
        d = self.edge_vectors
        return np.column_stack([d[:, 1], -d[:, 0]]) / self.edge_lengths[:, None]

    @cached_property
    def edge_midpoints(self):
        return 0.5 * (self.points[self.edges[:, 0]] + self.points[self.edges[:, 1]])

    @cached_property
    def edge_sign(self):
        """(T, 3) orientation of the global edge normal relative to each triangle."""
        t = self.triangles
        start = t[:, [1, 2, 0]]
        end = t[:, [2, 0, 1]]
        return np.where(start < end, 1.0, -1.0)

    @cached_property
    def gradients(self):
        """Gradients of the P1 hat functions, shape (T, 3, 2)."""
        c = self.corners
        # grad N_i = rot(edge i) / (2A), edge i runs from vertex i+1 to i+2
        e = c[:, [2, 0, 1]] - c[:, [1, 2, 0]]
        twice_area = 2.0 * self.signed_areas
        return np.stack([-e[:, :, 1], e[:, :, 0]], axis=2) / twice_area[:, None, None]

    # -- topology -------------------------------------------------------------

    @cached_property
    def boundary_edges(self):
        return np.flatnonzero(self.edge_tris[:, 1] < 0)

    @cached_property
    def boundary_nodes(self):
        return np.unique(self.edges[self.boundary_edges])

    @cached_property
    def outward_normals(self):
        """Outward unit normals of boundary edges, aligned with ``boundary_edges``."""
        be = self.boundary_edges
        t = self.edge_tris[be, 0]
        local = np.argmax(self.tri_edges[t] == be[:, None], axis=1)
        s = self.edge_sign[t, local]
        return self.edge_normals[be] * s[:, None]

    def boundary_edge_owner(self, edges):
        """Owning triangle and local index for each (boundary) edge."""
        edges = np.asarray(edges, dtype=np.int64)
        t = self.edge_tris[edges, 0]
        local = np.argmax(self.tri_edges[t] == edges[:, None], axis=1)
        return t, local

    def edges_with_tag(self, tag):
        return np.array(
            [e for e, g in enumerate(self.boundary_tags) if g == tag], dtype=np.int64
        )

    @cached_property
    def tag_names(self):
        return sorted({g for g in self.boundary_tags if g is not None})

    @cached_property
    def region_names(self):
        return sorted(set(self.regions.tolist()))

    def locate(self, xy, tol=1e-12):
        """Index of the lowest-numbered triangle containing each point, -1 if none."""
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        out = np.full(len(xy), -1, dtype=np.int64)
        c = self.corners
        lo = c.min(axis=1) - tol
        hi = c.max(axis=1) + tol
        grads = self.gradients
        for k, p in enumerate(xy):
            cand = np.flatnonzero(np.all((p >= lo) & (p <= hi), axis=1))
            if len(cand) == 0:
                continue
            lam = _barycentric(c[cand], grads[cand], p)
            inside = np.all(lam >= -tol * 1e3, axis=1)
            if np.any(inside):
                out[k] = cand[np.argmax(inside)]
        return out

    def barycentric(self, tri, xy):
        tri = np.atleast_1d(tri)
        xy = np.atleast_2d(xy)
        return _barycentric(self.corners[tri], self.gradients[tri], xy)

    def euler_characteristic(self):
        return self.n_nodes - self.n_edges + self.n_triangles + 1

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.regions, other.regions)
            and tuple(self.boundary_tags) == tuple(other.boundary_tags)
        )

    __hash__ = None


def _signed_area2(points, tris):
    a, b, c = points[tris[:, 0]], points[tris[:, 1]], points[tris[:, 2]]
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def _barycentric(corners, grads, p):
    # lambda_i(x) = 1/3 + grad N_i . (x - centroid)
    cen = corners.mean(axis=1)
    return 1.0 / 3.0 + np.einsum("tid,td->ti", grads, p - cen)


# -- generators -----------------------------------------------------------------


def generate_tensor(xs, ys, tag_sides=True):
    """Split each cell of a tensor-product grid along its lower-left to upper-right diagonal."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or len(ys) < 2 or np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise InvalidArgumentError("grid lines must be strictly increasing with >= 2 entries")
    nx, ny = len(xs) - 1, len(ys) - 1
    X, Y = np.meshgrid(xs, ys)
    points = np.column_stack([X.ravel(), Y.ravel()])
    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    a = (j * (nx + 1) + i).ravel()
    b, c, d = a + 1, a + nx + 2, a + nx + 1
    tris = np.empty((2 * nx * ny, 3), dtype=np.int64)
    tris[0::2] = np.column_stack([a, b, c])
    tris[1::2] = np.column_stack([a, c, d])
    mesh = Mesh.from_triangles(points, tris)
    if tag_sides:
        mesh = mark_boundaries(mesh, box_sides(xs[0], xs[-1], ys[0], ys[-1]))
    return mesh


def generate_structured(nx, ny, bbox=(0.0, 1.0, 0.0, 1.0), tag_sides=True):
    """Uniform ``nx`` by ``ny`` grid over ``bbox = (xmin, xmax, ymin, ymax)``.

    Boundary edges are tagged ``left``, ``right``, ``bottom`` and ``top``.
    """
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise InvalidArgumentError(f"nx, ny must be positive integers, got {nx}, {ny}")
    x0, x1, y0, y1 = map(float, bbox)
    if not (x1 > x0 and y1 > y0):
        raise InvalidArgumentError(f"degenerate bounding box {bbox}")
    return generate_tensor(
        np.linspace(x0, x1, int(nx) + 1), np.linspace(y0, y1, int(ny) + 1), tag_sides
    )


def graded_lines(start, stop, breaks=(), refine=(), h_min=None, h_max=None, growth=1.3):
    """Grid coordinates on ``[start, stop]`` containing every break point exactly.

    Cell size grows geometrically (factor ``growth``) away from the ``refine``
    points, from ``h_min`` up to ``h_max``.
    """
    start, stop = float(start), float(stop)
    h_max = (stop - start) / 10 if h_max is None else float(h_max)
    h_min = h_max if h_min is None else float(h_min)
    refine = np.asarray(list(refine), dtype=float)
    knots = sorted({start, stop, *[float(b) for b in breaks if start < b < stop]})

    def size(x):
        if len(refine) == 0:
            return np.full_like(x, h_max)
        d = np.min(np.abs(x[:, None] - refine[None, :]), axis=1)
        return np.minimum(h_max, h_min + (growth - 1.0) * d)

    out = [knots[0]]
    for a, b in zip(knots[:-1], knots[1:]):
        s = np.linspace(a, b, 2001)
        density = 1.0 / size(s)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(s))])
        n = max(1, int(np.ceil(cum[-1] - 1e-9)))
        targets = np.linspace(0.0, cum[-1], n + 1)[1:-1]
        out.extend(np.interp(targets, cum, s).tolist())
        out.append(b)
    return np.array(out)


def box_sides(x0, x1, y0, y1, tol=1e-9):
    """Boundary classifier naming the four sides of an axis-aligned box."""
    span = max(x1 - x0, y1 - y0)

    def classify(x, y):
        if abs(x - x0) <= tol * span:
            return "left"
        if abs(x - x1) <= tol * span:
            return "right"
        if abs(y - y0) <= tol * span:
            return "bottom"
        if abs(y - y1) <= tol * span:
            return "top"
        return None

    return classify


def generate_disk_inclusion(
    width=1.0,
    height=1.0,
    radius=None,
    center=None,
    n_side=16,
    n_circle=None,
    fill_spacing=None,
    target_nodes=None,
    smooth_iters=30,
):
    """Unstructured mesh of a rectangle whose triangles conform to a polygonal circle.

    Region 1 is the matrix, region 2 the disk.  ``n_side`` boundary segments are
    placed on each side; interior points come from a hexagonal lattice that is
    relaxed by Laplacian smoothing before the final Delaunay triangulation.
    When ``target_nodes`` is given the lattice spacing is searched so the node
    count lands as close to it as the lattice allows.
    """
    radius = 0.2 * width if radius is None else float(radius)
    cx, cy = center if center is not None else (0.5 * width, 0.5 * height)
    if radius <= 0 or cx - radius <= 0 or cx + radius >= width or cy - radius <= 0 or cy + radius >= height:
        raise InvalidArgumentError("disk must lie strictly inside the rectangle")
    h_side = min(width, height) / n_side
    h = h_side if fill_spacing is None else float(fill_spacing)
    if n_circle is None:
        n_circle = max(8, int(round(2 * np.pi * radius / (0.75 * h))))
    if target_nodes is not None:
        best = None
        for hh in np.linspace(0.4 * h, 1.5 * h, 221):
            pts, _ = _inclusion_points(width, height, radius, cx, cy, n_side, n_circle, hh)
            score = (abs(len(pts) - target_nodes), -hh)
            if best is None or score < best[0]:
                best = (score, hh)
        h = best[1]
    pts, n_fixed = _inclusion_points(width, height, radius, cx, cy, n_side, n_circle, h)
    for _ in range(smooth_iters):
        tri = Delaunay(pts).simplices
        nbr_sum = np.zeros_like(pts)
        nbr_cnt = np.zeros(len(pts))
        for a, b in ((0, 1), (1, 2), (2, 0)):
            np.add.at(nbr_sum, tri[:, a], pts[tri[:, b]])
            np.add.at(nbr_sum, tri[:, b], pts[tri[:, a]])
            np.add.at(nbr_cnt, tri[:, a], 1)
            np.add.at(nbr_cnt, tri[:, b], 1)
        avg = nbr_sum / nbr_cnt[:, None]
        pts[n_fixed:] = 0.5 * pts[n_fixed:] + 0.5 * avg[n_fixed:]
    tris = Delaunay(pts).simplices

    mesh = Mesh.from_triangles(pts, tris)
    mesh = mark_regions(
        mesh, lambda x, y: 2 if (x - cx) ** 2 + (y - cy) ** 2 < radius**2 else 1
    )
    return mark_boundaries(mesh, box_sides(0.0, width, 0.0, height, tol=1e-9))


def _inclusion_points(width, height, radius, cx, cy, n_side, n_circle, h):
    h_side = min(width, height) / n_side

    nx_b = max(1, int(round(width / h_side)))
    ny_b = max(1, int(round(height / h_side)))
    bx = np.linspace(0, width, nx_b + 1)
    by = np.linspace(0, height, ny_b + 1)
    boundary = np.concatenate(
        [
            np.column_stack([bx, np.zeros_like(bx)]),
            np.column_stack([bx, np.full_like(bx, height)]),
            np.column_stack([np.zeros(ny_b - 1), by[1:-1]]),
            np.column_stack([np.full(ny_b - 1, width), by[1:-1]]),
        ]
    )
    theta = 2 * np.pi * np.arange(n_circle) / n_circle
    hc = 2 * np.pi * radius / n_circle
    circle = np.column_stack([cx + radius * np.cos(theta), cy + radius * np.sin(theta)])

    # hexagonal fill lattice
    dy = h * np.sqrt(3) / 2
    rows = np.arange(dy / 2, height, dy)
    fill = []
    for r, y in enumerate(rows):
        off = 0.5 * h if r % 2 else 0.0
        xs = np.arange(off + h / 2, width, h)
        fill.append(np.column_stack([xs, np.full_like(xs, y)]))
    fill = np.concatenate(fill)
    dist_c = np.abs(np.hypot(fill[:, 0] - cx, fill[:, 1] - cy) - radius)
    dist_b = np.minimum.reduce([fill[:, 0], width - fill[:, 0], fill[:, 1], height - fill[:, 1]])
    keep = (dist_c > 0.6 * max(h, hc)) & (dist_b > 0.6 * h)
    fill = fill[keep]

    fixed = np.concatenate([boundary, circle])
    return np.concatenate([fixed, fill]), len(fixed)


# -- tagging --------------------------------------------------------------------


def mark_regions(mesh: Mesh, classifier: Callable[[float, float], int]) -> Mesh:
    """Return a copy of ``mesh`` with each triangle tagged by its centroid."""
    c = mesh.centroids
    regions = np.fromiter((classifier(x, y) for x, y in c), dtype=np.int64, count=len(c))
    return replace(mesh, regions=_readonly(regions, np.int64))


def mark_boundaries(
    mesh: Mesh, classifier: Callable[[float, float], Optional[str]], keep_existing=False
) -> Mesh:
    """Tag boundary edges by their midpoints.

    Raises ``IncompleteBoundaryError`` when any boundary edge is left untagged.
    """
    tags = list(mesh.boundary_tags) if keep_existing else [NO_TAG] * mesh.n_edges
    mid = mesh.edge_midpoints
    missing = []
    for e in mesh.boundary_edges:
        tag = classifier(mid[e, 0], mid[e, 1])
        if tag is None:
            if keep_existing and tags[e] is not None:
                continue
            missing.append(int(e))
            continue
        tag = str(tag)
        if not tag or any(ch.isspace() for ch in tag) or tag == "-":
            raise InvalidArgumentError(f"invalid boundary tag {tag!r}")
        tags[e] = tag
    if missing:
        m = mid[missing[0]]
        raise IncompleteBoundaryError(
            f"{len(missing)} boundary edge(s) left untagged, first at ({m[0]:g}, {m[1]:g})"
        )
    return replace(mesh, boundary_tags=tuple(tags))


def relabel_nodes(mesh: Mesh, perm: Sequence[int]) -> Mesh:
    """Renumber nodes: old node ``i`` becomes node ``perm[i]``."""
    perm = np.asarray(perm, dtype=np.int64)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    points = mesh.points[inv]
    tris = perm[mesh.triangles]
    tag_map = {
        (int(perm[a]), int(perm[b])): mesh.boundary_tags[e]
        for e, (a, b) in enumerate(mesh.edges)
        if mesh.boundary_tags[e] is not None
    }
    return Mesh.from_triangles(points, tris, mesh.regions, tag_map)


# -- file I/O -------------------------------------------------------------------


def save_mesh(mesh: Mesh, path) -> None:
    lines = ["pfb-mesh 1", f"nodes {mesh.n_nodes}"]
    lines += [f"{i} {x!r} {y!r}" for i, (x, y) in enumerate(mesh.points.tolist())]
    lines.append(f"triangles {mesh.n_triangles}")
    lines += [
        f"{i} {a} {b} {c} {r}"
        for i, ((a, b, c), r) in enumerate(zip(mesh.triangles.tolist(), mesh.regions.tolist()))
    ]
    lines.append(f"edges {mesh.n_edges}")
    lines += [
        f"{i} {a} {b} {'-' if g is None else g}"
        for i, ((a, b), g) in enumerate(zip(mesh.edges.tolist(), mesh.boundary_tags))
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_mesh(path) -> Mesh:
    text = Path(path).read_text(encoding="utf-8")
    return parse_mesh(text)


def parse_mesh(text: str) -> Mesh:
    rows = [
        (n, ln.split())
        for n, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not rows:
        raise MeshParseError("empty mesh file", line=1)
    pos = 0

    def header(name):
        nonlocal pos
        if pos >= len(rows):
            raise MeshParseError(f"missing '{name}' section", line=rows[-1][0] + 1)
        n, tok = rows[pos]
        if len(tok) != 2 or tok[0] != name:
            raise MeshParseError(f"expected '{name} <count>'", line=n)
        try:
            count = int(tok[1])
        except ValueError:
            raise MeshParseError(f"bad count {tok[1]!r}", line=n) from None
        if count < 0:
            raise MeshParseError("negative count", line=n)
        pos += 1
        return count

    def section(count, ncols, convert, what):
        nonlocal pos
        out = [None] * count
        for _ in range(count):
            if pos >= len(rows):
                raise MeshParseError(f"truncated {what} section", line=rows[-1][0] + 1)
            n, tok = rows[pos]
            pos += 1
            if len(tok) != ncols:
                raise MeshParseError(f"{what} line needs {ncols} fields, got {len(tok)}", line=n)
            try:
                idx = int(tok[0])
                vals = convert(tok[1:])
            except ValueError as exc:
                raise MeshParseError(f"bad {what} entry: {exc}", line=n) from None
            if not 0 <= idx < count:
                raise MeshParseError(f"{what} id {idx} out of range", line=n)
            if out[idx] is not None:
                raise MeshParseError(f"duplicate {what} id {idx}", line=n)
            out[idx] = (n, vals)
        return out

    n0, tok0 = rows[0]
    if tok0 != ["pfb-mesh", "1"]:
        raise MeshParseError("expected header 'pfb-mesh 1'", line=n0)
    pos = 1
    nodes = section(header("nodes"), 3, lambda t: [float(v) for v in t], "node")
    tris = section(header("triangles"), 5, lambda t: [int(v) for v in t], "triangle")
    edges = section(header("edges"), 4, lambda t: [int(t[0]), int(t[1]), t[2]], "edge")
    if pos != len(rows):
        raise MeshParseError("trailing content after edges section", line=rows[pos][0])

    points = np.array([v for _, v in nodes], dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(points)):
        raise MeshParseError("non-finite coordinate", line=nodes[0][0])
    conn = np.array([v[:3] for _, v in tris], dtype=np.int64).reshape(-1, 3)
    regions = np.array([v[3] for _, v in tris], dtype=np.int64)
    for n, v in tris:
        if min(v[:3]) < 0 or max(v[:3]) >= len(points):
            raise MeshParseError("triangle references a missing node", line=n)
    try:
        mesh = Mesh.from_triangles(points, conn, regions)
    except (GeometryError, InvalidArgumentError) as exc:
        raise MeshParseError(str(exc), line=tris[0][0] if tris else n0) from None
    if not np.array_equal(np.asarray(conn), mesh.triangles):
        raise MeshParseError("triangles must be counter-clockwise", line=tris[0][0])
    if len(edges) != mesh.n_edges:
        raise MeshParseError(
            f"edge count {len(edges)} does not match topology ({mesh.n_edges})",
            line=edges[0][0] if edges else n0,
        )
    tags = []
    for e, (n, (a, b, g)) in enumerate(edges):
        if (a, b) != tuple(mesh.edges[e]):
            raise MeshParseError(f"edge {e} should be ({mesh.edges[e][0]}, {mesh.edges[e][1]})", line=n)
        tags.append(None if g == "-" else g)
    return replace(mesh, boundary_tags=tuple(tags))
