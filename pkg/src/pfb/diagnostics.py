"""Conservation, accuracy and problem-size metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .problem import source_integrals
from .quadrature import DEG5_BARY, DEG5_WEIGHTS, GAUSS2_T, GAUSS2_WEIGHTS


def _edge_gauss_bary():
    """Barycentric Gauss points on the three local edges, shape (6, 3).

    Local edge ``i`` runs from vertex ``i+1`` to vertex ``i+2``.
    """
    rows = []
    for i in range(3):
        for t in GAUSS2_T:
            lam = np.zeros(3)
            lam[(i + 1) % 3] = 1 - t
            lam[(i + 2) % 3] = t
            rows.append(lam)
    return np.array(rows)


EDGE_BARY = _edge_gauss_bary()


def element_outfluxes(solution):
    """``int_{dK} v . n_out`` per element and per local edge, shape (T, 3)."""
    mesh = solution.mesh
    v = solution.velocity_at_bary(EDGE_BARY).reshape(mesh.n_triangles, 3, 2, 2)
    c = mesh.corners
    e = c[:, [2, 0, 1]] - c[:, [1, 2, 0]]  # CCW edge vectors, |e| = length
    scaled_normal = np.stack([e[..., 1], -e[..., 0]], axis=2)  # n_out * length
    return np.einsum("tigd,tid,g->ti", v, scaled_normal, GAUSS2_WEIGHTS)


def boundary_fluxes(solution):
    """Outward flux ``int_e v . n`` of each boundary edge (aligned with ``mesh.boundary_edges``)."""
    mesh = solution.mesh
    t, local = mesh.boundary_edge_owner(mesh.boundary_edges)
    return element_outfluxes(solution)[t, local]


@dataclass
class MassBalanceReport:
    element: np.ndarray  # int_dK v.n - int_K phi, per element
    normalized: np.ndarray  # element value divided by element area
    global_imbalance: float  # int_Gamma v.n - int_Omega phi
    boundary_flux: float  # int_Gamma v.n
    flux_scale: float  # int_Gamma |v.n|
    top: np.ndarray  # element indices sorted by decreasing |element|
    top_centroids: np.ndarray

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.element)))

    @property
    def sum_elements(self):
        return float(self.element.sum())

    def as_dict(self, n_top=10):
        return {
            "max_abs": self.max_abs,
            "max_abs_normalized": float(np.max(np.abs(self.normalized))),
            "global_imbalance": self.global_imbalance,
            "boundary_flux": self.boundary_flux,
            "flux_scale": self.flux_scale,
            "top_elements": self.top[:n_top].tolist(),
        }


def element_mass_balance(solution, phi=None, n_top=10):
    mesh = solution.mesh
    if phi is None:
        phi = solution.problem.source
    src = source_integrals(mesh, phi)
    out = element_outfluxes(solution)
    elem = out.sum(axis=1) - src
    bt, bl = mesh.boundary_edge_owner(mesh.boundary_edges)
    bflux = out[bt, bl]
    order = np.argsort(-np.abs(elem), kind="stable")
    return MassBalanceReport(
        element=elem,
        normalized=elem / mesh.areas,
        global_imbalance=float(bflux.sum() - src.sum()),
        boundary_flux=float(bflux.sum()),
        flux_scale=float(np.abs(bflux).sum()),
        top=order,
        top_centroids=mesh.centroids[order[:n_top]],
    )


def segment_edges(mesh, x0, x1, y0, y1, tol=1e-9):
    """Edges whose both endpoints lie in the box ``[x0, x1] x [y0, y1]`` (use a flat box for a line)."""
    p = mesh.points[mesh.edges]
    inside = (
        (p[..., 0] >= x0 - tol) & (p[..., 0] <= x1 + tol) & (p[..., 1] >= y0 - tol) & (p[..., 1] <= y1 + tol)
    )
    return np.flatnonzero(inside.all(axis=1))


def leak_rate(concentration, velocity, edges, component=1):
    """``int c v_y`` over the given edges, 2-point Gauss per edge.

    ``concentration`` is a nodal array (or any object with a ``.c`` array);
    the velocity is evaluated inside the first triangle adjacent to each edge.
    """
    c = getattr(concentration, "c", concentration)
    c = np.asarray(c, dtype=float)
    mesh = velocity.mesh
    edges = np.asarray(edges, dtype=np.int64)
    if len(edges) == 0:
        return 0.0
    a = mesh.points[mesh.edges[edges, 0]]
    b = mesh.points[mesh.edges[edges, 1]]
    ca = c[mesh.edges[edges, 0]]
    cb = c[mesh.edges[edges, 1]]
    tris = mesh.edge_tris[edges, 0]
    L = mesh.edge_lengths[edges]
    total = 0.0
    for t, w in zip(GAUSS2_T, GAUSS2_WEIGHTS):
        xy = a + t * (b - a)
        v = velocity.velocity(tris, xy)[:, component]
        total += float(np.sum(w * L * ((1 - t) * ca + t * cb) * v))
    return total


def l2_errors(solution, v_exact, p_exact):
    """L2 norms of velocity and pressure errors by 7-point quadrature per element."""
    mesh = solution.mesh
    pts = np.einsum("qa,tad->tqd", DEG5_BARY, mesh.corners)
    x, y = pts[..., 0], pts[..., 1]
    ve = np.stack(np.broadcast_arrays(*v_exact(x, y)), axis=-1)
    vh = solution.velocity_at_bary(DEG5_BARY)
    ph = solution.pressure_at_bary(DEG5_BARY)
    pe = np.broadcast_to(p_exact(x, y), ph.shape)
    w = mesh.areas[:, None] * DEG5_WEIGHTS[None, :]
    ev = np.sqrt(np.sum(w * np.sum((vh - ve) ** 2, axis=-1)))
    ep = np.sqrt(np.sum(w * (ph - pe) ** 2))
    return float(ev), float(ep)


def convergence_rate(errors):
    """Least-squares slope of ``log e`` against ``log h``."""
    errors = list(errors)
    if len(errors) < 2:
        raise InvalidArgumentError("need at least two (h, error) pairs")
    h, e = np.array(errors, dtype=float).T
    if np.any(h <= 0) or np.any(e <= 0):
        raise InvalidArgumentError("h and errors must be positive")
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)


def dof_counts(mesh, formulation):
    """Total unknowns: edges plus triangles for RT0, three per node for VMS."""
    if formulation == "rt0":
        return mesh.n_edges + mesh.n_triangles
    if formulation == "vms":
        return 3 * mesh.n_nodes
    raise InvalidArgumentError(f"unknown formulation {formulation!r}")
