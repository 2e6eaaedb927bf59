"""Equal-order (P1/P1) variational multiscale stabilized Darcy formulation.

Unknowns are blocked: ``[vx (N), vy (N), p (N)]``.  With ``a = k/mu`` the
element contributions are

    vv:  1/(2a) (w, v)
    vp:  -(div w, p) - 1/2 (w, grad p)
    pv:  -(q, div v) - 1/2 (grad q, v)
    pp:  -a/2 (grad q, grad p)
    rhs_w:  1/2 (w, rho b) - <w . n, p0>_{Gamma_p}
    rhs_q:  -a/2 (grad q, rho b) - (q, phi)

which is the expansion of the Galerkin mixed form minus one half of the
adjoint-weighted Darcy residual.  Integrals are evaluated exactly (P1 data,
element-constant coefficients).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import GeometryError
from .linalg import SparseSystem, TripletBuffer, apply_dirichlet, compress
from .materials import element_mobility
from .problem import as_function, edge_integrals

PARALLEL_TOL = 1e-8


@dataclass(frozen=True)
class VmsLayout:
    n_nodes: int

    @classmethod
    def of(cls, mesh):
        return cls(mesh.n_nodes)

    @property
    def n_dofs(self):
        return 3 * self.n_nodes


def _p1_geometry(corners):
    d1 = corners[:, 1] - corners[:, 0]
    d2 = corners[:, 2] - corners[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    e = corners[:, [2, 0, 1]] - corners[:, [1, 2, 0]]
    lmax = np.max(np.hypot(e[..., 0], e[..., 1]), axis=1)
    if np.any(area < 1e-14 * lmax**2):
        raise GeometryError("degenerate or clockwise triangle")
    G = np.stack([-e[..., 1], e[..., 0]], axis=2) / (2.0 * area[:, None, None])
    return area, G


def _element_blocks(corners, mobility, rho_b):
    """Element matrices (T, 9, 9) in local order [vx0..2, vy0..2, p0..2] and RHS (T, 9)."""
    area, G = _p1_geometry(corners)
    T = len(area)
    mass = (np.ones((3, 3)) + np.eye(3)) / 12.0
    K = np.zeros((T, 9, 9))
    Mv = 0.5 / mobility[:, None, None] * area[:, None, None] * mass
    K[:, 0:3, 0:3] = Mv
    K[:, 3:6, 3:6] = Mv
    a3 = (area / 3.0)[:, None, None]
    for c in range(2):
        # row a (velocity test), column b (pressure trial)
        vp = -G[:, :, c][:, :, None] * a3 - 0.5 * G[:, :, c][:, None, :] * a3
        K[:, 3 * c : 3 * c + 3, 6:9] = vp
        K[:, 6:9, 3 * c : 3 * c + 3] = np.transpose(vp, (0, 2, 1))
    K[:, 6:9, 6:9] = -0.5 * (mobility * area)[:, None, None] * np.einsum("tad,tbd->tab", G, G)

    F = np.zeros((T, 9))
    F[:, 0:3] = 0.5 * (rho_b[:, 0] * area / 3.0)[:, None]
    F[:, 3:6] = 0.5 * (rho_b[:, 1] * area / 3.0)[:, None]
    F[:, 6:9] = -0.5 * (mobility * area)[:, None] * np.einsum("tad,td->ta", G, rho_b)
    return K, F


def element_matrices_vms(corners, mobility, rho_b=(0.0, 0.0), source_moments=None):
    """9x9 element matrix and 9-vector RHS for one counter-clockwise triangle.

    Local ordering is ``[vx_0, vx_1, vx_2, vy_0, vy_1, vy_2, p_0, p_1, p_2]``.
    """
    K, F = _element_blocks(
        np.asarray(corners, float)[None],
        np.atleast_1d(float(mobility)),
        np.asarray(rho_b, float)[None],
    )
    if source_moments is not None:
        F[0, 6:9] -= np.asarray(source_moments, float)
    return K[0], F[0]


def element_dofs(mesh):
    N = mesh.n_nodes
    t = mesh.triangles
    return np.concatenate([t, t + N, t + 2 * N], axis=1)


def nodal_pressure_mean(mesh, x):
    N = mesh.n_nodes
    return np.asarray(x)[2 * N + mesh.triangles].mean(axis=1)


def _velocity_constraints(problem):
    """Per boundary node: prescribed normal velocity constraints from adjacent Gamma_v edges."""
    mesh = problem.mesh
    be = mesh.boundary_edges
    normals = dict(zip(be.tolist(), mesh.outward_normals))
    per_node = {}
    for tag in sorted(problem.velocity_bcs):
        psi = as_function(problem.velocity_bcs[tag])
        for e in mesh.edges_with_tag(tag).tolist():
            n = normals[e]
            for node in mesh.edges[e]:
                x, y = mesh.points[node]
                val = float(psi(np.array(x), np.array(y)))
                per_node.setdefault(int(node), []).append((n, val))
    return per_node


def _resolve_constraint(entries):
    """Collapse a node's constraints to either one normal or a full vector."""
    n0 = entries[0][0]
    other = None
    for n, _ in entries[1:]:
        if abs(n0[0] * n[1] - n0[1] * n[0]) > PARALLEL_TOL:
            other = n
            break
    if other is None:
        normal = np.mean([np.sign(n @ n0) * n for n, _ in entries], axis=0)
        normal /= np.linalg.norm(normal)
        value = float(np.mean([v * np.sign(n @ n0) for n, v in entries]))
        return "normal", normal, value
    # corner: two independent normal constraints fix the full vector
    v0 = np.mean([v for n, v in entries if abs(n0[0] * n[1] - n0[1] * n[0]) <= PARALLEL_TOL])
    v1 = np.mean([v for n, v in entries if abs(other[0] * n[1] - other[1] * n[0]) <= PARALLEL_TOL])
    vec = np.linalg.solve(np.array([n0, other]), np.array([v0, v1]))
    return "full", None, vec


def assemble_vms(problem, pressure_iterate=None):
    """Assemble the stabilized system.

    Returns ``(system, Q)``: the system is posed in rotated nodal coordinates
    (normal/tangential at nodes with a single velocity constraint) and the
    physical DOF vector is ``Q @ y``.
    """
    mesh = problem.mesh
    mats = problem.materials
    N = mesh.n_nodes
    n = 3 * N
    p_elem = None if pressure_iterate is None else np.asarray(pressure_iterate)
    mob = element_mobility(mats, mesh, p_elem)
    K, F = _element_blocks(mesh.corners, mob, mats.rho_b(mesh))
    F[:, 6:9] -= problem.source_moments()

    dofs = element_dofs(mesh)
    buf = TripletBuffer()
    buf.add_block(dofs, dofs, K)
    A = compress(buf, n)
    rhs = np.zeros(n)
    np.add.at(rhs, dofs.ravel(), F.ravel())

    if problem.pressure_bcs:
        be = mesh.boundary_edges
        pos = {e: i for i, e in enumerate(be.tolist())}
        for edges, p0 in problem.tagged_edges(problem.pressure_bcs):
            nrm = mesh.outward_normals[[pos[e] for e in edges.tolist()]]
            _, lo, hi = edge_integrals(mesh, edges, p0)
            a, b = mesh.edges[edges, 0], mesh.edges[edges, 1]
            for c in range(2):
                np.add.at(rhs, a + c * N, -nrm[:, c] * lo)
                np.add.at(rhs, b + c * N, -nrm[:, c] * hi)

    rows, cols, vals = [], [], []
    fixed, values = [], []
    for node, entries in sorted(_velocity_constraints(problem).items()):
        kind, normal, value = _resolve_constraint(entries)
        if kind == "full":
            fixed += [node, node + N]
            values += [float(value[0]), float(value[1])]
        else:
            nx, ny = normal
            # local basis (n, t) with t = (-ny, nx); local slot vx carries v.n
            rows += [node, node, node + N, node + N]
            cols += [node, node + N, node, node + N]
            vals += [nx, -ny, ny, nx]
            fixed.append(node)
            values.append(value)
    rotated = np.array(sorted({r for r in rows}), dtype=np.int64)
    keep = np.ones(n)
    keep[rotated] = 0.0
    Q = sp.diags(keep) + sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
    Q = Q.tocsr()
    A = (Q.T @ A @ Q).tocsr()
    rhs = Q.T @ rhs

    if not problem.has_pressure_boundary:
        fixed.append(2 * N)
        values.append(0.0)
    A, rhs = apply_dirichlet(A, rhs, np.asarray(fixed, dtype=np.int64), np.asarray(values))
    return SparseSystem(A, rhs), Q


def evaluate_velocity_vms(mesh, x, tris, xy):
    """P1 interpolation of the nodal velocity at points ``xy`` in triangles ``tris``."""
    tris = np.atleast_1d(np.asarray(tris, dtype=np.int64))
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    N = mesh.n_nodes
    lam = np.einsum("pid,pd->pi", mesh.gradients[tris], xy - mesh.centroids[tris]) + 1.0 / 3.0
    nodes = mesh.triangles[tris]
    x = np.asarray(x)
    return np.column_stack([(lam * x[nodes]).sum(1), (lam * x[nodes + N]).sum(1)])


def velocity_at_bary_vms(mesh, x, bary):
    N = mesh.n_nodes
    x = np.asarray(x)
    t = mesh.triangles
    vx = x[t] @ bary.T
    vy = x[t + N] @ bary.T
    return np.stack([vx, vy], axis=2)


def pressure_at_bary_vms(mesh, x, bary):
    N = mesh.n_nodes
    return np.asarray(x)[2 * N + mesh.triangles] @ bary.T
