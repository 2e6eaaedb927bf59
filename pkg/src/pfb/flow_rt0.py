"""Classical mixed formulation on lowest-order Raviart-Thomas triangles.

Unknowns are ordered ``[u_0 .. u_{E-1}, p_0 .. p_{T-1}]`` where ``u_e`` is the
normal velocity ``v . n_e`` across edge ``e`` (global normal) and ``p_t`` the
constant pressure of triangle ``t``.  On triangle ``K`` with vertices ``p_i``
the local basis is

    psi_i(x) = s_i * l_i / (2 |K|) * (x - p_i),

so that ``psi_i . n_e = 1`` on its own edge, ``div psi_i = s_i l_i / |K|`` and
``int_K div psi_i = s_i l_i``.  The discrete equations are

    M u - B^T p = (w, rho b) - <w . n, p0>_{Gamma_p}
       - B u    = - int_K phi

with ``M = (psi_i, mu/k psi_j)`` and ``B_Ki = s_i l_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .linalg import SparseSystem, TripletBuffer, apply_dirichlet, compress
from .materials import element_mobility
from .problem import edge_integrals
from .quadrature import MIDPOINT_BARY


@dataclass(frozen=True)
class Rt0Layout:
    n_edges: int
    n_tri: int

    @classmethod
    def of(cls, mesh):
        return cls(mesh.n_edges, mesh.n_triangles)

    @property
    def n_dofs(self):
        return self.n_edges + self.n_tri

    def pressure_slice(self):
        return slice(self.n_edges, self.n_dofs)


def _check_geometry(areas, lengths):
    bad = areas < 1e-14 * np.max(lengths, axis=-1) ** 2
    if np.any(bad):
        raise GeometryError(f"degenerate triangle(s) {np.flatnonzero(bad)[:5].tolist()}")


def element_matrices_rt0(corners, mobility, signs=(1.0, 1.0, 1.0)):
    """Velocity mass block ``M`` (3x3) and divergence row ``B`` (3,) of one triangle.

    ``corners`` is (3, 2), counter-clockwise.  ``mobility`` is ``k/mu``.
    """
    M, B = _element_blocks(np.asarray(corners, float)[None], np.atleast_1d(float(mobility)),
                           np.asarray(signs, float)[None])
    return M[0], B[0]


def _element_blocks(corners, mobility, signs):
    e = corners[:, [2, 0, 1]] - corners[:, [1, 2, 0]]
    lengths = np.hypot(e[..., 0], e[..., 1])
    d1 = corners[:, 1] - corners[:, 0]
    d2 = corners[:, 2] - corners[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    if np.any(area <= 0):
        raise GeometryError("triangles must be counter-clockwise with positive area")
    _check_geometry(area, lengths)
    coef = signs * lengths / (2.0 * area[:, None])  # (T, 3)
    mids = np.einsum("qa,tad->tqd", MIDPOINT_BARY, corners)  # (T, Q, 2)
    rel = mids[:, :, None, :] - corners[:, None, :, :]  # (T, Q, i, 2)
    gram = np.einsum("tqid,tqjd->tij", rel, rel) * (area / 3.0)[:, None, None]
    M = gram * coef[:, :, None] * coef[:, None, :] / mobility[:, None, None]
    B = signs * lengths
    return M, B


def _boundary_owner_sign(mesh, edges):
    t, local = mesh.boundary_edge_owner(edges)
    return mesh.edge_sign[t, local]


def assemble_rt0(problem, pressure_iterate=None) -> SparseSystem:
    """Assemble the saddle-point system with boundary conditions applied."""
    mesh = problem.mesh
    mats = problem.materials
    E, T = mesh.n_edges, mesh.n_triangles
    n = E + T
    mob = element_mobility(mats, mesh, pressure_iterate)
    M, B = _element_blocks(mesh.corners, mob, mesh.edge_sign)

    buf = TripletBuffer()
    te = mesh.tri_edges
    buf.add_block(te, te, M)
    prow = E + np.arange(T)
    buf.add(np.repeat(prow, 3), te.ravel(), -B.ravel())
    buf.add(te.ravel(), np.repeat(prow, 3), -B.ravel())
    A = compress(buf, n)

    rhs = np.zeros(n)
    rb = mats.rho_b(mesh)
    if np.any(rb):
        # int_K psi_i = s_i l_i / 2 * (centroid - p_i)
        rel = mesh.centroids[:, None, :] - mesh.corners
        Fw = 0.5 * B * np.einsum("tid,td->ti", rel, rb)
        np.add.at(rhs, te.ravel(), Fw.ravel())
    rhs[E:] = -problem.source_integrals()

    for edges, p0 in problem.tagged_edges(problem.pressure_bcs):
        s = _boundary_owner_sign(mesh, edges)
        total, _, _ = edge_integrals(mesh, edges, p0)
        np.add.at(rhs, edges, -s * total)

    fixed, values = [], []
    for edges, psi in problem.tagged_edges(problem.velocity_bcs):
        s = _boundary_owner_sign(mesh, edges)
        total, _, _ = edge_integrals(mesh, edges, psi)
        fixed.append(edges)
        values.append(s * total / mesh.edge_lengths[edges])
    if not problem.has_pressure_boundary:
        fixed.append(np.array([E]))
        values.append(np.array([0.0]))
    if fixed:
        A, rhs = apply_dirichlet(A, rhs, np.concatenate(fixed), np.concatenate(values))
    return SparseSystem(A, rhs)


def element_pressure_rt0(mesh, x):
    return np.asarray(x[mesh.n_edges:])


def basis_values(mesh, tris, xy):
    """RT0 basis vectors ``psi_i`` at points ``xy`` (one point per entry of ``tris``)."""
    tris = np.asarray(tris)
    c = mesh.corners[tris]
    coef = mesh.edge_sign[tris] * mesh.edge_lengths[mesh.tri_edges[tris]] / (2.0 * mesh.areas[tris, None])
    return coef[:, :, None] * (np.asarray(xy)[:, None, :] - c)


def evaluate_velocity_rt0(mesh, x, tris, xy):
    """Velocity at points ``xy`` inside triangles ``tris``; shape (P, 2)."""
    tris = np.atleast_1d(np.asarray(tris, dtype=np.int64))
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    u = np.asarray(x)[mesh.tri_edges[tris]]
    return np.einsum("pi,pid->pd", u, basis_values(mesh, tris, xy))


def velocity_at_bary_rt0(mesh, x, bary):
    """Velocity at barycentric points on every element, shape (T, Q, 2)."""
    pts = np.einsum("qa,tad->tqd", bary, mesh.corners)
    coef = mesh.edge_sign * mesh.edge_lengths[mesh.tri_edges] / (2.0 * mesh.areas[:, None])
    u = np.asarray(x)[mesh.tri_edges] * coef
    rel = pts[:, :, None, :] - mesh.corners[:, None, :, :]
    return np.einsum("ti,tqid->tqd", u, rel)


def project_constant_rt0(mesh, v):
    """DOF vector of the constant field ``v`` (RT0 contains constants)."""
    x = np.zeros(mesh.n_edges + mesh.n_triangles)
    x[: mesh.n_edges] = mesh.edge_normals @ np.asarray(v, dtype=float)
    return x
