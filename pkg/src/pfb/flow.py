"""Flow solve orchestration: compatibility, datum, and Picard iteration on viscosity."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import flow_rt0, flow_vms
from .errors import IncompatibleDataError, NonlinearDivergenceError
from .linalg import solve_direct
from .problem import FlowProblem
from .quadrature import MIDPOINT_BARY

log = logging.getLogger(__name__)

PICARD_TOL = 1e-9
PICARD_MAX_ITER = 50
COMPAT_TOL = 1e-10


@dataclass
class FlowSolution:
    formulation: str
    problem: FlowProblem
    x: np.ndarray
    iterations: int = 1
    residual: float = 0.0
    history: list = field(default_factory=list)

    @property
    def mesh(self):
        return self.problem.mesh

    def velocity(self, tris, xy):
        """Velocity at points ``xy`` lying in triangles ``tris``."""
        if self.formulation == "rt0":
            return flow_rt0.evaluate_velocity_rt0(self.mesh, self.x, tris, xy)
        return flow_vms.evaluate_velocity_vms(self.mesh, self.x, tris, xy)

    def velocity_at_bary(self, bary):
        """Velocity at the same barycentric points on every triangle, shape (T, Q, 2)."""
        if self.formulation == "rt0":
            return flow_rt0.velocity_at_bary_rt0(self.mesh, self.x, bary)
        return flow_vms.velocity_at_bary_vms(self.mesh, self.x, bary)

    def pressure_at_bary(self, bary):
        if self.formulation == "rt0":
            p = self.element_pressure()
            return np.repeat(p[:, None], len(bary), axis=1)
        return flow_vms.pressure_at_bary_vms(self.mesh, self.x, bary)

    def element_pressure(self):
        """Element-mean pressure (the pressure DOF for RT0)."""
        if self.formulation == "rt0":
            return flow_rt0.element_pressure_rt0(self.mesh, self.x)
        return flow_vms.nodal_pressure_mean(self.mesh, self.x)

    def centroid_velocity(self):
        return self.velocity_at_bary(np.array([[1 / 3, 1 / 3, 1 / 3]]))[:, 0, :]

    def nodal_velocity(self):
        """Nodal (VMS) velocity, shape (N, 2); only defined for VMS."""
        if self.formulation != "vms":
            raise ValueError("nodal velocity exists only for the VMS formulation")
        N = self.mesh.n_nodes
        return np.column_stack([self.x[:N], self.x[N : 2 * N]])

    def nodal_pressure(self):
        if self.formulation != "vms":
            raise ValueError("nodal pressure exists only for the VMS formulation")
        return self.x[2 * self.mesh.n_nodes :]

    @property
    def n_dofs(self):
        return len(self.x)


def check_compatibility(problem: FlowProblem, tol=COMPAT_TOL):
    """Verify ``int phi = int psi`` when the whole boundary carries velocity data.

    Returns the violation magnitude (0.0 when a pressure boundary exists) and
    raises ``IncompatibleDataError`` when it exceeds ``tol`` times the data scale.
    """
    if problem.has_pressure_boundary:
        return 0.0
    src = problem.source_integrals()
    flux, flux_abs = problem.boundary_flux_data()
    violation = abs(src.sum() - flux)
    scale = max(np.abs(src).sum(), flux_abs)
    if violation > tol * scale and violation > 0:
        raise IncompatibleDataError(
            f"int phi = {src.sum():.6g} but boundary flux = {flux:.6g}", violation
        )
    return violation


def _assemble(problem, p_elem):
    if problem.formulation == "rt0":
        return flow_rt0.assemble_rt0(problem, p_elem), None
    return flow_vms.assemble_vms(problem, p_elem)


def _linear_solve(problem, p_elem):
    system, Q = _assemble(problem, p_elem)
    y = solve_direct(system)
    x = y if Q is None else Q @ y
    return system, Q, y, x


def _element_pressure(problem, x):
    if problem.formulation == "rt0":
        return flow_rt0.element_pressure_rt0(problem.mesh, x)
    return flow_vms.nodal_pressure_mean(problem.mesh, x)


def solve_flow(problem: FlowProblem, tol=PICARD_TOL, max_iter=PICARD_MAX_ITER, relaxation=1.0):
    """Solve the (possibly nonlinear) Darcy problem.

    With ``beta == 0`` this is a single linear solve.  Otherwise viscosity is
    lagged: each Picard step assembles with ``mu`` at the element-mean pressure
    of the previous iterate, starting from the ``beta = 0`` solution, until the
    relative update norm drops below ``tol``.  ``relaxation < 1`` damps the
    pressure fed back into the viscosity.
    """
    check_compatibility(problem)
    system, Q, y, x = _linear_solve(problem, None)
    scale = float(np.linalg.norm(system.rhs)) or 1.0
    if problem.materials.viscosity.is_linear:
        res = float(np.linalg.norm(system.matrix @ y - system.rhs)) / scale
        return FlowSolution(problem.formulation, problem, x, 1, res, [res])

    history = []
    p_feed = _element_pressure(problem, x)
    for it in range(1, max_iter + 1):
        system, Q, y_new, x_new = _linear_solve(problem, p_feed)
        update = np.linalg.norm(x_new - x) / max(np.linalg.norm(x_new), 1e-300)
        x = x_new
        p_new = _element_pressure(problem, x)
        p_feed = relaxation * p_new + (1.0 - relaxation) * p_feed
        history.append(float(update))
        log.debug("picard %d: relative update %.3e", it, update)
        if not np.isfinite(update):
            break
        if update <= tol:
            final, _ = _assemble(problem, p_new)
            yy = final.matrix @ (y_new if Q is None else _local(Q, x))
            res = float(np.linalg.norm(yy - final.rhs)) / scale
            return FlowSolution(problem.formulation, problem, x, it, res, history)
    raise NonlinearDivergenceError(
        f"Picard iteration did not converge in {max_iter} iterations "
        f"(last update {history[-1]:.3e})",
        history,
    )


def _local(Q, x):
    # Q is orthogonal (identity plus 2x2 rotations)
    return Q.T @ x


def flux_scale(solution: FlowSolution):
    """Total absolute boundary flux, the reference magnitude for conservation checks."""
    from .diagnostics import boundary_fluxes

    return float(np.abs(boundary_fluxes(solution)).sum())
