"""Transient advection-diffusion: P1 Galerkin in space, backward Euler in time.

Each step solves

    (M + dt (A + K)) c_{n+1} = M c_n + dt F(t_{n+1})

with consistent mass ``M``, advection ``A_ab = (N_a, v . grad N_b)``,
diffusion ``K = D (grad N_a, grad N_b)`` and load ``F`` from the volumetric
source and the Neumann flux on the non-Dirichlet boundary.  Dirichlet rows are
replaced by the prescribed values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, InvalidArgumentError
from .linalg import Factorization, TripletBuffer, compress
from .problem import as_function, edge_integrals
from .quadrature import DEG5_BARY, DEG5_WEIGHTS, MIDPOINT_BARY, MIDPOINT_WEIGHTS

STEADY_TOL = 1e-8


def _time_function(value):
    """Normalize data to ``f(x, y, t)``; two-argument callables are treated as steady."""
    if callable(value):
        try:
            import inspect

            nargs = len(inspect.signature(value).parameters)
        except (TypeError, ValueError):
            nargs = 3
        if nargs >= 3:
            return value
        return lambda x, y, t, _f=value: _f(x, y)
    f = as_function(value)
    return lambda x, y, t: f(x, y)


@dataclass
class TransportProblem:
    mesh: Any
    diffusivity: float = 0.01
    dt: float = 0.01
    t_end: float = 1.0
    dirichlet: Mapping[str, Any] = field(default_factory=dict)  # tag -> c_p
    neumann: Mapping[str, Any] = field(default_factory=dict)  # tag -> t_p
    source: Any = None  # f(x, y, t) or number
    initial: Any = 0.0  # number, nodal array, or f(x, y)

    def __post_init__(self):
        if not self.diffusivity > 0:
            raise InvalidArgumentError("diffusivity must be positive")
        if not self.dt > 0:
            raise InvalidArgumentError("time step must be positive")
        if not self.t_end >= 0:
            raise InvalidArgumentError("t_end must be non-negative")
        tags = {self.mesh.boundary_tags[e] for e in self.mesh.boundary_edges}
        unknown = (set(self.dirichlet) | set(self.neumann)) - tags
        if unknown:
            raise ConfigurationError(f"transport conditions reference unknown tags {sorted(unknown)}")
        both = set(self.dirichlet) & set(self.neumann)
        if both:
            raise ConfigurationError(f"tags {sorted(both)} are both Dirichlet and Neumann")

    def initial_state(self):
        mesh = self.mesh
        init = self.initial
        if callable(init):
            c = np.asarray(init(mesh.points[:, 0], mesh.points[:, 1]), dtype=float)
            c = np.broadcast_to(c, (mesh.n_nodes,)).copy()
        else:
            arr = np.asarray(init, dtype=float)
            c = np.full(mesh.n_nodes, float(arr)) if arr.ndim == 0 else arr.copy()
        if c.shape != (mesh.n_nodes,):
            raise InvalidArgumentError("initial condition must give one value per node")
        state = TransportState(c, 0.0)
        nodes, vals = self.dirichlet_values(0.0)
        state.c[nodes] = vals
        return state

    def dirichlet_nodes(self):
        nodes = set()
        for tag in self.dirichlet:
            nodes.update(self.mesh.edges[self.mesh.edges_with_tag(tag)].ravel().tolist())
        return np.array(sorted(nodes), dtype=np.int64)

    def dirichlet_values(self, t):
        """Prescribed values at Dirichlet nodes; later tags (sorted) win at shared nodes."""
        mesh = self.mesh
        out = {}
        for tag in sorted(self.dirichlet):
            f = _time_function(self.dirichlet[tag])
            nodes = np.unique(mesh.edges[mesh.edges_with_tag(tag)].ravel())
            vals = np.broadcast_to(
                np.asarray(f(mesh.points[nodes, 0], mesh.points[nodes, 1], t), dtype=float), nodes.shape
            )
            out.update(zip(nodes.tolist(), vals.tolist()))
        nodes = np.array(sorted(out), dtype=np.int64)
        return nodes, np.array([out[n] for n in nodes.tolist()], dtype=float)


@dataclass
class TransportState:
    c: np.ndarray
    time: float

    def copy(self):
        return TransportState(self.c.copy(), self.time)


@dataclass
class TransportMatrices:
    mass: sp.csr_matrix
    advection: sp.csr_matrix
    diffusion: sp.csr_matrix
    problem: TransportProblem

    def load(self, t):
        """Load vector ``F(t)``: source plus Neumann flux."""
        mesh = self.problem.mesh
        F = np.zeros(mesh.n_nodes)
        if self.problem.source is not None:
            f = _time_function(self.problem.source)
            pts = np.einsum("qa,tad->tqd", DEG5_BARY, mesh.corners)
            vals = np.broadcast_to(
                np.asarray(f(pts[..., 0], pts[..., 1], t), dtype=float), pts.shape[:2]
            )
            mom = mesh.areas[:, None] * np.einsum("tq,q,qa->ta", vals, DEG5_WEIGHTS, DEG5_BARY)
            np.add.at(F, mesh.triangles.ravel(), mom.ravel())
        for tag in sorted(self.problem.neumann):
            g = _time_function(self.problem.neumann[tag])
            edges = mesh.edges_with_tag(tag)
            _, lo, hi = edge_integrals(mesh, edges, lambda x, y: g(x, y, t))
            np.add.at(F, mesh.edges[edges, 0], lo)
            np.add.at(F, mesh.edges[edges, 1], hi)
        return F


def assemble_transport(problem: TransportProblem, velocity=None) -> TransportMatrices:
    """Mass, advection and diffusion matrices.

    ``velocity`` is a ``FlowSolution`` (evaluated at the edge-midpoint
    quadrature points of each element through its own evaluator), an array of
    shape (T, 3, 2) with those values, or None for a quiescent fluid.
    """
    mesh = problem.mesh
    N = mesh.n_nodes
    area = mesh.areas
    G = mesh.gradients
    tri = mesh.triangles

    mass = (np.ones((3, 3)) + np.eye(3)) / 12.0
    Me = area[:, None, None] * mass[None]
    Ke = problem.diffusivity * area[:, None, None] * np.einsum("tad,tbd->tab", G, G)

    if velocity is None:
        vq = np.zeros((mesh.n_triangles, 3, 2))
    elif hasattr(velocity, "velocity_at_bary"):
        vq = velocity.velocity_at_bary(MIDPOINT_BARY)
    else:
        vq = np.asarray(velocity, dtype=float)
    # A_ab = sum_q w_q |K| N_a(x_q) v(x_q) . grad N_b
    Ae = area[:, None, None] * np.einsum("q,qa,tqd,tbd->tab", MIDPOINT_WEIGHTS, MIDPOINT_BARY, vq, G)

    def build(blocks):
        buf = TripletBuffer()
        buf.add_block(tri, tri, blocks)
        return compress(buf, N)

    return TransportMatrices(build(Me), build(Ae), build(Ke), problem)


class BackwardEuler:
    """Backward Euler stepper; the system matrix is factorized once per ``dt``."""

    def __init__(self, matrices: TransportMatrices, dt=None):
        self.m = matrices
        self.problem = matrices.problem
        self.dt = float(self.problem.dt if dt is None else dt)
        if not self.dt > 0:
            raise InvalidArgumentError("time step must be positive")
        self.fixed = self.problem.dirichlet_nodes()
        N = self.problem.mesh.n_nodes
        keep = np.ones(N)
        keep[self.fixed] = 0.0
        self._keep = keep
        S = (matrices.mass + self.dt * (matrices.advection + matrices.diffusion)).tocsr()
        S = (sp.diags(keep) @ S + sp.diags(1.0 - keep)).tocsr()
        self.factor = Factorization(S)
        self._static_load = None
        if self.problem.source is None and all(
            not callable(v) for v in self.problem.neumann.values()
        ):
            self._static_load = matrices.load(0.0)

    def step(self, state: TransportState) -> TransportState:
        t_new = state.time + self.dt
        F = self._static_load if self._static_load is not None else self.m.load(t_new)
        rhs = self.m.mass @ state.c + self.dt * F
        nodes, vals = self.problem.dirichlet_values(t_new)
        rhs[nodes] = vals
        c = self.factor.solve(rhs, refine=0)
        return TransportState(c, t_new)


def step_backward_euler(state, matrices, dt):
    """Single backward Euler step (convenience wrapper; builds a fresh factorization)."""
    return BackwardEuler(matrices, dt).step(state)


def total_concentration(mesh, c):
    """``int_Omega c`` for a P1 nodal field."""
    return float(np.sum(mesh.areas * np.asarray(c)[mesh.triangles].mean(axis=1)))


@dataclass
class TransientResult:
    times: list
    records: list  # dicts per output time
    states: list  # TransportState snapshots at output times
    final: TransportState
    steps: int
    steady: bool

    def series(self, key):
        return np.array([r[key] for r in self.records])


def run_transient(
    problem: TransportProblem,
    velocity=None,
    output_interval=None,
    steady_tol=STEADY_TOL,
    probes: Optional[Mapping[str, Callable]] = None,
    keep_states=True,
    stop_when_steady=True,
):
    """Integrate to ``t_end`` or until ``max |c_{n+1} - c_n| < steady_tol``.

    ``output_interval`` (in steps) controls which states are recorded; the
    initial and final states are always recorded.  ``probes`` maps names to
    ``f(state) -> float`` evaluated at each output.
    """
    mats = assemble_transport(problem, velocity)
    stepper = BackwardEuler(mats)
    mesh = problem.mesh
    n_steps = int(math.ceil(problem.t_end / problem.dt - 1e-9))
    every = 1 if output_interval is None else max(1, int(output_interval))
    probes = dict(probes or {})

    def record(state):
        rec = {
            "time": state.time,
            "total": total_concentration(mesh, state.c),
            "min": float(state.c.min()),
            "max": float(state.c.max()),
        }
        for name, fn in probes.items():
            rec[name] = float(fn(state))
        return rec

    state = problem.initial_state()
    records = [record(state)]
    states = [state.copy()] if keep_states else []
    steady = False
    k = 0
    for k in range(1, n_steps + 1):
        new = stepper.step(state)
        change = float(np.max(np.abs(new.c - state.c)))
        state = new
        steady = change < steady_tol
        last = k == n_steps or (steady and stop_when_steady)
        if k % every == 0 or last:
            records.append(record(state))
            if keep_states:
                states.append(state.copy())
        if steady and stop_when_steady:
            break
    return TransientResult(
        [r["time"] for r in records], records, states, state, k, steady
    )
