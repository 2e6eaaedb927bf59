"""Flow problem description and helpers for evaluating spatial data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

import numpy as np

from .errors import ConfigurationError, InvalidArgumentError
from .materials import MaterialField
from .mesh import Mesh
from .quadrature import DEG5_BARY, DEG5_WEIGHTS, GAUSS2_T, GAUSS2_WEIGHTS, physical_points

FORMULATIONS = ("rt0", "vms")


def as_function(value) -> Callable:
    """Normalize boundary/source data to a vectorized ``f(x, y)``.

    Accepts a number, a callable, or ``{"linear": [a, bx, by]}`` meaning
    ``a + bx * x + by * y`` (the JSON-serializable form).
    """
    if callable(value):
        return value
    if isinstance(value, Mapping):
        if set(value) != {"linear"} or len(value["linear"]) != 3:
            raise InvalidArgumentError(f"unsupported field description {value!r}")
        a, bx, by = (float(v) for v in value["linear"])
        return lambda x, y: a + bx * np.asarray(x) + by * np.asarray(y)
    c = float(value)
    return lambda x, y: np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, c)


def edge_gauss_points(mesh: Mesh, edges):
    """Gauss points (len(edges), 2, 2) and the edge parameter ``t`` measured lo->hi."""
    a = mesh.points[mesh.edges[edges, 0]]
    b = mesh.points[mesh.edges[edges, 1]]
    pts = a[:, None, :] + GAUSS2_T[None, :, None] * (b - a)[:, None, :]
    return pts, GAUSS2_T


def edge_integrals(mesh: Mesh, edges, func):
    """``int_e func ds`` and the lo/hi hat-function moments for each edge."""
    edges = np.asarray(edges, dtype=np.int64)
    pts, t = edge_gauss_points(mesh, edges)
    f = np.broadcast_to(np.asarray(func(pts[..., 0], pts[..., 1]), dtype=float), pts.shape[:2])
    L = mesh.edge_lengths[edges]
    total = L * (f @ GAUSS2_WEIGHTS)
    lo = L * (f @ (GAUSS2_WEIGHTS * (1 - t)))
    hi = L * (f @ (GAUSS2_WEIGHTS * t))
    return total, lo, hi


def source_integrals(mesh: Mesh, phi) -> np.ndarray:
    """Per-element ``int_K phi``; ``phi`` is None, a number, a length-T array or ``f(x, y)``."""
    return source_moments(mesh, phi).sum(axis=1)


def source_moments(mesh: Mesh, phi) -> np.ndarray:
    """Per-element hat-function moments ``int_K N_a phi``, shape (T, 3)."""
    T = mesh.n_triangles
    if phi is None:
        return np.zeros((T, 3))
    if callable(phi) or isinstance(phi, Mapping):
        f = as_function(phi)
        pts = physical_points(mesh.corners, DEG5_BARY)
        vals = np.broadcast_to(np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float), pts.shape[:2])
        return mesh.areas[:, None] * np.einsum("tq,q,qa->ta", vals, DEG5_WEIGHTS, DEG5_BARY)
    arr = np.asarray(phi, dtype=float)
    if arr.ndim == 0:
        arr = np.full(T, float(arr))
    if arr.shape != (T,):
        raise InvalidArgumentError(f"source must have one value per triangle ({T}), got {arr.shape}")
    return np.repeat((arr * mesh.areas / 3.0)[:, None], 3, axis=1)


@dataclass
class FlowProblem:
    """Steady Darcy problem.

    ``velocity_bcs`` maps boundary tags to the prescribed outward normal
    velocity; ``pressure_bcs`` maps tags to the prescribed pressure (imposed
    weakly).  Together they must partition the tagged boundary.
    """

    mesh: Mesh
    materials: MaterialField
    velocity_bcs: Mapping[str, Any] = field(default_factory=dict)
    pressure_bcs: Mapping[str, Any] = field(default_factory=dict)
    source: Any = None
    formulation: str = "rt0"

    def __post_init__(self):
        if self.formulation not in FORMULATIONS:
            raise InvalidArgumentError(f"formulation must be one of {FORMULATIONS}")
        self.validate()

    def validate(self):
        mesh = self.mesh
        tags = {mesh.boundary_tags[e] for e in mesh.boundary_edges}
        if None in tags:
            raise ConfigurationError("mesh has untagged boundary edges")
        both = set(self.velocity_bcs) & set(self.pressure_bcs)
        if both:
            raise ConfigurationError(f"tags {sorted(both)} carry both velocity and pressure data")
        covered = set(self.velocity_bcs) | set(self.pressure_bcs)
        missing = tags - covered
        if missing:
            raise ConfigurationError(f"boundary tags {sorted(missing)} have no flow condition")
        unknown = covered - tags
        if unknown:
            raise ConfigurationError(f"boundary conditions reference unknown tags {sorted(unknown)}")
        self.materials.check_covers(mesh)

    def with_formulation(self, formulation):
        return FlowProblem(
            self.mesh, self.materials, self.velocity_bcs, self.pressure_bcs, self.source, formulation
        )

    @property
    def has_pressure_boundary(self):
        return any(len(self.mesh.edges_with_tag(t)) for t in self.pressure_bcs)

    def tagged_edges(self, table):
        """Yield ``(edge indices, function)`` for each tag in ``table``."""
        for tag in sorted(table):
            edges = self.mesh.edges_with_tag(tag)
            if len(edges):
                yield edges, as_function(table[tag])

    def source_integrals(self):
        return source_integrals(self.mesh, self.source)

    def source_moments(self):
        return source_moments(self.mesh, self.source)

    def boundary_flux_data(self):
        """``int psi dGamma`` over the velocity boundary (outward positive)."""
        total = 0.0
        absolute = 0.0
        for edges, f in self.tagged_edges(self.velocity_bcs):
            vals, _, _ = edge_integrals(self.mesh, edges, f)
            total += vals.sum()
            absolute += np.abs(vals).sum()
        return total, absolute
