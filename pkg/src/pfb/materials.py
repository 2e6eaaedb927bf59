"""Permeability, density, body force and pressure-dependent viscosity."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, InvalidArgumentError, ViscosityOverflowError

OVERFLOW_GUARD = 700.0


@dataclass(frozen=True)
class ViscosityModel:
    """Barus viscosity ``mu0 * exp(beta * p)``; ``beta == 0`` is the constant model."""

    mu0: float
    beta: float = 0.0

    def __post_init__(self):
        if not self.mu0 > 0:
            raise InvalidArgumentError(f"mu0 must be positive, got {self.mu0}")
        if not self.beta >= 0:
            raise InvalidArgumentError(f"beta must be non-negative, got {self.beta}")

    @classmethod
    def constant(cls, mu0):
        return cls(mu0, 0.0)

    @classmethod
    def barus(cls, mu0, beta):
        return cls(mu0, beta)

    @property
    def variant(self):
        return "constant" if self.beta == 0 else "barus"

    @property
    def is_linear(self):
        return self.beta == 0


def viscosity_at(model: ViscosityModel, p):
    """Viscosity at pressure ``p`` (scalar or array)."""
    p = np.asarray(p, dtype=float)
    if model.beta == 0:
        out = np.full(p.shape, model.mu0)
        return float(out) if out.ndim == 0 else out
    if not np.all(np.isfinite(p)):
        raise InvalidArgumentError("pressure must be finite")
    bp = model.beta * p
    if np.any(bp > OVERFLOW_GUARD):
        raise ViscosityOverflowError(f"beta*p = {bp.max():.4g} exceeds {OVERFLOW_GUARD}")
    out = model.mu0 * np.exp(bp)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Material:
    k: float  # permeability, m^2
    rho: float = 0.0  # density, kg/m^2 as tabulated

    def __post_init__(self):
        if not self.k > 0:
            raise InvalidArgumentError(f"permeability must be positive, got {self.k}")


@dataclass(frozen=True)
class MaterialField:
    regions: Mapping[int, Material]
    viscosity: ViscosityModel
    body_force: tuple = field(default=(0.0, 0.0))

    def material(self, region) -> Material:
        try:
            return self.regions[int(region)]
        except KeyError:
            raise ConfigurationError(f"no material for region {region}") from None

    def check_covers(self, mesh):
        missing = sorted(set(mesh.region_names) - {int(r) for r in self.regions})
        if missing:
            raise ConfigurationError(f"no material for region(s) {missing}")

    def permeability(self, mesh):
        self.check_covers(mesh)
        table = {int(r): m.k for r, m in self.regions.items()}
        return np.array([table[r] for r in mesh.regions.tolist()])

    def density(self, mesh):
        self.check_covers(mesh)
        table = {int(r): m.rho for r, m in self.regions.items()}
        return np.array([table[r] for r in mesh.regions.tolist()])

    def rho_b(self, mesh):
        """Element body-force density ``rho * b``, shape (T, 2)."""
        return self.density(mesh)[:, None] * np.asarray(self.body_force, dtype=float)[None, :]


def mobility_at(field: MaterialField, region, p=0.0):
    """``k / mu(p)`` for the material of ``region``."""
    return field.material(region).k / viscosity_at(field.viscosity, p)


def element_mobility(field: MaterialField, mesh, p_elem=None):
    """Vector of ``k / mu`` per triangle, ``mu`` evaluated at ``p_elem`` (element means)."""
    k = field.permeability(mesh)
    if p_elem is None or field.viscosity.is_linear:
        return k / field.viscosity.mu0
    return k / viscosity_at(field.viscosity, p_elem)
