"""Quadrature rules on the reference triangle (barycentric) and on segments."""

import numpy as np

# Edge-midpoint rule, exact for quadratics. Point m sits on the edge opposite vertex m.
MIDPOINT_BARY = np.array([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]])
MIDPOINT_WEIGHTS = np.full(3, 1.0 / 3.0)

_s = np.sqrt(15.0)
_a1, _b1 = (9 - 2 * _s) / 21, (6 + _s) / 21
_a2, _b2 = (9 + 2 * _s) / 21, (6 - _s) / 21

# 7-point degree-5 rule; weights sum to one (multiply by the element area).
DEG5_BARY = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_a1, _b1, _b1],
        [_b1, _a1, _b1],
        [_b1, _b1, _a1],
        [_a2, _b2, _b2],
        [_b2, _a2, _b2],
        [_b2, _b2, _a2],
    ]
)
DEG5_WEIGHTS = np.array([9 / 40] + [(155 + _s) / 1200] * 3 + [(155 - _s) / 1200] * 3)

# Two-point Gauss-Legendre on [0, 1]; weights sum to one (multiply by length).
GAUSS2_T = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])
GAUSS2_WEIGHTS = np.array([0.5, 0.5])


def triangle_rule(name="deg5"):
    if name == "midpoint":
        return MIDPOINT_BARY, MIDPOINT_WEIGHTS
    if name == "deg5":
        return DEG5_BARY, DEG5_WEIGHTS
    raise ValueError(f"unknown triangle rule {name!r}")


def physical_points(corners, bary):
    """Map barycentric points to physical coordinates.

    ``corners`` has shape (T, 3, 2); the result has shape (T, Q, 2).
    """
    return np.einsum("qa,tad->tqd", bary, corners)


def integrate_over_triangles(mesh, func, rule="deg5"):
    """Per-element integral of ``func(x, y)`` (vectorized, any shape broadcast)."""
    bary, w = triangle_rule(rule)
    pts = physical_points(mesh.points[mesh.triangles], bary)
    vals = np.asarray(func(pts[..., 0], pts[..., 1]), dtype=float)
    vals = np.broadcast_to(vals, pts.shape[:2])
    return mesh.areas * (vals @ w)
