import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfb.mesh import generate_structured
from pfb.quadrature import (
    DEG5_BARY,
    DEG5_WEIGHTS,
    GAUSS2_T,
    GAUSS2_WEIGHTS,
    MIDPOINT_BARY,
    MIDPOINT_WEIGHTS,
    integrate_over_triangles,
    triangle_rule,
)


def exact_monomial(i, j):
    # int over the reference triangle of x^i y^j = i! j! / (i + j + 2)!
    return math.factorial(i) * math.factorial(j) / math.factorial(i + j + 2)


def apply_rule(bary, w, i, j):
    # reference triangle (0,0), (1,0), (0,1): x = l1, y = l2, area 1/2
    x, y = bary[:, 1], bary[:, 2]
    return 0.5 * np.sum(w * x**i * y**j)


@pytest.mark.parametrize("bary,w", [(DEG5_BARY, DEG5_WEIGHTS), (MIDPOINT_BARY, MIDPOINT_WEIGHTS)])
def test_weights_sum_to_one(bary, w):
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(bary.sum(axis=1), 1.0)


@given(st.integers(0, 5), st.integers(0, 5))
def test_deg5_rule_exact_up_to_degree_five(i, j):
    if i + j > 5:
        return
    assert apply_rule(DEG5_BARY, DEG5_WEIGHTS, i, j) == pytest.approx(exact_monomial(i, j), rel=1e-13)


@pytest.mark.parametrize("i,j", [(a, b) for a in range(3) for b in range(3) if a + b <= 2])
def test_midpoint_rule_exact_for_quadratics(i, j):
    assert apply_rule(MIDPOINT_BARY, MIDPOINT_WEIGHTS, i, j) == pytest.approx(exact_monomial(i, j), rel=1e-14)


def test_midpoint_points_sit_opposite_their_vertex():
    for m in range(3):
        assert MIDPOINT_BARY[m, m] == 0.0


@pytest.mark.parametrize("k", range(4))
def test_gauss2_exact_to_cubics(k):
    assert np.sum(GAUSS2_WEIGHTS * GAUSS2_T**k) == pytest.approx(1.0 / (k + 1), rel=1e-14)


def test_integrate_over_triangles_area_and_linear():
    mesh = generate_structured(3, 2, (0.0, 2.0, 0.0, 1.0))
    assert integrate_over_triangles(mesh, lambda x, y: 1.0).sum() == pytest.approx(2.0)
    assert integrate_over_triangles(mesh, lambda x, y: x * y).sum() == pytest.approx(1.0)


def test_unknown_rule():
    with pytest.raises(ValueError):
        triangle_rule("gauss9")
