import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import box_problem
from oracles import rt0_mass, rt0_shape
from pfb.benchmarks import LAYER_PERMEABILITY, build_flow_problem, build_mesh, multilayer
from pfb.flow import solve_flow
from pfb.flow_rt0 import (
    assemble_rt0,
    basis_values,
    element_matrices_rt0,
    evaluate_velocity_rt0,
    project_constant_rt0,
)
from pfb.errors import GeometryError

REF = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def test_reference_element_values():
    M, B = element_matrices_rt0(REF, 1.0)
    # basis on the hypotenuse is sqrt(2) * (x, y)
    assert M[0, 0] == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert B == pytest.approx([np.sqrt(2.0), 1.0, 1.0], rel=1e-14)


@given(
    st.lists(st.floats(-3, 3), min_size=6, max_size=6),
    st.floats(1e-3, 1e3),
    st.tuples(*[st.sampled_from([-1.0, 1.0])] * 3),
)
def test_element_mass_matches_oracle(coords, mob, signs):
    P = np.array(coords).reshape(3, 2)
    d1, d2 = P[1] - P[0], P[2] - P[0]
    area = 0.5 * (d1[0] * d2[1] - d1[1] * d2[0])
    if abs(area) < 1e-2:
        return
    if area < 0:
        P = P[[0, 2, 1]]
    M, B = element_matrices_rt0(P, mob, signs)
    ref = rt0_mass(P, 1.0 / mob, signs)
    assert np.allclose(M, ref, rtol=1e-9, atol=1e-12 * np.abs(ref).max())
    assert np.allclose(M, M.T)
    assert np.all(np.linalg.eigvalsh(M) > 0)


@given(st.floats(0.01, 100.0))
def test_scaling_of_element_blocks(s):
    # basis values are O(1) under uniform scaling, so M grows with the area
    M1, B1 = element_matrices_rt0(REF, 1.0)
    Ms, Bs = element_matrices_rt0(s * REF, 1.0)
    assert np.allclose(Ms, s**2 * M1, rtol=1e-12)
    assert np.allclose(Bs, s * B1, rtol=1e-12)


def test_basis_matches_oracle_at_points(rng):
    from pfb.mesh import generate_structured

    mesh = generate_structured(2, 2)
    for t in range(mesh.n_triangles):
        lam = rng.dirichlet(np.ones(3))
        xy = lam @ mesh.corners[t]
        got = basis_values(mesh, [t], xy[None])[0]
        want = rt0_shape(mesh.corners[t], mesh.edge_sign[t])(*xy)
        assert np.allclose(got, want, atol=1e-13)


def test_clockwise_rejected():
    with pytest.raises(GeometryError):
        element_matrices_rt0(REF[[0, 2, 1]], 1.0)


def test_zero_data_gives_zero_solution():
    prob = box_problem(3, 3, pressure={"left": 0.0, "right": 0.0})
    sol = solve_flow(prob)
    assert np.all(sol.x == 0.0)


def test_multilayer_exact():
    spec = multilayer()
    mesh = build_mesh(spec.mesh)
    sol = solve_flow(build_flow_problem(spec, mesh, "rt0"))
    p0, mu = 1e5, 1e-8
    pe = p0 * (1.0 - mesh.centroids[:, 0])
    assert np.max(np.abs(sol.element_pressure() - pe)) <= 1e-8 * p0
    v = sol.centroid_velocity()
    k = np.array(LAYER_PERMEABILITY)[mesh.regions - 1]
    assert np.allclose(v[:, 0], k / mu * p0, rtol=1e-8)
    assert np.max(np.abs(v[:, 1])) <= 1e-8 * np.max(np.abs(v[:, 0]))
    mid = np.isclose(mesh.centroids[:, 0], 0.5, atol=0.03)
    assert np.mean(sol.element_pressure()[mid]) == pytest.approx(0.5 * p0, rel=1e-8)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_constant_projection_is_exact(vx, vy):
    from pfb.mesh import generate_structured

    mesh = generate_structured(3, 2)
    x = project_constant_rt0(mesh, (vx, vy))
    pts = mesh.centroids + 0.1 * (mesh.corners[:, 0] - mesh.centroids)
    v = evaluate_velocity_rt0(mesh, x, np.arange(mesh.n_triangles), pts)
    assert np.allclose(v, [vx, vy], atol=1e-12)


def test_patch_linear_pressure():
    # p = 1 - x on every side, v = (1, 0)
    prob = box_problem(4, 3, pressure={s: {"linear": [1.0, -1.0, 0.0]} for s in ("left", "right", "top", "bottom")})
    sol = solve_flow(prob)
    assert np.allclose(sol.centroid_velocity(), [1.0, 0.0], atol=1e-12)
    assert np.allclose(sol.element_pressure(), 1.0 - sol.mesh.centroids[:, 0], atol=1e-12)


def test_hydrostatic_state_has_no_flow():
    g = 9.8
    prob = box_problem(3, 3, rho=2.0, body=(0.0, -g),
                       pressure={s: {"linear": [0.0, 0.0, -2.0 * g]} for s in ("left", "right", "top", "bottom")})
    sol = solve_flow(prob)
    assert np.max(np.abs(sol.centroid_velocity())) < 1e-12
    assert np.allclose(sol.element_pressure(), -2.0 * g * sol.mesh.centroids[:, 1], atol=1e-12)


def test_normal_component_continuous():
    prob = box_problem(4, 4, source=lambda x, y: x * y,
                       pressure={"left": 1.0, "right": 0.0, "top": 0.0, "bottom": 0.0})
    sol = solve_flow(prob)
    mesh = sol.mesh
    interior = np.flatnonzero(mesh.edge_tris[:, 1] >= 0)
    a = mesh.points[mesh.edges[interior, 0]]
    b = mesh.points[mesh.edges[interior, 1]]
    for s in (0.2, 0.7):
        xy = a + s * (b - a)
        v0 = sol.velocity(mesh.edge_tris[interior, 0], xy)
        v1 = sol.velocity(mesh.edge_tris[interior, 1], xy)
        n = mesh.edge_normals[interior]
        assert np.allclose((v0 * n).sum(1), (v1 * n).sum(1), atol=1e-12)


def test_pure_velocity_problem_is_pinned():
    prob = box_problem(3, 3, velocity={"left": -1.0, "right": 1.0, "top": 0.0, "bottom": 0.0}, pressure={})
    system = assemble_rt0(prob)
    E = prob.mesh.n_edges
    row = system.matrix.getrow(E).toarray().ravel()
    assert row[E] == 1.0 and np.count_nonzero(row) == 1
    sol = solve_flow(prob)
    assert sol.x[E] == 0.0
    assert np.allclose(sol.centroid_velocity(), [1.0, 0.0], atol=1e-12)
