import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import box_problem
from oracles import p1_advection, p1_mass, p1_stiffness
from pfb.benchmarks import build_mesh, build_transport_problem, multilayer, run_benchmark
from pfb.errors import ConfigurationError, InvalidArgumentError
from pfb.flow import solve_flow
from pfb.mesh import Mesh, generate_structured
from pfb.quadrature import MIDPOINT_BARY
from pfb.transport import (
    BackwardEuler,
    TransportProblem,
    TransportState,
    assemble_transport,
    run_transient,
    step_backward_euler,
    total_concentration,
)

REF = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def _single(corners):
    return Mesh.from_triangles(corners, [[0, 1, 2]])


def test_zero_velocity_gives_zero_advection():
    m = assemble_transport(TransportProblem(generate_structured(3, 3)))
    assert m.advection.nnz == 0


def test_diffusion_rows_sum_to_zero():
    m = assemble_transport(TransportProblem(generate_structured(4, 3), diffusivity=0.37))
    assert np.max(np.abs(m.diffusion @ np.ones(20))) < 1e-14


def test_reference_triangle_matches_oracle():
    mesh = _single(REF)
    v = np.tile([1.0, 0.0], (1, 3, 1))
    m = assemble_transport(TransportProblem(mesh, diffusivity=1.0), v)
    assert np.allclose(m.advection.toarray(), p1_advection(REF, lambda x, y: (1.0, 0.0)), atol=1e-12)
    assert np.allclose(m.mass.toarray(), p1_mass(REF), atol=1e-12)
    assert np.allclose(m.diffusion.toarray(), p1_stiffness(REF), atol=1e-12)


@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6), st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_linear_velocity_advection_exact(coords, c):
    P = np.array(coords).reshape(3, 2)
    d1, d2 = P[1] - P[0], P[2] - P[0]
    if abs(d1[0] * d2[1] - d1[1] * d2[0]) < 0.05:
        return
    mesh = _single(P)
    a = np.array(c).reshape(2, 3)
    vel = lambda x, y: (a[0, 0] + a[0, 1] * x + a[0, 2] * y, a[1, 0] + a[1, 1] * x + a[1, 2] * y)
    q = MIDPOINT_BARY @ mesh.corners[0]
    vq = np.array([vel(*p) for p in q])[None]
    A = assemble_transport(TransportProblem(mesh), vq).advection.toarray()
    perm = mesh.triangles[0]
    ref = p1_advection(mesh.corners[0], vel)
    out = np.empty_like(ref)
    out[np.ix_(range(3), range(3))] = A[np.ix_(perm, perm)]
    assert np.allclose(out, ref, atol=1e-11 * max(1.0, np.abs(ref).max()))


def test_constant_state_preserved():
    mesh = generate_structured(5, 5)
    prob = TransportProblem(mesh, dt=0.05, t_end=1.0, initial=1.0)
    res = run_transient(prob, stop_when_steady=False)
    assert np.max(np.abs(res.final.c - 1.0)) <= 1e-12


def test_constant_state_preserved_under_flow():
    flow = solve_flow(box_problem(5, 5, source=lambda x, y: np.sin(5 * x)))
    prob = TransportProblem(flow.mesh, dt=0.01, t_end=0.2, initial=1.0, dirichlet={"left": 1.0})
    res = run_transient(prob, flow, stop_when_steady=False)
    assert np.max(np.abs(res.final.c - 1.0)) <= 1e-12


def test_closed_box_conserves_total_without_flow():
    mesh = generate_structured(6, 6)
    prob = TransportProblem(mesh, dt=0.01, t_end=0.2, initial=lambda x, y: np.exp(-20 * ((x - 0.3) ** 2 + y**2)))
    res = run_transient(prob, stop_when_steady=False)
    totals = res.series("total")
    assert np.max(np.abs(np.diff(totals))) <= 1e-12 * totals[0]


def test_pure_decay_is_monotone():
    mesh = generate_structured(8, 8)
    sides = {s: 0.0 for s in ("left", "right", "top", "bottom")}
    prob = TransportProblem(mesh, diffusivity=0.05, dt=0.01, t_end=1.0, dirichlet=sides,
                            initial=lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    totals = run_transient(prob, stop_when_steady=False).series("total")
    assert np.all(np.diff(totals) <= 1e-15)
    assert totals[-1] < 0.5 * totals[0]


@pytest.mark.parametrize("t_end,dt,steps", [(1.0, 0.1, 10), (0.25, 0.1, 3), (0.0, 0.1, 0)])
def test_step_count(t_end, dt, steps):
    prob = TransportProblem(generate_structured(2, 2), dt=dt, t_end=t_end, initial=lambda x, y: x)
    res = run_transient(prob, stop_when_steady=False)
    assert res.steps == steps
    assert res.final.time == pytest.approx(steps * dt)


def test_uniform_quiescent_case_is_immediately_steady():
    res = run_transient(TransportProblem(generate_structured(2, 2), dt=0.1, t_end=10.0, initial=0.3))
    assert res.steady and res.steps == 1


def test_output_interval_records_ends():
    prob = TransportProblem(generate_structured(2, 2), dt=0.1, t_end=1.05, initial=lambda x, y: x)
    res = run_transient(prob, output_interval=4, stop_when_steady=False)
    assert res.steps == 11
    assert [round(t, 10) for t in res.times] == [0.0, 0.4, 0.8, 1.1]


def test_large_step_stays_bounded():
    spec = multilayer()
    spec.transport["dt"] = 0.1  # ten times the benchmark step
    spec.transport["t_end"] = 5.0
    mesh = build_mesh(spec.mesh)
    from pfb.benchmarks import build_flow_problem

    flow = solve_flow(build_flow_problem(spec, mesh, "rt0"))
    res = run_transient(build_transport_problem(spec, mesh), flow, stop_when_steady=False)
    assert np.all(res.series("max") <= 1.05)
    assert np.all(res.series("min") >= -0.05)


def test_time_dependent_dirichlet():
    mesh = generate_structured(2, 2)
    prob = TransportProblem(mesh, dt=0.5, t_end=1.0, dirichlet={"left": lambda x, y, t: t})
    st0 = prob.initial_state()
    st1 = BackwardEuler(assemble_transport(prob)).step(st0)
    left = np.isclose(mesh.points[:, 0], 0.0)
    assert np.allclose(st1.c[left], 0.5)


def test_neumann_flux_load():
    mesh = generate_structured(3, 3)
    prob = TransportProblem(mesh, neumann={"right": 2.0})
    F = assemble_transport(prob).load(0.0)
    assert F.sum() == pytest.approx(2.0)
    assert np.all(F[~np.isclose(mesh.points[:, 0], 1.0)] == 0)


def test_source_load_integrates():
    mesh = generate_structured(3, 3)
    F = assemble_transport(TransportProblem(mesh, source=lambda x, y, t: 2.0 + t)).load(1.0)
    assert F.sum() == pytest.approx(3.0)


def test_single_step_wrapper():
    mesh = generate_structured(2, 2)
    prob = TransportProblem(mesh, dt=0.1)
    out = step_backward_euler(TransportState(np.ones(9), 0.0), assemble_transport(prob), 0.1)
    assert out.time == pytest.approx(0.1) and np.allclose(out.c, 1.0)


@pytest.mark.parametrize(
    "kwargs,err",
    [({"dt": 0.0}, InvalidArgumentError), ({"diffusivity": -1.0}, InvalidArgumentError),
     ({"dirichlet": {"nope": 1.0}}, ConfigurationError),
     ({"dirichlet": {"left": 1.0}, "neumann": {"left": 0.0}}, ConfigurationError)],
)
def test_invalid_problem(kwargs, err):
    with pytest.raises(err):
        TransportProblem(generate_structured(2, 2), **kwargs)


def test_total_concentration_of_linear_field():
    mesh = generate_structured(4, 4)
    assert total_concentration(mesh, mesh.points[:, 0]) == pytest.approx(0.5)


def test_multilayer_totals_agree_between_formulations():
    res = run_benchmark(multilayer())
    a = res.runs["rt0"].transient
    b = res.runs["vms"].transient
    n = min(len(a.records), len(b.records))
    ta, tb = a.series("total")[:n], b.series("total")[:n]
    assert np.allclose(a.series("time")[:n], b.series("time")[:n])
    assert np.max(np.abs(ta - tb)) / np.max(np.abs(ta)) < 0.03
    assert np.min(a.final.c) > 0.95  # near the c = 1 long-time limit
