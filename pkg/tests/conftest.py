import os
from pathlib import Path
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def data_dir():
    return Path(DATA)


@pytest.fixture
def unit2():
    from pfb.mesh import generate_structured

    return generate_structured(2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def box_problem(nx, ny, formulation="rt0", *, k=1.0, mu=1.0, beta=0.0, rho=0.0, body=(0.0, 0.0),
                pressure=None, velocity=None, source=None, box=(0.0, 1.0, 0.0, 1.0)):
    """Darcy problem on a structured box; sides default to pressure on left/right, no-flow on top/bottom."""
    from pfb.materials import Material, MaterialField, ViscosityModel
    from pfb.mesh import generate_structured
    from pfb.problem import FlowProblem

    mesh = generate_structured(nx, ny, box)
    mats = MaterialField({0: Material(k, rho)}, ViscosityModel(mu, beta), tuple(body))
    if pressure is None and velocity is None:
        pressure = {"left": 1.0, "right": 0.0}
    pressure = dict(pressure or {})
    velocity = dict(velocity or {})
    for side in ("left", "right", "top", "bottom"):
        if side not in pressure and side not in velocity:
            velocity[side] = 0.0
    return FlowProblem(mesh, mats, velocity, pressure, source, formulation)


ACCEPTANCE_LINES = []


def record_acceptance(number, title, passed, detail):
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
