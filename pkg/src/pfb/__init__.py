"""Darcy flow (RT0 and VMS mixed formulations) with advection-diffusion transport on triangles."""

from .benchmarks import (
    BenchmarkSpec,
    beta_sweep,
    convergence_study,
    cylinder_inclusion,
    inclusion_sweep,
    leaky_well,
    multilayer,
    run_benchmark,
)
from .diagnostics import dof_counts, element_mass_balance, l2_errors, leak_rate
from .flow import FlowSolution, solve_flow
from .materials import Material, MaterialField, ViscosityModel
from .mesh import Mesh, generate_structured, load_mesh, save_mesh
from .problem import FlowProblem
from .transport import TransportProblem, run_transient

__version__ = "0.1.0"
