"""Shallow-water flow through chains of canals coupled by overflow weirs."""

from .config import ScenarioConfig, load_config
from .exceptions import (
    ConfigError,
    DomainError,
    DryStateError,
    NumericalFailure,
    PooledStepError,
    PositivityError,
    VacuumError,
)
from .fv import BoundarySignal, CanalGrid, cfl_dt, interior_step, weir_interface_traces
from .network import PooledStepNetwork, RunResult, lipschitz_probe, run, step
from .riemann import RiemannFan, Wave, godunov_flux, sample, solve
from .swe import GRAVITY, FlowRegime, State, eigenvalues, eigenvectors, flux, lax_curve, regime
from .weir import (
    FlowDirection,
    RegionLabel,
    WeirGeometry,
    WeirRiemannSolution,
    WeirTraces,
    classify,
    coupling_residual,
    flow_direction,
    gamma_intersection,
    phi,
    solve_weir_riemann,
)

__version__ = "0.1.0"
