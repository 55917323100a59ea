"""First-order Godunov finite-volume evolution on a single canal."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import DomainError, NumericalFailure, PositivityError, VacuumError
from .riemann import godunov_flux
from .swe import GRAVITY, H_DRY, State, flux, is_subsonic, require_wet
from .weir import WeirGeometry, WeirTraces, construct_traces

DEFAULT_CFL = 0.9
NEWTON_MAX_ITER = 30


@dataclass
class CanalGrid:
    """Cell averages of one canal.  Depth and discharge are stored; velocity
    is derived."""

    length: float
    h: np.ndarray
    q: np.ndarray
    bottom_elevation: float = 0.0

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.h.ndim != 1 or self.h.shape != self.q.shape:
            raise DomainError("h and q must be 1-D arrays of equal length")
        if self.h.size < 2:
            raise DomainError(f"a canal needs at least 2 cells, got {self.h.size}")
        if not self.length > 0.0:
            raise DomainError(f"canal length must be positive, got {self.length}")
        if not np.all(self.h > H_DRY):
            raise DomainError("all cell depths must be wet")

    @classmethod
    def uniform(cls, length, n_cells, state: State, bottom_elevation=0.0):
        return cls(
            length,
            np.full(n_cells, state.h),
            np.full(n_cells, state.q),
            bottom_elevation,
        )

    @property
    def n_cells(self) -> int:
        return self.h.size

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def x(self) -> np.ndarray:
        """Cell centres measured from the upstream end."""
        return (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def v(self) -> np.ndarray:
        return self.q / self.h

    def state(self, i: int) -> State:
        return State.from_conservative(self.h[i], self.q[i])

    def volume(self) -> float:
        return self.dx * float(np.sum(self.h))

    def copy(self) -> "CanalGrid":
        return CanalGrid(self.length, self.h.copy(), self.q.copy(), self.bottom_elevation)


PRESCRIBED = "prescribed_state"
FREE_OUTFLOW = "free_outflow"
WEIR = "weir"
WALL = "wall"


@dataclass(frozen=True)
class BoundarySignal:
    """Condition at an outer end of the chain.

    ``prescribed_state`` holds a piecewise-constant ``schedule`` of
    ``(start_time, State)`` pairs; ``weir`` spills over a crest into an
    absorbing reservoir; ``wall`` is a closed, reflecting end.
    """

    kind: str
    schedule: tuple = ()
    weir: WeirGeometry | None = None

    def __post_init__(self):
        if self.kind not in (PRESCRIBED, FREE_OUTFLOW, WEIR, WALL):
            raise DomainError(f"unknown boundary kind {self.kind!r}")
        if self.kind == PRESCRIBED:
            if not self.schedule:
                raise DomainError("prescribed_state needs a non-empty schedule")
            times = [t for t, _ in self.schedule]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise DomainError("schedule times must be strictly increasing")
        if self.kind == WEIR and self.weir is None:
            raise DomainError("weir boundary needs a WeirGeometry")

    @classmethod
    def prescribed(cls, schedule):
        return cls(PRESCRIBED, tuple((float(t), s) for t, s in schedule))

    @classmethod
    def free_outflow(cls):
        return cls(FREE_OUTFLOW)

    @classmethod
    def over_weir(cls, geometry: WeirGeometry):
        return cls(WEIR, weir=geometry)

    @classmethod
    def wall(cls):
        return cls(WALL)

    def target(self, t: float) -> State:
        current = self.schedule[0][1]
        for start, s in self.schedule:
            if t >= start:
                current = s
            else:
                break
        return current

    def breakpoints(self) -> list[float]:
        return [t for t, _ in self.schedule[1:]]


@dataclass(frozen=True)
class StepReport:
    dt: float
    max_wave_speed: float
    end_fluxes: list = field(default_factory=list)
    weir_mass_fluxes: list = field(default_factory=list)


def cfl_dt(grid: CanalGrid, g: float = GRAVITY, cfl: float = DEFAULT_CFL) -> float:
    """Largest stable step ``cfl * dx / max |lambda|`` for the cell averages."""
    if not 0.0 < cfl < 1.0:
        raise DomainError(f"CFL number must lie in (0, 1), got {cfl}")
    if not np.all(grid.h > H_DRY):
        raise DomainError("dry cell in CFL estimate")
    return cfl * grid.dx / _kernels.max_speed(grid.h, grid.q, g)


def interface_fluxes(grid: CanalGrid, left_flux, right_flux, g: float = GRAVITY):
    """Mass and momentum fluxes at all ``n_cells + 1`` cell faces."""
    n = grid.n_cells
    fm = np.empty(n + 1)
    fp = np.empty(n + 1)
    bad = _kernels.interior_fluxes(grid.h, grid.q, g, fm, fp)
    if bad >= 0:
        raise VacuumError(f"vacuum at interface between cells {bad - 1} and {bad}")
    fm[0], fp[0] = left_flux
    fm[n], fp[n] = right_flux
    return fm, fp


def apply_fluxes(grid: CanalGrid, dt: float, fm, fp) -> CanalGrid:
    r = dt / grid.dx
    h = grid.h - r * (fm[1:] - fm[:-1])
    q = grid.q - r * (fp[1:] - fp[:-1])
    bad = np.flatnonzero(~(h > H_DRY))
    if bad.size:
        i = int(bad[0])
        raise PositivityError(f"non-positive depth {h[i]} in cell {i}", cell=i)
    return CanalGrid(grid.length, h, q, grid.bottom_elevation)


def interior_step(grid: CanalGrid, dt: float, left_flux, right_flux, g: float = GRAVITY) -> CanalGrid:
    """Conservative update ``U_i -= dt/dx (F_{i+1/2} - F_{i-1/2})`` with the
    end fluxes supplied by the caller."""
    fm, fp = interface_fluxes(grid, left_flux, right_flux, g)
    return apply_fluxes(grid, dt, fm, fp)


def weir_interface_traces(left_cell: State, right_cell: State, w: WeirGeometry) -> WeirTraces:
    """Trace pair at a weir anchored on the two adjacent cell averages.

    Damped Newton on the two trace depths is tried first; the curve
    intersection construction is the fallback.
    """
    require_wet(left_cell)
    require_wet(right_cell)
    a, b, qw, ok = _kernels.weir_newton(
        left_cell.h, left_cell.v, right_cell.h, right_cell.v,
        w.H_minus, w.H_plus, w.C, w.g, NEWTON_MAX_ITER,
    )
    if ok:
        return WeirTraces(State(a, qw / a), State(b, qw / b), qw)
    try:
        return construct_traces(left_cell, right_cell, w)
    except DomainError as exc:
        raise NumericalFailure(f"weir trace solve failed for {left_cell} / {right_cell}: {exc}") from exc


def _wall_depth(cell: State, side: str, g: float) -> float:
    mirror = State(cell.h, -cell.v)
    pair = (mirror, cell) if side == "left" else (cell, mirror)
    hm = _kernels.middle_depth(pair[0].h, pair[0].v, pair[1].h, pair[1].v, g)
    if hm <= 0.0:
        raise VacuumError(f"wall boundary opens a vacuum next to {cell}")
    return hm


def _outflow_trace(cell: State, side: str, w: WeirGeometry) -> State:
    """Trace at a weir spilling into an absorbing reservoir."""
    if side == "right":
        h, v, H = cell.h, cell.v, w.H_minus
    else:
        h, v, H = cell.h, -cell.v, w.H_plus
    hs = _kernels.gamma_intersection(h, v, H, w.C, w.g)
    if hs <= 0.0:
        raise NumericalFailure(f"outflow weir trace does not exist for {cell}")
    vs = _kernels.lax1_forward(hs, h, v, w.g)
    return State(hs, vs if side == "right" else -vs)


def boundary_state_flux(signal: BoundarySignal, cell: State, t: float, side: str, g: float = GRAVITY):
    """``(mass, momentum, wave_speed)`` at an outer end of the chain."""
    require_wet(cell)
    if signal.kind == FREE_OUTFLOW:
        m, p = flux(cell, g)
        return m, p, abs(cell.v) + math.sqrt(g * cell.h)
    if signal.kind == PRESCRIBED:
        target = signal.target(t)
        if not is_subsonic(target, g):
            raise DomainError(f"prescribed boundary state {target} is not subsonic")
        m, p = godunov_flux(target, cell, g) if side == "left" else godunov_flux(cell, target, g)
        return m, p, abs(target.v) + math.sqrt(g * target.h)
    if signal.kind == WALL:
        hm = _wall_depth(cell, side, g)
        return 0.0, 0.5 * g * hm * hm, math.sqrt(g * hm)
    trace = _outflow_trace(cell, side, signal.weir)
    m, p = flux(trace, g)
    return m, p, abs(trace.v) + math.sqrt(g * trace.h)


def boundary_flux(signal: BoundarySignal, cell: State, t: float, side: str, g: float = GRAVITY):
    """Numerical flux through an outer end of the chain."""
    m, p, _ = boundary_state_flux(signal, cell, t, side, g)
    return m, p
