"""Chains of pooled-step canals coupled by weirs, and the time loop."""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, PooledStepError, PositivityError
from .fv import (
    DEFAULT_CFL,
    BoundarySignal,
    CanalGrid,
    StepReport,
    apply_fluxes,
    boundary_state_flux,
    interface_fluxes,
    weir_interface_traces,
)
from . import _kernels
from .swe import GRAVITY, check_gravity
from .weir import WeirGeometry

CREST_ATOL = 1e-9


@dataclass
class PooledStepNetwork:
    """``weirs[i]`` joins the downstream end of ``canals[i]`` (its H_minus
    side) to the upstream end of ``canals[i + 1]`` (its H_plus side)."""

    canals: list
    weirs: list
    upstream: BoundarySignal
    downstream: BoundarySignal
    g: float = GRAVITY

    def __post_init__(self):
        check_gravity(self.g)
        if not self.canals:
            raise DomainError("a network needs at least one canal")
        if len(self.weirs) != len(self.canals) - 1:
            raise DomainError(
                f"expected {len(self.canals) - 1} weirs for {len(self.canals)} canals, got {len(self.weirs)}"
            )
        for i, w in enumerate(self.weirs):
            if w.g != self.g:
                raise DomainError(f"weir {i} uses gravity {w.g}, network uses {self.g}")
        bottoms = [c.bottom_elevation for c in self.canals]
        if any(b > a + CREST_ATOL for a, b in zip(bottoms, bottoms[1:])):
            raise DomainError("canal bottoms must not rise downstream")

    def validate_crests(self):
        """Check that each weir has one absolute crest elevation."""
        for i, w in enumerate(self.weirs):
            up = self.canals[i].bottom_elevation + w.H_minus
            down = self.canals[i + 1].bottom_elevation + w.H_plus
            if abs(up - down) > CREST_ATOL:
                raise DomainError(
                    f"weir {i}: crest elevation {up} seen from upstream differs from {down} seen downstream"
                )

    def copy(self) -> "PooledStepNetwork":
        return PooledStepNetwork(
            [c.copy() for c in self.canals], list(self.weirs), self.upstream, self.downstream, self.g
        )

    def with_frame(self, frame) -> "PooledStepNetwork":
        """Same network with cell averages taken from a snapshot frame."""
        net = self.copy()
        for c, f in zip(net.canals, frame):
            c.h = np.array(f.h, dtype=float)
            c.q = np.array(f.q, dtype=float)
        return net

    def with_weir(self, index: int, geometry: WeirGeometry) -> "PooledStepNetwork":
        net = self.copy()
        net.weirs[index] = geometry
        return net

    def volume(self) -> float:
        return sum(c.volume() for c in self.canals)

    def max_abs_velocity(self) -> float:
        return max(float(np.max(np.abs(c.q / c.h))) for c in self.canals)


@dataclass(frozen=True)
class CanalFrame:
    x: np.ndarray
    h: np.ndarray
    q: np.ndarray

    @property
    def v(self) -> np.ndarray:
        return self.q / self.h


@dataclass
class SnapshotSet:
    times: list = field(default_factory=list)
    frames: list = field(default_factory=list)

    def add(self, t, network: PooledStepNetwork):
        self.times.append(t)
        self.frames.append([CanalFrame(c.x, c.h.copy(), c.q.copy()) for c in network.canals])

    def at(self, t):
        return self.frames[self.times.index(t)]


@dataclass
class VolumeAudit:
    times: list = field(default_factory=list)
    volume: list = field(default_factory=list)
    inflow: list = field(default_factory=list)
    outflow: list = field(default_factory=list)

    def record(self, t, volume, inflow, outflow):
        self.times.append(t)
        self.volume.append(volume)
        self.inflow.append(inflow)
        self.outflow.append(outflow)

    def imbalance(self) -> float:
        """Worst relative mismatch between volume change and net boundary inflow."""
        v0 = self.volume[0]
        return max(
            abs((v - v0) - (i - o)) / max(abs(v0), 1e-300)
            for v, i, o in zip(self.volume, self.inflow, self.outflow)
        )


@dataclass
class RunResult:
    snapshots: SnapshotSet
    volume_audit: VolumeAudit
    step_count: int
    wall_time: float
    final: PooledStepNetwork
    t_end: float
    # mass flux through every weir (network weirs, then a downstream weir if any), per step
    step_times: np.ndarray | None = None
    weir_fluxes: np.ndarray | None = None


def step(network: PooledStepNetwork, t: float, cfl: float = DEFAULT_CFL, dt_max: float = np.inf) -> StepReport:
    """Advance the network in place by one global step starting at time ``t``.

    All coupling traces and end fluxes are computed from the same cell
    averages before any canal is updated.
    """
    if not 0.0 < cfl < 1.0:
        raise DomainError(f"CFL number must lie in (0, 1), got {cfl}")
    g = network.g
    canals = network.canals
    n = len(canals)
    left_flux = [None] * n
    right_flux = [None] * n
    speeds = []
    weir_q = []

    def cell(i, j):
        return canals[i].state(j)

    try:
        m, p, s = boundary_state_flux(network.upstream, cell(0, 0), t, "left", g)
        left_flux[0] = (m, p)
        speeds.append((s, canals[0].dx))
        for i, w in enumerate(network.weirs):
            tr = weir_interface_traces(cell(i, -1), cell(i + 1, 0), w)
            right_flux[i] = tr.left_flux(g)
            left_flux[i + 1] = tr.right_flux(g)
            lam_l = abs(tr.left_trace.v) + np.sqrt(g * tr.left_trace.h)
            lam_r = abs(tr.right_trace.v) + np.sqrt(g * tr.right_trace.h)
            speeds.append((lam_l, canals[i].dx))
            speeds.append((lam_r, canals[i + 1].dx))
            weir_q.append(tr.mass_flux)
        m, p, s = boundary_state_flux(network.downstream, cell(n - 1, -1), t, "right", g)
        right_flux[n - 1] = (m, p)
        speeds.append((s, canals[n - 1].dx))
    except PooledStepError as exc:
        raise type(exc)(f"t={t}: {exc}") from exc
    if network.downstream.kind == "weir":
        weir_q.append(m)

    fluxes = []
    for i, c in enumerate(canals):
        try:
            fluxes.append(interface_fluxes(c, left_flux[i], right_flux[i], g))
        except PooledStepError as exc:
            raise type(exc)(f"t={t}, canal {i}: {exc}") from exc
        speeds.append((_kernels.max_speed(c.h, c.q, g), c.dx))
    rate = max(s / dx for s, dx in speeds)
    dt = min(cfl / rate, dt_max)
    if not dt > 0.0:
        raise DomainError(f"non-positive time step {dt} at t={t}")
    updated = []
    for i, (c, (fm, fp)) in enumerate(zip(canals, fluxes)):
        try:
            updated.append(apply_fluxes(c, dt, fm, fp))
        except PositivityError as exc:
            raise PositivityError(f"t={t}, canal {i}: {exc}", time=t, canal=i, cell=exc.cell) from exc
    network.canals = updated
    return StepReport(dt, max(s for s, _ in speeds), list(zip(left_flux, right_flux)), weir_q)


def _event_times(network, t_start, t_end, snapshot_times):
    events = {t_end}
    events.update(t for t in snapshot_times if t_start < t < t_end)
    for sig in (network.upstream, network.downstream):
        events.update(t for t in sig.breakpoints() if t_start < t < t_end)
    return sorted(events)


def run(
    network: PooledStepNetwork,
    t_end: float,
    snapshot_times=(),
    cfl: float = DEFAULT_CFL,
    t_start: float = 0.0,
    record_weir_fluxes: bool = True,
    max_steps: int | None = None,
) -> RunResult:
    """Integrate from ``t_start`` to ``t_end``.

    Steps are clipped to land exactly on snapshot times and boundary schedule
    breakpoints, so a run restarted from any snapshot reproduces the
    remainder of the original run bit for bit.  The input network is not
    modified; the state at ``t_end`` is returned as ``result.final``.
    """
    if t_end < t_start:
        raise DomainError(f"t_end={t_end} precedes t_start={t_start}")
    start = _time.perf_counter()
    net = network.copy()
    snaps = SnapshotSet()
    audit = VolumeAudit()
    snap_set = {t for t in snapshot_times if t_start < t <= t_end}
    snaps.add(t_start, net)
    audit.record(t_start, net.volume(), 0.0, 0.0)

    events = _event_times(net, t_start, t_end, snapshot_times)
    t = t_start
    inflow = outflow = 0.0
    steps = 0
    step_times, weir_log = [], []
    k = 0
    while t < t_end:
        while events[k] <= t:
            k += 1
        target = events[k]
        report = step(net, t, cfl, dt_max=target - t)
        dt = report.dt
        inflow += dt * report.end_fluxes[0][0][0]
        outflow += dt * report.end_fluxes[-1][1][0]
        t = target if dt == target - t else t + dt
        steps += 1
        if record_weir_fluxes:
            step_times.append(t)
            weir_log.append(report.weir_mass_fluxes)
        if t in snap_set:
            snaps.add(t, net)
            audit.record(t, net.volume(), inflow, outflow)
        if max_steps is not None and steps >= max_steps:
            break
    if t not in snaps.times:
        snaps.add(t, net)
        audit.record(t, net.volume(), inflow, outflow)
    return RunResult(
        snaps,
        audit,
        steps,
        _time.perf_counter() - start,
        net,
        t,
        np.array(step_times) if record_weir_fluxes else None,
        np.array(weir_log) if record_weir_fluxes else None,
    )


def l1_distance(a: PooledStepNetwork, b: PooledStepNetwork) -> float:
    """``sum dx (|dh| + |dq|)`` over all canals."""
    total = 0.0
    for ca, cb in zip(a.canals, b.canals):
        total += ca.dx * float(np.sum(np.abs(ca.h - cb.h)) + np.sum(np.abs(ca.q - cb.q)))
    return total


def lipschitz_probe(base: PooledStepNetwork, perturbed: PooledStepNetwork, t: float, cfl: float = DEFAULT_CFL):
    """Paired runs for estimating the Lipschitz constant of the evolution.

    Returns ``(d_t, d_0, dH)``: the L1 distance of the two solutions at
    ``t``, at time 0, and the largest difference of the upstream crest
    heights.  The ratio ``d_t / (d_0 + t * dH)`` estimates the constant.
    """
    if len(base.canals) != len(perturbed.canals) or len(base.weirs) != len(perturbed.weirs):
        raise DomainError("probe networks must share their topology")
    d0 = l1_distance(base, perturbed)
    dH = max((abs(a.H_minus - b.H_minus) for a, b in zip(base.weirs, perturbed.weirs)), default=0.0)
    ra = run(base, t, cfl=cfl, record_weir_fluxes=False)
    rb = run(perturbed, t, cfl=cfl, record_weir_fluxes=False)
    return l1_distance(ra.final, rb.final), d0, dH
