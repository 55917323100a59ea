"""Reference pooled-step scenarios shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .config import CanalSpec, ScenarioConfig, Segment, SignalSpec, WeirSpec, load_config
from .fv import PRESCRIBED, WEIR

SHIPPED = {"scenario_a": "scenario_a.yaml", "scenario_b": "scenario_b.yaml"}


def pooled_steps(
    level: str = "low",
    drop: float = 0.0,
    crest: float = 1.5,
    n_canals: int = 3,
    n_cells: int = 200,
    length: float = 1.0,
    c_tilde: float = 0.6,
    inflow_discharge: float = 5.0,
    inflow_until: float = 20.0,
    t_end: float = 60.0,
    snapshot_every: float = 2.0,
) -> ScenarioConfig:
    """A descending chain of equal canals fed by a finite inflow wave.

    Every weir has height ``crest`` above its upstream bottom and
    ``crest + drop`` above its downstream bottom.  ``level`` selects the
    initial pool level, ``"low"`` (at rest at ``crest``) or ``"full"``
    (at rest at ``crest + drop``).  The inflow depth is twice the
    downstream crest height; after ``inflow_until`` the upstream state drops
    back to the low level at rest.  The last canal spills over a weir of the
    same crest into an absorbing reservoir.
    """
    if level not in ("low", "full"):
        raise ValueError(f"level must be 'low' or 'full', got {level!r}")
    h_minus, h_plus = crest, crest + drop
    h0 = h_minus if level == "low" else h_plus
    canals = tuple(
        CanalSpec(length, n_cells, (Segment(h0, 0.0),), (n_canals - 1 - i) * drop) for i in range(n_canals)
    )
    weirs = tuple(WeirSpec(h_minus, h_plus, c_tilde) for _ in range(n_canals - 1))
    upstream = SignalSpec(PRESCRIBED, ((0.0, 2.0 * h_plus, inflow_discharge), (inflow_until, h_minus, 0.0)))
    downstream = SignalSpec(WEIR, H_minus=h_minus, C_tilde=c_tilde)
    n_snap = int(round(t_end / snapshot_every))
    times = tuple(k * snapshot_every for k in range(n_snap + 1))
    return ScenarioConfig(canals, weirs, upstream, downstream, t_end, snapshot_times=times)


def scenario_a(**kw) -> ScenarioConfig:
    return pooled_steps(level="low", **kw)


def scenario_b(drop: float = 0.5, **kw) -> ScenarioConfig:
    return pooled_steps(level="full", drop=drop, **kw)


def shipped_path(name: str) -> Path:
    return Path(str(resources.files("pooledsteps") / "data" / SHIPPED[name]))


def resolve(spec: str) -> ScenarioConfig:
    """Load a config from a path or a shipped scenario name."""
    if spec in SHIPPED and not Path(spec).exists():
        return load_config(shipped_path(spec))
    return load_config(spec)
