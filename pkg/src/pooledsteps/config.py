"""Scenario configuration: YAML schema, validation and network assembly."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from .exceptions import ConfigError, PooledStepError
from .fv import DEFAULT_CFL, FREE_OUTFLOW, PRESCRIBED, WALL, WEIR, BoundarySignal, CanalGrid
from .network import PooledStepNetwork
from .swe import GRAVITY, State
from .weir import WeirGeometry

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_CTILDE = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}

_SEGMENT = {
    "type": "object",
    "required": ["h", "v"],
    "additionalProperties": False,
    "properties": {"h": _POS, "v": _NUM, "x_end": _POS},
}

SCHEMA = {
    "type": "object",
    "required": ["canals", "weirs", "upstream", "downstream", "t_end"],
    "additionalProperties": False,
    "properties": {
        "gravity": _POS,
        "cfl": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "t_end": _NONNEG,
        "snapshot_times": {"type": "array", "items": _NONNEG},
        "output_dir": {"type": "string"},
        "canals": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["length", "n_cells", "initial"],
                "additionalProperties": False,
                "properties": {
                    "length": _POS,
                    "n_cells": {"type": "integer", "minimum": 2},
                    "bottom_elevation": _NUM,
                    "initial": {
                        "oneOf": [_SEGMENT, {"type": "array", "minItems": 1, "items": _SEGMENT}]
                    },
                },
            },
        },
        "weirs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["H_minus", "H_plus"],
                "additionalProperties": False,
                "properties": {"H_minus": _NONNEG, "H_plus": _NONNEG, "C_tilde": _CTILDE},
            },
        },
        "upstream": {"$ref": "#/definitions/signal"},
        "downstream": {"$ref": "#/definitions/signal"},
    },
    "definitions": {
        "signal": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": [PRESCRIBED, FREE_OUTFLOW, WEIR, WALL]},
                "schedule": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["t", "h", "hv"],
                        "additionalProperties": False,
                        "properties": {"t": _NONNEG, "h": _POS, "hv": _NUM},
                    },
                },
                "H_minus": _NONNEG,
                "H_plus": _NONNEG,
                "C_tilde": _CTILDE,
            },
        }
    },
}


@dataclass(frozen=True)
class Segment:
    h: float
    v: float
    x_end: float | None = None


@dataclass(frozen=True)
class CanalSpec:
    length: float
    n_cells: int
    initial: tuple
    bottom_elevation: float | None = None


@dataclass(frozen=True)
class WeirSpec:
    H_minus: float
    H_plus: float
    C_tilde: float = 0.6


@dataclass(frozen=True)
class SignalSpec:
    kind: str
    schedule: tuple = ()  # (t, h, hv) triples
    H_minus: float | None = None
    H_plus: float | None = None
    C_tilde: float = 0.6


@dataclass(frozen=True)
class ScenarioConfig:
    canals: tuple
    weirs: tuple
    upstream: SignalSpec
    downstream: SignalSpec
    t_end: float
    gravity: float = GRAVITY
    cfl: float = DEFAULT_CFL
    snapshot_times: tuple = ()
    output_dir: str | None = None

    @classmethod
    def from_dict(cls, data) -> "ScenarioConfig":
        validator = jsonschema.Draft7Validator(SCHEMA)
        errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
        if errors:
            err = errors[0]
            raise ConfigError(err.message, field=_field_path(err.absolute_path))
        canals = tuple(_canal_from_dict(c) for c in data["canals"])
        cfg = cls(
            canals=canals,
            weirs=tuple(WeirSpec(float(w["H_minus"]), float(w["H_plus"]), float(w.get("C_tilde", 0.6)))
                        for w in data["weirs"]),
            upstream=_signal_from_dict(data["upstream"]),
            downstream=_signal_from_dict(data["downstream"]),
            t_end=float(data["t_end"]),
            gravity=float(data.get("gravity", GRAVITY)),
            cfl=float(data.get("cfl", DEFAULT_CFL)),
            snapshot_times=tuple(float(t) for t in data.get("snapshot_times", ())),
            output_dir=data.get("output_dir"),
        )
        cfg.check()
        return cfg

    def check(self):
        """Cross-field rules the schema cannot express."""
        if len(self.weirs) != len(self.canals) - 1:
            raise ConfigError(
                f"{len(self.canals)} canals need {len(self.canals) - 1} weirs, found {len(self.weirs)}",
                field="weirs",
            )
        for i, c in enumerate(self.canals):
            segs = c.initial
            if len(segs) > 1 or segs[0].x_end is not None:
                ends = [s.x_end for s in segs]
                if any(e is None for e in ends):
                    raise ConfigError("every piecewise segment needs x_end", field=f"canals[{i}].initial")
                if any(b <= a for a, b in zip(ends, ends[1:])):
                    raise ConfigError("x_end values must increase", field=f"canals[{i}].initial")
                if ends[-1] < c.length:
                    raise ConfigError("segments must cover the canal", field=f"canals[{i}].initial")
        given = [c.bottom_elevation is not None for c in self.canals]
        if any(given) and not all(given):
            raise ConfigError("give bottom_elevation for every canal or for none", field="canals")
        times = list(self.snapshot_times)
        if times != sorted(times):
            raise ConfigError("snapshot times must be sorted", field="snapshot_times")
        for name, sig in (("upstream", self.upstream), ("downstream", self.downstream)):
            if sig.kind == PRESCRIBED:
                if not sig.schedule:
                    raise ConfigError("prescribed_state needs a schedule", field=f"{name}.schedule")
                ts = [e[0] for e in sig.schedule]
                if any(b <= a for a, b in zip(ts, ts[1:])):
                    raise ConfigError("schedule times must increase strictly", field=f"{name}.schedule")
            if sig.kind == WEIR:
                key = "H_minus" if name == "downstream" else "H_plus"
                if getattr(sig, key) is None:
                    raise ConfigError(f"weir boundary needs {key}", field=f"{name}.{key}")

    def to_dict(self) -> dict:
        out = {
            "gravity": self.gravity,
            "cfl": self.cfl,
            "t_end": self.t_end,
            "snapshot_times": list(self.snapshot_times),
            "canals": [_canal_to_dict(c) for c in self.canals],
            "weirs": [{"H_minus": w.H_minus, "H_plus": w.H_plus, "C_tilde": w.C_tilde} for w in self.weirs],
            "upstream": _signal_to_dict(self.upstream),
            "downstream": _signal_to_dict(self.downstream),
        }
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    def with_cells(self, n_cells: int) -> "ScenarioConfig":
        if n_cells < 2:
            raise ConfigError("need at least 2 cells per canal", field="--cells")
        return replace(self, canals=tuple(replace(c, n_cells=n_cells) for c in self.canals))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def dump(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None))

    def build_network(self) -> PooledStepNetwork:
        try:
            return _build(self)
        except ConfigError:
            raise
        except PooledStepError as exc:
            raise ConfigError(str(exc)) from exc


def _field_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _canal_from_dict(c) -> CanalSpec:
    init = c["initial"]
    if isinstance(init, dict):
        segs = (Segment(float(init["h"]), float(init["v"]), _opt(init.get("x_end"))),)
    else:
        segs = tuple(Segment(float(s["h"]), float(s["v"]), _opt(s.get("x_end"))) for s in init)
    return CanalSpec(float(c["length"]), int(c["n_cells"]), segs, _opt(c.get("bottom_elevation")))


def _canal_to_dict(c: CanalSpec) -> dict:
    segs = [_segment_to_dict(s) for s in c.initial]
    out = {"length": c.length, "n_cells": c.n_cells}
    if c.bottom_elevation is not None:
        out["bottom_elevation"] = c.bottom_elevation
    out["initial"] = segs[0] if len(segs) == 1 and c.initial[0].x_end is None else segs
    return out


def _segment_to_dict(s: Segment) -> dict:
    d = {"h": s.h, "v": s.v}
    if s.x_end is not None:
        d["x_end"] = s.x_end
    return d


def _signal_from_dict(d) -> SignalSpec:
    sched = tuple((float(e["t"]), float(e["h"]), float(e["hv"])) for e in d.get("schedule", ()))
    return SignalSpec(d["kind"], sched, _opt(d.get("H_minus")), _opt(d.get("H_plus")), float(d.get("C_tilde", 0.6)))


def _signal_to_dict(s: SignalSpec) -> dict:
    d = {"kind": s.kind}
    if s.schedule:
        d["schedule"] = [{"t": t, "h": h, "hv": hv} for t, h, hv in s.schedule]
    if s.kind == WEIR:
        if s.H_minus is not None:
            d["H_minus"] = s.H_minus
        if s.H_plus is not None:
            d["H_plus"] = s.H_plus
        d["C_tilde"] = s.C_tilde
    return d


def _opt(x):
    return None if x is None else float(x)


def _signal(spec: SignalSpec, g: float) -> BoundarySignal:
    if spec.kind == PRESCRIBED:
        return BoundarySignal.prescribed([(t, State.from_conservative(h, hv)) for t, h, hv in spec.schedule])
    if spec.kind == WEIR:
        H = spec.H_minus if spec.H_minus is not None else spec.H_plus
        Hp = spec.H_plus if spec.H_plus is not None else H
        return BoundarySignal.over_weir(WeirGeometry(H, Hp, spec.C_tilde, g))
    if spec.kind == WALL:
        return BoundarySignal.wall()
    return BoundarySignal.free_outflow()


def _initial_arrays(c: CanalSpec):
    n = c.n_cells
    x = (np.arange(n) + 0.5) * (c.length / n)
    h = np.empty(n)
    q = np.empty(n)
    if c.initial[0].x_end is None:
        s = c.initial[0]
        h[:] = s.h
        q[:] = s.h * s.v
        return h, q
    lo = 0.0
    for s in c.initial:
        mask = (x >= lo) & (x < s.x_end)
        h[mask] = s.h
        q[mask] = s.h * s.v
        lo = s.x_end
    return h, q


def _build(cfg: ScenarioConfig) -> PooledStepNetwork:
    g = cfg.gravity
    weirs = [WeirGeometry(w.H_minus, w.H_plus, w.C_tilde, g) for w in cfg.weirs]
    if cfg.canals[0].bottom_elevation is None:
        # stack the canals so each weir has one crest elevation; last bottom at 0
        bottoms = [0.0]
        for w in reversed(weirs):
            bottoms.insert(0, bottoms[0] + w.H_plus - w.H_minus)
    else:
        bottoms = [c.bottom_elevation for c in cfg.canals]
    canals = []
    for c, z in zip(cfg.canals, bottoms):
        h, q = _initial_arrays(c)
        canals.append(CanalGrid(c.length, h, q, z))
    net = PooledStepNetwork(canals, weirs, _signal(cfg.upstream, g), _signal(cfg.downstream, g), g)
    if cfg.canals[0].bottom_elevation is not None:
        net.validate_crests()
    return net


def load_config(path) -> ScenarioConfig:
    """Read and validate a YAML scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"YAML syntax error at {where}: {getattr(exc, 'problem', exc)}") from exc
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping")
    return ScenarioConfig.from_dict(data)
