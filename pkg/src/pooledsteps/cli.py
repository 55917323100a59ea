"""``chute``: run pooled-step scenarios and query the exact solvers."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .exceptions import ConfigError, DomainError, PooledStepError
from .io import write_run_meta, write_snapshots
from .network import run
from .riemann import NONE, Wave
from .scenarios import resolve
from .swe import GRAVITY, State
from .weir import WeirGeometry, classify, gamma_residual, solve_weir_riemann

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def _fail(msg: str, code: int) -> int:
    print(f"chute: error: {msg}", file=sys.stderr)
    return code


def cmd_run(args) -> int:
    try:
        cfg = resolve(args.config)
        if args.cells is not None:
            cfg = cfg.with_cells(args.cells)
        if args.cfl is not None:
            if not 0.0 < args.cfl < 1.0:
                raise ConfigError(f"must lie in (0, 1), got {args.cfl}", field="--cfl")
            cfg = dataclasses.replace(cfg, cfl=args.cfl)
        net = cfg.build_network()
    except ConfigError as exc:
        return _fail(f"invalid config {args.config}: {exc}", EXIT_USAGE)
    out = Path(args.out or cfg.output_dir or Path("out") / Path(args.config).stem)
    try:
        result = run(net, cfg.t_end, cfg.snapshot_times, cfg.cfl)
    except PooledStepError as exc:
        return _fail(f"run failed: {exc}", EXIT_RUNTIME)
    paths = write_snapshots(result, out)
    write_run_meta(result, out, cfg.digest())
    print(f"{result.step_count} steps to t={result.t_end:g} in {result.wall_time:.2f} s")
    print(f"wrote {len(paths)} snapshot files and run_meta.txt to {out}")
    print(f"volume imbalance {result.volume_audit.imbalance():.3e}")
    return EXIT_OK


def _describe(name: str, wave: Wave) -> str:
    lo, hi = wave.speed_range
    if wave.kind == NONE:
        return f"{name}: none (zero strength)"
    if lo == hi:
        return f"{name}: {wave.kind}, speed {lo:.10g}"
    return f"{name}: {wave.kind}, speeds [{lo:.10g}, {hi:.10g}]"


def cmd_riemann(args) -> int:
    try:
        w = WeirGeometry(args.Hm, args.Hp, args.c_tilde, args.gravity)
        sol = solve_weir_riemann(State(args.hl, args.vl), State(args.hr, args.vr), w)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    except PooledStepError as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    lt, rt = sol.traces.left_trace, sol.traces.right_trace
    print(f"left trace  (k*, w*) = ({lt.h:.12g}, {lt.v:.12g})")
    print(f"right trace (k, w)   = ({rt.h:.12g}, {rt.v:.12g})")
    print(f"mass flux = {sol.traces.mass_flux:.12g}")
    print(_describe("1-wave", sol.left_wave))
    print(_describe("2-wave", sol.right_wave))
    for xi in args.sample or ():
        s = sol.sample(xi)
        print(f"xi={xi:g}: h={s.h:.12g} v={s.v:.12g}")
    return EXIT_OK


def cmd_classify(args) -> int:
    try:
        w = WeirGeometry(args.H, args.H, args.c_tilde, args.gravity)
        s = State(args.h, args.v)
        label = classify(s, args.side, w)
        res = gamma_residual(s, args.side, w)
    except PooledStepError as exc:
        return _fail(str(exc), EXIT_USAGE)
    print(label)
    print(f"gamma_residual={res:.12g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chute", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write CSV snapshots")
    p.add_argument("config", help="YAML config path or a shipped name (scenario_a, scenario_b)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--cfl", type=float)
    p.add_argument("--cells", type=int, help="cells per canal, overrides the config")
    p.set_defaults(func=cmd_run)

    def physics(p):
        p.add_argument("--c-tilde", type=float, default=0.6, dest="c_tilde")
        p.add_argument("--gravity", type=float, default=GRAVITY)

    p = sub.add_parser("riemann", help="exact Riemann problem at a weir")
    for name in ("hl", "vl", "hr", "vr", "Hm", "Hp"):
        p.add_argument(name, type=float)
    p.add_argument("--sample", type=float, nargs="+", metavar="XI", help="x/t values to sample")
    physics(p)
    p.set_defaults(func=cmd_riemann)

    p = sub.add_parser("classify", help="region of a trace state next to a weir")
    p.add_argument("h", type=float)
    p.add_argument("v", type=float)
    p.add_argument("side", choices=("left", "right"))
    p.add_argument("H", type=float)
    physics(p)
    p.set_defaults(func=cmd_classify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
