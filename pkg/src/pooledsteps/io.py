"""CSV snapshot files and the run metadata record."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .network import CanalFrame, RunResult

HEADER = "x,h,v,q"


def snapshot_name(canal: int, t: float) -> str:
    """File name for 1-based canal index ``canal`` at time ``t``."""
    return f"canal{canal}_t{t:g}.csv"


def format_frame(frame: CanalFrame) -> str:
    lines = [HEADER]
    for x, h, q in zip(frame.x, frame.h, frame.q):
        lines.append(f"{x:.17g},{h:.17g},{q / h:.17g},{q:.17g}")
    return "\n".join(lines) + "\n"


def write_frame(path, frame: CanalFrame) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_frame(frame))


def read_frame(path) -> CanalFrame:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return CanalFrame(data[:, 0].copy(), data[:, 1].copy(), data[:, 3].copy())


def write_snapshots(result: RunResult, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, frames in zip(result.snapshots.times, result.snapshots.frames):
        for k, frame in enumerate(frames, start=1):
            p = out / snapshot_name(k, t)
            write_frame(p, frame)
            paths.append(p)
    return paths


def write_run_meta(result: RunResult, out_dir, config_hash: str) -> Path:
    audit = result.volume_audit
    lines = [
        f"config_sha256={config_hash}",
        f"step_count={result.step_count}",
        f"wall_time={result.wall_time:.6f}",
        f"t_end={result.t_end!r}",
        f"snapshot_count={len(result.snapshots.times)}",
        f"volume_imbalance={audit.imbalance():.17g}",
    ]
    for t, v, i, o in zip(audit.times, audit.volume, audit.inflow, audit.outflow):
        lines.append(f"volume_t{t:g}={v:.17g}")
        lines.append(f"inflow_t{t:g}={i:.17g}")
        lines.append(f"outflow_t{t:g}={o:.17g}")
    p = Path(out_dir) / "run_meta.txt"
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return p


def read_run_meta(path) -> dict:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        key, _, value = line.partition("=")
        out[key] = value
    return out
