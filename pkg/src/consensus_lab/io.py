"""Deterministic CSV and JSON writers for trajectories and benchmark tables.

Floats are printed with 17 significant digits so every value round-trips
bit-exactly and identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json

import numpy as np

__all__ = [
    "FLOAT_FMT",
    "load_x0",
    "write_trajectory_csv",
    "write_metrics_csv",
    "write_events_csv",
    "write_results_csv",
    "write_meta_json",
]

FLOAT_FMT = "%.17g"


def _fmt(value) -> str:
    return FLOAT_FMT % (value,)


def load_x0(path) -> np.ndarray:
    """Initial state from a text file, one float per line; blanks skipped."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
    if not values:
        raise ValueError(f"{path}: no values found")
    return np.array(values)


def write_trajectory_csv(path, traj) -> None:
    """Recorded samples as t,x_0,...,x_{n-1},V,E_tot rows."""
    n = traj.states.shape[1]
    idxs = np.searchsorted(traj.metrics.times, traj.times)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"x_{i}" for i in range(n)] + ["V", "E_tot"])
        for row, k in enumerate(idxs):
            writer.writerow(
                [_fmt(traj.times[row])]
                + [_fmt(v) for v in traj.states[row]]
                + [_fmt(traj.metrics.V[k]), _fmt(traj.metrics.E_tot[k])]
            )


def write_metrics_csv(path, metrics, per_node=False) -> None:
    """Per-step metric series as t,V,E_tot (plus E_i columns on request)."""
    if per_node and metrics.E_i is None:
        raise ValueError("per-node effort was not tracked in this run")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["t", "V", "E_tot"]
        if per_node:
            header += [f"E_i_{i}" for i in range(metrics.E_i.shape[1])]
        writer.writerow(header)
        for k in range(len(metrics.times)):
            row = [_fmt(metrics.times[k]), _fmt(metrics.V[k]), _fmt(metrics.E_tot[k])]
            if per_node:
                row += [_fmt(v) for v in metrics.E_i[k]]
            writer.writerow(row)


def write_events_csv(path, events) -> None:
    """Topology switches as t,from,to rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "from", "to"])
        for t, src, dst in events:
            writer.writerow([_fmt(t), str(src), str(dst)])


def write_results_csv(path, rows) -> None:
    """Benchmark table; the fixed-time family repeats its gain as k1 = k2."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["n", "lambda2", "protocol", "direction", "k", "k1", "k2",
             "settling_time", "E_tot", "dt", "epsilon"]
        )
        for r in rows:
            gains = (
                [_fmt(r.gain), _fmt(r.gain), _fmt(r.gain)]
                if r.protocol == "fixed_time"
                else [_fmt(r.gain), "", ""]
            )
            writer.writerow(
                [str(r.n), _fmt(r.lambda2), r.protocol, r.direction]
                + gains
                + [_fmt(r.settling_time), _fmt(r.e_tot), _fmt(r.dt), _fmt(r.epsilon)]
            )


def write_meta_json(path, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
