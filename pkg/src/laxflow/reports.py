"""CSV and JSON emission for trajectories and invariant records.

Numeric CSV fields are printed with 17 significant digits and a '.'
decimal separator regardless of locale, so a written value round-trips
bit for bit and identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .dynamics import Trajectory, period_check
from .errors import SpanTooShort

__all__ = [
    "format_float",
    "trajectory_csv",
    "invariant_records_csv",
    "trajectory_summary",
    "write_text",
    "write_json",
    "write_trajectory_csv",
]


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def _kmax_of(traj: Trajectory) -> int:
    return traj.records[0].I.size if traj.samples else 0


def trajectory_csv(traj: Trajectory) -> str:
    """Full trajectory table: t, q_1.., p_1.., H, I_1.., absB_1.. ."""
    n = traj.params.n
    kmax = _kmax_of(traj)
    header = (["t"]
              + [f"q_{j}" for j in range(1, n + 1)]
              + [f"p_{j}" for j in range(1, n + 1)]
              + ["H"]
              + [f"I_{k}" for k in range(1, kmax + 1)]
              + [f"absB_{k}" for k in range(1, kmax + 1)])
    lines = [",".join(header)]
    for state, rec in traj.samples:
        row = ([format_float(state.t)]
               + [format_float(v) for v in state.q]
               + [format_float(v) for v in state.p]
               + [format_float(rec.H)]
               + [format_float(v) for v in rec.I]
               + [format_float(abs(v)) for v in rec.B])
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def invariant_records_csv(traj: Trajectory) -> str:
    """Invariant table: t, H, I_1.., ReB_1, ImB_1, ReB_2, ... ."""
    kmax = _kmax_of(traj)
    header = (["t", "H"]
              + [f"I_{k}" for k in range(1, kmax + 1)])
    for k in range(1, kmax + 1):
        header += [f"ReB_{k}", f"ImB_{k}"]
    lines = [",".join(header)]
    for _, rec in traj.samples:
        row = [format_float(rec.t), format_float(rec.H)]
        row += [format_float(v) for v in rec.I]
        for v in rec.B:
            row += [format_float(v.real), format_float(v.imag)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _relative_drift(values: np.ndarray, floor: float = 1e-30) -> float:
    ref = values[0]
    scale = max(abs(ref), floor)
    return float(np.abs(values - ref).max() / scale)


def trajectory_summary(traj: Trajectory) -> dict:
    """Drift maxima, period-return error and step statistics as a dict."""
    records = traj.records
    kmax = _kmax_of(traj)
    h_values = np.array([r.H for r in records])
    summary = {
        "source": traj.source,
        "scheme": traj.scheme,
        "dt": traj.dt,
        "n_samples": len(records),
        "t_first": records[0].t,
        "t_last": records[-1].t,
        "H_drift_rel": _relative_drift(h_values),
        "I_drift_rel": [],
        "absB_drift_rel": [],
        "step_stats": {
            "accepted": traj.step_stats.accepted,
            "rejected": traj.step_stats.rejected,
            "min_separation": (None if math.isinf(traj.step_stats.min_separation)
                               else traj.step_stats.min_separation),
        },
        "period_check": None,
    }
    for k in range(kmax):
        i_values = np.array([r.I[k] for r in records])
        b_values = np.array([abs(r.B[k]) for r in records])
        summary["I_drift_rel"].append(_relative_drift(i_values))
        # |B_k| can start at zero, so normalize like the phase-law check.
        summary["absB_drift_rel"].append(_relative_drift(b_values, floor=1.0))
    if traj.params.omega > 0.0 and traj.source == "numeric":
        try:
            summary["period_check"] = period_check(traj, traj.params.omega)
        except SpanTooShort:
            pass
    return summary


def write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_json(path: str, obj) -> None:
    write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_trajectory_csv(path: str, traj: Trajectory) -> None:
    write_text(path, trajectory_csv(traj))
