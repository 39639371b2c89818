"""Trajectory metrics: Lyapunov spread, control effort, settling time.

The spread V(x) = max(x) - min(x) is the Lyapunov function all convergence
statements are phrased in. Control effort is the per-node integrated squared
control effort E_i = (int u_i^2 dt)^(1/2), accumulated with the left-endpoint
rule at the integrator step so the accounting matches the Euler update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "MetricSeries",
    "lyapunov_v",
    "isce_accumulate",
    "settling_time",
    "consensus_value",
]


@dataclass
class MetricSeries:
    """Per-step metric record of one trajectory.

    times, V, E_tot cover every integrator step. E_i is the per-node effort
    at the same times, (len(times), n) shaped, kept only when per-node
    tracking was requested; None otherwise. Fields are filled by the
    simulator and not revalidated here.
    """

    times: np.ndarray
    V: np.ndarray
    E_tot: np.ndarray
    E_i: Optional[np.ndarray] = None


def lyapunov_v(x) -> float:
    """Spread max(x) - min(x); zero exactly at consensus."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("state vector is empty")
    return float(np.max(x) - np.min(x))


def isce_accumulate(s_accum: np.ndarray, u, dt: float) -> np.ndarray:
    """Advance the squared-effort integrals S_i by one left-endpoint step.

    Returns the updated accumulator; E_i = sqrt(S_i) and E_tot = sum(E_i)
    are derived from it wherever a metric point is materialized.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = np.asarray(u, dtype=float)
    return s_accum + u * u * dt


def settling_time(series: MetricSeries, epsilon: float):
    """Earliest recorded time after which V stays at or below epsilon.

    The rule is the last up-crossing: the answer is the time of the sample
    right after the last violation, so chattering that re-crosses a small
    threshold does not produce a spuriously early time. None if V is still
    above epsilon at the final sample.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    violations = np.nonzero(series.V > epsilon)[0]
    if violations.size == 0:
        return float(series.times[0])
    last = int(violations[-1])
    if last == len(series.V) - 1:
        return None
    return float(series.times[last + 1])


def consensus_value(series: MetricSeries, x_final, epsilon: float) -> float:
    """Mean of the final state, guarded by the settledness check V <= epsilon."""
    v_final = float(series.V[-1])
    if v_final > epsilon:
        raise ValueError(
            f"trajectory not settled: final V = {v_final} exceeds epsilon = {epsilon}"
        )
    return float(np.mean(np.asarray(x_final, dtype=float)))
