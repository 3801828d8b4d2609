"""Scalar tracking metrics derived from a simulation trajectory."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .control import Reference, Trajectory
from .tuning import tracking_cost

SETTLING_BAND = 0.02  # fraction of the step size


class MetricsError(ValueError):
    """Trajectory too short or otherwise unusable for metrics."""


@dataclass(frozen=True)
class Metrics:
    """cost: negative absolute-error sum over the first 200 control steps;
    overshoot_pct: peak link angle beyond the step target, as a percentage
    of the step size (step references only, else nan);
    settling_time: first time after which |e1| stays inside the 2% band
    (nan if never settled); steady_state_error: mean |e1| over the final
    second; rms_error: root-mean-square of e1 over the whole record."""

    cost: float
    overshoot_pct: float
    settling_time: float
    steady_state_error: float
    rms_error: float


def step_overshoot(x1: np.ndarray, target: float, step_size: float) -> float:
    """Peak excursion of x1 beyond the step target, in percent of the step."""
    return max(0.0, float((np.max(x1) - target) / step_size) * 100.0)


def settling_time(t: np.ndarray, e1: np.ndarray, step_size: float,
                  band: float = SETTLING_BAND) -> float:
    """First time from which |e1| stays below band*step_size; nan if the
    error never stays inside the band."""
    inside = np.abs(e1) < band * step_size
    if not inside[-1]:
        return float("nan")
    # last index at which the trajectory was outside the band
    outside = np.nonzero(~inside)[0]
    if len(outside) == 0:
        return float(t[0])
    i = outside[-1] + 1
    return float(t[i])


def compute_metrics(traj: Trajectory, ref: Reference,
                    cost_steps: int = 200) -> Metrics:
    """Metrics over a completed tracking run.  The cost window is the first
    cost_steps control steps (the full square-wave protocol yields 200);
    shorter runs are scored over what they have."""
    if len(traj.records) < 2:
        raise MetricsError("trajectory has no simulated control steps")
    t, e1, x1 = traj.t, traj.e1, traj.x1
    cost = tracking_cost(traj, n_steps=min(cost_steps, len(traj.records)))
    if ref.kind in ("square", "constant"):
        target = traj.records[-1].x1d
        step = abs(target - traj.records[0].state.x1)
        if step == 0.0:
            step = 1.0
        ov = step_overshoot(x1, target, step)
        ts = settling_time(t, e1, step)
    else:
        ov = float("nan")
        ts = float("nan")
    final = t[-1]
    tail = np.abs(e1[t >= final - 1.0 + 1e-12])
    sse = float(np.mean(tail)) if len(tail) else float("nan")
    rms = float(np.sqrt(np.mean(e1 ** 2)))
    return Metrics(cost=cost, overshoot_pct=ov, settling_time=ts,
                   steady_state_error=sse, rms_error=rms)
