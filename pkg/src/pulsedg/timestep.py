"""Classical fourth-order Runge-Kutta driver over lists of coefficient arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import RecoveryError

LINEAR_H = "linear_h"
MATCHED_ORDER = "matched_order"


@dataclass(frozen=True)
class StepPolicy:
    cfl: float = 0.1
    dt_override: float | None = None
    dt_scaling: str = LINEAR_H

    def dt(self, h: float, k: int) -> float:
        if self.dt_override is not None:
            dt = self.dt_override
        elif self.dt_scaling == MATCHED_ORDER:
            dt = self.cfl * h ** ((k + 1) / 4.0)
        else:
            dt = self.cfl * h
        if dt <= 0:
            raise ValueError("step policy produced a non-positive dt")
        return dt


def _axpy(arrs, scale, deltas):
    return [a + scale * d for a, d in zip(arrs, deltas)]


class StepFailure(RuntimeError):
    def __init__(self, stage: int, s: float, cause: Exception):
        super().__init__(f"RK4 stage {stage} failed at s = {s:.6g}: {cause}")
        self.stage = stage


def rk4_step(arrs, rhs, s: float, dt: float, stage_hook=None):
    """One classical RK4 update of a list of coefficient arrays.

    rhs(s, arrs) performs any recovery it needs internally; stage_hook, if
    given, is called with (stage_index, s_stage, arrs_stage) before each of
    the four evaluations.
    """
    def stage(idx, c, state):
        if stage_hook is not None:
            stage_hook(idx, s + c * dt, state)
        try:
            return rhs(s + c * dt, state)
        except RecoveryError as exc:
            raise StepFailure(idx, s + c * dt, exc) from exc

    k1 = stage(0, 0.0, arrs)
    k2 = stage(1, 0.5, _axpy(arrs, 0.5 * dt, k1))
    k3 = stage(2, 0.5, _axpy(arrs, 0.5 * dt, k2))
    k4 = stage(3, 1.0, _axpy(arrs, dt, k3))
    return [a + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            for a, a1, a2, a3, a4 in zip(arrs, k1, k2, k3, k4)]


def run_to_time(arrs, rhs, T: float, dt: float, s0: float = 0.0,
                observers=(), observe_every: int = 1, stage_hook=None):
    """March to T with the final step truncated to land exactly on T.

    Observers are callables (step_index, s, arrs); each is invoked at s0,
    every observe_every steps, and at the final time.  Returns (arrs, s).
    """
    if T < s0:
        raise ValueError("final time precedes the start time")
    s = s0
    step = 0
    for obs in observers:
        obs(step, s, arrs)
    while s < T - 1e-14 * max(1.0, abs(T)):
        dt_eff = min(dt, T - s)
        arrs = rk4_step(arrs, rhs, s, dt_eff, stage_hook)
        s += dt_eff
        step += 1
        if step % observe_every == 0 or s >= T - 1e-14 * max(1.0, abs(T)):
            for obs in observers:
                obs(step, s, arrs)
    return arrs, s
