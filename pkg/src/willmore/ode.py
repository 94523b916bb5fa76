"""Runge-Kutta-Merson integrator with embedded error control."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linsolve import SolverError

DT_UNDERFLOW = 1e-14


@dataclass
class RKMResult:
    t: float
    y: np.ndarray
    steps: int = 0
    rejected: int = 0
    dt_last: float = 0.0
    dt_min: float = np.inf
    dt_max: float = 0.0
    trajectory: list = field(default_factory=list)


def merson_step(rhs, t, y, dt):
    """One Merson step; returns the fourth-order update and the error estimate."""
    k1 = rhs(t, y)
    k2 = rhs(t + dt / 3, y + dt * k1 / 3)
    k3 = rhs(t + dt / 3, y + dt * (k1 + k2) / 6)
    k4 = rhs(t + dt / 2, y + dt * (k1 + 3 * k3) / 8)
    k5 = rhs(t + dt, y + dt * (k1 - 3 * k3 + 4 * k4) / 2)
    y_new = y + dt * (k1 + 4 * k4 + k5) / 6
    err = dt * (2 * k1 - 9 * k3 + 8 * k4 - k5) / 30
    return y_new, err


def rkm_integrate(rhs, y0, t_span, tol: float = 1e-6, dt0: float | None = None, keep_trajectory: bool = False):
    """Integrate ``y' = rhs(t, y)`` over `t_span`.

    A step is accepted when the max-norm of the Merson error estimate is at
    most `tol`; rejected steps are halved.  After an accepted step with error
    below ``tol / 32`` the step doubles.  Steps never exceed the interval.

    Raises
    ------
    SolverError
        ``"stiff blow-up"`` when the step falls below 1e-14.
    """
    t, t_end = map(float, t_span)
    y = np.array(y0, dtype=float, copy=True)
    span = t_end - t
    dt = span if dt0 is None else min(dt0, span)
    res = RKMResult(t, y)
    if keep_trajectory:
        res.trajectory.append((t, y.copy()))
    while t_end - t > 1e-15 * max(1.0, abs(t_end)):
        dt = min(dt, t_end - t)
        y_new, err = merson_step(rhs, t, y, dt)
        est = float(np.max(np.abs(err))) if err.size else 0.0
        if not np.isfinite(est) or est > tol:
            res.rejected += 1
            dt *= 0.5
            if dt < DT_UNDERFLOW:
                raise SolverError("stiff blow-up", est)
            continue
        t += dt
        y = y_new
        res.steps += 1
        res.dt_last = dt
        res.dt_min = min(res.dt_min, dt)
        res.dt_max = max(res.dt_max, dt)
        if keep_trajectory:
            res.trajectory.append((t, y.copy()))
        if est < tol / 32:
            dt *= 2.0
    res.t, res.y = t, y
    return res
