"""Semi-implicit flowing finite volume scheme for the Willmore flow of curves.

Each step computes, in this order: the tangential velocity from the volume
balance of the redistribution equation, new local lengths through
``eta = ln r``, new curvatures from a periodic pentadiagonal system, and new
node positions from a second pentadiagonal system with two right-hand sides.
Nonlinear coefficients are lagged one step; fourth-order terms are implicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import DiscreteCurve, curve_average_kbeta, elastic_energy, normal_velocity_from, nxt, prv
from .linsolve import PentaSystem, SolveReport, SolverError, solve_penta_direct, solve_penta_periodic


@dataclass
class LagrangianConfig:
    tau: float
    omega: float = 1.0
    gs_tol: float = 1e-10
    gs_max_iters: int = 1_000_000
    solver: str = "gauss-seidel"  # or "direct"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if not self.gs_tol > 0:
            raise ValueError("gs_tol must be positive")
        if self.solver not in ("gauss-seidel", "direct"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass
class StepStats:
    curvature: SolveReport
    position: SolveReport


def tangential_increments(curve: DiscreteCurve, omega: float) -> np.ndarray:
    """``alpha_i - alpha_{i-1}`` from the previous state; sums to zero."""
    L = curve.total_length
    B = curve_average_kbeta(curve)
    return curve.r * (curve.k * curve.beta - B) + omega * (L / curve.n - curve.r)


def compute_tangential_velocity(curve: DiscreteCurve, cfg: LagrangianConfig) -> np.ndarray:
    """Running sum of the volume increments starting from ``alpha_0 = 0``.

    The last entry is ``alpha_n`` which equals ``alpha_0`` up to rounding; it
    is set to zero exactly so the periodic closure is consistent.
    """
    alpha = np.cumsum(tangential_increments(curve, cfg.omega))
    alpha[-1] = 0.0
    return alpha


def update_local_lengths(curve: DiscreteCurve, alpha: np.ndarray, cfg: LagrangianConfig):
    """New ``(eta, r, q, L)`` from the lagged normal velocity and new ``alpha``."""
    r = curve.r
    deta = (cfg.tau / r) * (-r * curve.k * curve.beta + alpha - prv(alpha))
    eta = curve.eta + deta
    with np.errstate(over="raise"):
        try:
            r_new = np.exp(eta)
        except FloatingPointError:
            raise SolverError("length blow-up") from None
    if not np.all(np.isfinite(r_new)) or np.any(r_new <= 0):
        raise SolverError("length blow-up")
    q_new = 0.5 * (r_new + nxt(r_new))
    return eta, r_new, q_new, float(np.sum(r_new))


def _check_lengths(r, q):
    if np.any(r == 0) or np.any(q == 0):
        raise ValueError("degenerate volume")


def assemble_curvature_system(
    curve: DiscreteCurve, r: np.ndarray, alpha: np.ndarray, cfg: LagrangianConfig
) -> PentaSystem:
    """Pentadiagonal system for ``k^j``.

    ``curve`` is the state at step ``j-1`` (supplies ``k, beta`` and the lagged
    ``r`` in the ``r k beta`` term); ``r`` are the new local lengths.
    """
    q = 0.5 * (r + nxt(r))
    _check_lengths(r, q)
    tau = cfg.tau
    k_old, beta_old, r_old = curve.k, curve.beta, curve.r
    r_m, r_p = prv(r), nxt(r)
    q_m, q_mm, q_p = prv(q), prv(q, 2), nxt(q)
    alpha_m = prv(alpha)

    a = 1.0 / (q_m * r_m * q_mm)
    e = 1.0 / (q * r_p * q_p)
    b = -(1.0 / (r * q * q_m) + 1.0 / (r * q_m**2) + 1.0 / (q_m**2 * r_m) + a) + 0.5 * alpha_m
    d = -(e + 1.0 / (q**2 * r_p) + 1.0 / (r * q**2) + 1.0 / (r * q * q_m)) - 0.5 * alpha
    c = (
        1.0 / (q**2 * r_p)
        + 1.0 / (r * q**2)
        + 2.0 / (r * q * q_m)
        + 1.0 / (r * q_m**2)
        + 1.0 / (q_m**2 * r_m)
        + r / tau
        - r_old * k_old * beta_old
        + 0.5 * alpha
        - 0.5 * alpha_m
    )
    k3 = k_old**3
    f = r / tau * k_old + (k3 - prv(k3)) / (2.0 * q_m) - (nxt(k3) - k3) / (2.0 * q)
    return PentaSystem(a, b, c, d, e, f)


def assemble_position_system(
    nodes_old: np.ndarray, r: np.ndarray, k: np.ndarray, alpha: np.ndarray, cfg: LagrangianConfig
) -> PentaSystem:
    """Pentadiagonal system for both node coordinates (``f`` has two columns)."""
    q = 0.5 * (r + nxt(r))
    _check_lengths(r, q)
    r_m, r_p, r_pp = prv(r), nxt(r), nxt(r, 2)
    q_m, q_p = prv(q), nxt(q)
    k_p = nxt(k)

    A = 1.0 / (r * q_m * r_m)
    E = 1.0 / (r_p * q_p * r_pp)
    B = -(A + 1.0 / (r**2 * q_m) + 1.0 / (r**2 * q) + 1.0 / (r * q * r_p)) + 1.5 * k**2 / r + 0.5 * alpha
    D = (
        -(1.0 / (r * q * r_p) + 1.0 / (r_p**2 * q) + 1.0 / (r_p**2 * q_p) + E)
        + 1.5 * k_p**2 / r_p
        - 0.5 * alpha
    )
    C = q / cfg.tau - (A + B + D + E)
    F = (q / cfg.tau)[:, None] * nodes_old
    return PentaSystem(A, B, C, D, E, F)


def _solve(system: PentaSystem, guess: np.ndarray, cfg: LagrangianConfig):
    if cfg.solver == "direct":
        return solve_penta_direct(system)
    try:
        return solve_penta_periodic(system, guess, cfg.gs_tol, cfg.gs_max_iters)
    except SolverError:
        return solve_penta_direct(system)


def step(curve: DiscreteCurve, cfg: LagrangianConfig, stats: list | None = None) -> DiscreteCurve:
    """Advance the curve by one time step ``cfg.tau``."""
    alpha = compute_tangential_velocity(curve, cfg)
    eta, r, q, _ = update_local_lengths(curve, alpha, cfg)
    k_sys = assemble_curvature_system(curve, r, alpha, cfg)
    k, k_rep = _solve(k_sys, curve.k, cfg)
    x_sys = assemble_position_system(curve.nodes, r, k, alpha, cfg)
    nodes, x_rep = _solve(x_sys, curve.nodes, cfg)
    if stats is not None:
        stats.append(StepStats(k_rep, x_rep))
    return DiscreteCurve(
        nodes=nodes,
        r=r,
        eta=eta,
        k=k,
        alpha=alpha,
        beta=normal_velocity_from(r, q, k),
        t=curve.t + cfg.tau,
    )


@dataclass
class Trajectory:
    """Saved states of an evolution plus per-step diagnostics."""

    states: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    stats: list = field(default_factory=list)


def evolve(
    curve: DiscreteCurve,
    cfg: LagrangianConfig,
    t_final: float,
    save_every: int = 0,
    save_times=(),
    callback=None,
) -> Trajectory:
    """Run ``round(t_final / tau)`` steps.

    States are kept every `save_every` steps (0: only first and last) and at the
    steps nearest to each of `save_times`.  ``callback(curve)`` is invoked after
    every step.
    """
    steps = int(round(t_final / cfg.tau))
    save_steps = {int(round(t / cfg.tau)) for t in save_times}
    traj = Trajectory(states=[curve], energies=[elastic_energy(curve)])
    for j in range(1, steps + 1):
        curve = step(curve, cfg, traj.stats)
        traj.energies.append(elastic_energy(curve))
        if callback is not None:
            callback(curve)
        if j == steps or j in save_steps or (save_every and j % save_every == 0):
            traj.states.append(curve)
    return traj
