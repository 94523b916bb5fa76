"""Complementary volume schemes for the level-set Willmore flow.

The semi-implicit step solves one linear 21-point system per time step: the
weighted curvature ``w`` is written through the new level ``u^n`` with lagged
coefficients and substituted into the projected-gradient flux.  The matrix
is assembled by composing those two lagged stencils; the nodes on the two
outer rings of the grid are closed by linear extrapolation rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import floor

import numpy as np
from numba import njit

from ..linsolve import STENCIL_OFFSETS, SolverError, SparseSystem, solve_sparse
from ..ode import rkm_integrate
from .field import LevelSetField
from .redistance import REDISTANCE_INIT, redistance
from .stencil import DIRECTIONS, StencilQuantities, apply_w, averaged_gradients, compute_w, view, w_stencil


@dataclass
class LevelSetConfig:
    tau: float
    epsilon: float
    redistance_period: float | None = None
    redistance_init: str = "crossing"
    scheme: str = "semi-implicit"
    solver: str = "lu"
    delta: float | None = None
    rkm_tol: float = 1e-6
    linear_tol: float = 1e-9
    gmres_restart: int = 50
    ilut_drop_tol: float = 1e-4
    ilut_fill_factor: float = 20.0

    def __post_init__(self):
        if not self.tau > 0 or not self.epsilon > 0:
            raise ValueError("tau and epsilon must be positive")
        if self.redistance_period is not None and not self.redistance_period > 0:
            raise ValueError("redistance period must be positive")
        if self.redistance_init not in REDISTANCE_INIT:
            raise ValueError(f"unknown redistance initialization {self.redistance_init!r}")
        if self.scheme not in ("semi-implicit", "explicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.solver not in ("lu", "gmres-ilut"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.scheme == "explicit" and not (self.delta and self.delta > 0):
            raise ValueError("explicit scheme needs a positive phase-field width delta")


# -- boundary closure ------------------------------------------------------


def extrapolate_boundary(u: np.ndarray) -> np.ndarray:
    """Fill the two outer node rings linearly from the interior, in place.

    Rows along ``j`` are closed first, then rows along ``i`` (which also
    fixes the corner blocks).
    """
    for axis in (1, 0):
        a = np.moveaxis(u, axis, 0)
        a[1] = 2 * a[2] - a[3]
        a[0] = 2 * a[1] - a[2]
        a[-2] = 2 * a[-3] - a[-4]
        a[-1] = 2 * a[-2] - a[-3]
    return u


def _boundary_rows(shape):
    """Band masks: nodes closed along ``i`` (low, high) and along ``j`` (low, high)."""
    n1, n2 = shape
    i = np.arange(n1)[:, None] * np.ones((1, n2), dtype=int)
    j = np.ones((n1, 1), dtype=int) * np.arange(n2)[None, :]
    i_lo, i_hi = i <= 1, i >= n1 - 2
    i_band = i_lo | i_hi
    j_lo = (j <= 1) & ~i_band
    j_hi = (j >= n2 - 2) & ~i_band
    return i_lo, i_hi, j_lo, j_hi


# -- the discrete operator -------------------------------------------------


def _ring2(a):
    return view(a, 2)


def willmore_operator(st: StencilQuantities, v: np.ndarray) -> np.ndarray:
    """Lagged right-hand side ``L(v)`` evaluated for a trial field `v`.

    ``L(v) = Qbar/(2h^2) sum c^{rs} (v_nb - v) - Qbar/h^2 sum h <E^{rs} grad^{rs} w[v], nu_rs>``
    where ``c^{rs} = what^2 / Q^3`` and ``w[v]`` uses the lagged coefficients.
    Zero on the two outer rings.
    """
    h2 = st.h**2
    wv = apply_w(st, v)
    c = _ring2(v)
    diffusion = np.zeros_like(c)
    for rs in DIRECTIONS:
        r, s = rs
        coef = st.what(rs) ** 2 / _ring2(st.Q[rs]) ** 3
        diffusion += coef * (view(v, 2, r, s) - c)

    def W(a, b):
        return view(wv, 2, a, b)

    flux = np.zeros_like(c)
    w0 = W(0, 0)
    for r in (1, -1):
        e11, e12, _ = (_ring2(x) for x in st.E[(r, 0)])
        flux += e11 * (W(r, 0) - w0) + 0.25 * r * e12 * (W(0, 1) + W(r, 1) - W(0, -1) - W(r, -1))
    for s in (1, -1):
        _, e21, e22 = (_ring2(x) for x in st.E[(0, s)])
        flux += e22 * (W(0, s) - w0) + 0.25 * s * e21 * (W(1, 0) + W(1, s) - W(-1, 0) - W(-1, s))
    qbar = _ring2(st.Qbar)
    out = np.zeros(v.shape)
    view(out, 2)[...] = qbar / (2 * h2) * diffusion - qbar / h2 * flux
    return out


def _flux_w_coefficients(st: StencilQuantities) -> dict:
    """Row coefficients of the flux term with respect to ``w`` on the 3x3 block."""
    G = {(a, b): 0.0 for a in (-1, 0, 1) for b in (-1, 0, 1)}
    for r in (1, -1):
        e11, e12, _ = (_ring2(x) for x in st.E[(r, 0)])
        G[(r, 0)] = G[(r, 0)] + e11
        G[(0, 0)] = G[(0, 0)] - e11
        for b, sign in ((1, 1.0), (-1, -1.0)):
            G[(0, b)] = G[(0, b)] + sign * 0.25 * r * e12
            G[(r, b)] = G[(r, b)] + sign * 0.25 * r * e12
    for s in (1, -1):
        _, e21, e22 = (_ring2(x) for x in st.E[(0, s)])
        G[(0, s)] = G[(0, s)] + e22
        G[(0, 0)] = G[(0, 0)] - e22
        for a, sign in ((1, 1.0), (-1, -1.0)):
            G[(a, 0)] = G[(a, 0)] + sign * 0.25 * s * e21
            G[(a, s)] = G[(a, s)] + sign * 0.25 * s * e21
    return G


def interior_coefficients(st: StencilQuantities, tau: float) -> dict:
    """21-point coefficients ``A^{rs}`` for nodes two or more away from the boundary.

    Arrays have the shape of the interior block.  ``st.w`` must hold the
    lagged weighted curvature.
    """
    if st.w is None:
        raise ValueError("stencil quantities need w; call compute_w first")
    h2 = st.h**2
    qbar = _ring2(st.Qbar)
    A = {rs: np.zeros_like(qbar) for rs in STENCIL_OFFSETS}
    A[(0, 0)] += 1.0
    for rs in DIRECTIONS:
        coef = tau * qbar / (2 * h2) * st.what(rs) ** 2 / _ring2(st.Q[rs]) ** 3
        A[(0, 0)] += coef
        A[rs] -= coef
    Wc = w_stencil(st)
    for (a, b), g in _flux_w_coefficients(st).items():
        g = tau * qbar / h2 * g
        for (p, q), wc in Wc.items():
            A[(a + p, b + q)] += g * view(wc, 2, a, b)
    return A


def assemble_semi_implicit_system(field: LevelSetField, st: StencilQuantities, tau: float) -> SparseSystem:
    """Full grid system: interior 21-point rows plus extrapolation rows."""
    shape = field.u.shape
    coeffs = {rs: np.zeros(shape) for rs in STENCIL_OFFSETS}
    for rs, a in interior_coefficients(st, tau).items():
        view(coeffs[rs], 2)[...] = a
    i_lo, i_hi, j_lo, j_hi = _boundary_rows(shape)
    for mask, step in ((i_lo, (1, 0)), (i_hi, (-1, 0)), (j_lo, (0, 1)), (j_hi, (0, -1))):
        coeffs[(0, 0)][mask] = 1.0
        coeffs[step][mask] = -2.0
        coeffs[(2 * step[0], 2 * step[1])][mask] = 1.0
    rhs = np.zeros(shape)
    view(rhs, 2)[...] = view(field.u, 2)
    if not all(np.all(np.isfinite(a)) for a in coeffs.values()):
        raise SolverError("non-finite coefficients in level-set system")
    return SparseSystem(shape, coeffs, rhs)


# -- explicit right-hand side ----------------------------------------------


def explicit_rhs_reference(u: np.ndarray, h: float, epsilon: float) -> np.ndarray:
    """Array form of :func:`explicit_rhs`, built from the shared stencil pieces."""
    u = extrapolate_boundary(np.array(u, dtype=float, copy=True))
    st = averaged_gradients(u, h, epsilon)
    compute_w(u, st)
    return willmore_operator(st, u)


@njit(cache=True)
def _explicit_kernel(u, h, eps):
    n1, n2 = u.shape
    h2 = h * h
    e2 = eps * eps
    Q = np.zeros((4, n1, n2))
    E1 = np.zeros((4, n1, n2))  # E11 on x-edges, E22 on y-edges
    E2 = np.zeros((4, n1, n2))  # the off-diagonal entry
    qbar = np.zeros((n1, n2))
    w = np.zeros((n1, n2))
    di = (1, -1, 0, 0)
    dj = (0, 0, 1, -1)
    for i in range(1, n1 - 1):
        for j in range(1, n2 - 1):
            c = u[i, j]
            acc = 0.0
            for k in range(4):
                r, s = di[k], dj[k]
                if s == 0:
                    gx = r * (u[i + r, j] - c) / h
                    gy = (u[i, j + 1] + u[i + r, j + 1] - u[i, j - 1] - u[i + r, j - 1]) / (4.0 * h)
                else:
                    gx = (u[i + 1, j] + u[i + 1, j + s] - u[i - 1, j] - u[i - 1, j + s]) / (4.0 * h)
                    gy = s * (u[i, j + s] - c) / h
                q = np.sqrt(e2 + gx * gx + gy * gy)
                Q[k, i, j] = q
                if s == 0:
                    E1[k, i, j] = (1.0 - gx * gx / (q * q)) / q
                else:
                    E1[k, i, j] = (1.0 - gy * gy / (q * q)) / q
                E2[k, i, j] = -gx * gy / (q * q * q)
                acc += (u[i + r, j + s] - c) / q
            qb = 0.25 * (Q[0, i, j] + Q[1, i, j] + Q[2, i, j] + Q[3, i, j])
            qbar[i, j] = qb
            w[i, j] = qb * acc / h2
    out = np.zeros((n1, n2))
    for i in range(2, n1 - 2):
        for j in range(2, n2 - 2):
            c = u[i, j]
            w0 = w[i, j]
            diff = 0.0
            for k in range(4):
                r, s = di[k], dj[k]
                wh = 0.5 * (w0 + w[i + r, j + s])
                q = Q[k, i, j]
                diff += wh * wh / (q * q * q) * (u[i + r, j + s] - c)
            flux = 0.0
            for k in range(2):
                r = di[k]
                flux += E1[k, i, j] * (w[i + r, j] - w0) + 0.25 * r * E2[k, i, j] * (
                    w[i, j + 1] + w[i + r, j + 1] - w[i, j - 1] - w[i + r, j - 1])
            for k in range(2, 4):
                s = dj[k]
                flux += E1[k, i, j] * (w[i, j + s] - w0) + 0.25 * s * E2[k, i, j] * (
                    w[i + 1, j] + w[i + 1, j + s] - w[i - 1, j] - w[i - 1, j + s])
            out[i, j] = qbar[i, j] / (2.0 * h2) * diff - qbar[i, j] / h2 * flux
    return out


def explicit_rhs(u: np.ndarray, h: float, epsilon: float) -> np.ndarray:
    """``du/dt`` with every coefficient taken from `u` itself (boundary rings closed first).

    Compiled loop over nodes; agrees with :func:`explicit_rhs_reference` to rounding.
    """
    u = extrapolate_boundary(np.array(u, dtype=float, copy=True))
    return _explicit_kernel(u, float(h), float(epsilon))


# -- initial data ----------------------------------------------------------


def phase_field_init(d, delta: float):
    """``delta * sgn(d) * (1 - exp(-|d| / delta))`` applied pointwise."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    d = np.asarray(d, dtype=float)
    return -delta * np.sign(d) * np.expm1(-np.abs(d) / delta)


def inverse_phase_field(u, delta: float):
    ratio = np.clip(np.abs(np.asarray(u, dtype=float)) / delta, 0.0, 1.0 - 1e-16)
    return -np.sign(u) * delta * np.log1p(-ratio)


# -- time stepping ---------------------------------------------------------


@dataclass
class LevelSetStats:
    linear: list = field(default_factory=list)
    redistance_times: list = field(default_factory=list)
    rkm_steps: int = 0
    rkm_rejected: int = 0
    dt_min: float = np.inf
    dt_max: float = 0.0
    # called as on_redistance(before, after) around every redistancing
    on_redistance: object = None


def _crossed(t0: float, t1: float, period: float | None) -> bool:
    if period is None:
        return False
    slack = 1e-9
    return floor(t1 / period + slack) > floor(t0 / period + slack)


def _maybe_redistance(field: LevelSetField, t_prev: float, cfg: LevelSetConfig, stats) -> LevelSetField:
    if not _crossed(t_prev, field.t, cfg.redistance_period):
        return field
    if cfg.scheme == "explicit":
        d = redistance(inverse_phase_field(field.u, cfg.delta), field.h, cfg.redistance_init)
        u = phase_field_init(d, cfg.delta)
    else:
        u = redistance(field.u, field.h, cfg.redistance_init)
    after = field.replace(u=u)
    if stats is not None:
        stats.redistance_times.append(field.t)
        if stats.on_redistance is not None:
            stats.on_redistance(field, after)
    return after


def step_semi_implicit(field: LevelSetField, cfg: LevelSetConfig, stats: LevelSetStats | None = None) -> LevelSetField:
    st = averaged_gradients(field.u, field.h, cfg.epsilon)
    compute_w(field.u, st)
    system = assemble_semi_implicit_system(field, st, cfg.tau)
    u, report = solve_sparse(
        system,
        cfg.solver,
        cfg.linear_tol,
        x0=field.u,
        restart=cfg.gmres_restart,
        drop_tol=cfg.ilut_drop_tol,
        fill_factor=cfg.ilut_fill_factor,
    )
    if stats is not None:
        stats.linear.append(report)
    extrapolate_boundary(u)
    new = field.replace(u=u, t=field.t + cfg.tau)
    return _maybe_redistance(new, field.t, cfg, stats)


def step_explicit(
    field: LevelSetField, cfg: LevelSetConfig, stats: LevelSetStats | None = None, dt0: float | None = None
) -> tuple[LevelSetField, float]:
    """Advance by ``cfg.tau`` with adaptive Runge-Kutta-Merson substeps.

    Returns the new field and the last accepted substep, to seed the next call.
    """
    h, eps = field.h, cfg.epsilon
    res = rkm_integrate(
        lambda t, y: explicit_rhs(y, h, eps),
        field.u,
        (field.t, field.t + cfg.tau),
        cfg.rkm_tol,
        dt0=dt0,
    )
    if stats is not None:
        stats.rkm_steps += res.steps
        stats.rkm_rejected += res.rejected
        stats.dt_min = min(stats.dt_min, res.dt_min)
        stats.dt_max = max(stats.dt_max, res.dt_max)
    u = extrapolate_boundary(res.y)
    new = field.replace(u=u, t=field.t + cfg.tau)
    return _maybe_redistance(new, field.t, cfg, stats), res.dt_last


def evolve(
    field: LevelSetField,
    cfg: LevelSetConfig,
    t_final: float,
    save_times=(),
    save_every: int = 0,
    callback=None,
    stats: LevelSetStats | None = None,
):
    """Run ``round(t_final / tau)`` steps; returns the list of saved fields.

    The initial and final fields are always saved.  ``callback(field)`` runs
    after every step.  No redistancing is done on the final step.
    """
    steps = int(round(t_final / cfg.tau))
    save_steps = {int(round(t / cfg.tau)) for t in save_times}
    saved = [field]
    dt = None
    last = replace(cfg, redistance_period=None)
    for n in range(1, steps + 1):
        c = last if n == steps else cfg
        if cfg.scheme == "semi-implicit":
            field = step_semi_implicit(field, c, stats)
        else:
            field, dt = step_explicit(field, c, stats, dt)
        if callback is not None:
            callback(field)
        if n == steps or n in save_steps or (save_every and n % save_every == 0):
            saved.append(field)
    return saved
