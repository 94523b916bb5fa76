"""Independent reference implementations used by the test suite.

Nothing here imports the package's assembly code.  The Lagrangian matrices
are built by composing the finite-volume difference operators; the level-set
operator is a plain loop over nodes, turned into a matrix by probing with
unit vectors; the closed-form 21-point coefficients are written out term by
term with the index corrections listed in the decisions ledger.
"""

from __future__ import annotations

import numpy as np

DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


# -- Lagrangian -----------------------------------------------------------


def _shift(n, k):
    """Dense matrix of ``v -> v_{i+k}`` (periodic)."""
    return np.roll(np.eye(n), k, axis=1)


def curvature_matrix(r, r_old, k_old, beta_old, alpha, tau):
    """Curvature system from composed difference operators.

    ``r_i (k_i - k_i^old)/tau`` balances minus the jump of the third
    derivative over volume ``i``, the transport ``(alpha k)`` flux, the
    lagged source ``r k beta k`` and the jump of ``(k^3)_s / 2``.
    """
    n = len(r)
    q = 0.5 * (r + np.roll(r, -1))
    S = lambda k: _shift(n, k)
    I = np.eye(n)
    # derivative on dual node i (between volumes i and i+1)
    Ds = np.diag(1 / q) @ (S(1) - I)
    # second derivative on volume i
    D2 = np.diag(1 / r) @ (Ds - S(-1) @ Ds)
    jump3 = np.diag(1 / q) @ (S(1) @ D2 - D2) - S(-1) @ np.diag(1 / q) @ (S(1) @ D2 - D2)
    avg_p = 0.5 * (I + S(1))  # (k_i + k_{i+1}) / 2 on dual node i
    transport = np.diag(alpha) @ avg_p - S(-1) @ np.diag(alpha) @ avg_p
    M = np.diag(r / tau) + jump3 - transport + np.diag(np.roll(alpha, 0) - np.roll(alpha, 1))
    M -= np.diag(r_old * k_old * beta_old)
    k3 = k_old**3
    flux = (np.roll(k3, -1) - k3) / q
    rhs = r / tau * k_old - 0.5 * (flux - np.roll(flux, 1))
    return M, rhs


def position_matrix(r, k, alpha, x_old, tau):
    """Position system on dual volumes from composed difference operators."""
    n = len(r)
    q = 0.5 * (r + np.roll(r, -1))
    S = lambda k_: _shift(n, k_)
    I = np.eye(n)
    Ds = np.diag(1 / r) @ (I - S(-1))        # on volume i: (x_i - x_{i-1}) / r_i
    D2 = np.diag(1 / q) @ (S(1) @ Ds - Ds)   # on dual node i
    D3 = np.diag(1 / r) @ (D2 - S(-1) @ D2)  # on volume i
    jump3 = S(1) @ D3 - D3
    k2flux = np.diag(k**2) @ Ds
    k2jump = S(1) @ k2flux - k2flux
    central = 0.5 * (S(1) - S(-1))
    M = np.diag(q / tau) + jump3 + 1.5 * k2jump - np.diag(alpha) @ central
    return M, (q / tau)[:, None] * x_old


def periodic_bands(M):
    """``(a, b, c, d, e)`` of a periodic pentadiagonal dense matrix."""
    n = M.shape[0]
    i = np.arange(n)
    return tuple(M[i, (i + k) % n] for k in (-2, -1, 0, 1, 2))


# -- level set ------------------------------------------------------------


def ls_quantities(u, h, eps):
    """Gradients, ``Q``, ``Qbar``, ``Qstar`` and ``E`` on every node off the outer ring."""
    n1, n2 = u.shape
    out = {}
    for i in range(1, n1 - 1):
        for j in range(1, n2 - 1):
            node = {"Q": {}, "E": {}}
            for r, s in DIRS:
                if s == 0:
                    gx = r * (u[i + r, j] - u[i, j]) / h
                    up = 0.25 * (u[i, j] + u[i + r, j] + u[i, j + 1] + u[i + r, j + 1])
                    dn = 0.25 * (u[i, j] + u[i + r, j] + u[i, j - 1] + u[i + r, j - 1])
                    gy = (up - dn) / h
                else:
                    gy = s * (u[i, j + s] - u[i, j]) / h
                    rt = 0.25 * (u[i, j] + u[i, j + s] + u[i + 1, j] + u[i + 1, j + s])
                    lf = 0.25 * (u[i, j] + u[i, j + s] + u[i - 1, j] + u[i - 1, j + s])
                    gx = (rt - lf) / h
                Q = np.sqrt(eps * eps + gx * gx + gy * gy)
                P = np.eye(2) - np.outer((gx, gy), (gx, gy)) / Q**2
                node["Q"][(r, s)] = Q
                node["E"][(r, s)] = P / Q
            node["Qbar"] = sum(node["Q"].values()) / 4
            node["Qstar"] = 1 / sum(1 / q for q in node["Q"].values())
            out[(i, j)] = node
    return out


def ls_w(lag, v, h):
    """Weighted curvature of `v` with coefficients from the lagged quantities."""
    w = {}
    for (i, j), nd in lag.items():
        total = sum((v[i + r, j + s] - v[i, j]) / nd["Q"][(r, s)] for r, s in DIRS)
        w[(i, j)] = nd["Qbar"] * total / h**2
    return w


def ls_operator(u_lag, v, h, eps):
    """``L(v)`` on nodes two away from the boundary, all coefficients from `u_lag`."""
    lag = ls_quantities(u_lag, h, eps)
    w_lag = ls_w(lag, u_lag, h)
    wv = ls_w(lag, v, h)
    n1, n2 = v.shape
    out = np.zeros_like(v, dtype=float)
    for i in range(2, n1 - 2):
        for j in range(2, n2 - 2):
            nd = lag[(i, j)]
            diff, flux = 0.0, 0.0
            for r, s in DIRS:
                what = 0.5 * (w_lag[(i, j)] + w_lag[(i + r, j + s)])
                diff += what**2 / nd["Q"][(r, s)] ** 3 * (v[i + r, j + s] - v[i, j])
                # gradient of w across edge (r, s), tangential part from corner averages
                if s == 0:
                    g0 = r * (wv[(i + r, j)] - wv[(i, j)]) / h
                    g1 = (wv[(i, j + 1)] + wv[(i + r, j + 1)] - wv[(i, j - 1)] - wv[(i + r, j - 1)]) / (4 * h)
                else:
                    g0 = (wv[(i + 1, j)] + wv[(i + 1, j + s)] - wv[(i - 1, j)] - wv[(i - 1, j + s)]) / (4 * h)
                    g1 = s * (wv[(i, j + s)] - wv[(i, j)]) / h
                flux += h * (nd["E"][(r, s)] @ np.array([g0, g1])) @ np.array([r, s], dtype=float)
            out[i, j] = nd["Qbar"] / (2 * h**2) * diff - nd["Qbar"] / h**2 * flux
    return out


def ls_probe_matrix(u_lag, h, eps, tau):
    """Rows ``I - tau L`` for nodes two away from the boundary (others zero)."""
    n1, n2 = u_lag.shape
    N = n1 * n2
    M = np.zeros((N, N))
    for k in range(N):
        e = np.zeros(N)
        e[k] = 1.0
        M[:, k] = -tau * ls_operator(u_lag, e.reshape(n1, n2), h, eps).ravel()
    interior = np.zeros((n1, n2), dtype=bool)
    interior[2:-2, 2:-2] = True
    idx = np.flatnonzero(interior.ravel())
    M[idx, idx] += 1.0
    M[~interior.ravel()] = 0.0
    return M, interior


def ls_closed_form(u_lag, h, eps, tau):
    """21-point coefficients ``{(r, s): array}`` written out term by term.

    Corrections to the printed formulas: the sums run over the four edge
    directions; the prefactor of the centre coefficient is ``Qbar_ij``; the
    tangential term of the centre uses ``Q^{-s,-r}``; in the diagonal
    coefficients only the tangential terms carry the factor ``rs``.
    """
    lag = ls_quantities(u_lag, h, eps)
    w = ls_w(lag, u_lag, h)
    n1, n2 = u_lag.shape
    offsets = [(a, b) for a in range(-2, 3) for b in range(-2, 3) if abs(a) + abs(b) <= 3 and (a, b) != (0, 0)]
    offsets = [(a, b) for a, b in offsets if not (abs(a) == 2 and abs(b) == 2)]
    A = {o: np.zeros((n1, n2)) for o in offsets + [(0, 0)]}

    for i in range(2, n1 - 2):
        for j in range(2, n2 - 2):
            nd = lag[(i, j)]

            def E(a, b, r, s):
                return nd["E"][(r, s)][a - 1, b - 1]

            def Qb(di, dj):
                return lag[(i + di, j + dj)]["Qbar"]

            def Qs(di, dj):
                return lag[(i + di, j + dj)]["Qstar"]

            def Q(r, s, di, dj):
                return lag[(i + di, j + dj)]["Q"][(r, s)]

            def what2(r, s):
                return (0.5 * (w[(i, j)] + w[(i + r, j + s)])) ** 2

            pre = tau * nd["Qbar"] / h**4
            c = 0.0
            for r, s in DIRS:
                c += h**2 * what2(r, s) / (2 * Q(r, s, 0, 0) ** 3)
                c += E(1 + abs(s), 2 - abs(r), r, s) * (Qb(r, s) / Q(-r, -s, r, s) + nd["Qbar"] / nd["Qstar"])
                c += 0.25 * E(1 + abs(s), 1 + abs(r), r, s) * (
                    Qb(s, r) / Q(-s, -r, s, r) - Qb(-s, -r) / Q(s, r, -s, -r))
            A[(0, 0)][i, j] = 1 + pre * c

            for r, s in DIRS:
                c = -E(1 + abs(s), 2 - abs(r), r, s) * (Qb(r, s) / Qs(r, s) + nd["Qbar"] / Q(r, s, 0, 0))
                c += 0.25 * E(1 + abs(s), 1 + abs(r), r, s) * (
                    Qb(r + s, r + s) / Q(-s, -r, r + s, r + s) - Qb(r - s, -r + s) / Q(s, r, r - s, -r + s))
                c += 0.25 * E(1 + abs(r), 1 + abs(s), s, r) * (
                    Qb(r + s, r + s) / Q(-s, -r, r + s, r + s) - Qb(r, s) / Qs(r, s))
                c -= 0.25 * E(1 + abs(r), 1 + abs(s), -s, -r) * (
                    Qb(r - s, -r + s) / Q(s, r, r - s, -r + s) - Qb(r, s) / Qs(r, s))
                c -= (E(1 + abs(s), 2 - abs(r), -r, -s) + E(1 + abs(r), 2 - abs(s), s, r)
                      + E(1 + abs(r), 2 - abs(s), -s, -r)) * nd["Qbar"] / Q(r, s, 0, 0)
                c -= h**2 * what2(r, s) / (2 * Q(r, s, 0, 0) ** 3)
                A[(r, s)][i, j] = pre * c

            for r in (1, -1):
                for s in (1, -1):
                    c = E(1, 1, r, 0) * Qb(r, 0) / Q(0, s, r, 0) + E(2, 2, 0, s) * Qb(0, s) / Q(r, 0, 0, s)
                    tang = 0.25 * E(1, 2, r, 0) * (Qb(0, s) / Q(r, 0, 0, s) - Qb(r, s) / Qs(r, s))
                    tang += 0.25 * E(2, 1, 0, s) * (Qb(r, 0) / Q(0, s, r, 0) - Qb(r, s) / Qs(r, s))
                    tang -= 0.25 * E(1, 2, -r, 0) * Qb(0, s) / Q(r, 0, 0, s)
                    tang -= 0.25 * E(2, 1, 0, -s) * Qb(r, 0) / Q(0, s, r, 0)
                    A[(r, s)][i, j] = pre * (c + r * s * tang)

            for rb, sb in DIRS:
                c = E(1 + abs(sb), 1 + abs(sb), rb, sb) + 0.25 * E(2, 1, sb, rb) - 0.25 * E(2, 1, -sb, -rb)
                A[(2 * rb, 2 * sb)][i, j] = pre * c * Qb(rb, sb) / Q(rb, sb, rb, sb)

            for rb in (1, -1):
                for sb in (1, -1):
                    for rt, st in ((rb, 0), (0, sb)):
                        val = np.sign(rb * sb) * tau / (4 * h**4) * nd["Qbar"] * Qb(rb, sb) / Q(rt, st, rb, sb)
                        A[(rb + rt, sb + st)][i, j] = val * (E(1, 2, rb, 0) + E(2, 1, 0, sb))
    return A


def dense_from_coefficients(A, shape, mask):
    """Dense matrix with rows ``sum_rs A^{rs}_ij u_{i+r,j+s}`` on `mask` nodes."""
    n1, n2 = shape
    M = np.zeros((n1 * n2, n1 * n2))
    for i, j in zip(*np.nonzero(mask)):
        row = i * n2 + j
        for (r, s), a in A.items():
            M[row, (i + r) * n2 + (j + s)] += a[i, j]
    return M
