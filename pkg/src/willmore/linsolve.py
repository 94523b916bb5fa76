"""Linear algebra backends.

Periodic pentadiagonal systems come from the Lagrangian scheme and are solved
by Gauss-Seidel sweeps (with a direct banded fallback).  The 21-point systems
of the level-set scheme are stored per stencil offset and handed to scipy for
GMRES/ILUT or a complete LU factorization.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numba import njit


class SolverError(RuntimeError):
    """Raised when a linear solve fails to meet its contract."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


@dataclass
class SolveReport:
    iterations: int
    residual: float
    wall_time: float
    method: str = ""


# --------------------------------------------------------------------------
# periodic pentadiagonal systems
# --------------------------------------------------------------------------


@dataclass
class PentaSystem:
    """Row ``i`` reads ``a_i x_{i-2} + b_i x_{i-1} + c_i x_i + d_i x_{i+1} + e_i x_{i+2} = f_i``
    with indices taken modulo ``n``.

    ``f`` may carry several right-hand sides as columns (shape ``(n, m)``).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray

    @property
    def n(self) -> int:
        return len(self.c)

    def bands(self) -> list[np.ndarray]:
        return [self.a, self.b, self.c, self.d, self.e]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for shift, band in zip(range(-2, 3), self.bands()):
            coeff = band if x.ndim == 1 else band[:, None]
            out += coeff * np.roll(x, -shift, axis=0)
        return out

    def to_sparse(self) -> sp.csr_matrix:
        n = self.n
        rows = np.tile(np.arange(n), 5)
        cols = np.concatenate([(np.arange(n) + s) % n for s in range(-2, 3)])
        vals = np.concatenate(self.bands())
        # coo->csr sums duplicates, which matters only for n < 5
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def residual(self, x: np.ndarray) -> float:
        return float(np.max(np.abs(self.matvec(x) - self.f)))


@njit(cache=True)
def _gauss_seidel_periodic(a, b, c, d, e, f, x, tol, max_iters):
    n = c.shape[0]
    m = f.shape[1]
    for it in range(1, max_iters + 1):
        diff = 0.0
        for i in range(n):
            im2 = (i - 2) % n
            im1 = (i - 1) % n
            ip1 = (i + 1) % n
            ip2 = (i + 2) % n
            for col in range(m):
                new = (
                    f[i, col]
                    - a[i] * x[im2, col]
                    - b[i] * x[im1, col]
                    - d[i] * x[ip1, col]
                    - e[i] * x[ip2, col]
                ) / c[i]
                delta = abs(new - x[i, col])
                if delta > diff:
                    diff = delta
                x[i, col] = new
        if diff < tol:
            return it, diff
    return max_iters, diff


def solve_penta_periodic(
    system: PentaSystem,
    x0: np.ndarray | None = None,
    tol: float = 1e-10,
    max_iters: int = 1_000_000,
) -> tuple[np.ndarray, SolveReport]:
    """Gauss-Seidel iteration for a periodic pentadiagonal system.

    Iteration stops once the max-norm difference of two successive iterates
    drops below `tol`.  The report carries the true residual of the returned
    vector.

    Raises
    ------
    SolverError
        If `max_iters` sweeps do not reach the stopping criterion.
    """
    if system.n < 5:
        raise ValueError("periodic pentadiagonal system needs dimension >= 5")
    if np.any(system.c == 0):
        raise ValueError("zero diagonal entry")
    start = time.perf_counter()
    f = np.asarray(system.f, dtype=float)
    single = f.ndim == 1
    f2 = f[:, None] if single else f
    x = np.array(f2 if x0 is None else np.asarray(x0, dtype=float).reshape(f2.shape), copy=True)
    bands = [np.ascontiguousarray(v, dtype=float) for v in system.bands()]
    iters, diff = _gauss_seidel_periodic(*bands, np.ascontiguousarray(f2), x, tol, max_iters)
    sol = x[:, 0] if single else x
    res = system.residual(sol)
    if not diff < tol:
        raise SolverError(f"Gauss-Seidel did not converge in {max_iters} sweeps", res)
    return sol, SolveReport(iters, res, time.perf_counter() - start, "gauss-seidel")


def solve_penta_direct(system: PentaSystem) -> tuple[np.ndarray, SolveReport]:
    """Sparse LU solve of the periodic pentadiagonal system."""
    start = time.perf_counter()
    lu = spla.splu(system.to_sparse().tocsc())
    sol = lu.solve(np.asarray(system.f, dtype=float))
    return sol, SolveReport(1, system.residual(sol), time.perf_counter() - start, "direct")


def solve_dense(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Dense LU with partial pivoting; the ground truth for small systems."""
    lu, piv = scipy.linalg.lu_factor(np.asarray(matrix, dtype=float))
    return scipy.linalg.lu_solve((lu, piv), np.asarray(rhs, dtype=float))


# --------------------------------------------------------------------------
# 21-point stencil systems
# --------------------------------------------------------------------------

STENCIL_OFFSETS: tuple[tuple[int, int], ...] = tuple(
    (r, s) for r in range(-2, 3) for s in range(-2, 3) if abs(r) + abs(s) < 4
)


@dataclass
class SparseSystem:
    """Grid system ``sum_{(r,s)} A^{rs}_{ij} u_{i+r,j+s} = rhs_{ij}``.

    ``coeffs`` maps each stencil offset to a coefficient grid of the field's
    shape.  Entries pointing outside the grid must be zero.
    """

    shape: tuple[int, int]
    coeffs: dict[tuple[int, int], np.ndarray]
    rhs: np.ndarray
    _matrix: sp.csr_matrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        bad = set(self.coeffs) - set(STENCIL_OFFSETS)
        if bad:
            raise ValueError(f"offsets outside the 21-point stencil: {sorted(bad)}")

    @property
    def dimension(self) -> int:
        return self.shape[0] * self.shape[1]

    def to_csr(self) -> sp.csr_matrix:
        if self._matrix is None:
            n1, n2 = self.shape
            idx = np.arange(n1 * n2).reshape(n1, n2)
            rows, cols, vals = [], [], []
            for (r, s), coef in self.coeffs.items():
                mask = coef != 0
                if not mask.any():
                    continue
                ii, jj = np.nonzero(mask)
                ti, tj = ii + r, jj + s
                if ti.min() < 0 or tj.min() < 0 or ti.max() >= n1 or tj.max() >= n2:
                    raise ValueError(f"offset {(r, s)} leaves the grid")
                rows.append(idx[ii, jj])
                cols.append(idx[ti, tj])
                vals.append(coef[ii, jj])
            self._matrix = sp.csr_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(n1 * n2, n1 * n2),
            )
        return self._matrix

    def matvec(self, u: np.ndarray) -> np.ndarray:
        return (self.to_csr() @ np.ravel(u)).reshape(self.shape)


def solve_sparse(
    system: SparseSystem,
    method: str = "lu",
    tol: float = 1e-9,
    x0: np.ndarray | None = None,
    restart: int = 50,
    drop_tol: float = 1e-4,
    fill_factor: float = 20.0,
    max_iters: int = 1000,
) -> tuple[np.ndarray, SolveReport]:
    """Solve a 21-point system with ``"gmres-ilut"`` or ``"lu"``.

    Returns the solution on the grid and a report whose residual is the
    relative residual ``|Ax - b| / |b|`` of the returned vector.  A solve is
    rejected when its normwise backward error exceeds ``10 tol``.
    """
    start = time.perf_counter()
    A = system.to_csr()
    b = np.ravel(system.rhs).astype(float)
    bnorm = np.linalg.norm(b) or 1.0
    iterations = 1
    if method == "lu":
        try:
            lu = spla.splu(A.tocsc())
        except RuntimeError as exc:
            raise SolverError(f"singular system: {exc}") from exc
        x = lu.solve(b)
        # iterative refinement; the level-set matrices are badly conditioned
        for _ in range(3):
            r = b - A @ x
            if np.linalg.norm(r) <= tol * bnorm:
                break
            x = x + lu.solve(r)
            iterations += 1
    elif method == "gmres-ilut":
        try:
            ilu = spla.spilu(A.tocsc(), drop_tol=drop_tol, fill_factor=fill_factor)
        except RuntimeError as exc:
            raise SolverError(f"ILUT factorization failed: {exc}") from exc
        M = spla.LinearOperator(A.shape, ilu.solve)
        counter = [0]

        def _count(_):
            counter[0] += 1

        guess = None if x0 is None else np.ravel(x0)
        x, info = spla.gmres(
            A, b, x0=guess, rtol=tol, atol=0.0, restart=restart, maxiter=max_iters,
            M=M, callback=_count, callback_type="pr_norm",
        )
        iterations = counter[0]
        if info != 0:
            res = np.linalg.norm(A @ x - b) / bnorm
            raise SolverError(f"GMRES did not converge (info={info})", res)
    else:
        raise ValueError(f"unknown sparse solver {method!r}")
    r = A @ x - b
    res = float(np.linalg.norm(r) / bnorm)
    # normwise backward error; the relative residual alone is meaningless
    # once the matrix condition number approaches 1/tol
    anorm = float(abs(A).sum(axis=1).max())
    backward = float(np.abs(r).max() / (anorm * np.abs(x).max() + np.abs(b).max() or 1.0))
    if not np.isfinite(res) or backward > max(tol, 1e-9) * 10:
        raise SolverError(f"{method} solve inaccurate", res)
    return x.reshape(system.shape), SolveReport(iterations, res, time.perf_counter() - start, method)
