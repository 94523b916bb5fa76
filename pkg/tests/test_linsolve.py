import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from willmore.linsolve import (
    STENCIL_OFFSETS,
    PentaSystem,
    SolverError,
    SparseSystem,
    solve_dense,
    solve_penta_direct,
    solve_penta_periodic,
    solve_sparse,
)


def _penta(bands, f):
    return PentaSystem(*[np.asarray(b, dtype=float) for b in bands], np.asarray(f, dtype=float))


def test_identity():
    n = 7
    z, o = np.zeros(n), np.ones(n)
    f = np.arange(n, dtype=float)
    x, rep = solve_penta_periodic(_penta([z, z, o, z, z], f))
    assert np.array_equal(x, f)
    assert rep.method == "gauss-seidel" and rep.residual == 0.0


def test_circulant_constant_solution():
    # rows sum to 1, so the all-ones vector solves f = 1
    n = 12
    o = np.ones(n)
    sys = _penta([o, -4 * o, 7 * o, -4 * o, o], o)
    x, rep = solve_penta_periodic(sys, tol=1e-12)
    assert np.allclose(x, 1.0, atol=1e-9)
    assert rep.residual < 1e-9


def _random_dominant(n, rng, m=None):
    bands = rng.uniform(-1, 1, size=(5, n))
    bands[2] = np.abs(bands[[0, 1, 3, 4]]).sum(axis=0) + rng.uniform(0.5, 2, n)
    f = rng.normal(size=n if m is None else (n, m))
    return _penta(bands, f)


@pytest.mark.parametrize("seed", range(4))
def test_random_against_dense(seed):
    sys = _random_dominant(12, np.random.default_rng(seed))
    ref = solve_dense(sys.to_dense(), sys.f)
    x, _ = solve_penta_periodic(sys)
    assert np.allclose(x, ref, atol=1e-8)
    y, rep = solve_penta_direct(sys)
    assert np.allclose(y, ref, atol=1e-12) and rep.method == "direct"


def test_two_right_hand_sides():
    sys = _random_dominant(20, np.random.default_rng(9), m=2)
    x, rep = solve_penta_periodic(sys)
    assert x.shape == (20, 2)
    assert np.allclose(sys.matvec(x), sys.f, atol=1e-8)


@settings(deadline=None, max_examples=30)
@given(n=st.integers(5, 40), seed=st.integers(0, 2**16))
def test_matvec_matches_dense(n, seed):
    sys = _random_dominant(n, np.random.default_rng(seed))
    x = np.random.default_rng(seed + 1).normal(size=n)
    assert np.allclose(sys.matvec(x), sys.to_dense() @ x)


def test_non_convergence_carries_residual():
    sys = _random_dominant(10, np.random.default_rng(1))
    with pytest.raises(SolverError) as info:
        solve_penta_periodic(sys, tol=1e-14, max_iters=2)
    assert np.isfinite(info.value.residual)
    assert "residual=" in str(info.value)


def test_rejects_bad_systems():
    o = np.ones(4)
    with pytest.raises(ValueError):
        solve_penta_periodic(_penta([o, o, o, o, o], o))
    n = np.ones(6)
    c = n.copy()
    c[2] = 0.0
    with pytest.raises(ValueError, match="zero diagonal"):
        solve_penta_periodic(_penta([0 * n, 0 * n, c, 0 * n, 0 * n], n))


def test_solve_dense_small():
    A = np.array([[4.0, 1.0], [2.0, 3.0]])
    assert np.allclose(solve_dense(A, [1.0, 2.0]), np.linalg.solve(A, [1.0, 2.0]))


def _random_stencil_system(shape, rng):
    n1, n2 = shape
    coeffs = {}
    ii, jj = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    for r, s in STENCIL_OFFSETS:
        if (r, s) == (0, 0):
            continue
        c = rng.uniform(-0.2, 0.2, shape)
        inside = (ii + r >= 0) & (ii + r < n1) & (jj + s >= 0) & (jj + s < n2)
        coeffs[(r, s)] = np.where(inside, c, 0.0)
    coeffs[(0, 0)] = 1.0 + sum(np.abs(c) for c in coeffs.values())
    return SparseSystem(shape, coeffs, rng.normal(size=shape))


def test_stencil_offsets():
    assert len(STENCIL_OFFSETS) == 21
    assert (2, 2) not in STENCIL_OFFSETS and (2, 1) in STENCIL_OFFSETS


@pytest.mark.parametrize("method", ["lu", "gmres-ilut"])
def test_sparse_against_dense(method):
    sys = _random_stencil_system((9, 11), np.random.default_rng(4))
    ref = solve_dense(sys.to_csr().toarray(), sys.rhs.ravel()).reshape(sys.shape)
    x, rep = solve_sparse(sys, method=method)
    assert np.allclose(x, ref, atol=1e-7)
    assert rep.residual < 1e-8 and rep.method == method


def test_sparse_matvec_is_the_stencil_sum():
    rng = np.random.default_rng(5)
    sys = _random_stencil_system((6, 7), rng)
    u = rng.normal(size=(6, 7))
    expected = np.zeros_like(u)
    for (r, s), c in sys.coeffs.items():
        for i in range(6):
            for j in range(7):
                if c[i, j]:
                    expected[i, j] += c[i, j] * u[i + r, j + s]
    assert np.allclose(sys.matvec(u), expected)


def test_sparse_rejects_offsets():
    with pytest.raises(ValueError, match="21-point"):
        SparseSystem((4, 4), {(3, 0): np.zeros((4, 4))}, np.zeros((4, 4)))
    sys = SparseSystem((4, 4), {(0, 0): np.ones((4, 4)), (1, 0): np.ones((4, 4))}, np.zeros((4, 4)))
    with pytest.raises(ValueError, match="leaves the grid"):
        sys.to_csr()


def test_sparse_unknown_method():
    sys = _random_stencil_system((4, 4), np.random.default_rng(0))
    with pytest.raises(ValueError):
        solve_sparse(sys, method="cg")


def test_singular_sparse_system():
    c = np.ones((3, 3))
    c[1, 1] = 0.0
    sys = SparseSystem((3, 3), {(0, 0): c}, np.ones((3, 3)))
    with pytest.raises(SolverError):
        solve_sparse(sys, method="lu")
