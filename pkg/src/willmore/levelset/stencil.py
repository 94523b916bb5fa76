"""Per-node discrete gradients on the complementary (dual) volume boundaries.

For every interior node there are four edge gradients ``grad^{rs}`` with
``(r, s)`` in ``DIRECTIONS``; the tangential component is taken from averages
of the node values on the four dual-volume corners.  Quantities are stored on
the full grid and are NaN on the outermost ring of nodes, where they cannot
be formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIRECTIONS: tuple[tuple[int, int], ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))


def view(a: np.ndarray, ring: int, di: int = 0, dj: int = 0) -> np.ndarray:
    """``a[i + di, j + dj]`` for all nodes at least `ring` nodes away from the boundary."""
    n1, n2 = a.shape[:2]
    return a[ring + di : n1 - ring + di, ring + dj : n2 - ring + dj]


def _embed(inner: np.ndarray, shape, ring: int = 1) -> np.ndarray:
    out = np.full(shape, np.nan)
    view(out, ring)[...] = inner
    return out


@dataclass
class StencilQuantities:
    h: float
    epsilon: float
    grad: dict        # (r, s) -> (gx, gy)
    Q: dict           # (r, s) -> regularized |grad^{rs} u|
    Qbar: np.ndarray  # arithmetic mean of the four Q
    Qstar: np.ndarray  # 1 / sum(1/Q)
    E: dict           # (r, s) -> (E11, E12, E22) of the projection matrix
    w: np.ndarray | None = None

    def what(self, rs: tuple[int, int]) -> np.ndarray:
        """Edge average ``(w_ij + w_{i+r,j+s}) / 2`` on nodes two away from the boundary."""
        r, s = rs
        return 0.5 * (view(self.w, 2) + view(self.w, 2, r, s))


def edge_gradients(u: np.ndarray, h: float) -> dict:
    def v(di, dj):
        return view(u, 1, di, dj)

    c = v(0, 0)
    grads = {}
    for r in (1, -1):
        gx = r * (v(r, 0) - c) / h
        gy = (v(0, 1) + v(r, 1) - v(0, -1) - v(r, -1)) / (4.0 * h)
        grads[(r, 0)] = (gx, gy)
    for s in (1, -1):
        gx = (v(1, 0) + v(1, s) - v(-1, 0) - v(-1, s)) / (4.0 * h)
        gy = s * (v(0, s) - c) / h
        grads[(0, s)] = (gx, gy)
    return grads


def averaged_gradients(u: np.ndarray, h: float, epsilon: float) -> StencilQuantities:
    """Edge gradients, regularized magnitudes, their averages and projections."""
    u = np.asarray(u, dtype=float)
    shape = u.shape
    grads = edge_gradients(u, h)
    Q, E, inv_sum = {}, {}, 0.0
    for rs, (gx, gy) in grads.items():
        q = np.sqrt(epsilon**2 + gx**2 + gy**2)
        Q[rs] = q
        inv_sum = inv_sum + 1.0 / q
        E[rs] = ((1.0 - gx**2 / q**2) / q, -gx * gy / q**3, (1.0 - gy**2 / q**2) / q)
    qbar = 0.25 * sum(Q.values())
    return StencilQuantities(
        h=h,
        epsilon=epsilon,
        grad={rs: (_embed(gx, shape), _embed(gy, shape)) for rs, (gx, gy) in grads.items()},
        Q={rs: _embed(q, shape) for rs, q in Q.items()},
        Qbar=_embed(qbar, shape),
        Qstar=_embed(1.0 / inv_sum, shape),
        E={rs: tuple(_embed(x, shape) for x in e) for rs, e in E.items()},
    )


def w_stencil(st: StencilQuantities) -> dict:
    """Coefficients of ``w_ij`` as a linear combination of ``u`` over the 5-point cross."""
    h2 = st.h**2
    coef = {rs: st.Qbar / (h2 * st.Q[rs]) for rs in DIRECTIONS}
    coef[(0, 0)] = -st.Qbar / (h2 * st.Qstar)
    return coef


def apply_w(st: StencilQuantities, u: np.ndarray) -> np.ndarray:
    """``w = (Qbar/h^2) sum_rs (u_{i+r,j+s} - u_ij) / Q^{rs}`` with the stencil's coefficients."""
    c = view(u, 1)
    acc = np.zeros_like(c)
    for r, s in DIRECTIONS:
        acc += (view(u, 1, r, s) - c) / view(st.Q[(r, s)], 1)
    return _embed(view(st.Qbar, 1) * acc / st.h**2, u.shape)


def compute_w(u: np.ndarray, st: StencilQuantities) -> np.ndarray:
    """Nodal weighted curvature ``w`` of `u`; also cached on the stencil."""
    st.w = apply_w(st, u)
    return st.w
