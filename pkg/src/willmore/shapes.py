"""Initial shapes as parametric curves and signed distance functions.

Parametrizations run counterclockwise over ``u in [0, 1]`` so convex curves have
positive curvature.  Signed distances are positive inside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

TWO_PI = 2.0 * np.pi

Curve = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ParametricShape:
    """One or more closed curves ``u -> (x, y)`` (vectorized in ``u``)."""

    name: str
    curves: tuple[Curve, ...]
    perimeter: float | None = None
    curvature: float | None = None

    def __call__(self, u) -> np.ndarray:
        if len(self.curves) != 1:
            raise ValueError(f"shape {self.name!r} has {len(self.curves)} components")
        return self.curves[0](np.asarray(u, dtype=float))

    def sample(self, n: int) -> list[np.ndarray]:
        """``n`` nodes per component at ``u = i/n``, i = 1..n (closing node omitted)."""
        u = np.arange(1, n + 1) / n
        return [c(u) for c in self.curves]


@dataclass(frozen=True)
class ShapeSDF:
    name: str
    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)

    def __call__(self, x, y) -> np.ndarray:
        return self.evaluate(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


# -- parametrizations -------------------------------------------------------


def _circle(radius, center=(0.0, 0.0)):
    cx, cy = center

    def curve(u):
        t = TWO_PI * u
        return np.stack([cx + radius * np.cos(t), cy + radius * np.sin(t)], axis=-1)

    return curve


def _ellipse(a, b):
    def curve(u):
        t = TWO_PI * u
        return np.stack([a * np.cos(t), b * np.sin(t)], axis=-1)

    return curve


def _flower(u):
    t = TWO_PI * u
    rho = 1.0 - 0.5 * np.cos(2.0 * t) ** 2
    return np.stack([rho * np.cos(t), rho * np.sin(t)], axis=-1)


def _square(side):
    half = side / 2.0
    corners = np.array([[half, -half], [half, half], [-half, half], [-half, -half], [half, -half]])

    def curve(u):
        s = 4.0 * (np.asarray(u) % 1.0)
        edge = np.minimum(np.floor(s).astype(int), 3)
        frac = (s - edge)[..., None]
        return corners[edge] * (1.0 - frac) + corners[edge + 1] * frac

    return curve


def _astroid(scale):
    def curve(u):
        t = TWO_PI * u
        return np.stack([scale * np.cos(t) ** 3, scale * np.sin(t) ** 3], axis=-1)

    return curve


# -- signed distances -------------------------------------------------------


def _circle_sdf(radius, center=(0.0, 0.0)):
    def sdf(x, y):
        return radius - np.hypot(x - center[0], y - center[1])

    return sdf


def _ellipse_distance(a, b, x, y):
    """Unsigned distance to the ellipse ``(x/a)^2 + (y/b)^2 = 1``.

    Robust bisection on the root of the Lagrange condition (Eberly's
    method), vectorized and exact to rounding for points on either side.
    """
    # work in the first quadrant with the longer axis first
    swap = b > a
    e0, e1 = (b, a) if swap else (a, b)
    y0 = np.abs(np.asarray(y if swap else x, dtype=float))
    y1 = np.abs(np.asarray(x if swap else y, dtype=float))
    y0, y1 = np.broadcast_arrays(y0, y1)
    dist = np.empty(y0.shape)

    interior = (y0 > 0) & (y1 > 0)
    z0, z1 = y0[interior] / e0, y1[interior] / e1
    g = z0**2 + z1**2 - 1.0
    r0 = (e0 / e1) ** 2
    n0 = r0 * z0
    lo = z1 - 1.0
    hi = np.where(g < 0, 0.0, np.hypot(n0, z1) - 1.0)
    for _ in range(160):
        mid = 0.5 * (lo + hi)
        val = (n0 / (mid + r0)) ** 2 + (z1 / (mid + 1.0)) ** 2 - 1.0
        lo = np.where(val > 0, mid, lo)
        hi = np.where(val > 0, hi, mid)
    sbar = 0.5 * (lo + hi)
    p0 = r0 * y0[interior] / (sbar + r0)
    p1 = y1[interior] / (sbar + 1.0)
    dist[interior] = np.where(g == 0, 0.0, np.hypot(p0 - y0[interior], p1 - y1[interior]))

    on_minor = (y0 == 0) & (y1 > 0)
    dist[on_minor] = np.abs(y1[on_minor] - e1)

    on_major = y1 == 0
    numer, denom = e0 * y0[on_major], e0**2 - e1**2
    inner = numer < denom
    xde = np.where(inner, numer / denom if denom > 0 else 0.0, 1.0)
    q0, q1 = e0 * xde, e1 * np.sqrt(np.maximum(0.0, 1.0 - xde**2))
    dist[on_major] = np.where(inner, np.hypot(q0 - y0[on_major], q1), np.abs(y0[on_major] - e0))
    return dist


def _ellipse_sdf(a, b):
    def sdf(x, y):
        dist = _ellipse_distance(a, b, x, y)
        inside = (x / a) ** 2 + (y / b) ** 2 < 1.0
        return np.where(inside, dist, -dist)

    return sdf


def _square_sdf(side):
    half = side / 2.0

    def sdf(x, y):
        qx, qy = np.abs(x) - half, np.abs(y) - half
        outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
        inside = np.minimum(np.maximum(qx, qy), 0.0)
        return -(outside + inside)

    return sdf


def points_in_polygon(px, py, poly: np.ndarray) -> np.ndarray:
    """Even-odd rule point-in-polygon test, vectorized over the query points."""
    px, py = np.asarray(px, dtype=float), np.asarray(py, dtype=float)
    inside = np.zeros(px.shape, dtype=bool)
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    for xa, ya, xb, yb in zip(x0, y0, x1, y1):
        crosses = (ya > py) != (yb > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = xa + (py - ya) * (xb - xa) / (yb - ya)
        inside ^= crosses & (px < xint)
    return inside


def _segment_projection(pts, a, b):
    ab = b - a
    den = np.einsum("...j,...j->...", ab, ab)
    t = np.clip(np.einsum("...j,...j->...", pts - a, ab) / np.where(den > 0, den, 1.0), 0.0, 1.0)
    proj = a + t[..., None] * ab
    return np.linalg.norm(proj - pts, axis=-1), t


def _nearest_segments(pts, verts, k=8):
    """Distance to the polyline through `verts`, the nearest segment and its parameter."""
    seg_a, seg_b = verts[:-1], verts[1:]
    m = len(seg_a)
    half = 0.5 * float(np.linalg.norm(seg_b - seg_a, axis=1).max())
    k = min(k, len(verts))
    dk, idx = cKDTree(verts).query(pts, k=k)
    dk, idx = dk.reshape(len(pts), k), idx.reshape(len(pts), k)
    # segments touching each candidate vertex
    segs = np.clip(np.concatenate([idx - 1, np.minimum(idx, m - 1)], axis=1), 0, m - 1)
    d, t = _segment_projection(pts[:, None, :], seg_a[segs], seg_b[segs])
    pick = np.argmin(d, axis=1)
    rows = np.arange(len(pts))
    best, seg, par = d[rows, pick], segs[rows, pick], t[rows, pick]
    # an unvisited segment has both ends beyond the k-th vertex distance
    bound = np.sqrt(np.maximum(dk[:, -1] ** 2 - half**2, 0.0))
    for i in (np.flatnonzero(best > bound) if k < len(verts) else []):
        di, ti = _segment_projection(pts[i], seg_a, seg_b)
        j = int(np.argmin(di))
        best[i], seg[i], par[i] = di[j], j, ti[j]
    return best, seg, par


def polyline_distance(px, py, poly: np.ndarray, closed: bool = True) -> np.ndarray:
    """Exact unsigned distance from points to a polyline (closed by default)."""
    px, py = np.asarray(px, dtype=float), np.asarray(py, dtype=float)
    pts = np.stack([px.ravel(), py.ravel()], axis=-1)
    verts = np.asarray(poly, dtype=float)
    verts = np.vstack([verts, verts[:1]]) if closed else verts
    return _nearest_segments(pts, verts)[0].reshape(px.shape)


def _outward_normals(edges):
    n = np.stack([edges[:, 1], -edges[:, 0]], axis=-1)
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def polygon_sdf(px, py, poly: np.ndarray) -> np.ndarray:
    """Signed distance to a counterclockwise closed polygon, positive inside.

    The sign comes from the nearest feature: the edge normal, or the sum of
    both edge normals when the nearest point is a vertex.
    """
    px, py = np.asarray(px, dtype=float), np.asarray(py, dtype=float)
    pts = np.stack([px.ravel(), py.ravel()], axis=-1)
    poly = np.asarray(poly, dtype=float)
    verts = np.vstack([poly, poly[:1]])
    dist, seg, t = _nearest_segments(pts, verts)
    normals = _outward_normals(verts[1:] - verts[:-1])
    m = len(normals)
    n = normals[seg].copy()
    at_start, at_end = t <= 0.0, t >= 1.0
    n[at_start] += normals[(seg[at_start] - 1) % m]
    n[at_end] += normals[(seg[at_end] + 1) % m]
    anchor = np.where(at_end[:, None], verts[seg + 1], verts[seg])
    outside = np.einsum("ij,ij->i", pts - anchor, n) > 0
    return np.where(outside, -dist, dist).reshape(px.shape)


def _sampled_sdf(curve: Curve, samples: int = 20000):
    poly = curve(np.arange(samples) / samples)
    return lambda x, y: polygon_sdf(x, y, poly)


def _annulus_sdf(outer_a, outer_b, inner_r):
    outer = _ellipse_sdf(outer_a, outer_b)
    inner = _circle_sdf(inner_r)

    def sdf(x, y):
        # positive between the curves
        return np.minimum(outer(x, y), -inner(x, y))

    return sdf


def _ellipse_perimeter(a, b):
    from scipy.integrate import quad

    val, _ = quad(lambda t: np.hypot(a * np.sin(t), b * np.cos(t)), 0.0, TWO_PI, limit=200)
    return val


# -- catalog ---------------------------------------------------------------

SHAPE_IDS = ("circle", "ellipse", "flower", "square", "astroid", "circle_in_ellipse")


def make_shape(name: str, **params) -> tuple[ParametricShape, ShapeSDF]:
    """Build a catalog shape.

    Parameters
    ----------
    name : str
        One of ``circle`` (``radius=1``), ``ellipse`` (``a=1, b=2``),
        ``flower``, ``square`` (``side=2``), ``astroid`` (``scale=1``) or
        ``circle_in_ellipse`` (``a=1.0, b=0.62, radius=0.6``).

    Returns
    -------
    (ParametricShape, ShapeSDF)
    """
    if name == "circle":
        radius = params.get("radius", 1.0)
        return (
            ParametricShape(name, (_circle(radius),), TWO_PI * radius, 1.0 / radius),
            ShapeSDF(name, _circle_sdf(radius)),
        )
    if name == "ellipse":
        a, b = params.get("a", 1.0), params.get("b", 2.0)
        return (
            ParametricShape(name, (_ellipse(a, b),), _ellipse_perimeter(a, b)),
            ShapeSDF(name, _ellipse_sdf(a, b)),
        )
    if name == "flower":
        return ParametricShape(name, (_flower,)), ShapeSDF(name, _sampled_sdf(_flower))
    if name == "square":
        side = params.get("side", 2.0)
        return (
            ParametricShape(name, (_square(side),), 4.0 * side),
            ShapeSDF(name, _square_sdf(side)),
        )
    if name == "astroid":
        scale = params.get("scale", 1.0)
        curve = _astroid(scale)
        return ParametricShape(name, (curve,), 6.0 * scale), ShapeSDF(name, _sampled_sdf(curve))
    if name == "circle_in_ellipse":
        a, b = params.get("a", 1.0), params.get("b", 0.62)
        radius = params.get("radius", 0.6)
        if radius >= min(a, b):
            raise ValueError("inner circle must fit inside the ellipse")
        inner = _circle(radius)
        # inner curve traversed clockwise so the positive region stays on the left
        return (
            ParametricShape(name, (_ellipse(a, b), lambda u: inner(-np.asarray(u)))),
            ShapeSDF(name, _annulus_sdf(a, b, radius)),
        )
    raise ValueError(f"unknown shape {name!r}; expected one of {', '.join(SHAPE_IDS)}")


def circle_radius_exact(t, r0: float = 1.0):
    """Radius of a circle evolving by Willmore flow, ``(2t + r0^4)^(1/4)``."""
    arg = 2.0 * np.asarray(t, dtype=float) + r0**4
    if np.any(arg <= 0):
        raise ValueError("2t + r0^4 must be positive")
    return arg**0.25
