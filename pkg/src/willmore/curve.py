"""Closed polygonal curves as flowing finite volumes.

Arrays are stored with logical index ``i = 1..n`` at array position ``i - 1``.
Node ``x_i`` closes volume ``[x_{i-1}, x_i]``, which carries the local length
``r_i``, curvature ``k_i`` and ``eta_i = ln r_i``; the dual length
``q_i = (r_i + r_{i+1}) / 2`` belongs to node ``x_i``.  Periodic neighbours are
obtained with ``np.roll`` and never stored.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .shapes import ParametricShape


class DegenerateCurveError(ValueError):
    pass


def nxt(a: np.ndarray, k: int = 1) -> np.ndarray:
    """Value at logical index ``i + k`` (periodic)."""
    return np.roll(a, -k, axis=0)


def prv(a: np.ndarray, k: int = 1) -> np.ndarray:
    """Value at logical index ``i - k`` (periodic)."""
    return np.roll(a, k, axis=0)


@dataclass(frozen=True)
class DiscreteCurve:
    nodes: np.ndarray
    r: np.ndarray
    eta: np.ndarray
    k: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    t: float = 0.0

    @property
    def n(self) -> int:
        return len(self.r)

    @property
    def q(self) -> np.ndarray:
        return 0.5 * (self.r + nxt(self.r))

    @property
    def total_length(self) -> float:
        return float(np.sum(self.r))

    def replace(self, **changes) -> "DiscreteCurve":
        return replace(self, **changes)


def node_curvature(nodes: np.ndarray) -> np.ndarray:
    """Signed curvature of the circle through ``x_{i-1}, x_i, x_{i+1}``."""
    a = nodes - prv(nodes)
    b = nxt(nodes) - nodes
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    denom = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1) * np.linalg.norm(a + b, axis=1)
    return 2.0 * cross / denom


def turning_angle_curvature(nodes: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Signed angle between volumes ``i-1`` and ``i+1`` divided by ``2 r_i``."""
    seg = nodes - prv(nodes)
    before, after = prv(seg), nxt(seg)
    cross = before[:, 0] * after[:, 1] - before[:, 1] * after[:, 0]
    dot = np.sum(before * after, axis=1)
    return np.arctan2(cross, dot) / (2.0 * r)


CURVATURE_INIT = ("turning-angle", "circumcircle")


def curve_from_nodes(nodes: np.ndarray, t: float = 0.0, curvature: str = "turning-angle") -> DiscreteCurve:
    """Initial state from polygon nodes ``x_1..x_n``.

    ``curvature="turning-angle"`` measures the turning between the two
    neighbouring volumes; ``"circumcircle"`` averages the three-point
    circumscribed-circle estimates at the two end nodes of each volume.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 2 or nodes.shape[1] != 2:
        raise ValueError("nodes must have shape (n, 2)")
    r = np.linalg.norm(nodes - prv(nodes), axis=1)
    if np.any(r <= 1e-14 * max(1.0, float(np.max(np.abs(nodes))))):
        raise DegenerateCurveError("degenerate discretization")
    if curvature == "turning-angle":
        k = turning_angle_curvature(nodes, r)
    elif curvature == "circumcircle":
        kappa = node_curvature(nodes)
        k = 0.5 * (kappa + prv(kappa))
    else:
        raise ValueError(f"unknown curvature initialization {curvature!r}")
    q = 0.5 * (r + nxt(r))
    return DiscreteCurve(
        nodes=nodes,
        r=r,
        eta=np.log(r),
        k=k,
        alpha=np.zeros(len(r)),
        beta=normal_velocity_from(r, q, k),
        t=t,
    )


def init_from_parametric(shape: ParametricShape, n: int, curvature: str = "turning-angle") -> DiscreteCurve:
    """Discretize ``shape`` with nodes ``x_i = shape(i/n)``."""
    if n < 8:
        raise ValueError("need at least 8 nodes")
    if len(shape.curves) != 1:
        raise ValueError(f"shape {shape.name!r} is not a single closed curve")
    return curve_from_nodes(shape.sample(n)[0], curvature=curvature)


def normal_velocity_from(r: np.ndarray, q: np.ndarray, k: np.ndarray) -> np.ndarray:
    return -((nxt(k) - k) / q - (k - prv(k)) / prv(q)) / r - 0.5 * k**3


def normal_velocity(curve: DiscreteCurve) -> np.ndarray:
    """Discrete Willmore normal velocity ``-d_s^2 k - k^3/2`` per volume."""
    return normal_velocity_from(curve.r, curve.q, curve.k)


def elastic_energy(curve: DiscreteCurve) -> float:
    return 0.5 * float(np.sum(curve.k**2 * curve.r))


def curve_average_kbeta(curve: DiscreteCurve) -> float:
    """Length-weighted mean of ``k * beta``."""
    return float(np.sum(curve.r * curve.k * curve.beta) / curve.total_length)


# -- CSV serialization -----------------------------------------------------

CSV_HEADER = ("t", "i", "x", "y", "k", "r", "alpha")


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def write_curves_csv(path: Path | str, curves: Iterable[DiscreteCurve]) -> None:
    """One row per node per saved time level."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for c in curves:
            for i in range(c.n):
                writer.writerow(
                    [_fmt(c.t), i + 1, _fmt(c.nodes[i, 0]), _fmt(c.nodes[i, 1]),
                     _fmt(c.k[i]), _fmt(c.r[i]), _fmt(c.alpha[i])]
                )


def write_polylines_csv(path: Path | str, levels: Iterable[tuple[float, list[np.ndarray]]]) -> None:
    """Contours in the curve CSV schema with empty ``k, r, alpha`` columns.

    Vertex numbering restarts at 1 for each contour of a time level.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for t, contours in levels:
            for poly in contours:
                for i, (x, y) in enumerate(poly):
                    writer.writerow([_fmt(t), i + 1, _fmt(x), _fmt(y), "", "", ""])


def read_curves_csv(path: Path | str) -> dict[float, list[np.ndarray]]:
    """Read a curve/contour CSV back as ``{t: [polyline, ...]}``.

    A new polyline starts whenever the node index drops back to 1.
    """
    out: dict[float, list[list[tuple[float, float]]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        for row in reader:
            t = float(row["t"])
            polys = out.setdefault(t, [])
            if int(row["i"]) == 1 or not polys:
                polys.append([])
            polys[-1].append((float(row["x"]), float(row["y"])))
    return {t: [np.array(p) for p in polys] for t, polys in out.items()}
