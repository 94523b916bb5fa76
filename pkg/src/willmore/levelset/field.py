"""Uniform square-cell grid fields and their plain-text serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class LevelSetField:
    """Grid values ``u[i, j]`` at ``(a1 + i h, b1 + j h)``."""

    u: np.ndarray
    h: float
    origin: tuple[float, float] = (0.0, 0.0)
    t: float = 0.0

    def __post_init__(self):
        if self.u.ndim != 2 or min(self.u.shape) < 6:
            raise ValueError("field needs at least 6 nodes per direction")
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape

    @property
    def extent(self) -> tuple[float, float]:
        n1, n2 = self.u.shape
        return (self.origin[0] + (n1 - 1) * self.h, self.origin[1] + (n2 - 1) * self.h)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        n1, n2 = self.u.shape
        x = self.origin[0] + self.h * np.arange(n1)
        y = self.origin[1] + self.h * np.arange(n2)
        return np.meshgrid(x, y, indexing="ij")

    def replace(self, **changes) -> "LevelSetField":
        return replace(self, **changes)


def grid_for_box(lower: float, upper: float, cells: int) -> tuple[float, float]:
    """Spacing and origin of a square ``[lower, upper]^2`` split into ``cells^2`` volumes."""
    return (upper - lower) / cells, lower


def field_from_sdf(sdf, lower: float, upper: float, cells: int) -> LevelSetField:
    h, a = grid_for_box(lower, upper, cells)
    x = a + h * np.arange(cells + 1)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return LevelSetField(np.asarray(sdf(X, Y), dtype=float), h, (a, a))


def write_field(path: Path | str, field: LevelSetField) -> None:
    """Matrix file with one row per ``j`` plus a ``.json`` sidecar with the geometry."""
    path = Path(path)
    np.savetxt(path, field.u.T, fmt="%.17g", delimiter=" ")
    meta = {"h": field.h, "origin": list(field.origin), "extent": list(field.extent), "t": field.t}
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, indent=2), encoding="utf-8")


def read_field(path: Path | str) -> LevelSetField:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text(encoding="utf-8"))
    u = np.loadtxt(path, ndmin=2).T
    return LevelSetField(u, float(meta["h"]), tuple(meta["origin"]), float(meta["t"]))
