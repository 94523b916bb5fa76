"""Zero-set extraction by marching squares.

Corners with ``u > 0`` count as inside.  Every contour is oriented with the
inside on its left; saddle cells join the two inside corners when the cell
average is positive and separate them otherwise.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .field import LevelSetField


def _crossing(ua, ub):
    return ua / (ua - ub)


def _cell_segments(u, i, j):
    """Segments ``(start_edge, end_edge, start_point, end_point)`` in grid units."""
    # counterclockwise corners and the edges leaving them
    corners = ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1))
    edges = (("h", i, j), ("v", i + 1, j), ("h", i, j + 1), ("v", i, j))
    vals = [u[c] for c in corners]
    inside = [v > 0 for v in vals]
    entries, exits = [], []
    for k in range(4):
        a, b = k, (k + 1) % 4
        if inside[a] == inside[b]:
            continue
        t = _crossing(vals[a], vals[b])
        ca, cb = corners[a], corners[b]
        p = (ca[0] + t * (cb[0] - ca[0]), ca[1] + t * (cb[1] - ca[1]))
        (exits if inside[a] else entries).append((k, edges[k], p))
    if not entries:
        return []
    if len(entries) == 1:
        (_, ex_e, ex_p), (_, en_e, en_p) = exits[0], entries[0]
        return [(ex_e, en_e, ex_p, en_p)]
    # saddle: pair each exit with the entry that follows it (joined inside)
    # or precedes it (separated inside corners) along the boundary walk
    joined = sum(vals) > 0
    segs = []
    for k, ex_e, ex_p in exits:
        order = sorted(entries, key=lambda e: (e[0] - k) % 4)
        _, en_e, en_p = order[0] if joined else order[-1]
        segs.append((ex_e, en_e, ex_p, en_p))
    return segs


def extract_zero_set(field: LevelSetField) -> list[np.ndarray]:
    """Polylines of the zero level set in physical coordinates.

    Closed contours repeat their first vertex at the end; contours that
    leave the grid are returned open.
    """
    u = np.asarray(field.u, dtype=float)
    pos = u > 0
    mixed = (pos[:-1, :-1] != pos[1:, :-1]) | (pos[:-1, :-1] != pos[:-1, 1:]) | (pos[:-1, :-1] != pos[1:, 1:])
    by_start: dict = {}
    ends = set()
    for i, j in zip(*np.nonzero(mixed)):
        for seg in _cell_segments(u, int(i), int(j)):
            by_start[seg[0]] = seg
            ends.add(seg[1])
    contours = []
    starts = [e for e in by_start if e not in ends] + list(by_start)
    for start in starts:
        if start not in by_start:
            continue
        seg = by_start.pop(start)
        pts = [seg[2], seg[3]]
        while seg[1] in by_start:
            seg = by_start.pop(seg[1])
            pts.append(seg[3])
        if seg[1] == start:
            pts[-1] = pts[0]
        contours.append(np.asarray(pts))
    ax, ay = field.origin
    return [np.column_stack([ax + field.h * c[:, 0], ay + field.h * c[:, 1]]) for c in contours]


def is_closed(poly: np.ndarray, tol: float = 1e-12) -> bool:
    return len(poly) > 2 and bool(np.all(np.abs(poly[0] - poly[-1]) <= tol))


def signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def inside_components(field: LevelSetField) -> int:
    """Number of 4-connected components of the grid nodes with ``u > 0``."""
    return int(ndimage.label(field.u > 0)[1])
