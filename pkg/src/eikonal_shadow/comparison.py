"""Nearest-neighbour comparison of two ``(x, y, v)`` fields."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


class NoOverlapError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    matched: int
    max_distance: float
    median_distance: float
    max_dv: float
    median_dv: float
    rows: np.ndarray  # v-level of each stratum
    row_stats: np.ndarray  # count, max dist, median dist, max |dv|, median |dv|


def first_rows(xyv, count):
    """Keep the records on the ``count`` smallest distinct ``v`` levels."""
    levels = np.unique(xyv[:, 2])[:count]
    return xyv[np.isin(xyv[:, 2], levels)]


def compare_fields(field_a, field_b, radius):
    """Match every ``field_b`` point to its nearest ``field_a`` point.

    Inputs are ``(K, 3)`` arrays ``x, y, v``. Pairs farther apart than
    ``radius`` are dropped. Statistics are stratified by the ``v`` level of
    the ``field_a`` partner.
    """
    field_a = np.asarray(field_a, dtype=float)
    field_b = np.asarray(field_b, dtype=float)
    if not radius > 0:
        raise ValueError("radius must be positive")
    if len(field_a) == 0 or len(field_b) == 0:
        raise NoOverlapError("a field is empty")
    dist, idx = cKDTree(field_a[:, :2]).query(field_b[:, :2])
    keep = dist <= radius
    if not np.any(keep):
        raise NoOverlapError(f"no field_b point lies within {radius} of field_a")
    dist, idx = dist[keep], idx[keep]
    dv = np.abs(field_b[keep, 2] - field_a[idx, 2])
    level = field_a[idx, 2]
    rows = np.unique(level)
    stats = []
    for v in rows:
        m = level == v
        stats.append((m.sum(), dist[m].max(), np.median(dist[m]), dv[m].max(), np.median(dv[m])))
    return ComparisonReport(
        matched=int(keep.sum()),
        max_distance=float(dist.max()),
        median_distance=float(np.median(dist)),
        max_dv=float(dv.max()),
        median_dv=float(np.median(dv)),
        rows=rows,
        row_stats=np.array(stats, dtype=float),
    )
