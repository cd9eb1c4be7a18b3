"""Normalized RGB distance, nearest-entry search and table dissimilarity.

All arithmetic is float64 on channels scaled into [0, 1]. The scalar
:func:`color_distance` and the vectorized :func:`distance_matrix` perform the
same operations in the same order, so they agree bit for bit; this is what
makes the smallest-index tie-break reproducible across both paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import AllEntriesExcluded, EmptyTable
from .model import ColorTable

SQRT3 = math.sqrt(3.0)


class NormColor(NamedTuple):
    r: float
    g: float
    b: float

    @classmethod
    def from_rgb8(cls, rgb: Sequence[int]) -> "NormColor":
        return cls(rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0)


TableLike = Union[ColorTable, np.ndarray, Sequence[Sequence[float]]]
Metric = Callable[[np.ndarray, np.ndarray], np.ndarray]


def color_distance(c1: Sequence[float], c2: Sequence[float]) -> float:
    """Euclidean RGB distance scaled by 1/sqrt(3) so that black-white is 1."""
    dr = c1[0] - c2[0]
    dg = c1[1] - c2[1]
    db = c1[2] - c2[2]
    return math.sqrt(dr * dr + dg * dg + db * db) / SQRT3


def distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise :func:`color_distance` between rows of ``a`` (m, 3) and ``b`` (n, 3)."""
    diff = a[:, None, :] - b[None, :, :]
    dr, dg, db = diff[..., 0], diff[..., 1], diff[..., 2]
    return np.sqrt(dr * dr + dg * dg + db * db) / SQRT3


def as_unit_array(table: TableLike) -> np.ndarray:
    """A table as float64 (n, 3) in [0, 1]. ColorTables are divided by 255;
    anything else is taken as already normalized."""
    if isinstance(table, ColorTable):
        return table.normalized()
    arr = np.asarray(table, dtype=np.float64).reshape(-1, 3)
    return arr


def nearest_index(c: Sequence[float], g: TableLike,
                  metric: Metric = distance_matrix) -> tuple[int, float]:
    """Index of the entry of ``g`` closest to ``c`` and its distance.

    Ties go to the smallest index.
    """
    entries = as_unit_array(g)
    if len(entries) == 0:
        raise EmptyTable("nearest_index on an empty table")
    d = metric(np.asarray(c, dtype=np.float64).reshape(1, 3), entries)[0]
    p = int(np.argmin(d))
    return p, float(d[p])


@dataclass(frozen=True)
class DissimilarityResult:
    dissimilarity: float
    nearest_indices: np.ndarray
    per_entry_distance: np.ndarray
    excluded: Optional[int] = None

    @property
    def max_included_distance(self) -> float:
        d = self.per_entry_distance
        if self.excluded is not None:
            d = np.delete(d, self.excluded)
        return float(d.max())


def table_dissimilarity(l: TableLike, g: TableLike, exclude: Optional[int] = None,
                        metric: Metric = distance_matrix) -> DissimilarityResult:
    """Mean distance from each entry of ``l`` to its nearest entry of ``g``.

    The mean runs over the entries of ``l``, skipping ``exclude`` (normally a
    transparent index). Its nearest index is still reported.
    """
    lv = as_unit_array(l)
    gv = as_unit_array(g)
    if len(lv) == 0 or len(gv) == 0:
        raise EmptyTable("table_dissimilarity needs two non-empty tables")
    if exclude is not None and not 0 <= exclude < len(lv):
        raise IndexError(f"exclude={exclude} outside table of size {len(lv)}")
    if exclude is not None and len(lv) == 1:
        raise AllEntriesExcluded("the only entry of the table is excluded")

    d = metric(lv, gv)
    nearest = np.argmin(d, axis=1)
    per_entry = d[np.arange(len(lv)), nearest]
    included = per_entry if exclude is None else np.delete(per_entry, exclude)
    return DissimilarityResult(
        dissimilarity=float(included.mean()),
        nearest_indices=nearest,
        per_entry_distance=per_entry,
        excluded=exclude,
    )
