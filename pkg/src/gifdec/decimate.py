"""Local color table decimation.

A frame's local table ``L`` is dropped in favour of the global table ``G``
when ``table_dissimilarity(L, G) <= t``; its index map is then rewritten so
each old index ``k`` points at the GCT entry nearest to ``L[k]``.

Transparency: the transparent entry is left out of the dissimilarity mean
and is moved to the smallest GCT index that no opaque entry maps to, so the
set of transparent pixels never changes. If there is no such index the frame
is left alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .codec import decode, encode
from .color import DissimilarityResult, TableLike, as_unit_array, table_dissimilarity
from .errors import NoFreeTransparentSlot
from .model import Frame, GifFile
from .quality import QualityReport, RateReport, bitrate, format_float, sequence_mse


@dataclass(frozen=True)
class RemapTable:
    """Old LCT index -> GCT index, with the transparent slot's move recorded."""

    mapping: tuple[int, ...]
    transparent_remap: Optional[tuple[int, int]] = None

    def apply(self, index_map: np.ndarray) -> np.ndarray:
        lut = np.asarray(self.mapping, dtype=np.uint8)
        return lut[index_map]


def _remap_from(result: DissimilarityResult, gct_size: int,
                transparent: Optional[int]) -> RemapTable:
    mapping = [int(p) for p in result.nearest_indices]
    if transparent is None:
        return RemapTable(tuple(mapping))
    targets = {p for k, p in enumerate(mapping) if k != transparent}
    free = next((p for p in range(gct_size) if p not in targets), None)
    if free is None:
        raise NoFreeTransparentSlot(
            f"all {gct_size} GCT entries are targets of opaque LCT entries")
    mapping[transparent] = free
    return RemapTable(tuple(mapping), (transparent, free))


def build_remap(l: TableLike, g: TableLike, transparent: Optional[int] = None) -> RemapTable:
    """Nearest-GCT-entry mapping for every entry of ``l``.

    With ``transparent`` set, that slot instead maps to the smallest GCT
    index not used by any opaque entry.
    """
    result = table_dissimilarity(l, g, exclude=transparent)
    return _remap_from(result, len(as_unit_array(g)), transparent)


class Action(str, enum.Enum):
    REMOVED = "removed"
    KEPT = "kept"
    SKIPPED_NO_GCT = "skipped_no_gct"
    SKIPPED_TRANSPARENCY = "skipped_transparency"
    NO_LCT = "no_lct"


@dataclass(frozen=True)
class FrameDecision:
    frame: int
    had_lct: bool
    action: Action
    dissimilarity: Optional[float] = None
    max_distance: Optional[float] = None
    remap: Optional[RemapTable] = None


@dataclass(frozen=True)
class DecimationOutcome:
    threshold: float
    frames: tuple[FrameDecision, ...]

    @property
    def lcts_before(self) -> int:
        return sum(d.had_lct for d in self.frames)

    @property
    def lcts_removed(self) -> int:
        return sum(d.action is Action.REMOVED for d in self.frames)

    @property
    def removed_frames(self) -> frozenset[int]:
        return frozenset(d.frame for d in self.frames if d.action is Action.REMOVED)


CSV_FIELDS = ("file", "threshold", "bytes_orig", "bytes_opt", "bpp_orig", "bpp_opt",
              "saving_bpp", "lcts_total", "lcts_removed", "mse_avg", "mse_max",
              "psnr_avg", "psnr_max_err")


@dataclass(frozen=True)
class OptimizationReport:
    threshold: float
    lcts_total: int
    lcts_removed: int
    before: RateReport
    after: RateReport
    quality: QualityReport

    @property
    def saving_bpp(self) -> float:
        return self.after.saving_bpp

    def to_row(self, file: str) -> dict:
        return {
            "file": file,
            "threshold": self.threshold,
            "bytes_orig": self.before.bytes,
            "bytes_opt": self.after.bytes,
            "bpp_orig": self.before.bpp,
            "bpp_opt": self.after.bpp,
            "saving_bpp": self.after.saving_bpp,
            "lcts_total": self.lcts_total,
            "lcts_removed": self.lcts_removed,
            "mse_avg": self.quality.mse_avg,
            "mse_max": self.quality.mse_max,
            "psnr_avg": format_float(self.quality.psnr_avg),
            "psnr_max_err": format_float(self.quality.psnr_max_err),
        }

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "lcts_total": self.lcts_total,
            "lcts_removed": self.lcts_removed,
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
            "quality": self.quality.to_dict(),
        }


class Decimation(NamedTuple):
    gif: GifFile
    outcome: DecimationOutcome
    report: OptimizationReport
    data: bytes


class _Candidate(NamedTuple):
    result: DissimilarityResult
    remap: Optional[RemapTable]  # None when no free transparent slot


def _analyze(gif: GifFile) -> dict[int, _Candidate]:
    """Dissimilarity and remap for every frame carrying a local table."""
    if gif.gct is None:
        return {}
    out = {}
    for i, frame in enumerate(gif.frames):
        if frame.lct is None:
            continue
        tau = frame.transparent
        result = table_dissimilarity(frame.lct, gif.gct, exclude=tau)
        try:
            remap = _remap_from(result, len(gif.gct), tau)
        except NoFreeTransparentSlot:
            remap = None
        out[i] = _Candidate(result, remap)
    return out


def _check_threshold(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {t}")


def _remapped(frame: Frame, remap: RemapTable) -> Frame:
    gce = frame.gce
    if remap.transparent_remap is not None:
        gce = replace(gce, transparent_index=remap.transparent_remap[1])
    return replace(frame, lct=None, index_map=remap.apply(frame.index_map), gce=gce)


def _decimate(gif: GifFile, t: float, original: Optional[bytes],
              analysis: dict[int, _Candidate]) -> Decimation:
    decisions = []
    frames = list(gif.frames)
    for i, frame in enumerate(gif.frames):
        if gif.gct is None:
            decisions.append(FrameDecision(i, frame.lct is not None, Action.SKIPPED_NO_GCT))
            continue
        if frame.lct is None:
            decisions.append(FrameDecision(i, False, Action.NO_LCT))
            continue
        cand = analysis[i]
        d = cand.result.dissimilarity
        common = dict(dissimilarity=d, max_distance=cand.result.max_included_distance)
        if d > t:
            decisions.append(FrameDecision(i, True, Action.KEPT, **common))
        elif cand.remap is None:
            decisions.append(FrameDecision(i, True, Action.SKIPPED_TRANSPARENCY, **common))
        else:
            frames[i] = _remapped(frame, cand.remap)
            decisions.append(FrameDecision(i, True, Action.REMOVED, remap=cand.remap, **common))
    outcome = DecimationOutcome(t, tuple(decisions))

    if original is None:
        original = encode(gif)
    if outcome.lcts_removed:
        optimized = replace(gif, frames=tuple(frames))
        data = encode(optimized)
    else:
        # nothing to drop: hand the input back untouched
        optimized, data = gif, original

    before = bitrate(len(original), gif)
    report = OptimizationReport(
        threshold=t,
        lcts_total=outcome.lcts_before,
        lcts_removed=outcome.lcts_removed,
        before=before,
        after=bitrate(len(data), optimized, before),
        quality=sequence_mse(gif, optimized),
    )
    return Decimation(optimized, outcome, report, data)


def decimate(gif: GifFile, t: float,
             original: Optional[bytes] = None) -> tuple[GifFile, DecimationOutcome, OptimizationReport]:
    """Drop every local table within ``t`` of the global table.

    ``original`` is the file the GifFile was decoded from; it sets the
    "before" size of the report (the re-encoded size is used otherwise).
    """
    _check_threshold(t)
    result = _decimate(gif, t, original, _analyze(gif))
    return result.gif, result.outcome, result.report


def decimate_bytes(data: bytes, t: float) -> Decimation:
    """Decode, decimate and re-encode. The returned ``data`` is the output file."""
    _check_threshold(t)
    gif = decode(data)
    return _decimate(gif, t, data, _analyze(gif))


def sweep(gif: GifFile, thresholds: Sequence[float],
          original: Optional[bytes] = None) -> list[tuple[float, OptimizationReport]]:
    """Run :func:`decimate` on the pristine input once per threshold."""
    thresholds = list(thresholds)
    for t in thresholds:
        _check_threshold(t)
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be ascending")
    if original is None:
        original = encode(gif)
    analysis = _analyze(gif)
    # identical removal sets give identical outputs; decimate each set once
    cache: dict[frozenset[int], Decimation] = {}
    rows = []
    for t in thresholds:
        removable = frozenset(
            i for i, c in analysis.items() if c.result.dissimilarity <= t and c.remap is not None)
        hit = cache.get(removable)
        if hit is None:
            hit = cache[removable] = _decimate(gif, t, original, analysis)
            report = hit.report
        else:
            report = replace(hit.report, threshold=t)
        rows.append((t, report))
    return rows
