"""MSE / PSNR over frame sequences and bit rate in bits per pixel.

Frames are compared on the plain indexed model, color = table[index], over
each frame's own rectangle with no disposal compositing. Pixels that are
transparent in either frame are left out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FrameCountMismatch, GeometryMismatch
from .model import ColorTable, Frame, GifFile, render


def psnr(mse: float, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` when ``mse`` is 0."""
    if mse <= 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def frame_mse(a: Frame, b: Frame, gct_a: Optional[ColorTable] = None,
              gct_b: Optional[ColorTable] = None) -> float:
    """Mean squared channel error between two frames, channels in [0, 1].

    ``gct_a``/``gct_b`` are used for frames without a local table; ``gct_b``
    defaults to ``gct_a``.
    """
    if gct_b is None:
        gct_b = gct_a
    if (a.left, a.top, a.index_map.shape) != (b.left, b.top, b.index_map.shape):
        raise GeometryMismatch(
            f"frames differ in geometry: {a.left},{a.top} {a.width}x{a.height} "
            f"vs {b.left},{b.top} {b.width}x{b.height}")
    rgb_a, opaque_a = render(a, gct_a)
    rgb_b, opaque_b = render(b, gct_b)
    mask = opaque_a & opaque_b
    if not mask.any():
        return 0.0
    diff = rgb_a[mask] - rgb_b[mask]
    return float(np.mean(diff * diff))


@dataclass(frozen=True)
class QualityReport:
    mse_avg: float
    mse_max: float
    psnr_avg: float
    psnr_max_err: float
    per_frame_mse: tuple[float, ...]

    @classmethod
    def from_frame_mse(cls, per_frame: list[float]) -> "QualityReport":
        mse_avg = float(np.mean(per_frame)) if per_frame else 0.0
        mse_max = max(per_frame) if per_frame else 0.0
        return cls(mse_avg, mse_max, psnr(mse_avg), psnr(mse_max), tuple(per_frame))

    def to_dict(self) -> dict:
        return {
            "mse_avg": self.mse_avg,
            "mse_max": self.mse_max,
            "psnr_avg": format_float(self.psnr_avg),
            "psnr_max_err": format_float(self.psnr_max_err),
            "per_frame_mse": list(self.per_frame_mse),
        }


def sequence_mse(orig: GifFile, opt: GifFile) -> QualityReport:
    """Per-frame MSE aggregated as mean and max over the sequence."""
    if len(orig.frames) != len(opt.frames):
        raise FrameCountMismatch(f"{len(orig.frames)} frames vs {len(opt.frames)}")
    per_frame = [frame_mse(a, b, orig.gct, opt.gct) for a, b in zip(orig.frames, opt.frames)]
    return QualityReport.from_frame_mse(per_frame)


@dataclass(frozen=True)
class RateReport:
    bytes: int
    bpp: float
    saving_bpp: float = 0.0

    def to_dict(self) -> dict:
        return {"bytes": self.bytes, "bpp": self.bpp, "saving_bpp": self.saving_bpp}


def bitrate(nbytes: int, gif: GifFile, original: Optional[RateReport] = None) -> RateReport:
    """Bits per pixel over the logical screen times the frame count.

    With ``original`` the saving relative to it is filled in.
    """
    pixels = gif.width * gif.height * len(gif.frames)
    if pixels == 0:
        raise ValueError("bit rate undefined for a file without frames")
    bpp = 8.0 * nbytes / pixels
    saving = original.bpp - bpp if original is not None else 0.0
    return RateReport(nbytes, bpp, saving)


def format_float(x: float) -> str | float:
    """JSON/CSV-friendly float: infinities become the string ``"inf"``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x
