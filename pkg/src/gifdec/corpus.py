"""Reproducible synthetic GIFs.

``decimation_gif`` builds animations whose local tables have a known
relation to the global table:

- ``exact``: every LCT color also occurs in the GCT (dissimilarity 0)
- ``near``:  GCT colors jittered by a few levels (small dissimilarity)
- ``far``:   unrelated random colors

``codec_gif`` builds structurally varied files (87a/89a, interlacing, table
sizes 2..256, sub-rectangles, comments, opaque application blocks) for
codec roundtrip checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .codec import encode
from .model import ColorTable, Extension, Frame, GifFile, GraphicControl, LogicalScreen

NEAR_JITTER = (1, 2, 4, 6, 9, 13, 18, 24, 32, 42)


@dataclass(frozen=True)
class SyntheticGif:
    gif: GifFile
    kinds: tuple[str, ...]  # per frame: "gct", "exact", "near" or "far"

    @property
    def exact_frames(self) -> frozenset[int]:
        return frozenset(i for i, k in enumerate(self.kinds) if k == "exact")


def _random_colors(rng: np.random.Generator, n: int) -> np.ndarray:
    colors = set()
    while len(colors) < n:
        colors.add(tuple(int(v) for v in rng.integers(0, 256, 3)))
    out = np.array(sorted(colors), dtype=np.int64)
    return out[rng.permutation(n)]


def _ensure_foreign(rng: np.random.Generator, lct: np.ndarray, gct: np.ndarray,
                    skip: Optional[int]) -> np.ndarray:
    """Make sure at least one LCT color other than slot ``skip`` is absent from the GCT."""
    present = {tuple(c) for c in gct.tolist()}
    while all(tuple(c) in present for k, c in enumerate(lct.tolist()) if k != skip):
        k = int(rng.integers(0, len(lct)))
        if k == skip:
            continue
        ch = int(rng.integers(0, 3))
        lct[k, ch] = lct[k, ch] + 1 if lct[k, ch] < 255 else 254
    return lct


def _blocky(rng: np.random.Generator, h: int, w: int, n_colors: int) -> np.ndarray:
    block = int(rng.integers(2, 9))
    coarse = rng.integers(0, n_colors, (-(-h // block), -(-w // block)))
    return np.repeat(np.repeat(coarse, block, 0), block, 1)[:h, :w]


def decimation_gif(rng: np.random.Generator, *, table_bits: Optional[int] = None,
                   n_frames: Optional[int] = None, size: Optional[tuple[int, int]] = None,
                   transparency: bool = True,
                   kind_weights: tuple[float, float, float, float] = (0.2, 0.25, 0.35, 0.2),
                   ) -> SyntheticGif:
    """Animated GIF whose LCTs (all the same size as the GCT) mix the three kinds.

    ``kind_weights`` are the probabilities of gct/exact/near/far per frame.
    """
    bits = table_bits if table_bits is not None else int(rng.choice([3, 4, 5, 6, 8]))
    n = 1 << bits
    n_frames = n_frames if n_frames is not None else int(rng.integers(4, 11))
    w, h = size if size is not None else (int(rng.integers(24, 81)), int(rng.integers(24, 81)))

    gct = _random_colors(rng, n)
    frames = []
    kinds = []
    for i in range(n_frames):
        kind = str(rng.choice(["gct", "exact", "near", "far"], p=kind_weights))
        if i == 0:
            kind = "gct"
        tau = int(rng.integers(0, n)) if transparency and rng.random() < 0.3 else None
        if kind == "gct":
            lct = None
        elif kind == "exact":
            pick = rng.permutation(n) if rng.random() < 0.5 else rng.integers(0, n, n)
            lct = gct[pick]
        elif kind == "near":
            amp = int(rng.choice(NEAR_JITTER))
            lct = np.clip(gct[rng.permutation(n)] + rng.integers(-amp, amp + 1, (n, 3)), 0, 255)
            lct = _ensure_foreign(rng, lct, gct, tau)
        else:
            lct = _ensure_foreign(rng, rng.integers(0, 256, (n, 3)), gct, tau)

        if rng.random() < 0.25:
            fw, fh = int(rng.integers(w // 2, w + 1)), int(rng.integers(h // 2, h + 1))
            left, top = int(rng.integers(0, w - fw + 1)), int(rng.integers(0, h - fh + 1))
        else:
            fw, fh, left, top = w, h, 0, 0
        pixels = _blocky(rng, fh, fw, n)

        gce = GraphicControl(delay=int(rng.integers(2, 11)), disposal_method=1)
        if tau is not None:
            y0, x0 = int(rng.integers(0, fh)), int(rng.integers(0, fw))
            pixels[y0:y0 + max(1, fh // 4), x0:x0 + max(1, fw // 4)] = tau
            gce = GraphicControl(delay=gce.delay, disposal_method=1,
                                 transparency_enabled=True, transparent_index=tau)

        frames.append(Frame(
            left=left, top=top, index_map=pixels, gce=gce,
            lct=ColorTable(tuple(map(tuple, lct.tolist()))) if lct is not None else None,
        ))
        kinds.append(kind)

    gif = GifFile(
        screen=LogicalScreen(w, h),
        gct=ColorTable(tuple(map(tuple, gct.tolist()))),
        frames=tuple(frames),
        loop_count=0,
    )
    return SyntheticGif(gif, tuple(kinds))


def _random_extension(rng: np.random.Generator) -> Extension:
    if rng.random() < 0.5:
        label = 0xFE  # comment
        blocks = tuple(bytes(rng.integers(32, 127, int(rng.integers(1, 256))).tolist())
                       for _ in range(int(rng.integers(0, 3))))
    else:
        label = 0xFF
        blocks = (b"XMP DataXMP",) + tuple(
            bytes(rng.integers(0, 256, int(rng.integers(1, 256))).tolist())
            for _ in range(int(rng.integers(1, 3))))
    return Extension(label, blocks)


def codec_gif(rng: np.random.Generator) -> GifFile:
    """Structurally varied GIF for roundtrip testing."""
    version = "87a" if rng.random() < 0.2 else "89a"
    extended = version == "89a"
    w, h = int(rng.integers(1, 65)), int(rng.integers(1, 65))

    def table() -> ColorTable:
        n = 1 << int(rng.integers(1, 9))
        return ColorTable(tuple(map(tuple, rng.integers(0, 256, (n, 3)).tolist())),
                          sorted=bool(rng.random() < 0.1))

    gct = table() if rng.random() < 0.8 else None
    frames = []
    for _ in range(int(rng.integers(1, 6))):
        lct = table() if gct is None or rng.random() < 0.4 else None
        active = lct if lct is not None else gct
        fw, fh = int(rng.integers(1, w + 1)), int(rng.integers(1, h + 1))
        left, top = int(rng.integers(0, w - fw + 1)), int(rng.integers(0, h - fh + 1))
        if rng.random() < 0.5:
            pixels = rng.integers(0, len(active), (fh, fw))
        else:
            pixels = _blocky(rng, fh, fw, len(active))

        gce = None
        extensions = []
        if extended:
            if rng.random() < 0.7:
                tp = bool(rng.random() < 0.4)
                gce = GraphicControl(
                    delay=int(rng.integers(0, 500)),
                    disposal_method=int(rng.integers(0, 4)),
                    transparency_enabled=tp,
                    transparent_index=int(rng.integers(0, len(active))) if tp else 0,
                    user_input=bool(rng.random() < 0.1),
                )
            extensions = [_random_extension(rng) for _ in range(int(rng.integers(0, 3)))]
        frames.append(Frame(left=left, top=top, index_map=pixels, lct=lct, gce=gce,
                            interlaced=bool(rng.random() < 0.3), extensions=tuple(extensions)))

    trailing = ()
    if extended and rng.random() < 0.3:
        trailing = (_random_extension(rng),)
    return GifFile(
        screen=LogicalScreen(w, h, background_index=int(rng.integers(0, 256)),
                             pixel_aspect=int(rng.integers(0, 256)) if rng.random() < 0.1 else 0,
                             color_resolution=int(rng.integers(0, 8))),
        gct=gct,
        frames=tuple(frames),
        loop_count=int(rng.integers(0, 5)) if extended and rng.random() < 0.5 else None,
        trailing_extensions=trailing,
        version=version,
    )


def write_corpus(out_dir: Path, count: int, seed: int, kind: str = "decimation") -> list[Path]:
    """Write ``count`` generated files to ``out_dir``; returns their paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        gif = decimation_gif(rng).gif if kind == "decimation" else codec_gif(rng)
        path = out_dir / f"{kind}_{i:04d}.gif"
        path.write_bytes(encode(gif))
        paths.append(path)
    return paths
