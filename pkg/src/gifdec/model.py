"""In-memory model of a GIF file: screen, color tables, frames, extensions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvariantViolation

TABLE_SIZES = (2, 4, 8, 16, 32, 64, 128, 256)

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class ColorTable:
    """Ordered RGB palette with 8-bit channels; ``len`` is the declared size."""

    entries: tuple[RGB, ...]
    sorted: bool = False

    def __post_init__(self) -> None:
        entries = tuple(tuple(int(v) for v in rgb) for rgb in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) not in TABLE_SIZES:
            raise InvariantViolation(
                f"color table size must be a power of two in 2..256, got {len(entries)}")
        for rgb in entries:
            if len(rgb) != 3 or not all(0 <= v <= 255 for v in rgb):
                raise InvariantViolation(f"bad RGB entry {rgb!r}")

    @classmethod
    def padded(cls, colors: Iterable[Sequence[int]], fill: RGB = (0, 0, 0)) -> "ColorTable":
        """Build a table from any number of colors, padding up to the next legal size."""
        colors = [tuple(c) for c in colors]
        if not 1 <= len(colors) <= 256:
            raise InvariantViolation(f"need 1..256 colors, got {len(colors)}")
        size = next(s for s in TABLE_SIZES if s >= len(colors))
        return cls(tuple(colors) + (fill,) * (size - len(colors)))

    @classmethod
    def from_bytes(cls, raw: bytes, sorted: bool = False) -> "ColorTable":
        return cls(tuple(tuple(raw[i:i + 3]) for i in range(0, len(raw), 3)), sorted)

    def to_bytes(self) -> bytes:
        return bytes(v for rgb in self.entries for v in rgb)

    @property
    def size_bits(self) -> int:
        """The 3-bit size field: ``len == 2 ** (size_bits + 1)``."""
        return len(self.entries).bit_length() - 2

    def normalized(self) -> np.ndarray:
        """Entries as a float64 (n, 3) array with channels scaled into [0, 1]."""
        return np.asarray(self.entries, dtype=np.float64) / 255.0

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> RGB:
        return self.entries[k]


@dataclass(frozen=True)
class GraphicControl:
    delay: int = 0
    disposal_method: int = 0
    transparency_enabled: bool = False
    transparent_index: int = 0
    user_input: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.delay <= 0xFFFF:
            raise InvariantViolation(f"delay out of range: {self.delay}")
        if not 0 <= self.disposal_method <= 7:
            raise InvariantViolation(f"disposal method out of range: {self.disposal_method}")
        if not 0 <= self.transparent_index <= 255:
            raise InvariantViolation(f"transparent index out of range: {self.transparent_index}")

    @property
    def transparent(self) -> Optional[int]:
        return self.transparent_index if self.transparency_enabled else None


@dataclass(frozen=True)
class Extension:
    """An extension block kept verbatim: label byte plus its data sub-blocks."""

    label: int
    blocks: tuple[bytes, ...] = ()

    def to_bytes(self) -> bytes:
        out = bytearray((0x21, self.label))
        for block in self.blocks:
            out.append(len(block))
            out += block
        out.append(0)
        return bytes(out)


@dataclass(frozen=True, eq=False)
class Frame:
    """One image: geometry, optional local table, optional graphic control and
    the de-interlaced (natural row order) index map of shape (height, width)."""

    left: int
    top: int
    index_map: np.ndarray
    lct: Optional[ColorTable] = None
    gce: Optional[GraphicControl] = None
    interlaced: bool = False
    extensions: tuple[Extension, ...] = ()

    def __post_init__(self) -> None:
        arr = np.array(self.index_map, dtype=np.uint8, copy=True)
        if arr.ndim != 2:
            raise InvariantViolation("index map must be two-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "index_map", arr)
        object.__setattr__(self, "extensions", tuple(self.extensions))

    @property
    def width(self) -> int:
        return self.index_map.shape[1]

    @property
    def height(self) -> int:
        return self.index_map.shape[0]

    @property
    def transparent(self) -> Optional[int]:
        return self.gce.transparent if self.gce is not None else None

    def active_table(self, gct: Optional[ColorTable]) -> Optional[ColorTable]:
        return self.lct if self.lct is not None else gct

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.left == other.left
            and self.top == other.top
            and self.lct == other.lct
            and self.gce == other.gce
            and self.interlaced == other.interlaced
            and self.extensions == other.extensions
            and np.array_equal(self.index_map, other.index_map)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class LogicalScreen:
    width: int
    height: int
    background_index: int = 0
    pixel_aspect: int = 0
    color_resolution: int = 7


@dataclass(frozen=True, eq=False)
class GifFile:
    screen: LogicalScreen
    gct: Optional[ColorTable] = None
    frames: tuple[Frame, ...] = ()
    loop_count: Optional[int] = None
    trailing_extensions: tuple[Extension, ...] = ()
    version: str = "89a"

    def __post_init__(self) -> None:
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "trailing_extensions", tuple(self.trailing_extensions))
        if self.version not in ("87a", "89a"):
            raise InvariantViolation(f"unknown version {self.version!r}")
        if self.loop_count is not None and not 0 <= self.loop_count <= 0xFFFF:
            raise InvariantViolation(f"loop count out of range: {self.loop_count}")

    @property
    def width(self) -> int:
        return self.screen.width

    @property
    def height(self) -> int:
        return self.screen.height

    @property
    def lct_count(self) -> int:
        return sum(f.lct is not None for f in self.frames)

    @property
    def output_version(self) -> str:
        """Version written on encode: 89a whenever an 89a-only block is present."""
        needs_89a = (
            self.loop_count is not None
            or bool(self.trailing_extensions)
            or any(f.gce is not None or f.extensions for f in self.frames)
        )
        return "89a" if needs_89a else self.version

    def validate(self) -> None:
        """Raise InvariantViolation unless the file can be encoded as-is."""
        s = self.screen
        if not (1 <= s.width <= 0xFFFF and 1 <= s.height <= 0xFFFF):
            raise InvariantViolation(f"bad logical screen size {s.width}x{s.height}")
        for i, f in enumerate(self.frames):
            if f.width < 1 or f.height < 1:
                raise InvariantViolation(f"frame {i}: empty image")
            if f.left < 0 or f.top < 0 or f.left + f.width > s.width or f.top + f.height > s.height:
                raise InvariantViolation(
                    f"frame {i}: rectangle {f.left},{f.top} {f.width}x{f.height} "
                    f"exceeds logical screen {s.width}x{s.height}")
            table = f.active_table(self.gct)
            if table is None:
                raise InvariantViolation(f"frame {i}: no local or global color table")
            if int(f.index_map.max()) >= len(table):
                raise InvariantViolation(
                    f"frame {i}: index {int(f.index_map.max())} >= table size {len(table)}")
            if f.transparent is not None and f.transparent >= len(table):
                raise InvariantViolation(
                    f"frame {i}: transparent index {f.transparent} >= table size {len(table)}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GifFile):
            return NotImplemented
        return (
            self.screen == other.screen
            and self.gct == other.gct
            and self.frames == other.frames
            and self.loop_count == other.loop_count
            and self.trailing_extensions == other.trailing_extensions
            and self.output_version == other.output_version
        )

    __hash__ = None  # type: ignore[assignment]


def render(frame: Frame, gct: Optional[ColorTable]) -> tuple[np.ndarray, np.ndarray]:
    """Colors of a frame in [0, 1] as an (h, w, 3) array, plus an (h, w) opaque mask."""
    table = frame.active_table(gct)
    if table is None:
        raise InvariantViolation("frame has no active color table")
    rgb = table.normalized()[frame.index_map]
    tau = frame.transparent
    opaque = frame.index_map != tau if tau is not None else np.ones(frame.index_map.shape, bool)
    return rgb, opaque
