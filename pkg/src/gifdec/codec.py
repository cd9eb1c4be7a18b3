"""GIF87a/89a container parsing and serialization."""

from __future__ import annotations

import struct
from typing import Optional

import numpy as np

from .errors import (
    BadMagic,
    CorruptLzwStream,
    InvariantViolation,
    MalformedBlock,
    OversizedIndex,
    TruncatedFile,
)
from .lzw import lzw_compress, lzw_decompress, pack_subblocks
from .model import ColorTable, Extension, Frame, GifFile, GraphicControl, LogicalScreen

EXTENSION_INTRODUCER = 0x21
IMAGE_SEPARATOR = 0x2C
TRAILER = 0x3B

GRAPHIC_CONTROL_LABEL = 0xF9
PLAIN_TEXT_LABEL = 0x01
APPLICATION_LABEL = 0xFF
LOOP_APPLICATIONS = (b"NETSCAPE2.0", b"ANIMEXTS1.0")


def interlace_order(height: int) -> list[int]:
    """Natural row numbers in the order interlaced rows are stored."""
    return (list(range(0, height, 8)) + list(range(4, height, 8))
            + list(range(2, height, 4)) + list(range(1, height, 2)))


def min_code_size_for(table: ColorTable) -> int:
    return max(2, len(table).bit_length() - 1)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.data):
            raise TruncatedFile(f"need {n} bytes at offset {self.pos}, file has {len(self.data)}")
        chunk = self.data[self.pos:end]
        self.pos = end
        return chunk

    def byte(self) -> int:
        return self.take(1)[0]

    def subblocks(self) -> list[bytes]:
        blocks = []
        while True:
            size = self.byte()
            if size == 0:
                return blocks
            blocks.append(self.take(size))


def _parse_gce(ext: Extension) -> Optional[GraphicControl]:
    if len(ext.blocks) != 1 or len(ext.blocks[0]) != 4:
        return None
    packed, delay, tau = struct.unpack("<BHB", ext.blocks[0])
    return GraphicControl(
        delay=delay,
        disposal_method=(packed >> 2) & 0x07,
        transparency_enabled=bool(packed & 0x01),
        transparent_index=tau,
        user_input=bool(packed & 0x02),
    )


def _parse_loop(ext: Extension) -> Optional[int]:
    if (ext.label == APPLICATION_LABEL and len(ext.blocks) == 2
            and ext.blocks[0] in LOOP_APPLICATIONS
            and len(ext.blocks[1]) == 3 and ext.blocks[1][0] == 1):
        return ext.blocks[1][1] | (ext.blocks[1][2] << 8)
    return None


def _take_gce(pending: list[Extension]) -> tuple[list[Extension], Optional[GraphicControl]]:
    """Split off the graphic control block that governs the upcoming image."""
    for i in range(len(pending) - 1, -1, -1):
        ext = pending[i]
        if ext.label == PLAIN_TEXT_LABEL:
            break
        if ext.label == GRAPHIC_CONTROL_LABEL:
            gce = _parse_gce(ext)
            if gce is None:
                break
            return pending[:i] + pending[i + 1:], gce
    return pending, None


def decode(data: bytes) -> GifFile:
    """Parse a complete GIF byte string into a :class:`GifFile`."""
    r = _Reader(bytes(data))
    magic = r.take(6) if len(data) >= 6 else bytes(data)
    if magic not in (b"GIF87a", b"GIF89a"):
        raise BadMagic(f"not a GIF file (header {magic[:6]!r})")
    version = magic[3:].decode("ascii")

    width, height, packed, background, aspect = struct.unpack("<HHBBB", r.take(7))
    if width == 0 or height == 0:
        raise InvariantViolation(f"logical screen {width}x{height} is empty")
    gct = None
    if packed & 0x80:
        size = 2 << (packed & 0x07)
        gct = ColorTable.from_bytes(r.take(3 * size), sorted=bool(packed & 0x08))
    screen = LogicalScreen(width, height, background, aspect, (packed >> 4) & 0x07)

    frames: list[Frame] = []
    pending: list[Extension] = []
    loop_count = None
    while True:
        intro = r.byte()
        if intro == TRAILER:
            break
        if intro == EXTENSION_INTRODUCER:
            ext = Extension(r.byte(), tuple(r.subblocks()))
            if loop_count is None and (loop := _parse_loop(ext)) is not None:
                loop_count = loop
            else:
                pending.append(ext)
        elif intro == IMAGE_SEPARATOR:
            extensions, gce = _take_gce(pending)
            frames.append(_decode_image(r, screen, gct, gce, extensions, len(frames)))
            pending = []
        else:
            raise MalformedBlock(f"unknown block introducer 0x{intro:02x} at offset {r.pos - 1}")

    return GifFile(screen=screen, gct=gct, frames=tuple(frames), loop_count=loop_count,
                   trailing_extensions=tuple(pending), version=version)


def _decode_image(r: _Reader, screen: LogicalScreen, gct: Optional[ColorTable],
                  gce: Optional[GraphicControl], extensions: list[Extension], n: int) -> Frame:
    left, top, w, h, packed = struct.unpack("<HHHHB", r.take(9))
    if w == 0 or h == 0:
        raise InvariantViolation(f"frame {n}: empty image {w}x{h}")
    if left + w > screen.width or top + h > screen.height:
        raise InvariantViolation(
            f"frame {n}: rectangle {left},{top} {w}x{h} exceeds logical screen "
            f"{screen.width}x{screen.height}")
    lct = None
    if packed & 0x80:
        size = 2 << (packed & 0x07)
        lct = ColorTable.from_bytes(r.take(3 * size), sorted=bool(packed & 0x20))
    interlaced = bool(packed & 0x40)

    min_code_size = r.byte()
    payload = b"".join(r.subblocks())
    indices = lzw_decompress(min_code_size, payload)
    if len(indices) < w * h:
        raise CorruptLzwStream(f"frame {n}: {len(indices)} pixels decoded, expected {w * h}")

    table = lct if lct is not None else gct
    if table is None:
        raise OversizedIndex(f"frame {n}: no active color table")
    pixels = np.frombuffer(indices, dtype=np.uint8, count=w * h).reshape(h, w)
    if int(pixels.max()) >= len(table):
        raise OversizedIndex(f"frame {n}: index {int(pixels.max())} >= table size {len(table)}")
    if gce is not None and gce.transparency_enabled and gce.transparent_index >= len(table):
        raise OversizedIndex(
            f"frame {n}: transparent index {gce.transparent_index} >= table size {len(table)}")
    if interlaced:
        natural = np.empty_like(pixels)
        natural[interlace_order(h)] = pixels
        pixels = natural

    return Frame(left=left, top=top, index_map=pixels, lct=lct, gce=gce,
                 interlaced=interlaced, extensions=tuple(extensions))


def _gce_bytes(gce: GraphicControl) -> bytes:
    packed = (gce.disposal_method << 2) | (gce.user_input << 1) | int(gce.transparency_enabled)
    return struct.pack("<BBBBHBB", EXTENSION_INTRODUCER, GRAPHIC_CONTROL_LABEL, 4,
                       packed, gce.delay, gce.transparent_index, 0)


def _loop_bytes(loop_count: int) -> bytes:
    ext = Extension(APPLICATION_LABEL,
                    (b"NETSCAPE2.0", bytes((1, loop_count & 0xFF, loop_count >> 8))))
    return ext.to_bytes()


def encode(gif: GifFile) -> bytes:
    """Serialize a :class:`GifFile`. Raises InvariantViolation on invalid input."""
    gif.validate()
    s = gif.screen
    out = bytearray(b"GIF" + gif.output_version.encode("ascii"))
    packed = (s.color_resolution & 0x07) << 4
    if gif.gct is not None:
        packed |= 0x80 | (0x08 if gif.gct.sorted else 0) | gif.gct.size_bits
    out += struct.pack("<HHBBB", s.width, s.height, packed, s.background_index, s.pixel_aspect)
    if gif.gct is not None:
        out += gif.gct.to_bytes()
    if gif.loop_count is not None:
        out += _loop_bytes(gif.loop_count)

    for frame in gif.frames:
        for ext in frame.extensions:
            out += ext.to_bytes()
        if frame.gce is not None:
            out += _gce_bytes(frame.gce)
        out += _encode_image(frame, gif.gct)
    for ext in gif.trailing_extensions:
        out += ext.to_bytes()
    out.append(TRAILER)
    return bytes(out)


def _encode_image(frame: Frame, gct: Optional[ColorTable]) -> bytes:
    packed = 0
    if frame.lct is not None:
        packed |= 0x80 | (0x20 if frame.lct.sorted else 0) | frame.lct.size_bits
    if frame.interlaced:
        packed |= 0x40
    out = bytearray(struct.pack("<BHHHHB", IMAGE_SEPARATOR, frame.left, frame.top,
                                frame.width, frame.height, packed))
    if frame.lct is not None:
        out += frame.lct.to_bytes()

    pixels = frame.index_map
    if frame.interlaced:
        pixels = pixels[interlace_order(frame.height)]
    table = frame.active_table(gct)
    assert table is not None  # checked by validate()
    mcs = min_code_size_for(table)
    out.append(mcs)
    out += pack_subblocks(lzw_compress(mcs, pixels.tobytes()))
    return bytes(out)
