"""Variable code width LZW as used for GIF image data.

Codes are packed least-significant-bit first. The code width starts at
``min_code_size + 1`` and grows up to 12 bits. Index sequences are
represented as ``bytes`` (one index per byte).
"""

from __future__ import annotations

from typing import Iterable

from .errors import CorruptLzwStream, IndexOutOfRange

MAX_CODE_WIDTH = 12
MAX_CODES = 1 << MAX_CODE_WIDTH
SUB_BLOCK_SIZE = 255


def _check_min_code_size(min_code_size: int, exc: type[Exception]) -> None:
    if not 2 <= min_code_size <= 8:
        raise exc(f"LZW minimum code size must be in 2..8, got {min_code_size}")


def lzw_decompress(min_code_size: int, data: bytes) -> bytes:
    """Decode a raw GIF LZW code stream (sub-block framing already removed).

    Decoding stops at the end-of-information code; anything after it is
    ignored. When the dictionary is full and no clear code follows, decoding
    continues with 12-bit codes and no new entries (deferred clear).
    """
    _check_min_code_size(min_code_size, CorruptLzwStream)
    clear = 1 << min_code_size
    eoi = clear + 1
    base = eoi + 1
    table: list[bytes] = [bytes((i,)) for i in range(clear)] + [b"", b""]

    out = bytearray()
    width = min_code_size + 1
    mask = (1 << width) - 1
    next_code = base
    prev: bytes | None = None
    buf = nbits = pos = 0
    size = len(data)

    while True:
        while nbits < width:
            if pos >= size:
                raise CorruptLzwStream("data exhausted before end-of-information code")
            buf |= data[pos] << nbits
            pos += 1
            nbits += 8
        code = buf & mask
        buf >>= width
        nbits -= width

        if code == clear:
            del table[base:]
            next_code = base
            width = min_code_size + 1
            mask = (1 << width) - 1
            prev = None
            continue
        if code == eoi:
            return bytes(out)

        if prev is None:
            if code >= clear:
                raise CorruptLzwStream(f"code {code} not in dictionary after reset")
            entry = table[code]
            out += entry
            prev = entry
            continue

        if code < next_code:
            entry = table[code]
            new = prev + entry[:1]
        elif code == next_code:
            entry = new = prev + prev[:1]
        else:
            raise CorruptLzwStream(f"code {code} beyond dictionary size {next_code}")
        out += entry

        if next_code < MAX_CODES:
            table.append(new)
            next_code += 1
            if next_code == 1 << width and width < MAX_CODE_WIDTH:
                width += 1
                mask = (1 << width) - 1
        prev = entry


def lzw_compress(min_code_size: int, indices: bytes | Iterable[int]) -> bytes:
    """Encode an index sequence as a raw GIF LZW code stream.

    Greedy longest match. The stream opens with a clear code, ends with the
    end-of-information code, and the dictionary is reset (clear code) as soon
    as it fills up.
    """
    _check_min_code_size(min_code_size, ValueError)
    clear = 1 << min_code_size
    eoi = clear + 1
    base = eoi + 1

    if not isinstance(indices, (bytes, bytearray, memoryview)):
        indices = list(indices)
        if indices and (min(indices) < 0 or max(indices) > 255):
            raise IndexOutOfRange(f"index outside 0..{clear - 1}")
        indices = bytes(indices)
    data = bytes(indices)
    if data and max(data) >= clear:
        raise IndexOutOfRange(f"index {max(data)} does not fit min code size {min_code_size}")

    out = bytearray()
    buf = nbits = 0
    width = min_code_size + 1

    def emit(code: int) -> None:
        nonlocal buf, nbits
        buf |= code << nbits
        nbits += width
        while nbits >= 8:
            out.append(buf & 0xFF)
            buf >>= 8
            nbits -= 8

    emit(clear)
    if data:
        table: dict[int, int] = {}
        next_code = base
        prefix = data[0]
        for k in data[1:]:
            key = (prefix << 8) | k
            code = table.get(key)
            if code is not None:
                prefix = code
                continue
            emit(prefix)
            table[key] = next_code
            if next_code == 1 << width and width < MAX_CODE_WIDTH:
                width += 1
            next_code += 1
            if next_code == MAX_CODES:
                emit(clear)
                table.clear()
                next_code = base
                width = min_code_size + 1
            prefix = k
        emit(prefix)
        # the decoder adds one more entry on reading the final code
        if next_code == 1 << width and width < MAX_CODE_WIDTH:
            width += 1
    emit(eoi)
    if nbits:
        out.append(buf & 0xFF)
    return bytes(out)


def pack_subblocks(data: bytes) -> bytes:
    """Frame ``data`` as GIF sub-blocks (each at most 255 bytes) plus terminator."""
    out = bytearray()
    for start in range(0, len(data), SUB_BLOCK_SIZE):
        chunk = data[start:start + SUB_BLOCK_SIZE]
        out.append(len(chunk))
        out += chunk
    out.append(0)
    return bytes(out)
