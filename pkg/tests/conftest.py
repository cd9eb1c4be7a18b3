import io
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from gifdec.codec import decode
from gifdec.corpus import codec_gif, decimation_gif
from gifdec.errors import GifError

DATA = Path(__file__).parent / "data"
REAL_DIR = DATA / "real"

# Files from the real-world corpus that are deliberately malformed
# (decoder fuzz fixtures); each must be rejected with a GifError.
MALFORMED = {
    "pillow_decompression_bomb.gif",          # frame far outside the logical screen
    "pillow_decompression_bomb_extents.gif",  # frame offset 65535,65535
    "pillow_issue_2811.gif",                  # LZW minimum code size 11
    "pillow_no_palette.gif",                  # no global or local table
    "pillow_no_palette_after_rgb.gif",        # second frame without any table
    "pillow_test_extents.gif",                # frame extends past the screen
    "pillow_test_extents_transparency.gif",   # garbage block introducer
    "pillow_zero_width.gif",                  # 0x32 logical screen
    "tqdm_tqdm.gif",                          # image data without end code
}

ACCEPTANCE_LINES: list[str] = []


def real_paths():
    return sorted(REAL_DIR.glob("*.gif"))


def pillow_frames(data: bytes) -> int:
    """Decode every frame with Pillow; returns the frame count."""
    with Image.open(io.BytesIO(data)) as im:
        n = getattr(im, "n_frames", 1)
        for i in range(n):
            im.seek(i)
            im.load()
    return n


@pytest.fixture(scope="session")
def real_corpus():
    """(name, bytes, GifFile) for every real file that decodes."""
    out = []
    for path in real_paths():
        data = path.read_bytes()
        try:
            out.append((path.name, data, decode(data)))
        except GifError:
            assert path.name in MALFORMED, path.name
    return out


@pytest.fixture(scope="session")
def synthetic_corpus():
    rng = np.random.default_rng(20240611)
    return [decimation_gif(rng) for _ in range(40)]


@pytest.fixture(scope="session")
def codec_corpus():
    rng = np.random.default_rng(987)
    return [codec_gif(rng) for _ in range(120)]


@pytest.fixture
def criterion():
    def record(name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
