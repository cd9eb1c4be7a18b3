import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gifdec.codec import decode, encode
from gifdec.color import color_distance
from gifdec.corpus import decimation_gif
from gifdec.decimate import Action, build_remap, decimate, decimate_bytes, sweep
from gifdec.errors import NoFreeTransparentSlot
from gifdec.model import ColorTable, Frame, GifFile, GraphicControl, LogicalScreen, render

BW = ColorTable(((0, 0, 0), (255, 255, 255)))
GRID = [i / 24 * 0.25 for i in range(25)]


def opaque_masks(gif):
    return [render(f, gif.gct)[1] for f in gif.frames]


def lct_gif(lct, pixels, gct=BW, gce=None):
    pixels = np.asarray(pixels)
    h, w = pixels.shape
    return GifFile(LogicalScreen(w, h), gct,
                   (Frame(0, 0, np.zeros_like(pixels)), Frame(0, 0, pixels, lct=lct, gce=gce)))


# --- remap ----------------------------------------------------------------------

def test_remap_swapped_tables():
    assert build_remap([(0, 0, 0), (1, 1, 1)], [(1, 1, 1), (0, 0, 0)]).mapping == (1, 0)


def test_remap_transparent_slot():
    r = build_remap([(0, 0, 0), (0.2, 0.9, 0.1)], [(0, 0, 0), (1, 1, 1)], transparent=1)
    assert r.mapping == (0, 1)
    assert r.transparent_remap == (1, 1)


def test_remap_transparent_takes_smallest_free():
    g = [(0, 0, 0), (1, 1, 1), (1, 0, 0), (0, 1, 0)]
    r = build_remap([(1, 1, 1), (0, 0, 0), (0, 0, 1), (1, 0.1, 0)], g, transparent=2)
    assert r.mapping == (1, 0, 3, 2)


def test_remap_no_free_slot():
    l = [(0, 0, 0), (1, 1, 1), (0, 0, 0), (0.5, 0.5, 0.5)]
    with pytest.raises(NoFreeTransparentSlot):
        build_remap(l, [(0, 0, 0), (1, 1, 1)], transparent=3)


def test_remap_apply():
    r = build_remap([(1, 1, 1), (0, 0, 0)], [(0, 0, 0), (1, 1, 1)])
    assert r.apply(np.array([[0, 1], [1, 1]], np.uint8)).tolist() == [[1, 0], [0, 0]]


# --- decimate -------------------------------------------------------------------

def test_exact_lct_removed_at_zero():
    gif = lct_gif(ColorTable(((255, 255, 255), (0, 0, 0))), [[0, 1, 1]])
    out, outcome, report = decimate(gif, 0.0)
    assert outcome.removed_frames == {1}
    assert out.lct_count == 0
    assert out.frames[1].index_map.tolist() == [[1, 0, 0]]
    assert report.quality.mse_max == 0.0
    assert report.lcts_total == 1 and report.lcts_removed == 1


def test_far_lct_kept_below_its_dissimilarity():
    lct = ColorTable(((255, 0, 0), (0, 255, 0)))
    gif = lct_gif(lct, [[0, 1]])
    _, outcome, report = decimate(gif, 0.0)
    d = outcome.frames[1]
    assert d.action is Action.KEPT
    assert d.dissimilarity == pytest.approx(color_distance((1, 0, 0), (0, 0, 0)), abs=1e-15)
    assert report.lcts_removed == 0
    _, outcome, _ = decimate(gif, 1.0)
    assert outcome.frames[1].action is Action.REMOVED


def test_transparency_skip():
    lct = ColorTable(((0, 0, 0), (255, 255, 255), (0, 0, 0), (9, 9, 9)))
    gce = GraphicControl(transparency_enabled=True, transparent_index=3)
    gif = lct_gif(lct, [[0, 1, 2, 3]], gce=gce)
    out, outcome, report = decimate(gif, 1.0)
    assert outcome.frames[1].action is Action.SKIPPED_TRANSPARENCY
    assert out is gif
    assert report.lcts_removed == 0


def test_transparency_moves_to_free_slot():
    gct = ColorTable(((0, 0, 0), (255, 255, 255), (255, 0, 0), (0, 0, 255)))
    lct = ColorTable(((250, 250, 250), (77, 77, 77), (0, 0, 250), (3, 3, 3)))
    gce = GraphicControl(transparency_enabled=True, transparent_index=1)
    gif = lct_gif(lct, [[0, 1, 2, 3]], gct=gct, gce=gce)
    out, outcome, _ = decimate(gif, 1.0)
    assert outcome.frames[1].remap.transparent_remap == (1, 2)
    assert out.frames[1].transparent == 2
    assert out.frames[1].index_map.tolist() == [[1, 2, 3, 0]]
    assert [m.tolist() for m in opaque_masks(out)] == [m.tolist() for m in opaque_masks(gif)]


def test_no_gct_passthrough():
    lct = ColorTable(((1, 2, 3), (4, 5, 6)))
    gif = GifFile(LogicalScreen(2, 1), None, (Frame(0, 0, [[0, 1]], lct=lct),))
    data = encode(gif)
    result = decimate_bytes(data, 1.0)
    assert [d.action for d in result.outcome.frames] == [Action.SKIPPED_NO_GCT]
    assert result.data == data
    assert result.report.saving_bpp == 0.0


def test_frames_without_lct():
    gif = GifFile(LogicalScreen(1, 1), BW, (Frame(0, 0, [[1]]),))
    _, outcome, _ = decimate(gif, 0.5)
    assert outcome.frames[0].action is Action.NO_LCT
    assert outcome.lcts_before == 0


def test_threshold_range():
    gif = lct_gif(BW, [[0]])
    for bad in (-0.01, 1.01, float("nan")):
        with pytest.raises(ValueError):
            decimate(gif, bad)


def test_sweep_validation():
    gif = lct_gif(BW, [[0]])
    with pytest.raises(ValueError):
        sweep(gif, [0.2, 0.1])
    with pytest.raises(ValueError):
        sweep(gif, [0.0, 2.0])


def test_unchanged_file_keeps_its_bytes():
    rng = np.random.default_rng(3)
    syn = decimation_gif(rng, kind_weights=(0.5, 0.0, 0.0, 0.5))
    data = encode(syn.gif)
    result = decimate_bytes(data, 0.0)
    assert result.outcome.lcts_removed == 0
    assert result.data is data


# --- properties over generated animations ---------------------------------------

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.floats(0, 1))
@settings(max_examples=40, deadline=None)
def test_decimation_properties(seed, t):
    syn = decimation_gif(np.random.default_rng(seed))
    gif = syn.gif
    out, outcome, report = decimate(gif, t)

    # same frame count, geometry and transparent pixels
    assert len(out.frames) == len(gif.frames)
    for a, b, ma, mb in zip(gif.frames, out.frames, opaque_masks(gif), opaque_masks(out)):
        assert (a.left, a.top, a.index_map.shape) == (b.left, b.top, b.index_map.shape)
        assert np.array_equal(ma, mb)

    gct = gif.gct.normalized()
    for d in outcome.frames:
        frame = gif.frames[d.frame]
        if d.action is not Action.REMOVED:
            assert out.frames[d.frame] == frame
            continue
        assert d.dissimilarity <= t
        # per-frame error never exceeds the worst included entry
        mse = report.quality.per_frame_mse[d.frame]
        assert mse <= d.max_distance ** 2 * (1 + 1e-12) + 1e-18
        # each opaque entry lands on a closest GCT entry
        lct = frame.lct.normalized()
        for k, p in enumerate(d.remap.mapping):
            if k == frame.transparent:
                continue
            best = min(color_distance(lct[k], gct[q]) for q in range(len(gct)))
            assert color_distance(lct[k], gct[p]) == best

    for d in outcome.frames:
        if d.action is Action.KEPT:
            assert d.dissimilarity > t

    # a second pass at the same threshold removes nothing more
    again, outcome2, _ = decimate(out, t)
    assert outcome2.lcts_removed == 0
    assert again == out


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_exact_lcts_are_lossless(seed):
    syn = decimation_gif(np.random.default_rng(seed))
    out, outcome, report = decimate(syn.gif, 0.0)
    assert outcome.removed_frames == syn.exact_frames
    assert report.quality.mse_max == 0.0
    for a, b in zip(syn.gif.frames, out.frames):
        ra, ma = render(a, syn.gif.gct)
        rb, mb = render(b, out.gct)
        assert np.array_equal(ma, mb)
        assert np.array_equal(ra[ma], rb[mb])


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_sweep_matches_single_runs(seed):
    gif = decimation_gif(np.random.default_rng(seed)).gif
    data = encode(gif)
    rows = sweep(gif, GRID, data)
    removed = [r.lcts_removed for _, r in rows]
    assert removed == sorted(removed)
    previous = frozenset()
    for t, report in rows[::6]:
        _, outcome, single = decimate(gif, t, data)
        assert single == report
        assert previous <= outcome.removed_frames
        previous = outcome.removed_frames


def test_deterministic_output():
    syn = decimation_gif(np.random.default_rng(11))
    data = encode(syn.gif)
    a = decimate_bytes(data, 0.1).data
    b = decimate_bytes(bytes(data), 0.1).data
    assert a == b
    assert decode(a) == decimate(decode(data), 0.1)[0]
