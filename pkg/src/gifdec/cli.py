"""Command line front end.

    gifdec optimize IN -t 0.02 -o OUT
    gifdec sweep FILE_OR_DIR... --thresholds 0:0.25:25 --csv rd.csv
    gifdec batch IN_DIR -o OUT_DIR -t 0.05 -j 4
    gifdec compare A B
    gifdec inspect FILE
    gifdec gen-corpus OUT_DIR --count 30 --seed 7

Exit codes: 0 success, 1 runtime or input failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .codec import decode
from .color import table_dissimilarity
from .corpus import write_corpus
from .decimate import CSV_FIELDS, decimate_bytes, sweep
from .errors import GifError
from .quality import bitrate, sequence_mse

log = logging.getLogger("gifdec")

DEFAULT_GRID = "0:0.25:25"


# --- argument types ----------------------------------------------------------

def threshold(text: str) -> float:
    try:
        t = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= t <= 1.0 or math.isnan(t):
        raise argparse.ArgumentTypeError(f"threshold must be in [0, 1], got {text}")
    return t


def threshold_list(text: str) -> list[float]:
    """``"0,0.05,0.1"`` or ``"start:stop:count"`` (inclusive linspace)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad linspace {text!r}")
        if count < 1:
            raise argparse.ArgumentTypeError("linspace count must be >= 1")
        values = [float(v) for v in np.linspace(start, stop, count)]
    else:
        values = [float(v) for v in text.split(",") if v.strip()]
    values = sorted(threshold(repr(v)) for v in values)
    if not values:
        raise argparse.ArgumentTypeError("empty threshold list")
    return values


def jobs_default() -> int:
    try:
        return max(1, int(os.environ.get("GIFDEC_JOBS", "1")))
    except ValueError:
        return 1


# --- helpers -----------------------------------------------------------------

def _fmt_db(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.2f}"


def _gif_files(paths: Iterable[Path]) -> list[Path]:
    found = []
    for p in paths:
        if p.is_dir():
            found.extend(sorted(q for q in p.rglob("*") if q.is_file() and q.suffix.lower() == ".gif"))
        else:
            found.append(p)
    return found


def _run_parallel(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*items)))


def _write_json(obj: dict, path: Optional[str]) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


# --- optimize ----------------------------------------------------------------

def cmd_optimize(args: argparse.Namespace) -> int:
    src = Path(args.input)
    try:
        result = decimate_bytes(src.read_bytes(), args.threshold)
    except (OSError, GifError) as exc:
        log.error("%s: %s", src, exc)
        return 1
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(result.data)

    r = result.report
    line = (f"{src} -> {out}: {r.before.bytes} -> {r.after.bytes} bytes, "
            f"saving {r.saving_bpp:.4f} bpp, LCTs removed {r.lcts_removed}/{r.lcts_total}, "
            f"PSNR avg {_fmt_db(r.quality.psnr_avg)} dB, "
            f"PSNR max-err {_fmt_db(r.quality.psnr_max_err)} dB")
    if r.lcts_removed == 0:
        line += " (no-op: nothing removable at this threshold)"
    print(line)
    if args.json:
        _write_json(r.to_dict(), args.json)
    return 0


# --- sweep -------------------------------------------------------------------

def _sweep_file(path: str, thresholds: list[float]) -> tuple[str, list[dict], Optional[str]]:
    try:
        data = Path(path).read_bytes()
        gif = decode(data)
        rows = [report.to_row(path) for _, report in sweep(gif, thresholds, data)]
        return path, rows, None
    except (OSError, GifError, ValueError) as exc:
        return path, [], str(exc)


def cmd_sweep(args: argparse.Namespace) -> int:
    files = _gif_files(Path(p) for p in args.inputs)
    if not files:
        log.error("no files")
        return 1
    results = _run_parallel(_sweep_file, [(str(f), args.thresholds) for f in files], args.jobs)
    rows = []
    for path, file_rows, err in results:
        if err is not None:
            log.warning("skipping %s: %s", path, err)
        rows.extend(file_rows)
    if not rows:
        log.error("no file could be processed")
        return 1
    rows.sort(key=lambda r: (r["file"], r["threshold"]))

    handle = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.csv:
            handle.close()
    return 0


# --- batch -------------------------------------------------------------------

def _optimize_file(src: str, dst: str, t: float) -> dict:
    try:
        result = decimate_bytes(Path(src).read_bytes(), t)
    except (OSError, GifError) as exc:
        return {"file": src, "error": str(exc)}
    Path(dst).parent.mkdir(parents=True, exist_ok=True)
    Path(dst).write_bytes(result.data)
    row = result.report.to_row(src)
    row["output"] = dst
    return row


def cmd_batch(args: argparse.Namespace) -> int:
    root = Path(args.input)
    if not root.is_dir():
        log.error("%s is not a directory", root)
        return 1
    out_root = Path(args.output)
    if out_root.resolve() == root.resolve():
        log.error("output directory must differ from the input directory")
        return 2
    files = [f for f in _gif_files([root]) if out_root.resolve() not in f.resolve().parents]
    if not files:
        log.error("no files")
        return 1

    items = [(str(f), str(out_root / f.relative_to(root)), args.threshold) for f in files]
    results = _run_parallel(_optimize_file, items, args.jobs)
    done = [r for r in results if "error" not in r]
    for r in results:
        if "error" in r:
            log.warning("failed %s: %s", r["file"], r["error"])
    if not done:
        log.error("no file could be processed")
        return 1

    saved = sum(r["bytes_orig"] - r["bytes_opt"] for r in done)
    mean_saving = sum(r["saving_bpp"] for r in done) / len(done)
    removed = sum(r["lcts_removed"] for r in done)
    total = sum(r["lcts_total"] for r in done)
    print(f"{len(done)} files optimized, {len(results) - len(done)} failed; "
          f"LCTs removed {removed}/{total}; total bytes saved {saved}; "
          f"mean saving {mean_saving:.4f} bpp")
    if args.json:
        _write_json({"files": done, "total_bytes_saved": saved,
                     "mean_saving_bpp": mean_saving}, args.json)
    return 0


# --- compare -----------------------------------------------------------------

def cmd_compare(args: argparse.Namespace) -> int:
    try:
        data_a = Path(args.a).read_bytes()
        data_b = Path(args.b).read_bytes()
        gif_a, gif_b = decode(data_a), decode(data_b)
        quality = sequence_mse(gif_a, gif_b)
        rate_a = bitrate(len(data_a), gif_a)
        rate_b = bitrate(len(data_b), gif_b, rate_a)
    except (OSError, GifError, ValueError) as exc:
        log.error("compare failed: %s", exc)
        return 1
    _write_json({"quality": quality.to_dict(), "a": rate_a.to_dict(), "b": rate_b.to_dict()},
                args.json)
    return 0


# --- inspect -----------------------------------------------------------------

def inspect_summary(path: Path) -> dict:
    gif = decode(path.read_bytes())
    frames = []
    for i, f in enumerate(gif.frames):
        entry = {
            "frame": i,
            "rect": [f.left, f.top, f.width, f.height],
            "table": "local" if f.lct is not None else "global",
            "table_size": len(f.lct) if f.lct is not None else len(gif.gct),
            "interlaced": f.interlaced,
            "transparent_index": f.transparent,
            "dissimilarity": None,
        }
        if f.lct is not None and gif.gct is not None:
            entry["dissimilarity"] = table_dissimilarity(f.lct, gif.gct, f.transparent).dissimilarity
        frames.append(entry)
    return {
        "file": str(path),
        "version": gif.version,
        "width": gif.width,
        "height": gif.height,
        "gct_size": len(gif.gct) if gif.gct is not None else 0,
        "frames": len(gif.frames),
        "lcts": gif.lct_count,
        "loop_count": gif.loop_count,
        "per_frame": frames,
    }


def cmd_inspect(args: argparse.Namespace) -> int:
    try:
        info = inspect_summary(Path(args.path))
    except (OSError, GifError) as exc:
        log.error("%s: %s", args.path, exc)
        return 1
    if args.json:
        _write_json(info, None)
        return 0
    print(f"file: {info['file']}")
    print(f"version: GIF{info['version']}")
    print(f"size: {info['width']}x{info['height']}")
    print(f"GCT: {info['gct_size'] or 'none'}")
    print(f"#frames: {info['frames']}")
    print(f"#LCTs: {info['lcts']}")
    print(f"{'frame':>5}  {'table':<6} {'size':>4}  D")
    for f in info["per_frame"]:
        d = "-" if f["dissimilarity"] is None else f"{f['dissimilarity']:.6f}"
        print(f"{f['frame']:>5}  {f['table']:<6} {f['table_size']:>4}  {d}")
    return 0


# --- gen-corpus --------------------------------------------------------------

def cmd_gen_corpus(args: argparse.Namespace) -> int:
    paths = write_corpus(Path(args.output), args.count, args.seed, args.kind)
    print(f"wrote {len(paths)} files to {args.output}")
    return 0


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gifdec",
        description="Shrink animated GIFs by replacing local color tables with the global one.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimize one file at a fixed threshold")
    p.add_argument("input")
    p.add_argument("-t", "--threshold", type=threshold, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="rate/distortion CSV over a threshold grid")
    p.add_argument("inputs", nargs="+", help="GIF files or directories")
    p.add_argument("--thresholds", type=threshold_list, default=threshold_list(DEFAULT_GRID),
                   help=f"comma list or start:stop:count (default {DEFAULT_GRID})")
    p.add_argument("--csv", metavar="PATH", help="output CSV (default stdout)")
    p.add_argument("-j", "--jobs", type=int, default=jobs_default())
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("batch", help="optimize a directory tree into a mirror tree")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-t", "--threshold", type=threshold, required=True)
    p.add_argument("-j", "--jobs", type=int, default=jobs_default())
    p.add_argument("--json", metavar="PATH", help="per-file reports as JSON")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("compare", help="MSE/PSNR and bit rates of two GIFs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--json", metavar="PATH", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("inspect", help="frame and color table structure")
    p.add_argument("path")
    p.add_argument("--json", action="store_true", help="print JSON")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("gen-corpus", help="write synthetic test GIFs")
    p.add_argument("output")
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=("decimation", "codec"), default="decimation")
    p.set_defaults(func=cmd_gen_corpus)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
