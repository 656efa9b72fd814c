"""Command-line front end: ``docbin {binarize,evaluate,synth}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import SOLVER_KEYS, SYNTH_KEYS, RunConfig, build_run_config
from .errors import DocbinError
from .image import load_binary, load_gray, save_binary, save_gray
from .metrics import REPORT_FIELDS, evaluate
from .solver import MODELS, binarize, evolve
from .synth import (
    BlobBackground,
    ConstantBackground,
    DegradationSpec,
    RampBackground,
    glyph_bar_chart,
    render,
)

CSV_COLUMNS = ("file",) + REPORT_FIELDS + ("iterations", "seconds")
IMAGE_SUFFIXES = {".pgm", ".png", ".bmp", ".tif", ".tiff", ".jpg", ".jpeg"}
PAIR_SUFFIX = re.compile(r"([._-]?(est)?gt|[._-]gray)$", re.IGNORECASE)


# ---------------------------------------------------------------------------
# binarize
# ---------------------------------------------------------------------------


def _rescale(field: np.ndarray) -> tuple[np.ndarray, float, float]:
    lo, hi = float(field.min()), float(field.max())
    if hi - lo <= 0:
        return np.zeros_like(field), lo, hi
    return (field - lo) / (hi - lo), lo, hi


class TraceWriter:
    """Writes b and u snapshots rescaled to [0, 1]; the scale goes to a sidecar file."""

    def __init__(self, out_dir: Path, name: str):
        self.out_dir = out_dir
        self.name = name
        self.sidecar = out_dir / f"{name}.trace.txt"
        self.sidecar.write_text("# iteration field min max\n")

    def __call__(self, n: int, b: np.ndarray, u: np.ndarray) -> None:
        lines = []
        for label, field in (("b", b), ("u", u)):
            scaled, lo, hi = _rescale(field)
            save_gray(self.out_dir / f"{self.name}.{label}.{n}.pgm", scaled)
            lines.append(f"{n} {label} {lo:.17g} {hi:.17g}\n")
        with self.sidecar.open("a") as fh:
            fh.writelines(lines)


def binarize_one(path: Path, cfg: RunConfig) -> dict:
    """Evolve one page and write ``<name>.bin.pgm``; returns a summary dict."""
    s = load_gray(path)
    name = path.stem
    tracer = TraceWriter(cfg.out, name) if cfg.trace > 0 else None
    t0 = time.perf_counter()
    result = evolve(s, cfg.params, trace=tracer, trace_every=cfg.trace)
    seconds = time.perf_counter() - t0
    out = binarize(result.u)
    target = cfg.out / f"{name}.bin.pgm"
    save_binary(target, out)
    # re-read to confirm the file holds a valid binary image
    if load_binary(target) != out:
        raise DocbinError(f"{target}: written image failed verification")
    return {"file": str(path), "output": str(target), "iterations": result.iterations,
            "seconds": seconds, "binary": out}


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        for item in items:
            yield _safe(fn, item)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_safe, fn, item) for item in items]
        for fut in futures:
            yield fut.result()


def _safe(fn, item):
    try:
        return fn(item), None
    except (OSError, DocbinError) as exc:
        return None, f"{item[0] if isinstance(item, tuple) else item}: {exc}"


def _binarize_task(args):
    path, cfg = args
    res = binarize_one(path, cfg)
    res.pop("binary")
    return res


def cmd_binarize(cfg: RunConfig) -> int:
    missing = [p for p in cfg.inputs if not p.is_file()]
    for p in missing:
        print(f"error: input not found: {p}", file=sys.stderr)
    if missing:
        return 2
    cfg.out.mkdir(parents=True, exist_ok=True)
    status = 0
    for res, err in _map(_binarize_task, [(p, cfg) for p in cfg.inputs], cfg.jobs):
        if err:
            print(f"error: {err}", file=sys.stderr)
            status = 1
            continue
        print(f"{res['file']} -> {res['output']}  iterations={res['iterations']}  "
              f"seconds={res['seconds']:.2f}")
    return status


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


def _list_images(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [path]


def _gt_key(path: Path) -> str:
    return PAIR_SUFFIX.sub("", path.stem).lower()


def pair_inputs(inputs: list[Path], gts: list[Path]) -> list[tuple[Path, Path]]:
    """Pair inputs with ground truths positionally, or by file stem when directories are given."""
    if any(p.is_dir() for p in inputs + gts):
        imgs = [f for p in inputs for f in _list_images(p)]
        by_key = {_gt_key(g): g for p in gts for g in _list_images(p)}
        pairs = []
        for img in imgs:
            key = _gt_key(img)
            if key not in by_key:
                raise DocbinError(f"no ground truth found for {img}")
            pairs.append((img, by_key[key]))
        return pairs
    if len(inputs) != len(gts):
        raise DocbinError(f"{len(inputs)} inputs but {len(gts)} ground-truth files")
    return list(zip(inputs, gts))


def _evaluate_task(args):
    (img, gt_path), cfg, already_binary = args
    gt = load_binary(gt_path)
    if already_binary:
        out = load_binary(img)
        iterations, seconds = None, None
    else:
        res = binarize_one(img, cfg)
        out, iterations, seconds = res["binary"], res["iterations"], res["seconds"]
    rep = evaluate(out, gt)
    row = {"file": str(img), **rep.as_dict(), "iterations": iterations, "seconds": seconds}
    return row


def average_row(rows: list[dict]) -> dict:
    avg = {"file": "average"}
    for key in REPORT_FIELDS + ("iterations", "seconds"):
        vals = [r[key] for r in rows if r.get(key) is not None]
        avg[key] = float(np.mean(vals)) if vals else None
    return avg


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def format_report(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def cmd_evaluate(cfg: RunConfig, already_binary: bool = False, report: Path | None = None,
                 timing: bool = False) -> int:
    try:
        pairs = pair_inputs(cfg.inputs, cfg.gt)
    except (OSError, DocbinError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    missing = [p for pair in pairs for p in pair if not p.is_file()]
    for p in missing:
        print(f"error: input not found: {p}", file=sys.stderr)
    if missing:
        return 2
    if not already_binary:
        cfg.out.mkdir(parents=True, exist_ok=True)
    rows, good, status = [], [], 0
    tasks = [(pair, cfg, already_binary) for pair in pairs]
    for (pair, _, _), (row, err) in zip(tasks, _map(_evaluate_task, tasks, cfg.jobs)):
        if err:
            print(f"error: {err}", file=sys.stderr)
            rows.append({"file": str(pair[0]), "error": err})
            status = 1
            continue
        if not timing:
            row["seconds"] = None
        rows.append(row)
        good.append(row)
    if good:
        rows.append(average_row(good))
    text = format_report(rows, cfg.report_format)
    if report is None:
        sys.stdout.write(text)
    else:
        report.parent.mkdir(parents=True, exist_ok=True)
        report.write_text(text)
    return status


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def degradation_from_config(values: dict) -> DegradationSpec:
    base = glyph_bar_chart(values["width"], values["height"], values["stroke_width"], values["count"])
    kind = values["background"]
    if kind == "constant":
        bg = ConstantBackground(values["bg_level"])
    elif kind == "ramp":
        bg = RampBackground(values["ramp_low"], values["ramp_high"], values["ramp_direction"])
    elif kind == "blob":
        bg = BlobBackground(values["bg_level"], (values["blob_row"], values["blob_col"]),
                            values["blob_radius"], values["blob_depth"])
    else:
        raise DocbinError(f"background must be constant, ramp or blob, got {kind!r}")
    return DegradationSpec(base, bg, values["text_level"], values["noise_sigma"], values["seed"])


def cmd_synth(cfg: RunConfig, name: str = "synth") -> int:
    try:
        s, gt = render(degradation_from_config(cfg.synth))
    except DocbinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_gray(cfg.out / f"{name}.gray.pgm", s)
    save_binary(cfg.out / f"{name}.gt.pgm", gt)
    print(f"wrote {cfg.out / (name + '.gray.pgm')} and {cfg.out / (name + '.gt.pgm')}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--trace", type=int, help="dump b/u snapshots every N iterations (0 = off)")
    common.add_argument("--jobs", type=int, help="number of worker processes")
    solver = common.add_argument_group("solver parameters")
    for key, kind in SOLVER_KEYS.items():
        if key == "model":
            solver.add_argument("--model", choices=MODELS)
        else:
            solver.add_argument(f"--{key}", type=kind, metavar=kind.__name__.upper())
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="docbin", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("binarize", parents=[common], help="binarize grayscale pages")
    b.add_argument("inputs", nargs="+", type=Path)

    e = sub.add_parser("evaluate", parents=[common], help="score binarizations against ground truth")
    e.add_argument("inputs", nargs="+", type=Path, help="pages (or directories of pages)")
    e.add_argument("--gt", nargs="+", type=Path, required=True, help="ground truth files or directories")
    e.add_argument("--binarized", action="store_true",
                   help="inputs are already binarized; skip the solver")
    e.add_argument("--format", choices=("csv", "json"))
    e.add_argument("--report", type=Path, help="write the report here instead of stdout")
    e.add_argument("--timing", action="store_true",
                   help="fill the seconds column with wall time (the report is then no longer byte-stable)")

    sy = sub.add_parser("synth", parents=[common], help="render a synthetic degraded page")
    sy.add_argument("--name", default="synth")
    for key, kind in SYNTH_KEYS.items():
        if key == "background":
            sy.add_argument("--background", choices=("constant", "ramp", "blob"))
        elif key == "ramp_direction":
            sy.add_argument("--ramp-direction", dest="ramp_direction", choices=("x", "y"))
        else:
            sy.add_argument(f"--{key.replace('_', '-')}", dest=key, type=kind)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: getattr(args, k, None) for k in list(SOLVER_KEYS) + list(SYNTH_KEYS)
             + ["trace", "out", "jobs", "format"]}
    gt = getattr(args, "gt", None) or []
    inputs = getattr(args, "inputs", None) or []
    try:
        cfg = build_run_config(args.config, flags, inputs=inputs, gt=gt)
    except DocbinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "binarize":
            return cmd_binarize(cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, already_binary=args.binarized, report=args.report,
                                timing=args.timing)
        return cmd_synth(cfg, name=args.name)
    except (OSError, DocbinError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
