"""Command-line interface: ``lfrefocus <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .array import ArrayConfig, process_sequence
from .bench import bench_kernels
from .core import LightfieldError, RefocusShift
from .io import read_image, write_image
from .oracle import InterpMode, PrecisionMode, refocus_2d
from .switching import gen_switch_matrix
from .synth import TEXTURES, SyntheticSpec, gen_synthetic
from .timing import TimingParams, benchmark_report


def _shift(text: str) -> RefocusShift:
    try:
        return RefocusShift.parse(text)
    except LightfieldError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _iota(text: str):
    if text == "max":
        return "max"
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--iota takes a positive integer or 'max', got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("--iota must be positive")
    return v


def _emit(report: dict, table: str, fmt: str) -> None:
    print(json.dumps(report, indent=2) if fmt == "json" else table)


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shift", type=_shift, required=True, help="refocus parameter a'/M, e.g. 2/3")
    p.add_argument("--interp", choices=[m.value for m in InterpMode], default="nn")
    p.add_argument("--precision", choices=[m.value for m in PrecisionMode], default="exact")


def _add_image_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", type=Path, help="P5/P6 lightfield")
    p.add_argument("meta", type=Path, help="JSON sidecar")
    p.add_argument("output", type=Path, help="refocused P5/P6 image")
    p.add_argument("--mask", action="store_true", help="also write the validity mask to <stem>.mask.pgm")


def _load(args):
    img = read_image(args.input, args.meta)
    if img.micro_size != args.shift.M:
        raise LightfieldError(f"--shift {args.shift} does not match sidecar M={img.micro_size}")
    return img


def _write_output(args, pixels, valid) -> None:
    # invalid pixels are always zeroed so both refocus paths write the same bytes
    if args.mask:
        write_image(pixels, args.output, mask=valid)
    else:
        write_image(np.where(valid[None], pixels, 0), args.output)


def cmd_refocus(args) -> int:
    img = _load(args)
    res = refocus_2d(img, args.shift, args.interp, args.precision)
    _write_output(args, res.pixels, res.valid)
    return 0


def cmd_simulate(args) -> int:
    img = _load(args)
    cfg = ArrayConfig(args.iota, args.shift, args.precision, args.interp,
                      mult_latency=args.mult_cycles, trailing_skew=args.trailing_skew,
                      workers=args.workers)
    results = process_sequence([img] * args.frames, cfg)
    _write_output(args, results[0].image, results[0].valid)
    if args.trace:
        _write_trace(args, img, cfg)
    r = results[0]
    report = {
        "first_frame_cycles": r.first_frame_cycles,
        "steady_state_cycles": r.steady_state_cycles,
        "iota": r.iota,
        "M": img.micro_size,
        "K": img.width,
        "L": img.height,
        "frames": len(results),
        "alignment_cycles": r.alignment_cycles,
    }
    table = "\n".join(f"{k:<20}{v}" for k, v in report.items())
    _emit(report, table, args.report)
    return 0


def _write_trace(args, img, cfg) -> None:
    """Half-cycle trace of the first row module on the first image row."""
    from .fir import run_stream

    matrix = gen_switch_matrix(cfg.shift, cfg.interp)
    with open(args.trace, "w") as fh:
        run_stream(matrix, np.asarray(img.pixels[0, 0]), prec=cfg.prec,
                   mult_latency=cfg.mult_latency, trace=fh)


def cmd_gen_switch(args) -> int:
    m = gen_switch_matrix(args.shift, args.interp)
    _emit(m.to_dict(), m.to_table(), args.report)
    return 0


def cmd_timing(args) -> int:
    p = TimingParams(args.M, args.K, args.L, args.clock_ns * 1e-9, args.mult_cycles)
    rep = benchmark_report(p)
    _emit(rep.to_dict(), rep.to_table(), args.report)
    return 0


def cmd_bench(args) -> int:
    rep = bench_kernels(args.shift, args.length, args.rows, args.repeats, args.interp, args.precision)
    lines = [f"{name:<8}{t * 1e3:10.2f} ms" for name, t in rep["seconds"].items()]
    if "speedup" in rep:
        lines.append(f"speedup {rep['speedup']:.1f}x")
    _emit(rep, "\n".join(lines), args.report)
    return 0


def cmd_synth(args) -> int:
    spec = SyntheticSpec(args.texture, args.seed, tuple(args.disparity), args.M,
                         (args.grid[0], args.grid[1]), args.channels, args.max_value)
    img = gen_synthetic(spec)
    meta = args.meta if args.meta is not None else args.output.with_suffix(".json")
    write_image(img, args.output, meta_path=meta)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lfrefocus", description="Lightfield refocusing toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("refocus", help="refocus with the reference model")
    _add_filter_flags(p)
    _add_image_args(p)
    p.set_defaults(func=cmd_refocus)

    p = sub.add_parser("simulate", help="refocus on the simulated module array")
    _add_filter_flags(p)
    _add_image_args(p)
    p.add_argument("--iota", type=_iota, default="max", help="parallel degree N or 'max'")
    p.add_argument("--frames", type=int, default=1, help="pipeline this many copies of the frame")
    p.add_argument("--lambda", dest="mult_cycles", type=int, default=1, help="multiply-stage cycles")
    p.add_argument("--trailing-skew", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trace", type=Path, help="write a JSONL half-cycle trace of one row module")
    p.add_argument("--report", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-switch", help="print the switch matrix for a shift")
    p.add_argument("--shift", type=_shift, required=True)
    p.add_argument("--interp", choices=[m.value for m in InterpMode], default="nn")
    p.add_argument("--report", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_gen_switch)

    p = sub.add_parser("timing", help="cycle-count and latency model")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--clock-ns", type=float, default=10.0)
    p.add_argument("--lambda", dest="mult_cycles", type=int, default=1)
    p.add_argument("--report", choices=["json", "table"], default="table")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("bench", help="wall-clock comparison of kernel backends")
    p.add_argument("--shift", type=_shift, default=RefocusShift(1, 11))
    p.add_argument("--interp", choices=[m.value for m in InterpMode], default="nn")
    p.add_argument("--precision", choices=[m.value for m in PrecisionMode], default="exact")
    p.add_argument("--length", type=int, default=3201)
    p.add_argument("--rows", type=int, default=8)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--report", choices=["json", "table"], default="table")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="generate a synthetic lightfield with known focal planes")
    p.add_argument("output", type=Path)
    p.add_argument("meta", type=Path, nargs="?")
    p.add_argument("--M", type=int, default=3)
    p.add_argument("--grid", type=int, nargs=2, default=[16, 16], metavar=("JX", "JY"))
    p.add_argument("--disparity", type=int, action="append", default=None,
                   help="upsampled-grid disparity of a depth plane (repeatable)")
    p.add_argument("--texture", choices=TEXTURES, default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--channels", type=int, choices=[1, 3], default=1)
    p.add_argument("--max-value", type=int, default=255)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "disparity", "unset") is None:
        args.disparity = [0]
    try:
        return args.func(args)
    except (LightfieldError, OSError) as exc:
        print(f"lfrefocus: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
