"""Command line front end.

Exit codes: 0 success, 1 usage or argument error, 2 data or I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .cells import cell_names, get_cell
from .imaging import PgmError, edge_detect, load_pgm, save_pgm
from .metrics import cell_stats, exhaustive_report, sampled_report
from .multiplier import PRESET_NAMES, preset, static_error_bound

_COMPARE_ORDER = ("exact", "ac1", "ac2", "ac3", "ac4", "ac5", "proposed")
_CSV_HEADER = "design,er,nmed,mred,mean_ed,max_ed"

_PRESET_BLURBS = {
    "exact": "full Baugh-Wooley array, no approximation",
    "proposed": "truncated array with constant compensation and sign-focused border cells",
    "ac1": "border cell that drops the carry chain",
    "ac2": "border cell tuned for low error rate",
    "ac3": "border cell with symmetric error profile",
    "ac4": "border cell biased toward overestimation",
    "ac5": "border cell biased toward underestimation",
}


def _design_help() -> str:
    return "; ".join("%s: %s" % (k, _PRESET_BLURBS[k]) for k in _COMPARE_ORDER)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apxmul",
        description="Approximate signed multiplier simulation and analysis.")
    parser.add_argument("--version", action="version", version="apxmul %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    tt = sub.add_parser("truth-table", help="print a compressor cell truth table")
    tt.add_argument("--cell", required=True, help="cell name, e.g. abcd1-approx")
    tt.add_argument("--format", choices=("text", "csv"), default="text")
    tt.set_defaults(func=_cmd_truth_table)

    cs = sub.add_parser("cell-stats", help="error probability and mean error of a cell")
    cs.add_argument("--cell", required=True)
    cs.set_defaults(func=_cmd_cell_stats)

    an = sub.add_parser("analyze", help="error metrics for one multiplier design")
    an.add_argument("--design", required=True, help=_design_help())
    an.add_argument("--width", type=int, default=8)
    an.add_argument("--sample", type=int, default=None,
                    help="sample this many operand pairs instead of sweeping all")
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--threads", type=int, default=1)
    fmt = an.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    an.set_defaults(func=_cmd_analyze)

    cp = sub.add_parser("compare", help="exhaustive metric table over every design")
    cp.add_argument("--width", type=int, default=8)
    cp.add_argument("--out", required=True, help="CSV output path")
    cp.add_argument("--threads", type=int, default=1)
    cp.set_defaults(func=_cmd_compare)

    bd = sub.add_parser("bound", help="static worst-case error bound of a design")
    bd.add_argument("--design", required=True)
    bd.add_argument("--width", type=int, default=8)
    bd.set_defaults(func=_cmd_bound)

    ed = sub.add_parser("edge-detect", help="Laplacian edge detection through a design")
    ed.add_argument("--in", dest="infile", required=True, help="input PGM (P5 or P2)")
    ed.add_argument("--design", required=True)
    ed.add_argument("--out", required=True, help="output PGM path (P5)")
    ed.add_argument("--psnr", action="store_true",
                    help="print PSNR against the exact-multiplier edge map")
    ed.add_argument("--threads", type=int, default=1)
    ed.set_defaults(func=_cmd_edge_detect)
    return parser


def _resolve_cell(name: str):
    try:
        return get_cell(name)
    except KeyError:
        raise ValueError("unknown cell %r; choices: %s" % (name, ", ".join(cell_names())))


def _resolve_preset(name: str, width: int):
    if name not in PRESET_NAMES:
        raise ValueError("unknown design %r; choices: %s" % (name, ", ".join(_COMPARE_ORDER)))
    return preset(name, width)


def _check_threads(threads: int) -> int:
    if threads < 1:
        raise ValueError("--threads must be at least 1")
    return threads


def _cmd_truth_table(args) -> int:
    cell = _resolve_cell(args.cell)
    three = len(cell.output_weights) == 3
    rows = []
    for idx in range(2 ** cell.arity):
        bits = "".join(str(b) for b in cell.input_bits(idx))
        out = cell.rows[idx]
        cout = str(out[0]) if three else ""
        rows.append((bits, cout, out[-2], out[-1],
                     cell.approx_value(idx), cell.exact_value(idx), cell.value_error(idx)))
    if args.format == "csv":
        print("inputs,cout,carry,sum,value,exact,ed")
        for r in rows:
            print("%s,%s,%d,%d,%d,%d,%d" % r)
    else:
        print("cell: %s (arity %d)" % (cell.name, cell.arity))
        print("%-*s %4s %5s %3s %5s %5s %3s"
              % (cell.arity, "in", "cout", "carry", "sum", "value", "exact", "ed"))
        for r in rows:
            print("%-*s %4s %5d %3d %5d %5d %3d" % ((cell.arity,) + r))
        if cell.note:
            print("note: %s" % cell.note)
    return 0


def _cmd_cell_stats(args) -> int:
    cell = _resolve_cell(args.cell)
    stats = cell_stats(cell)
    scale = 4 ** cell.arity
    print("cell = %s" % cell.name)
    print("p_err = %d/%d (%s)" % (stats.p_e * scale, scale, "%.6g" % float(stats.p_e)))
    print("e_mean = %d/%d (%s)" % (stats.e_mean * scale, scale, "%.6g" % float(stats.e_mean)))
    if cell.note:
        print("note: %s" % cell.note)
    return 0


def _report_for(args):
    cfg = _resolve_preset(args.design, args.width)
    threads = _check_threads(args.threads)
    if args.sample is not None:
        return cfg, sampled_report(cfg, sample_count=args.sample, seed=args.seed,
                                   threads=threads)
    return cfg, exhaustive_report(cfg, threads=threads)


def _csv_row(name: str, rep) -> str:
    return "%s,%.6f,%.6f,%.6f,%.6f,%d" % (
        name, rep.er, rep.nmed, rep.mred, rep.mean_ed, rep.max_ed)


def _cmd_analyze(args) -> int:
    cfg, rep = _report_for(args)
    if args.json:
        print(rep.to_json())
    elif args.csv:
        print(_CSV_HEADER)
        print(_csv_row(args.design, rep))
    else:
        print("design = %s  width = %d  pairs = %d" % (args.design, cfg.width, rep.pairs))
        print("er      = %.6f" % rep.er)
        print("nmed    = %.6f" % rep.nmed)
        print("mred    = %.6f" % rep.mred)
        print("mean_ed = %.6f" % rep.mean_ed)
        print("max_ed  = %d" % rep.max_ed)
        print("zero_exact_skipped = %d" % rep.zero_exact_skipped)
    return 0


def _cmd_compare(args) -> int:
    threads = _check_threads(args.threads)
    lines = [_CSV_HEADER]
    width = max(len(n) for n in _COMPARE_ORDER)
    print("%-*s %10s %10s %10s %12s %8s"
          % (width, "design", "er", "nmed", "mred", "mean_ed", "max_ed"))
    for name in _COMPARE_ORDER:
        rep = exhaustive_report(_resolve_preset(name, args.width), threads=threads)
        lines.append(_csv_row(name, rep))
        print("%-*s %10.6f %10.6f %10.6f %12.6f %8d"
              % (width, name, rep.er, rep.nmed, rep.mred, rep.mean_ed, rep.max_ed))
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    print("wrote %s" % args.out)
    return 0


def _cmd_bound(args) -> int:
    cfg = _resolve_preset(args.design, args.width)
    print("design = %s  width = %d" % (args.design, args.width))
    print("static error bound = %d" % static_error_bound(cfg))
    return 0


def _cmd_edge_detect(args) -> int:
    cfg = _resolve_preset(args.design, 8)
    threads = _check_threads(args.threads)
    with open(args.infile, "rb") as fh:
        img = load_pgm(fh.read())
    edges, score = edge_detect(img, cfg, threads=threads)
    with open(args.out, "wb") as fh:
        fh.write(save_pgm(edges))
    if args.psnr:
        print("psnr = INF" if math.isinf(score) else "psnr = %.2f" % score)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except PgmError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
