"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 invariant violation,
3 grid budget exceeded.  ``$STBQP_THREADS`` sets the default worker count
(advisory; ``--threads`` wins).
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .examples import EXAMPLE_IDS, example
from .ptas_engine import (
    DEFAULT_BUDGET,
    DEFAULT_TOLERANCE,
    BudgetExceeded,
    bounds,
    certify_shift,
    multi_bounds,
)
from .reports import bounds_to_dict, make_report, membership_to_dict, plot_rows, write_plot_data, write_report
from .table1 import LABELS, format_table, run_table1
from .tensor_core import BiQuadTensor, TensorError
from .tensorfile import TensorFileError, dump_tensor, load_tensor

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return vals


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stbqp", description="Certified grid bounds for standard bi-quadratic programs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, output_required=False):
        sp.add_argument("--output", required=output_required, help="report path (JSON)")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max grid points per scan")
        sp.add_argument("--threads", type=int, default=None, help="scan workers (default $STBQP_THREADS or 1)")

    sp = sub.add_parser("solve", help="upper/lower bounds at one (s, r)")
    sp.add_argument("--input", required=True)
    sp.add_argument("--s", type=_nonneg)
    sp.add_argument("--r", type=_nonneg)
    sp.add_argument("--r-list", type=_int_list, help="per-mode resolutions for multiquad files")
    sp.add_argument("--mode", choices=("upper", "lower", "both"), default="both")
    common(sp)

    sp = sub.add_parser("sweep", help="bounds over every (s, r) in two lists")
    sp.add_argument("--input", required=True)
    sp.add_argument("--s-list", type=_int_list, required=True)
    sp.add_argument("--r-list", type=_int_list, required=True)
    sp.add_argument("--mode", choices=("upper", "lower", "both"), default="upper")
    sp.add_argument("--plot-data", help="CSV of upper-bound argmins per (s, r)")
    sp.add_argument("--id", default="", help="example id column for the plot data")
    common(sp)

    sp = sub.add_parser("membership", help="is A - lambda E in the (s, r) polyhedral cone?")
    sp.add_argument("--input", required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--s", type=_nonneg, required=True)
    sp.add_argument("--r", type=_nonneg, required=True)
    sp.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    common(sp)

    sp = sub.add_parser("example", help="write a built-in benchmark tensor")
    sp.add_argument("--id", type=int, required=True, choices=EXAMPLE_IDS)
    sp.add_argument("--output", required=True)
    sp.add_argument("--flat", action="store_true", help="write entries even when Kronecker terms exist")

    sp = sub.add_parser("table1", help="reproduce the benchmark table")
    sp.add_argument("--mode", choices=("upper", "both"), default="upper")
    sp.add_argument("--plot-data", help="CSV of upper-bound argmins, one file per example with _<id> suffix")
    common(sp)
    return p


def _load_biquad(path: str) -> BiQuadTensor:
    doc = load_tensor(path)
    if doc.kind != "biquad":
        raise UsageError("this command needs a biquad tensor file")
    return doc.tensor


def _emit(args, command: str, result: dict, tensor, started: float) -> None:
    if args.output:
        write_report(make_report(command, result, tensor, time.perf_counter() - started), args.output)


def _fmt(v) -> str:
    return "-" if v is None else format(v, ".10g")


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    doc = load_tensor(args.input)
    if doc.kind == "biquad":
        if args.s is None or args.r is None:
            raise UsageError("solve needs --s and --r for a biquad tensor")
        rep = bounds(doc.tensor, args.s, args.r, args.mode, workers=args.threads, budget=args.budget)
    else:
        if args.r_list is None:
            raise UsageError("solve needs --r-list r_1,...,r_d for a multiquad tensor")
        rep = multi_bounds(doc.tensor, args.r_list, args.mode, budget=args.budget)
    print(f"resolutions {list(rep.resolutions)}: p_upper {_fmt(rep.p_upper)}  p_lower {_fmt(rep.p_lower)}")
    print(f"certified gaps: upper {_fmt(rep.certified_upper_gap)}  lower {_fmt(rep.certified_lower_gap)}")
    _emit(args, "solve", bounds_to_dict(rep), doc.tensor, t0)
    return EXIT_OK


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    A = _load_biquad(args.input)
    rows, plot = [], []
    for s in args.s_list:
        for r in args.r_list:
            if s < 0 or r < 0:
                raise UsageError(f"resolutions must be nonnegative, got ({s}, {r})")
            rep = bounds(A, s, r, args.mode, workers=args.threads, budget=args.budget)
            rows.append(bounds_to_dict(rep))
            if rep.p_upper is not None:
                plot.append(plot_rows(args.id, rep))
            print(f"({s},{r}) p_upper {_fmt(rep.p_upper)}  p_lower {_fmt(rep.p_lower)}")
    if args.plot_data:
        if not plot:
            raise UsageError("--plot-data needs mode upper or both")
        write_plot_data(args.plot_data, A.n, A.m, plot)
    _emit(args, "sweep", {"rows": rows}, A, t0)
    return EXIT_OK


def cmd_membership(args) -> int:
    t0 = time.perf_counter()
    A = _load_biquad(args.input)
    res = certify_shift(A, args.lam, args.s, args.r, args.tolerance, workers=args.threads, budget=args.budget)
    if res.member:
        print("member")
    else:
        xi, zeta = res.witness
        print(f"not member: xi={list(xi)} zeta={list(zeta)} value={_fmt(res.witness_value)}")
    _emit(args, "membership", membership_to_dict(res, args.lam, args.s, args.r, args.tolerance), A, t0)
    return EXIT_OK


def cmd_example(args) -> int:
    ex = example(args.id)
    terms = None
    if ex.kron_terms is not None and not args.flat:
        terms = [(t.coefficient, t.factors) for t in ex.kron_terms]
    dump_tensor(ex.tensor, args.output, label=f"example {ex.id}", kron_terms=terms)
    print(f"wrote example {ex.id} with dims {list(ex.dims)} to {args.output}")
    return EXIT_OK


def cmd_table1(args) -> int:
    t0 = time.perf_counter()
    cells = run_table1(mode=args.mode, workers=args.threads, budget=args.budget)
    print(format_table(cells))
    n_pass = sum(c.passed for c in cells)
    print(f"{n_pass}/{len(cells)} cells within tolerance")
    result = {
        "labels": [list(label) for label in LABELS],
        "cells": [
            {"example_id": c.example_id, "label": list(c.label), "reference": c.reference,
             "rounded": c.rounded, "passed": c.passed, "tolerance": c.tolerance,
             "bounds": bounds_to_dict(c.report)}
            for c in cells
        ],
        "passed": n_pass == len(cells),
    }
    if args.plot_data:
        for ex_id in sorted({c.example_id for c in cells}):
            mine = [c for c in cells if c.example_id == ex_id]
            A = example(ex_id).tensor
            stem = args.plot_data[:-4] if args.plot_data.endswith(".csv") else args.plot_data
            write_plot_data(f"{stem}_{ex_id}.csv", A.n, A.m, [plot_rows(ex_id, c.report) for c in mine])
    _emit(args, "table1", result, None, t0)
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "membership": cmd_membership,
    "example": cmd_example,
    "table1": cmd_table1,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (TensorFileError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TensorError as exc:
        print(f"invariant violated ({exc.invariant}): {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
