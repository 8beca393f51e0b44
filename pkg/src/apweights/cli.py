"""Command-line interface: ``apweights <command> [flags]``.

Reports go to standard output as JSON (default) or CSV.  Verification
commands exit with 0 when every non-vacuous check passes, 1 otherwise; bad
flags or inputs exit with 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .functionals import (
    ConstantReport,
    GridSpec,
    HolderReport,
    ap_constant,
    cw_poincare_constant,
    doubling_constant,
    holder_chain_bound,
    poincare_constant_within,
)
from .parsing import format_weight, parse_weight
from .primitives import Interval, PiecewiseLinearFn
from .verify import (
    ChainReport,
    SweepReport,
    counterexample_suite,
    verify_cor43,
    verify_duality,
    verify_even_reflection,
    verify_lattice_bounds,
    verify_reflection_bound,
    verify_thm45,
    window_sweep,
)
from .weights import MeasureModel, Weight, conjugate, lattice, reflect_periodic

__all__ = ["main", "run", "emit_csv", "to_json"]

SIG = 12
_VALUE_FLAGS = ("--window", "--centers")


# -- output --------------------------------------------------------------------------------


def _round(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIG}g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def to_json(report) -> str:
    data = report.to_dict() if hasattr(report, "to_dict") else report
    return json.dumps(_round(data), indent=2, ensure_ascii=False)


_HEADERS = {
    ConstantReport: ["level", "n_points", "value"],
    ChainReport: ["name", "bound", "measured", "pass", "margin", "vacuous"],
    SweepReport: ["center", "ap_constant", "doubling_constant"],
    HolderReport: ["a", "b", "lhs", "grad_integral", "rhs", "margin", "vacuous"],
}


def _csv_cell(v) -> str:
    v = _round(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG}g}"
    return str(v)


def emit_csv(report) -> str:
    """Flat CSV: one row per level, check, center or interval, with a fixed header per report type."""
    header = rows = None
    for cls, cols in _HEADERS.items():
        if isinstance(report, cls):
            header = cols
            rows = report.rows() if cls is not HolderReport else report.rows
            break
    if header is None:
        data = report if isinstance(report, dict) else report.to_dict()
        header = list(data)
        rows = [data]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row.get(k)) for k in header])
    return buf.getvalue()


# -- flag parsing ---------------------------------------------------------------------------


def _window(text: str) -> Interval:
    try:
        a, b = (float(t) for t in text.split(","))
        return Interval(a, b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'a,b' with a < b, got {text!r}") from None


def _centers(text: str) -> list[float]:
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"centers must be 'a:b:step', got {text!r}") from None
    if not step > 0 or b < a:
        raise argparse.ArgumentTypeError("centers need step > 0 and a <= b")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + k * step, 12) for k in range(n)]


def _weight(text: str) -> Weight:
    try:
        return parse_weight(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weight {text!r}: {exc}") from None


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    return n


def _nonneg_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("refine must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_positive_int, default=257, help="grid points per window (default 257)")
    common.add_argument("--refine", type=_nonneg_int, default=3, help="grid refinement levels (default 3)")
    common.add_argument("--tolerance", type=float, default=1e-3, help="relative convergence tolerance (default 1e-3)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")

    parser = argparse.ArgumentParser(
        prog="apweights",
        description="A_p, doubling and Poincaré constants of weights on the line, and checks of the bounds between them.",
        epilog="Weights look like 'x^0.5 on (0,1); 1 on (1,2)'.  Negative windows may be written --window=-1,1.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def cmd(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    def weight(sp, required=True):
        sp.add_argument("--weight", type=_weight, required=required, help="weight specification")

    def window(sp, required=True):
        sp.add_argument("--window", type=_window, required=required, help="window as a,b")

    def p(sp, required=True, default=None):
        sp.add_argument("--p", type=float, required=required, default=default, help="exponent p >= 1")

    sp = cmd("ap", "A_p constant over all grid subintervals of a window")
    weight(sp), p(sp), window(sp)

    sp = cmd("doubling", "doubling constant within a window")
    weight(sp), window(sp)

    sp = cmd("poincare", "Poincaré constant of a window (p = 1) or its bound over subintervals (p > 1)")
    weight(sp), window(sp), p(sp, required=False, default=1.0)

    sp = cmd("reflect", "periodic even reflection of the weight on (0, M)")
    weight(sp)
    sp.add_argument("--M", type=float, required=True, help="reflection half-period M > 0")

    sp = cmd("lattice", "sum, max and min of two weights; with --p and --window, check their A_p bounds")
    weight(sp)
    sp.add_argument("--weight2", type=_weight, required=True, help="second weight specification")
    p(sp, required=False), window(sp, required=False)

    sp = cmd("conjugate", "w^(1/(1-p)); with --window, check the duality of A_p constants")
    weight(sp), p(sp), window(sp, required=False)

    sp = cmd("verify-chain", "check A_p => admissible within half the window, and Poincaré => A_p within window/theta")
    weight(sp), p(sp), window(sp)
    sp.add_argument("--theta", type=float, default=2.0, help="dilation theta > 1 (default 2)")

    sp = cmd("reflect-verify", "check the A_p bounds of the periodic reflection (or, with --even, the admissibility)")
    weight(sp), p(sp)
    sp.add_argument("--M", type=float, required=True, help="reflection half-period M > 0")
    sp.add_argument("--span", type=float, default=5.0, help="check the reflection on (-span, span) (default 5)")
    sp.add_argument("--even", action="store_true", help="check the even reflection of a measure admissible within (-M, 2M)")

    sp = cmd("counterexample", "x^alpha on (0,1): admissible, but A_p only when p > 1 + alpha")
    sp.add_argument("--alpha", type=float, required=True, help="exponent alpha >= 0")
    p(sp)

    sp = cmd("sweep", "A_p and doubling constants over windows of fixed radius")
    weight(sp), p(sp)
    sp.add_argument("--centers", type=_centers, required=True, help="window centers as a:b:step")
    sp.add_argument("--radius", type=float, default=1.0, help="window radius (default 1)")
    sp.add_argument("--cap", type=float, default=None, help="largest constant still called uniform")

    sp = cmd("holder", "Hölder chain for u(x) = x on the cells of the level-0 grid")
    weight(sp), p(sp), window(sp)
    return parser


def _grid(args, **kw) -> GridSpec:
    return GridSpec(args.grid, args.refine, tolerance=args.tolerance, **kw)


def _need(args, parser, *names):
    for n in names:
        if getattr(args, n) is None:
            parser.error(f"{args.command} needs --{n}")


# -- dispatch --------------------------------------------------------------------------------


def _dispatch(args, parser):
    """Return (report, exit status)."""
    c = args.command
    if c == "counterexample":
        r = counterexample_suite(args.alpha, args.p, _grid(args))
        return r, 0 if r.overall else 1
    w = args.weight
    if c == "ap":
        return ap_constant(w, args.p, args.window, _grid(args)), 0
    if c == "doubling":
        return doubling_constant(w, args.window, _grid(args)), 0
    if c == "poincare":
        if args.p == 1:
            return cw_poincare_constant(MeasureModel(w), args.window, _grid(args)), 0
        return poincare_constant_within(MeasureModel(w), args.p, args.window, _grid(args)), 0
    if c == "reflect":
        hat = reflect_periodic(w, args.M)
        return {"weight": format_weight(hat), "period": hat.period}, 0
    if c == "lattice":
        if args.p is None and args.window is None:
            return {op: format_weight(lattice(op, w, args.weight2)) for op in ("sum", "max", "min")}, 0
        _need(args, parser, "p", "window")
        r = verify_lattice_bounds(w, args.weight2, args.p, args.window, _grid(args))
        return r, 0 if r.overall else 1
    if c == "conjugate":
        if args.window is None:
            return {"weight": format_weight(conjugate(w, args.p)), "p_conjugate": args.p / (args.p - 1.0)}, 0
        r = verify_duality(w, args.p, args.window, _grid(args))
        return r, 0 if r.overall else 1
    if c == "verify-chain":
        g = _grid(args)
        r = verify_cor43(w, args.p, args.window, g).merged(verify_thm45(w, args.p, args.window, args.theta, g))
        return r, 0 if r.overall else 1
    if c == "reflect-verify":
        if args.even:
            r = verify_even_reflection(MeasureModel(w), args.p, args.M, _grid(args))
        else:
            r = verify_reflection_bound(w, args.p, args.M, _grid(args), span=args.span)
        return r, 0 if r.overall else 1
    if c == "sweep":
        return window_sweep(w, args.p, args.radius, args.centers, _grid(args), cap=args.cap), 0
    if c == "holder":
        xs = np.linspace(args.window.a, args.window.b, args.grid)
        cells = [Interval(a, b) for a, b in zip(xs[:-1], xs[1:])]
        r = holder_chain_bound(PiecewiseLinearFn.linear(args.window.a, args.window.b, 1.0, 0.0), w, args.p, cells)
        return r, 0 if r.ok else 1
    raise AssertionError(c)


def _join_negative_values(argv: list[str]) -> list[str]:
    """Let '--window -1,1' through: argparse would read '-1,1' as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2].isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: list[str], stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(list(argv)))
        if getattr(args, "p", None) is not None and not args.p >= 1:
            parser.error("p must be ≥ 1")
        try:
            report, status = _dispatch(args, parser)
        except ValueError as exc:
            parser.error(str(exc))
    except SystemExit as exc:
        return int(exc.code or 0)
    text = emit_csv(report) if args.format == "csv" else to_json(report) + "\n"
    stdout.write(text)
    return status


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
