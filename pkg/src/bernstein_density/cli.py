"""Command-line interface: CSV in, JSON/CSV out.

Exit codes: 0 success, 2 I/O error, 3 parse error, 4 numerical or
infeasible-model error.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .degree import DegreeGrid
from .estimator import BernsteinDensity
from .exceptions import DomainError
from .model import BernsteinModel
from .simulate import PRESETS, get_preset, run_study, write_pointwise_csv
from .transform import SupportMap

SCHEMA_VERSION = 1

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_NUMERIC = 0, 2, 3, 4


class ParseError(Exception):
    pass


def _fmt_float(x):
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [dumps(v, indent, _level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad + i for i in items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


def read_values(path):
    """Read one number per line; blank lines and ``#`` comments are skipped."""
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    values = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            v = float(line)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: not a number: {line!r}") from None
        if not math.isfinite(v):
            raise ParseError(f"{path}:{lineno}: non-finite value {line!r}")
        values.append(v)
    if not values:
        raise ParseError(f"{path}: no data values")
    return np.array(values)


def _support_arg(text):
    if text in ("auto", "data_range"):
        return "data_range"
    if text == "unbounded":
        return "unbounded"
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected 'a,b', 'auto' or 'unbounded', got {text!r}") from None
    return (a, b)


def _degree_arg(text):
    if text == "auto":
        return "auto"
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None
    if m < 0:
        raise argparse.ArgumentTypeError("degree must be non-negative")
    return m


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _estimator(args, degree):
    if (args.m0 is None) != (args.k is None):
        raise DomainError("--m0 and --k must be given together")
    if args.k is not None:
        DegreeGrid(args.m0, args.k)  # validate early
    return BernsteinDensity(
        degree=degree, support=args.support, m0=args.m0, k=args.k,
        init=args.init, tol=args.tol, max_iter=args.max_iter,
        f0=args.f0, f1=args.f1, symmetric=args.symmetric,
    )


def cmd_fit(args):
    x = read_values(args.input)
    if args.degree == "auto" and x.size < 2:
        raise DomainError("automatic degree selection needs at least 2 observations")
    est = _estimator(args, args.degree).fit(x)
    sel = est.selection_
    degree = {
        "mode": "auto" if sel is not None else "fixed",
        "m_hat": est.degree_,
        "grid": None if sel is None else sel.grid.degrees.tolist(),
        "profile_loglik": None if sel is None else sel.profile,
        "R": None if sel is None else sel.R,
        "tau_hat": None if sel is None else sel.tau_hat,
        "m_b": None if sel is None else sel.m_b,
    }
    doc = {
        "version": SCHEMA_VERSION,
        "n": int(x.size),
        "support": {"a": est.support_.a, "b": est.support_.b},
        "degree": degree,
        "weights": est.weights_,
        "loglik": est.loglik_,
        "n_iter": est.n_iter_,
        "converged": est.converged_,
        "mean_estimate": est.mean(),
    }
    _emit(dumps(doc) + "\n", args.out)


def cmd_select_degree(args):
    x = read_values(args.input)
    if x.size < 2:
        raise DomainError("degree selection needs at least 2 observations")
    est = _estimator(args, "auto").fit(x)
    sel = est.selection_
    if sel.flat:
        raise DomainError("profile log-likelihood is flat; no change point to detect")
    doc = {
        "version": SCHEMA_VERSION,
        "grid": sel.grid.degrees.tolist(),
        "profile": sel.profile,
        "increments": sel.increments,
        "R": sel.R,
        "tau_hat": sel.tau_hat,
        "m_hat": sel.m_hat,
        "m_b": sel.m_b,
    }
    _emit(dumps(doc) + "\n", args.out)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
        support = SupportMap(float(doc["support"]["a"]), float(doc["support"]["b"]))
        model = BernsteinModel(np.asarray(doc["weights"], dtype=float), support)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"{path}: malformed model JSON ({exc})") from None
    return model


def cmd_eval(args):
    model = load_model(args.model)
    lo = model.support.a if args.lo is None else args.lo
    hi = model.support.b if args.hi is None else args.hi
    if args.points < 2:
        raise DomainError("--points must be at least 2")
    x = np.linspace(lo, hi, args.points)
    f, F = model.pdf(x), model.cdf(x)
    rows = ["x,pdf,cdf"]
    rows += [f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(x, f, F)]
    _emit("\n".join(rows) + "\n", args.out)


def _table(rep):
    head = ("dist", "n", "E(m)", "Var(m)", "MISE_P", "MISE_B", "MISE_K",
            "MSE_muP", "MSE_muB", "MSE_xbar")
    vals = (rep.distribution, rep.n, rep.mean_mhat, rep.var_mhat, rep.mise_fP, rep.mise_fB,
            rep.mise_fK, rep.mse_muP, rep.mse_muB, rep.mse_xbar)
    cells = [f"{v:.4f}" if isinstance(v, float) else str(v) for v in vals]
    widths = [max(len(h), len(c)) for h, c in zip(head, cells)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths)),
             "  ".join(c.rjust(w) for c, w in zip(cells, widths))]
    if rep.n_failed:
        lines.append(f"failed runs: {rep.n_failed}")
    return "\n".join(lines) + "\n"


def cmd_simulate(args):
    dist = get_preset(args.preset)
    rep = run_study(dist, args.n, args.runs, seed=args.seed, grid_points=args.grid_points)
    doc = {"version": SCHEMA_VERSION, **rep.to_dict()}
    text = dumps(doc) + "\n"
    if args.out:
        _emit(text, args.out)
        sys.stdout.write(_table(rep))
    else:
        sys.stdout.write(text)
        sys.stderr.write(_table(rep))
    if args.pointwise_csv:
        write_pointwise_csv(rep, args.pointwise_csv)
    if args.strict and rep.n_failed:
        raise DomainError(f"{rep.n_failed} run(s) failed")


def cmd_presets(args):
    for name, d in PRESETS.items():
        sys.stdout.write(f"{name}\t{d.kind}{d.params}\t[{d.lo:.6g}, {d.hi:.6g}]\n")


def _add_fit_options(p):
    p.add_argument("input", help="CSV file with one value per line ('-' for stdin)")
    p.add_argument("--support", type=_support_arg, default="data_range",
                   help="'a,b' for a known support, 'auto' (sample range) or 'unbounded'")
    p.add_argument("--m0", type=int, help="first degree of the selection grid")
    p.add_argument("--k", type=int, help="number of degree increments in the grid")
    p.add_argument("--f0", type=float, help="known density value at the lower endpoint")
    p.add_argument("--f1", type=float, help="known density value at the upper endpoint")
    p.add_argument("--symmetric", action="store_true", help="constrain to a symmetric density")
    p.add_argument("--init", choices=("uniform", "binomial", "empirical"), default="uniform")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bernstein-density",
        description="Bernstein polynomial density estimation by maximum likelihood.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a Bernstein density and print the model as JSON")
    _add_fit_options(p)
    p.add_argument("--degree", type=_degree_arg, default="auto",
                   help="fixed degree or 'auto' for change-point selection")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select-degree", help="print degree-selection diagnostics as JSON")
    _add_fit_options(p)
    p.set_defaults(func=cmd_select_degree)

    p = sub.add_parser("eval", help="evaluate a fitted model JSON on a grid (CSV out)")
    p.add_argument("model", help="model JSON written by 'fit'")
    p.add_argument("--from", dest="lo", type=float)
    p.add_argument("--to", dest="hi", type=float)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="run the Monte Carlo study for one preset")
    p.add_argument("--preset", required=True, help="see the 'presets' command")
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-points", type=int, default=200)
    p.add_argument("--strict", action="store_true", help="exit 4 if any run fails")
    p.add_argument("--pointwise-csv", help="also write pointwise MSE curves here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("presets", help="list the simulation presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
