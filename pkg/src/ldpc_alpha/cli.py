"""Command-line entry point: ``ldpc-alpha <subcommand> ...``.

Every subcommand writes CSV: one ``#`` line with the full configuration,
a header row, then data.  Exit status is 0 on success, 2 on bad arguments
and 3 when the requested blocklength cannot realize the ensemble.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys

from . import __version__, kernels
from .alpha import alpha as alpha_general
from .alpha import alpha_limit, alpha_regular, xi_exact
from .cycle import gamma_terms
from .density_evolution import evolve, threshold
from .ensemble import CHECK, EDGE, NODE, VARIABLE, DistributionError, Ensemble, parse_distribution
from .oracle import MAX_FULL_EDGES, MAX_SAMPLED_N, OracleTooLarge, exact_pb_full, exact_pb_sampled
from .simulator import InfeasibleBlocklength, degree_counts, simulate_grid
from ._numeric import context
from .tree import DEFAULT_BITS
from .tree import beta as beta_fn

PRECISION_ENV = "LDPC_ALPHA_PRECISION_BITS"
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


class UsageError(Exception):
    def __init__(self, flag, msg):
        super().__init__(f"{flag}: {msg}")


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (both ends inclusive within half a step), ``x,y,z`` or a single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
        a, b, h = (float(p) for p in parts)
        if h <= 0:
            raise argparse.ArgumentTypeError("step must be positive")
        if b < a:
            raise argparse.ArgumentTypeError("stop must be >= start")
        count = int(math.floor((b - a) / h + 0.5)) + 1
        vals = [round(a + k * h, 12) for k in range(count)]
    else:
        vals = [float(p) for p in text.split(",") if p.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("empty grid")
    for v in vals:
        if not 0 <= v <= 1:
            raise argparse.ArgumentTypeError(f"epsilon {v} outside [0, 1]")
    return vals


def parse_ints(text: str) -> list[int]:
    """``1,2,8`` or ``a:b`` (inclusive) or a single integer, all >= 0."""
    text = text.strip()
    try:
        if ":" in text:
            a, b = (int(p) for p in text.split(":"))
            vals = list(range(a, b + 1))
        else:
            vals = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not vals or min(vals) < 0:
        raise argparse.ArgumentTypeError("need one or more integers >= 0")
    return vals


def parse_regular(text: str) -> tuple[int, int]:
    try:
        l, r = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected l,r, got {text!r}") from None
    if l < 1 or r < 1:
        raise argparse.ArgumentTypeError("degrees must be >= 1")
    return l, r


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _bits(text: str) -> int:
    v = int(text)
    if v < 53:
        raise argparse.ArgumentTypeError("precision must be at least 53 bits")
    return v


def default_bits() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_BITS
    try:
        return _bits(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(PRECISION_ENV, f"invalid precision {raw!r}") from None


def _ensemble_args(p):
    g = p.add_argument_group("ensemble")
    g.add_argument("--regular", type=parse_regular, metavar="L,R", help="(l, r)-regular ensemble")
    g.add_argument("--lambda", dest="lam", metavar="POLY", help='variable side, e.g. "0.5*x^1+0.5*x^2"')
    g.add_argument("--rho", metavar="POLY", help="check side polynomial")
    persp = g.add_mutually_exclusive_group()
    persp.add_argument("--edge", dest="perspective", action="store_const", const=EDGE, help="polynomials are edge perspective (default)")
    persp.add_argument("--node", dest="perspective", action="store_const", const=NODE, help="polynomials are node perspective")
    p.set_defaults(perspective=EDGE)


def _eps_args(p):
    p.add_argument("--eps", type=parse_grid, help="epsilon value or grid")
    p.add_argument("--eps-grid", type=parse_grid, metavar="A:B:STEP", help="epsilon grid, ends inclusive")


def _out_arg(p):
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldpc-alpha", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("de", help="density evolution trajectory or BP threshold")
    _ensemble_args(p)
    _eps_args(p)
    p.add_argument("--t", type=int, default=10, help="horizon (default 10)")
    p.add_argument("--threshold", action="store_true", help="print the BP threshold")
    p.add_argument("--tol", type=float, default=1e-8, help="threshold bisection width")
    _out_arg(p)

    for name, text in (("beta", "cycle-free contribution"), ("gamma", "single-cycle contribution")):
        p = sub.add_parser(name, help=text)
        _ensemble_args(p)
        _eps_args(p)
        p.add_argument("--t", type=parse_ints, required=True, help="iterations: 3, 1,2,8 or 1:8")
        p.add_argument("--precision-bits", type=_bits, help=f"working precision (default {DEFAULT_BITS}, env {PRECISION_ENV})")
        if name == "gamma":
            p.add_argument("--breakdown", action="store_true", help="one row per cycle-shape term")
        _out_arg(p)

    p = sub.add_parser("alpha", help="1/n coefficient alpha(eps, t)")
    _ensemble_args(p)
    _eps_args(p)
    p.add_argument("--t", type=parse_ints, required=True)
    p.add_argument("--precision-bits", type=_bits)
    p.add_argument("--path", choices=("auto", "general", "regular"), default="auto",
                   help="regular: cancellation-free recursion (regular ensembles); auto picks it when possible")
    p.add_argument("--no-escalate", action="store_true", help="keep the starting precision")
    p.add_argument("--limit", action="store_true", help="add the t -> infinity limit (regular ensembles)")
    _out_arg(p)

    p = sub.add_parser("xi", help="1/n coefficient of the single-cycle neighborhood probability")
    _ensemble_args(p)
    p.add_argument("--t", type=parse_ints, required=True)
    _out_arg(p)

    p = sub.add_parser("simulate", help="Monte Carlo P_b(n, eps, t)")
    _ensemble_args(p)
    _eps_args(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--t", type=parse_ints, required=True)
    p.add_argument("--trials", type=_positive_int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--no-alpha-ref", action="store_true", help="leave the alpha_ref column empty")
    _out_arg(p)

    p = sub.add_parser("oracle", help="exact P_b for tiny blocklengths")
    _ensemble_args(p)
    _eps_args(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--mode", choices=("full", "sampled"), default="full")
    p.add_argument("--graphs", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _out_arg(p)
    return ap


def make_ensemble(args) -> Ensemble:
    if args.regular is not None:
        if args.lam or args.rho:
            raise UsageError("--regular", "cannot be combined with --lambda/--rho")
        return Ensemble.regular(*args.regular)
    if not args.lam or not args.rho:
        raise UsageError("--lambda/--rho", "give both polynomials or use --regular")
    try:
        lam = parse_distribution(args.lam, args.perspective, VARIABLE)
    except DistributionError as exc:
        raise UsageError("--lambda", str(exc)) from None
    try:
        rho = parse_distribution(args.rho, args.perspective, CHECK)
    except DistributionError as exc:
        raise UsageError("--rho", str(exc)) from None
    try:
        if args.perspective == NODE:
            return Ensemble.from_node(lam, rho)
        return Ensemble(lam, rho)
    except DistributionError as exc:
        raise UsageError("--lambda/--rho", str(exc)) from None


def _eps_list(args, required=True):
    vals = []
    for v in (args.eps, args.eps_grid):
        if v:
            vals.extend(v)
    if required and not vals:
        raise UsageError("--eps/--eps-grid", "at least one epsilon is required")
    return vals


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, int):
        return str(x)
    ctx = getattr(x, "context", None)
    if ctx is not None:
        return ctx.nstr(x, 20)
    return str(x)


def _config_line(args, e) -> str:
    skip = {"output"}
    items = [f"{k}={getattr(args, k)!r}" for k in sorted(vars(args)) if k not in skip]
    return f"# ldpc-alpha {__version__} backend={kernels.BACKEND} ensemble={e} " + " ".join(items)


def _run_de(args, e, w):
    if args.threshold:
        w.writerow(["threshold", "tol"])
        w.writerow([fmt(threshold(e, tol=args.tol)), fmt(args.tol)])
    eps = _eps_list(args, required=not args.threshold)
    if eps:
        if args.t < 0:
            raise UsageError("--t", "must be >= 0")
        w.writerow(["eps", "t", "P", "Q", "Pb"])
        for x in eps:
            tr = evolve(e, x, args.t)
            for t, P, Q, Pb in tr.as_rows():
                w.writerow([fmt(x), t, fmt(P), fmt(Q), fmt(Pb)])


def _run_beta(args, e, w):
    ctx = context(args.precision_bits)
    w.writerow(["eps", "t", "beta"])
    for x in _eps_list(args):
        for t in args.t:
            w.writerow([fmt(x), t, fmt(beta_fn(e, x, t, ctx))])


def _run_gamma(args, e, w):
    ctx = context(args.precision_bits)
    if args.breakdown:
        w.writerow(["eps", "t", "kind", "s1", "s2", "term"])
    else:
        w.writerow(["eps", "t", "gamma"])
    for x in _eps_list(args):
        for t in args.t:
            terms = gamma_terms(e, x, t, ctx)
            if args.breakdown:
                for kind, s1, s2, v in terms:
                    w.writerow([fmt(x), t, kind, s1, s2, fmt(v)])
            else:
                total = ctx.num(0)
                for *_, v in terms:
                    total = total + v
                w.writerow([fmt(x), t, fmt(total)])


def _alpha_path(args, e) -> str:
    regular = e.regular_degrees
    ok = bool(regular) and min(regular) >= 2
    path = args.path
    if path == "auto":
        path = "regular" if ok else "general"
    if path == "regular" and not ok:
        raise UsageError("--path", "the regular path needs an (l, r)-regular ensemble with l, r >= 2")
    if args.limit and not ok:
        raise UsageError("--limit", "the limit is only available for (l, r)-regular ensembles with l, r >= 2")
    return path


def _run_alpha(args, e, w):
    regular = e.regular_degrees
    path = _alpha_path(args, e)
    bits = args.precision_bits
    header = ["eps", "t", "beta", "gamma", "alpha", "cancellation_digits"]
    if args.limit:
        header.append("alpha_limit")
    w.writerow(header)
    for x in _eps_list(args):
        lim = alpha_limit(*regular, x) if args.limit else None
        for t in args.t:
            if path == "regular":
                row = [fmt(x), t, "", "", fmt(alpha_regular(*regular, x, t)), ""]
            else:
                b = alpha_general(e, x, t, precision_bits=bits, escalate=not args.no_escalate)
                cd = "inf" if math.isinf(b.cancellation_digits) else fmt(b.cancellation_digits)
                row = [fmt(x), t, fmt(b.beta), fmt(b.gamma), fmt(b.alpha), cd]
            if args.limit:
                row.append(fmt(lim))
            w.writerow(row)


def _run_xi(args, e, w):
    w.writerow(["t", "xi", "xi_exact"])
    for t in args.t:
        x = xi_exact(e, t)
        w.writerow([t, fmt(float(x)), str(x)])


def _alpha_ref(e, x, t):
    reg = e.regular_degrees
    if reg and min(reg) >= 2:
        return alpha_regular(*reg, x, t)
    return float(alpha_general(e, x, t).alpha)


def _run_simulate(args, e, w):
    eps = _eps_list(args)
    res = simulate_grid(e, args.n, eps, args.t, args.trials, args.seed, args.threads)
    if res[0].repair:
        print(f"ldpc-alpha simulate: note: degree counts repaired for n={args.n}: {res[0].repair}", file=sys.stderr)
    w.writerow(["n", "eps", "t", "trials", "pb_hat", "ci", "scaled", "alpha_ref"])
    for r in res:
        ref = None if args.no_alpha_ref else _alpha_ref(e, r.epsilon, r.t)
        w.writerow([r.n, fmt(r.epsilon), r.t, r.trials, fmt(r.pb_hat), fmt(r.ci_halfwidth), fmt(r.scaled), fmt(ref)])


def _run_oracle(args, e, w):
    if args.t < 0:
        raise UsageError("--t", "must be >= 0")
    if args.mode == "full":
        res = exact_pb_full(e, args.n, args.t)
    else:
        res = exact_pb_sampled(e, args.n, args.t, args.graphs, args.seed)
    w.writerow(["section", "x", "value", "ci"])
    for k, c in enumerate(res.pb_poly):
        w.writerow(["coef", k, str(c), ""])
    for x in _eps_list(args, required=False):
        w.writerow(["eval", fmt(x), fmt(float(res.pb_at(x))), fmt(res.ci_halfwidth(x))])


RUNNERS = {
    "de": _run_de,
    "beta": _run_beta,
    "gamma": _run_gamma,
    "alpha": _run_alpha,
    "xi": _run_xi,
    "simulate": _run_simulate,
    "oracle": _run_oracle,
}


def run(args, stream=None) -> int:
    """Dispatch parsed arguments; returns the exit status."""
    stream = stream or sys.stdout
    try:
        e = make_ensemble(args)
        if hasattr(args, "precision_bits") and args.precision_bits is None:
            args.precision_bits = default_bits()
        if args.command in ("simulate", "oracle"):
            counts = degree_counts(e, args.n)
            if args.command == "oracle" and args.mode == "full" and counts.E > MAX_FULL_EDGES:
                raise OracleTooLarge(f"E = {counts.E} edges exceeds {MAX_FULL_EDGES} for full enumeration")
            if args.command == "oracle" and args.mode == "sampled" and args.n > MAX_SAMPLED_N:
                raise OracleTooLarge(f"n = {args.n} exceeds {MAX_SAMPLED_N} for erasure enumeration")
        _validate(args, e)
        if args.output:
            with open(args.output, "w", newline="") as fh:
                return _emit(args, e, fh)
        return _emit(args, e, stream)
    except UsageError as exc:
        print(f"ldpc-alpha {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleBlocklength, OracleTooLarge) as exc:
        print(f"ldpc-alpha {args.command}: --n: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


def _validate(args, e):
    """Reject bad combinations before anything is written."""
    if args.command in ("beta", "gamma", "alpha", "simulate"):
        _eps_list(args)
    if args.command == "de":
        _eps_list(args, required=not args.threshold)
        if args.t < 0:
            raise UsageError("--t", "must be >= 0")
    if args.command == "oracle" and args.t < 0:
        raise UsageError("--t", "must be >= 0")
    if args.command == "alpha":
        _alpha_path(args, e)


def _emit(args, e, fh) -> int:
    fh.write(_config_line(args, e) + "\n")
    w = csv.writer(fh, lineterminator="\n")
    RUNNERS[args.command](args, e, w)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
