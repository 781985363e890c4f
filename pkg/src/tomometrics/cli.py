"""Command-line driver: ``tomometrics <command> [options]``.

Exit codes: 0 success or pass, 1 usage error, 2 violation found,
3 inconclusive, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import acceptance
from . import geometry as geo
from . import monotonicity as mono
from .errors import SolverError, TomometricsError
from .petz import parse_function_spec
from .qubit import BlochVector, density_from_bloch
from .scheme_ode import exp_scheme_seed, regular_seed, solve_ode, verify_solution
from .tomography import (
    apply_scheme,
    exponential_scheme,
    flip_scheme,
    identity_scheme,
    rotated_quorum,
    standard_quorum,
    tomograms,
)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_INCONCLUSIVE, EXIT_NUMERIC = 0, 1, 2, 3, 4
VERDICT_EXIT = {mono.PASS: EXIT_OK, mono.VIOLATION: EXIT_VIOLATION,
                mono.INCONCLUSIVE: EXIT_INCONCLUSIVE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    functions: dict = field(default_factory=dict)
    grid: int = 199
    seed: int = 0
    tolerance: float | None = None
    output: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.grid < 2:
            raise UsageError("grid size must be at least 2")
        if self.tolerance is not None and self.tolerance <= 0:
            raise UsageError("tolerance must be positive")


def _default_seed():
    raw = os.environ.get("QIG_SEED")
    if raw is None:
        return acceptance.DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QIG_SEED must be an integer, got {raw!r}") from None


def _floats(text, n=None, what="value"):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers")
    return vals


def _function(spec):
    try:
        return parse_function_spec(spec)
    except (TomometricsError, ValueError) as exc:
        raise UsageError(f"bad function spec {spec!r}: {exc}") from None


def _scheme(spec):
    name, _, rest = spec.partition(":")
    if name in ("exp", "exponential"):
        (beta,) = _floats(rest, 1, "scheme parameter")
        try:
            return exponential_scheme(beta)
        except TomometricsError as exc:
            raise UsageError(str(exc)) from None
    if name == "identity" and not rest:
        return identity_scheme()
    if name == "flip" and not rest:
        return flip_scheme()
    raise UsageError(f"unknown scheme {spec!r} (use exp:<beta>, identity or flip)")


def _emit(text, path, out):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(f"{float(x):.17g}" for x in row) + "\n")
    return buf.getvalue()


# -- commands ------------------------------------------------------------------------


def cmd_tomogram(args, out):
    y = _floats(args.bloch, 3, "--bloch")
    try:
        rho = density_from_bloch(BlochVector(*y).as_array())
    except TomometricsError as exc:
        raise UsageError(str(exc)) from None
    # the rotated quorum follows the input state, so a scheme that flips w shows up in the outcomes
    quorum = standard_quorum() if args.quorum == "standard" else rotated_quorum(rho.theta, rho.phi)
    if args.scheme:
        rho = apply_scheme(_scheme(args.scheme), rho)
    _emit(tomograms(rho, quorum).to_json(indent=2) + "\n", args.output, out)
    return EXIT_OK


def _metric_for(spec):
    name, _, rest = spec.partition(":")
    if name == "tsallis":
        (q,) = _floats(rest, 1, "q")
        try:
            return geo.tsallis_metric(q)
        except TomometricsError as exc:
            raise UsageError(str(exc)) from None
    if name in ("vn", "von-neumann") and not rest:
        return geo.von_neumann_metric()
    if name.startswith("petz-"):
        return geo.petz_metric(_function(spec[len("petz-"):]))
    return geo.petz_metric(_function(spec))


def cmd_metric(args, out):
    cfg = RunConfig("metric", {"f": args.f}, grid=args.grid)
    g = _metric_for(args.f)
    w = np.linspace(-0.99, 0.99, cfg.grid)
    header, cols = ["w", "g_w", "g_perp"], [w, g.g_w(w), g.g_perp(w)]
    if args.pullback:
        conformal, h = geo.factorize_pullback(g, _scheme(args.pullback))
        header += ["conformal_factor", "h"]
        cols += [conformal(w), h((1 - w) / (1 + w))]
    _emit(_csv(header, zip(*cols)), args.output, out)
    return EXIT_OK


def cmd_monotone(args, out):
    f = _function(args.f)
    seed = _default_seed() if args.seed is None else args.seed
    RunConfig("monotone", {"f": args.f}, seed=seed, tolerance=args.tol, output=args.output, fmt="json")
    test = args.test
    if test == "loewner":
        region = tuple(_floats(args.region, 4, "--region")) if args.region else acceptance.LOEWNER_WIDE
        grid = (400, 200)
        if args.resolution:
            grid = tuple(int(x) for x in _floats(args.resolution, 2, "--resolution"))
            if min(grid) < 1:
                raise UsageError("--resolution must be positive")
        kwargs = {} if args.tol is None else {"tol": args.tol}
        report = mono.loewner_scan(f, region, grid, **kwargs)
    elif test == "matrix":
        kwargs = {} if args.tol is None else {"tol": args.tol}
        report = mono.matrix_monotonicity_test(f, args.dim, args.samples or 1000, seed, **kwargs)
    else:
        kwargs = {} if args.tol is None else {"tol": args.tol}
        report = mono.metric_monotonicity_test(f, args.samples or 10_000, seed, **kwargs)
    _emit(report.to_json(indent=2) + "\n", args.output, out)
    return VERDICT_EXIT[report.verdict]


def _initial_value(args, f, h):
    if args.wt0 != "auto":
        return _floats(args.wt0, 1, "--wt0")[0]
    if f.id == "von-neumann" and h.id == "exp-scheme":
        return exp_scheme_seed(h.params["beta"], args.w0)
    return regular_seed(args.w0, args.branch)


def cmd_scheme_ode(args, out):
    f, h = _function(args.f), _function(args.h)
    if args.branch not in (1, -1):
        raise UsageError("--branch must be +1 or -1")
    wt0 = _initial_value(args, f, h)
    span = tuple(_floats(args.span, 2, "--span")) if args.span else None
    try:
        sol = solve_ode(f, h, args.w0, wt0, args.branch, span, n_grid=args.grid)
    except SolverError as exc:
        if exc.partial is not None:
            _emit(exc.partial.to_csv(), args.output, out)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TomometricsError as exc:
        raise UsageError(str(exc)) from None
    record = verify_solution(sol, f, h)
    _emit(sol.to_csv(), args.output, out)
    text = json.dumps(record.to_dict(), indent=2) + "\n"
    if args.verification:
        _emit(text, args.verification, out)
    else:
        sys.stderr.write(text)
    return EXIT_OK if record.ok else EXIT_NUMERIC


def cmd_verify_all(args, out):
    seed = _default_seed() if args.seed is None else args.seed
    only = [x for item in (args.only or []) for x in item.split(",") if x]
    try:
        results = acceptance.run_all(seed, only, echo=lambda line: print(line, file=out))
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed (seed {seed})", file=out)
    return EXIT_OK if n_pass == len(results) else EXIT_VIOLATION


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tomometrics", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tomogram", help="tomograms of a qubit state as JSON")
    t.add_argument("--bloch", required=True, help="y1,y2,y3")
    t.add_argument("--scheme", help="exp:<beta>, identity or flip")
    t.add_argument("--quorum", choices=("rotated", "standard"), default="rotated")
    t.add_argument("-o", "--output")
    t.set_defaults(run=cmd_tomogram)

    m = sub.add_parser("metric", help="metric coefficients as CSV")
    m.add_argument("--f", required=True, help="vn, tsallis:q, petz-<spec> or a Petz function spec")
    m.add_argument("--grid", type=int, default=199)
    m.add_argument("--pullback", help="scheme to pull back along, e.g. exp:2")
    m.add_argument("-o", "--output")
    m.set_defaults(run=cmd_metric)

    mo = sub.add_parser("monotone", help="operator or metric monotonicity test")
    mo.add_argument("--f", required=True)
    mo.add_argument("--test", choices=("loewner", "matrix", "cptp"), required=True)
    mo.add_argument("--region", help="re_min,re_max,im_min,im_max (loewner)")
    mo.add_argument("--resolution", help="nx,ny (loewner)")
    mo.add_argument("--dim", type=int, choices=(2, 3), default=2)
    mo.add_argument("--samples", type=int)
    mo.add_argument("--seed", type=int)
    mo.add_argument("--tol", type=float)
    mo.add_argument("-o", "--output")
    mo.set_defaults(run=cmd_monotone)

    s = sub.add_parser("scheme-ode", help="solve the scheme ODE and verify the solution")
    s.add_argument("--f", required=True)
    s.add_argument("--h", required=True)
    s.add_argument("--w0", type=float, required=True)
    s.add_argument("--wt0", default="auto", help="initial w~ or 'auto'")
    s.add_argument("--branch", type=int, default=1)
    s.add_argument("--span", help="lo,hi")
    s.add_argument("--grid", type=int, default=181)
    s.add_argument("-o", "--output", help="solution CSV (default stdout)")
    s.add_argument("--verification", help="verification JSON (default stderr)")
    s.set_defaults(run=cmd_scheme_ode)

    v = sub.add_parser("verify-all", help="run the acceptance suite")
    v.add_argument("--seed", type=int)
    v.add_argument("--only", action="append", help="criterion name or number (repeatable)")
    v.set_defaults(run=cmd_verify_all)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "grid", 2) < 2:
            raise UsageError("--grid must be at least 2")
        return args.run(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TomometricsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
