"""Solve the scheme ODE for f = t^(2a), h = t^(2b) two ways and compare.

For each (a, b) the separable quadrature solution and the Runge-Kutta
solution are computed from the same initial point; the table reports their
agreement, the residual and any solver failure (typically the solution leaving
(-1, 1)).

    python3 scripts/power_family_ode.py --w0 0.2 --wt0 -0.2
"""
import argparse
import itertools

import numpy as np

from tomometrics.errors import SolverError
from tomometrics.petz import catalog
from tomometrics.scheme_ode import solve_ode, solve_separable_power


def attempt(fn):
    try:
        return fn(), None
    except SolverError as exc:
        return exc.partial, f"{type(exc).__name__}: {exc}"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--exponents", default="0,0.1,0.25,0.3,0.5")
    ap.add_argument("--w0", type=float, default=0.2)
    ap.add_argument("--wt0", type=float, default=-0.2)
    args = ap.parse_args()

    exps = [float(x) for x in args.exponents.split(",")]
    branch = int(np.sign(args.wt0))
    print(f"{'a':>5} {'b':>5} {'points':>6} {'max|sep-ode|':>13} {'ode residual':>13}  failure")
    for a, b in itertools.product(exps, exps):
        sep, sep_msg = attempt(lambda: solve_separable_power(a, b, args.w0, args.wt0))
        num, num_msg = attempt(lambda: solve_ode(catalog("power", a), catalog("power", b),
                                                 args.w0, args.wt0, branch))
        n = min(len(sep.w), len(num.w))
        diff = np.max(np.abs(sep.wt[:n] - num.wt[:n])) if n else float("nan")
        res = np.max(num.residual[: max(n - 3, 1)]) if n else float("nan")
        esc = num_msg or sep_msg or "-"
        print(f"{a:5.2f} {b:5.2f} {n:6d} {diff:13.2e} {res:13.2e}  {esc}")


if __name__ == "__main__":
    main()
