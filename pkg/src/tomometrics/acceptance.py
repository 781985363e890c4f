"""The acceptance suite: fifteen end-to-end checks with fixed tolerances.

Each criterion is a function of a seed returning a :class:`CriterionResult`.
Criteria that do not sample ignore the seed.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import geometry as geo
from . import monotonicity as mono
from .petz import catalog, exp_scheme_h_of_w, symmetry_residual
from .qubit import coordinate_tangents, density_from_signed, random_bloch_vectors
from .scheme_ode import (
    exp_scheme_seed,
    solve_ode,
    solve_separable_power,
    verify_solution,
)
from .tomography import (
    exponential_scheme,
    reconstruct_bloch,
    scheme_from_matrix_function,
    standard_quorum,
    tomograms_of_bloch,
)

DEFAULT_SEED = 0
Q_GRID = tuple(np.round(np.arange(1, 10) / 10, 1))
W_GRID_199 = np.linspace(-0.99, 0.99, 199)
CLASSIC_A = np.array([[1.0, 1.0], [1.0, 1.0]])
CLASSIC_B = np.array([[2.0, 1.0], [1.0, 1.0]])


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (f"{mark} {self.number:2d} {self.name:<24s} value={self.value:.3e} "
                f"tol={self.tolerance:.0e} ({self.seconds:.2f}s) {self.detail}")


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    check: Callable = field(repr=False)

    def run(self, seed=DEFAULT_SEED) -> CriterionResult:
        t0 = time.perf_counter()
        passed, value, tol, detail = self.check(seed)
        return CriterionResult(self.number, self.name, bool(passed), float(value), tol, detail,
                               time.perf_counter() - t0)


def _max(x):
    return float(np.max(np.abs(x)))


# -- individual criteria ----------------------------------------------------------


def tomographic_round_trip(seed):
    rng = np.random.default_rng([seed, 101])
    ys = random_bloch_vectors(rng, 10_000)
    quorum = standard_quorum()
    err = max(_max(reconstruct_bloch(tomograms_of_bloch(y, quorum)).as_array() - y) for y in ys)
    return err < 1e-12, err, 1e-12, "10^4 Bloch vectors, standard quorum"


def petz_consistency(seed):
    err = 0.0
    for q in Q_GRID:
        closed = geo.tsallis_metric(q).curve(W_GRID_199)
        petz = geo.petz_metric(catalog("tsallis", q)).curve(W_GRID_199)
        err = max(err, _max(closed - petz))
    return err < 1e-10, err, 1e-10, "199 w-points, q = 0.1..0.9"


def _superoperator_family():
    fs = [catalog("von-neumann"), catalog("power", 0.25)]
    fs += [catalog("tsallis", q) for q in Q_GRID]
    fs += [catalog("exp-scheme", b) for b in (0.5, 1.0, 2.0, 5.0)]
    return fs


def superoperator(seed):
    err = 0.0
    for f in _superoperator_family():
        metric = geo.petz_metric(f)
        for w in (0.1, 0.3, 0.5, 0.7, 0.9):
            rho = density_from_signed(w, 0.7, 1.9)
            d_w, d_theta, _ = coordinate_tangents(rho)
            gw = geo.cm_metric_value(f, rho, d_w, d_w)
            gp = geo.cm_metric_value(f, rho, d_theta, d_theta)
            err = max(err, abs(gw - 1 / (1 - w * w)), abs(gp - float(metric.g_perp(w))))
    return err < 1e-10, err, 1e-10, "symmetric normalized catalog members, 5 w-points"


def q_to_one_limit(seed):
    w = np.linspace(0.05, 0.95, 91)
    err = _max(geo.tsallis_q_to_one(w, 1e-4) - geo.von_neumann_gperp(w))
    return err < 1e-6, err, 1e-6, "mean of q = 1 -+ 1e-4"


def _gibbs(beta):
    def F(rho):
        m = expm(-beta * rho)
        return m / np.trace(m).real
    return F


def exp_scheme_closed_form(seed):
    betas = np.linspace(0.25, 5.0, 20)
    ws = np.linspace(-0.9, 0.9, 19)
    err = 0.0
    for beta in betas:
        oracle = scheme_from_matrix_function(_gibbs(beta), "gibbs", {"beta": beta})
        err = max(err, _max(oracle(ws) - exponential_scheme(beta)(ws)))
    return err < 1e-12, err, 1e-12, "20 x 19 (beta, w) grid, matrix exponential oracle"


def extracted_h(seed):
    ws = np.linspace(0.02, 0.98, 49)
    ws = np.concatenate([-ws[::-1], ws])
    vn = geo.von_neumann_metric()
    err, flat = 0.0, 0.0
    for beta in (0.5, 1.0, 2.0, 5.0):
        _, h = geo.factorize_pullback(vn, exponential_scheme(beta))
        hv = h((1 - ws) / (1 + ws))
        err = max(err, _max(hv - exp_scheme_h_of_w(beta, ws)))
        ratio = hv / exp_scheme_h_of_w(beta, ws, literal=True)
        flat = max(flat, _max(ratio - 4))
    value = max(err, flat)
    return value < 1e-9, value, 1e-9, f"closed-form err {err:.1e}, ratio-to-literal spread {flat:.1e}"


def symmetry(seed):
    t = np.logspace(-3, 3, 601)
    fs = [catalog("von-neumann")] + [catalog("tsallis", q) for q in Q_GRID]
    fs += [catalog("exp-scheme", b) for b in (0.5, 1.0, 2.0, 5.0)]
    err = max(_max(symmetry_residual(f, t)) for f in fs)
    return err < 1e-12, err, 1e-12, "t in [1e-3, 1e3]"


LOEWNER_BOX = (-1.2, -0.8, 0.0, 0.2)
LOEWNER_WIDE = (-10.0, 10.0, 0.0, 2.0)


def loewner(seed):
    hit = mono.loewner_scan(catalog("exp-scheme", 2.0), LOEWNER_BOX)
    controls = [catalog("von-neumann")] + [catalog("tsallis", q) for q in Q_GRID]
    controls += [catalog("power", a) for a in (0.0, 0.25, 0.5)]
    bad = [f.label for f in controls if mono.loewner_scan(f, LOEWNER_WIDE).verdict != mono.PASS]
    ok = hit.verdict == mono.VIOLATION and not bad
    worst = hit.witnesses[0]["im_f"] if hit.witnesses else 0.0
    detail = f"exp-scheme:2 min Im = {worst:.3g}; controls failing: {bad or 'none'}"
    return ok, worst, mono.LOEWNER_TOL, detail


def matrix_falsifier(seed):
    sq = catalog("square-control")
    found = mono.matrix_monotonicity_test(sq, 2, 1000, seed)
    classic = mono.verify_matrix_witness(sq, CLASSIC_A, CLASSIC_B)
    vn = mono.matrix_monotonicity_test(catalog("von-neumann"), 2, 10_000, seed)
    replay = all(mono.verify_matrix_witness(sq, w["A"], w["B"]) for w in found.witnesses)
    ok = found.verdict == mono.VIOLATION and classic and replay and vn.verdict == mono.PASS
    detail = (f"t^2: {found.violations} hits, classic pair {'ok' if classic else 'FAILS'}; "
              f"von-neumann: {vn.verdict}")
    return ok, vn.violations, mono.MATRIX_TOL, detail


def _closed_case():
    f, h = catalog("power", 0.5), catalog("power", 0.0)
    sol = solve_ode(f, h, 0.05, -0.05, branch=-1, w_span=(0.05, 0.95))
    return f, h, sol


def _exp_case():
    f, h = catalog("von-neumann"), catalog("exp-scheme", 2.0)
    sol = solve_ode(f, h, 0.1, exp_scheme_seed(2.0, 0.1), branch=-1, w_span=(0.1, 0.9))
    return f, h, sol


def ode_closed_case(seed):
    _, _, sol = _closed_case()
    err = _max(sol.wt + sol.w)
    sep = solve_separable_power(0.5, 0.0, 0.05, -0.05, w_span=(0.05, 0.95))
    agree = _max(sep.wt - sol.wt)
    ok = err < 1e-8 and agree < 1e-7
    return ok, err, 1e-8, f"separable agreement {agree:.1e} (tol 1e-7)"


def ode_cross_validation(seed):
    _, _, sol = _exp_case()
    err = _max(sol.wt + np.tanh(sol.w))
    return err < 1e-7, err, 1e-7, "von-neumann / exp-scheme:2 on [0.1, 0.9]"


def factorization(seed):
    worst, parts = 0.0, []
    for name, case in (("closed", _closed_case), ("exp", _exp_case)):
        f, h, sol = case()
        rec = verify_solution(sol, f, h)
        worst = max(worst, rec.factorization_max)
        parts.append(f"{name} {rec.factorization_max:.1e}")
    return worst < 1e-8, worst, 1e-8, ", ".join(parts)


def hessian_q_independence(seed):
    worst_err, worst_spread = 0.0, 0.0
    for p in (0.2, 0.5, 0.8):
        exact = 1 / (p * (1 - p))
        vals = np.array([geo.fisher_from_divergence((p, 1 - p), q) for q in (0.2, 0.5, 0.8)])
        worst_err = max(worst_err, _max(vals / exact - 1))
        worst_spread = max(worst_spread, float(np.ptp(vals) / exact))
    value = max(worst_err, worst_spread)
    return value < 1e-5, value, 1e-5, f"rel err {worst_err:.1e}, q-spread {worst_spread:.1e}"


def fisher_conformal(seed):
    ws = np.linspace(-0.95, 0.95, 77)
    err = 0.0
    for beta in (0.5, 1.0, 2.0, 5.0):
        scheme = exponential_scheme(beta)
        for w in ws:
            pulled = geo.scheme_fisher(scheme, w)
            expected = float(geo.conformal_factor(scheme, w)) * geo.tomographic_tensor([0, 0, w], 2)
            err = max(err, abs(pulled / expected - 1))
    return err < 1e-12, err, 1e-12, "relative, u_w frame, 4 betas x 77 w"


CPTP_EXP_BETA = 5.0


def cptp_monte_carlo(seed):
    vn = mono.metric_monotonicity_test(catalog("von-neumann"), 10_000, seed)
    ex = mono.metric_monotonicity_test(catalog("exp-scheme", CPTP_EXP_BETA), 100_000, seed)
    replay = all(mono.verify_metric_witness(catalog("exp-scheme", CPTP_EXP_BETA), w)
                 for w in ex.witnesses)
    ok = vn.verdict == mono.PASS and ex.verdict in (mono.VIOLATION, mono.INCONCLUSIVE) and replay
    detail = (f"von-neumann: {vn.verdict}; exp-scheme:{CPTP_EXP_BETA:g}: {ex.verdict} "
              f"({ex.violations} of {ex.samples}, seed {seed})")
    return ok, vn.violations, mono.METRIC_TOL, detail


CRITERIA = (
    Criterion(1, "tomographic-round-trip", tomographic_round_trip),
    Criterion(2, "petz-consistency", petz_consistency),
    Criterion(3, "superoperator", superoperator),
    Criterion(4, "q-to-one-limit", q_to_one_limit),
    Criterion(5, "exp-scheme-closed-form", exp_scheme_closed_form),
    Criterion(6, "extracted-h", extracted_h),
    Criterion(7, "symmetry", symmetry),
    Criterion(8, "loewner", loewner),
    Criterion(9, "matrix-falsifier", matrix_falsifier),
    Criterion(10, "ode-closed-case", ode_closed_case),
    Criterion(11, "ode-cross-validation", ode_cross_validation),
    Criterion(12, "factorization", factorization),
    Criterion(13, "hessian-q-independence", hessian_q_independence),
    Criterion(14, "fisher-conformal", fisher_conformal),
    Criterion(15, "cptp-monte-carlo", cptp_monte_carlo),
)
NAMES = tuple(c.name for c in CRITERIA)


def get(name) -> Criterion:
    for c in CRITERIA:
        if c.name == name or str(c.number) == str(name):
            return c
    raise KeyError(f"unknown criterion {name!r}; choose from {', '.join(NAMES)}")


def run_all(seed=DEFAULT_SEED, only=None, echo=None):
    """Run the selected criteria in order; ``echo`` receives each result line."""
    chosen = CRITERIA if not only else [get(n) for n in only]
    results = []
    for c in chosen:
        res = c.run(seed)
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
