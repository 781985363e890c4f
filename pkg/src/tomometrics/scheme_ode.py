"""The scheme ODE linking two Petz functions through a spectral map ``w -> w~``.

    (dw~/dw)^2 = (w~/w)^2 (1 - w~)/(1 - w) h((1-w)/(1+w)) / f((1-w~)/(1+w~))

A solution ``w~(w)`` is a change of tomographic scheme that pulls the metric
of ``f`` back to the conformal factor times the metric of ``h``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import (
    BranchFailure,
    DomainError,
    EndpointSingularity,
    InvalidPetzFunction,
    RangeEscape,
    RemovableSingularity,
    StepFailure,
)
from .geometry import conformal_factor, petz_metric, pullback_metric
from .petz import PetzFunction
from .tomography import SpectralMap

RTOL = 1e-10
ATOL = 1e-12
RESIDUAL_BOUND = 1e-8
W_MIN, W_MAX = 0.01, 0.99
DIFF_STEP = 1e-3
SINGULAR_SCALE = 80


def ode_rhs(f: PetzFunction, h: PetzFunction, w, wt):
    """Right-hand side of the scheme ODE; ``w = 0`` is a removable singularity left to the caller."""
    w = np.asarray(w, dtype=float)
    wt = np.asarray(wt, dtype=float)
    if np.any(w == 0):
        raise RemovableSingularity("the scheme ODE is singular at w = 0")
    hv = np.asarray(h((1 - w) / (1 + w)))
    fv = np.asarray(f((1 - wt) / (1 + wt)))
    if np.any(hv <= 0) or np.any(fv <= 0):
        raise InvalidPetzFunction("Petz function is not positive at the requested argument")
    out = (wt / w) ** 2 * (1 - wt) / (1 - w) * hv / fv
    return float(out) if out.ndim == 0 else out


@dataclass(eq=False)
class OdeSolution:
    w: np.ndarray = field(repr=False)
    wt: np.ndarray = field(repr=False)
    dwt: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)
    branch: int
    residual_max: float
    source: str

    @property
    def grid(self):
        return list(zip(self.w.tolist(), self.wt.tolist()))

    def as_map(self) -> SpectralMap:
        """Hermite interpolant through the grid; exact at the grid nodes."""
        order = np.argsort(self.w)
        spline = CubicHermiteSpline(self.w[order], self.wt[order], self.dwt[order])
        deriv = spline.derivative()
        return SpectralMap(f"ode[{self.source}]", lambda w: spline(w), lambda w: deriv(w),
                           {"branch": self.branch})

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["w", "w_tilde", "dw_tilde_dw", "residual"])
        for row in zip(self.w, self.wt, self.dwt, self.residual):
            writer.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue()


def _residuals(f, h, w, wt, dwt):
    return np.abs(dwt**2 - ode_rhs(f, h, w, wt))


def regular_seed(w0, branch):
    """Initial value on the regular family ``w~ ~ c w`` with ``|c| = 1``."""
    return branch * w0


def exp_scheme_seed(beta, w0):
    return float(-np.tanh(beta * w0 / 2))


def _default_span(w0):
    return (w0, W_MAX) if w0 > 0 else (-W_MAX, w0)


def _check_common(w0, wt0, branch, span):
    if w0 == 0:
        raise RemovableSingularity("initial point w0 = 0 is singular")
    if not -1 < wt0 < 1:
        raise DomainError("w~0 must lie in (-1, 1)")
    if branch not in (1, -1):
        raise DomainError("branch must be +1 or -1")
    lo, hi = sorted(map(float, span))
    if not lo <= w0 <= hi:
        raise DomainError("w0 must lie inside the integration span")
    if lo <= 0 <= hi:
        raise RemovableSingularity("the span may not contain w = 0")
    if lo <= -1 or hi >= 1:
        raise DomainError("the span must lie inside (-1, 1)")
    return lo, hi


def _stencil_derivative(dense, x, lo, hi, d):
    """Fourth-order difference of a dense solution, one-sided near ``lo``/``hi``.

    The step shrinks near the singular points ``w = 0`` and ``|w| = 1``, where
    ``dw~/dw`` may blow up.
    """
    d = min(d, (1 - abs(x)) / SINGULAR_SCALE, abs(x) / SINGULAR_SCALE)
    if x - 2 * d >= lo and x + 2 * d <= hi:
        c = np.array([1, -8, 0, 8, -1]) / 12
        pts = x + d * np.arange(-2, 3)
    elif x - 2 * d < lo:
        d = d / 4
        c = np.array([-25, 48, -36, 16, -3]) / 12
        pts = x + d * np.arange(5)
    else:
        d = d / 4
        c = -np.array([-25, 48, -36, 16, -3]) / 12
        pts = x - d * np.arange(5)
    return float(c @ dense(pts)[0]) / d


RTOL_FLOOR = 1e-13


def solve_ode(f: PetzFunction, h: PetzFunction, w0: float, wt0: float, branch: int = 1,
              w_span=None, n_grid: int = 181, rtol: float = RTOL, atol: float = ATOL) -> OdeSolution:
    """Integrate ``dw~/dw = branch * sqrt(RHS)`` from ``(w0, w~0)`` across ``w_span``.

    Uses an embedded 8(5,3) Runge-Kutta pair with dense output.  The grid
    derivative is re-estimated from the dense output (not taken from the
    vector field), so ``residual_max`` measures how well the returned curve
    solves the squared equation.  If it exceeds ``RESIDUAL_BOUND`` the solve
    is repeated with tolerances tightened a hundredfold, down to
    ``RTOL_FLOOR``; a curve that still misses the bound raises ``StepFailure``.

    Raises
    ------
    RangeEscape
        ``w~`` reaches the pure-state boundary; ``err.partial`` holds the grid so far.
    BranchFailure
        the right-hand side vanishes or turns negative inside the span.
    StepFailure
        the integrator cannot make progress.
    """
    while True:
        sol = _solve_once(f, h, w0, wt0, branch, w_span, n_grid, rtol, atol)
        if sol.residual_max < RESIDUAL_BOUND:
            return sol
        if rtol / 100 < RTOL_FLOOR:
            raise StepFailure(f"residual {sol.residual_max:.2e} above {RESIDUAL_BOUND:g} "
                              f"at rtol {rtol:g}", sol)
        rtol, atol = rtol / 100, atol / 100


def _solve_once(f, h, w0, wt0, branch, w_span, n_grid, rtol, atol):
    span = _default_span(w0) if w_span is None else w_span
    lo, hi = _check_common(w0, wt0, branch, span)

    def field_(w, y):
        if abs(y[0]) >= 1:
            # trial stage past the boundary; a NaN makes the integrator reject the step
            return [np.nan]
        r = ode_rhs(f, h, w, y[0])
        if r < 0:
            raise BranchFailure(f"negative right-hand side at w = {w}")
        return [branch * np.sqrt(r)]

    def escape(w, y):
        return 1 - 1e-12 - abs(y[0])
    escape.terminal = True

    def zero_cross(w, y):
        return y[0]
    zero_cross.terminal = True

    grid = np.linspace(lo, hi, n_grid)
    legs = []
    for end in (lo, hi):
        if end == w0:
            continue
        sol = solve_ivp(field_, (w0, end), [wt0], method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True, events=(escape, zero_cross))
        legs.append((min(w0, end), max(w0, end), sol))

    def assemble(limit_lo, limit_hi):
        ws, wts, dwts = [], [], []
        for x in grid:
            if not limit_lo <= x <= limit_hi:
                continue
            for a, b, sol in legs:
                if a <= x <= b:
                    a_eff, b_eff = min(sol.t[0], sol.t[-1]), max(sol.t[0], sol.t[-1])
                    if not a_eff <= x <= b_eff:
                        break
                    ws.append(x)
                    wts.append(float(sol.sol(x)[0]))
                    step = min(DIFF_STEP, (b_eff - a_eff) / 8)
                    dwts.append(_stencil_derivative(sol.sol, x, a_eff, b_eff, step))
                    break
        ws, wts, dwts = map(np.array, (ws, wts, dwts))
        res = _residuals(f, h, ws, wts, dwts) if len(ws) else np.zeros(0)
        return OdeSolution(ws, wts, dwts, res, branch,
                           float(res.max()) if len(res) else 0.0, "numeric")

    for a, b, sol in legs:
        if sol.status == -1:
            raise StepFailure(sol.message, assemble(lo, hi))
        if sol.status == 1:
            partial = assemble(lo, hi)
            if len(sol.t_events[0]):
                raise RangeEscape(f"w~ left (-1, 1) near w = {sol.t[-1]:.6g}", partial)
            raise BranchFailure(f"w~ reached 0 near w = {sol.t[-1]:.6g}", partial)
    return assemble(lo, hi)


# -- separable power family ------------------------------------------------------


def _power_integrand(e):
    def g(x):
        return 1.0 / (x * (1 - x) ** (0.5 - e) * (1 + x) ** e)
    return g


def _power_regular_part(e):
    # integrand minus its 1/x pole; bounded near x = 0
    def r(x):
        if abs(x) < 1e-8:
            return (0.5 - e) - e
        return np.expm1(-(0.5 - e) * np.log1p(-x) - e * np.log1p(x)) / x
    return r


_ANCHOR = 0.5


def _quad(g, a, b):
    if a == b:
        return 0.0
    val, err = quad(g, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)
    if not np.isfinite(val) or err > 1e-10 * max(1.0, abs(val)):
        raise EndpointSingularity(f"quadrature did not converge on [{a}, {b}] (err {err:.2e})")
    return val


def _antiderivative(e, x):
    """``F_e(x) - F_e(sign(x) * 1/2)``; finite up to and including ``x = +-1``."""
    s = np.sign(x)
    if abs(x) <= _ANCHOR:
        return float(np.log(abs(x) / _ANCHOR) + _quad(_power_regular_part(e), s * _ANCHOR, x))
    # substitute 1 -+ x = u^2 to remove the endpoint branch singularity
    u_anchor, u = np.sqrt(1 - _ANCHOR), np.sqrt(max(1 - abs(x), 0.0))
    if s > 0:
        def g(v):
            return 2 * v ** (2 * e) / ((1 - v * v) * (2 - v * v) ** e)
        return float(_quad(g, u, u_anchor))

    def g(v):
        return 2 * v ** (1 - 2 * e) / ((v * v - 1) * (2 - v * v) ** (0.5 - e))
    return float(-_quad(g, u, u_anchor))


def _antiderivative_difference(e, x0, x):
    """``F_e(x) - F_e(x0)`` for ``x``, ``x0`` on the same side of 0."""
    if x == x0:
        return 0.0
    return _antiderivative(e, x) - _antiderivative(e, x0)


def solve_separable_power(a: float, b: float, w0: float, wt0: float, w_span=None,
                          n_grid: int = 181) -> OdeSolution:
    """Solve the scheme ODE for ``f = t^(2a)``, ``h = t^(2b)`` by separation of variables.

    With ``F_e(x) = int dx / (x (1-x)^(1/2-e) (1+x)^e)`` the solution through
    ``(w0, w~0)`` satisfies ``F_a(w~) - F_a(w~0) = F_b(w) - F_b(w0)``.  The
    logarithmic part of each antiderivative is exact; the bounded remainder is
    integrated adaptively, and ``w~`` is recovered by bracketed root finding
    on the strictly monotone left side.  The implied branch is
    ``sign(w~0) * sign(w0)``.
    """
    for e in (a, b):
        if not 0 <= e <= 0.5:
            raise DomainError("power exponents must lie in [0, 1/2]")
    if not 0 < w0 < 1:
        raise DomainError("w0 must lie in (0, 1)")
    if wt0 == 0:
        raise RemovableSingularity("w~0 = 0 is a stationary solution")
    branch = int(np.sign(wt0) * np.sign(w0))
    span = _default_span(w0) if w_span is None else w_span
    lo, hi = _check_common(w0, wt0, branch, span)

    side = float(np.sign(wt0))
    near, far = side * 1e-200, side * 1.0
    lhs_far = _antiderivative_difference(a, wt0, far)
    grid = np.linspace(lo, hi, n_grid)

    ws, wts = [], []
    # walk outward from w0 so a range escape leaves a contiguous partial grid
    for idx in np.argsort(np.abs(grid - w0), kind="stable"):
        x = grid[idx]
        target = _antiderivative_difference(b, w0, x)
        if target >= lhs_far:
            raise RangeEscape(f"w~ leaves (-1, 1) before w = {x:.6g}",
                              _finish(a, b, ws, wts, branch))
        lo_y, hi_y = sorted((near, far))
        root = brentq(lambda y: _antiderivative_difference(a, wt0, y) - target, lo_y, hi_y,
                      xtol=1e-16, rtol=1e-15, maxiter=300)
        ws.append(x)
        wts.append(root)
    return _finish(a, b, ws, wts, branch)


def _finish(a, b, ws, wts, branch):
    from .petz import catalog

    order = np.argsort(ws)
    ws = np.asarray(ws, dtype=float)[order]
    wts = np.asarray(wts, dtype=float)[order]
    if len(ws) == 0:
        return OdeSolution(ws, wts, ws.copy(), ws.copy(), branch, 0.0, "separable-quadrature")
    dwts = _power_integrand(b)(ws) / _power_integrand(a)(wts)
    res = _residuals(catalog("power", a), catalog("power", b), ws, wts, dwts)
    return OdeSolution(ws, wts, dwts, res, branch, float(res.max()), "separable-quadrature")


def solution_from_map(scheme: SpectralMap, f: PetzFunction, h: PetzFunction, w) -> OdeSolution:
    """Wrap a closed-form scheme as an :class:`OdeSolution` on the grid ``w``."""
    w = np.asarray(w, dtype=float)
    wt = np.asarray(scheme(w), dtype=float)
    dwt = np.asarray(scheme.derivative(w), dtype=float)
    res = _residuals(f, h, w, wt, dwt)
    branch = int(np.sign(dwt[0]))
    return OdeSolution(w, wt, dwt, res, branch, float(res.max()), "closed-form")


@dataclass
class VerificationRecord:
    residual_max: float
    factorization_max: float
    residual_ok: bool
    factorization_ok: bool
    bound: float
    points: int
    source: str

    @property
    def ok(self) -> bool:
        return self.residual_ok and self.factorization_ok

    def to_dict(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def verify_solution(sol: OdeSolution, f: PetzFunction, h: PetzFunction,
                    bound: float = RESIDUAL_BOUND) -> VerificationRecord:
    """Recheck a solution grid: squared-ODE residual and ``w~* g_f = A g_h`` coefficient-wise."""
    w = sol.w
    residual = float(_residuals(f, h, w, sol.wt, sol.dwt).max())
    scheme = sol.as_map()
    pulled = pullback_metric(petz_metric(f), scheme)
    g_h = petz_metric(h)
    factor = conformal_factor(scheme, w)
    radial = np.abs(pulled.g_w(w) - factor * g_h.g_w(w))
    tangential = np.abs(pulled.g_perp(w) - factor * g_h.g_perp(w))
    fact = float(max(radial.max(), tangential.max()))
    return VerificationRecord(residual, fact, residual < bound, fact < bound, bound, len(w),
                              sol.source)
