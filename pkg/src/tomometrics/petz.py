"""Petz functions: catalog of closed forms, real and complex evaluators.

Every catalog member is normalized so that ``f(1) = 1`` unless stated
otherwise.  Real evaluators accept arrays; complex evaluators use principal
branches of ``log`` and powers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

_SERIES_CUTOFF = 1e-8


@dataclass(frozen=True, eq=False)
class PetzFunction:
    """A positive function on (0, inf) used as the kernel of a Petz metric.

    Attributes
    ----------
    id : str
        Catalog identifier (``von-neumann``, ``tsallis``, ``power``,
        ``exp-scheme``, ``square-control`` or ``tabulated``).
    real : callable
        Vectorized evaluator on positive reals.
    complex : callable or None
        Evaluator on the upper half-plane; ``None`` when no analytic
        extension is known (tabulated functions).
    singular : callable or None
        Maps a complex array to a boolean mask of points in the declared
        singular set (branch points, poles, essential singularities).
    operator_monotone : bool or None
        What is known about operator monotonicity on (0, inf); ``None`` if
        unknown.  Only used to label sample-limited verdicts.
    """

    id: str
    real: Callable = field(repr=False)
    complex: Optional[Callable] = field(default=None, repr=False)
    params: dict = field(default_factory=dict)
    singular: Optional[Callable] = field(default=None, repr=False)
    operator_monotone: Optional[bool] = None
    symmetric: bool = True
    table: Optional[tuple] = field(default=None, repr=False)

    def __call__(self, t):
        return self.real(t)

    @property
    def label(self) -> str:
        if not self.params:
            return self.id
        vals = ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in self.params.values())
        return f"{self.id}:{vals}"

    def to_csv(self, t=None) -> str:
        """``t,f`` rows at 17 significant digits; defaults to the attached table or a log grid."""
        if t is None and self.table is not None:
            t, vals = self.table
        else:
            t = np.logspace(-2, 2, 201) if t is None else np.asarray(t, dtype=float)
            vals = self.real(t)
        rows = "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(np.ravel(t), np.ravel(vals)))
        return "t,f\n" + rows

    def scaled(self, c: float) -> "PetzFunction":
        """Return ``c * f``; used to check that verdicts are scale invariant."""
        c = float(c)
        if c <= 0:
            raise DomainError("scale must be positive")
        cplx = None if self.complex is None else (lambda z, g=self.complex: c * g(z))
        return PetzFunction(
            self.id,
            lambda t, g=self.real: c * g(t),
            cplx,
            {**self.params, "scale": c},
            self.singular,
            self.operator_monotone,
            self.symmetric,
        )


def _as_float(t):
    return np.asarray(t, dtype=float)


def _scalar_out(x, like):
    return float(x) if np.ndim(like) == 0 else x


# -- von Neumann: (t - 1) / ln t ------------------------------------------------


def _vn_real(t):
    t = _as_float(t)
    L = np.log(t)
    small = np.abs(L) < _SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, 1 + L / 2 + L * L / 6, np.expm1(L) / np.where(small, 1, L))
    return _scalar_out(out, t)


def _vn_complex(z):
    z = np.asarray(z, dtype=complex)
    L = np.log(z)
    small = np.abs(L) < _SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(small, 1 + L / 2, np.expm1(L) / np.where(small, 1, L))


# -- Tsallis: q(1-q)(t-1)^2 / ((t^q - 1)(t^(1-q) - 1)) ---------------------------


def _tsallis_kernel(L, q, expm1):
    small = np.abs(L) < _SERIES_CUTOFF
    Ls = np.where(small, 1, L)
    with np.errstate(divide="ignore", invalid="ignore"):
        full = q * (1 - q) * expm1(Ls) ** 2 / (expm1(q * Ls) * expm1((1 - q) * Ls))
    return np.where(small, 1 + L / 2, full)


def _tsallis_real(q):
    def f(t):
        t = _as_float(t)
        return _scalar_out(_tsallis_kernel(np.log(t), q, np.expm1), t)
    return f


def _tsallis_complex(q):
    def f(z):
        return _tsallis_kernel(np.log(np.asarray(z, dtype=complex)), q, np.expm1)
    return f


# -- power: t^(2a) ---------------------------------------------------------------


def _power_real(a):
    def f(t):
        t = _as_float(t)
        return _scalar_out(np.exp(2 * a * np.log(t)), t)
    return f


def _power_complex(a):
    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.exp(2 * a * np.log(z))
    return f


# -- exponential-scheme h ----------------------------------------------------------


def _x_over_sinh(x):
    small = np.abs(x) < 1e-4
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        full = x / np.sinh(np.where(small, 1, x))
    return np.where(small, 1 - x * x / 6 + 7 * x**4 / 360, full)


def _exp_real(beta, scale):
    def h(t):
        t = _as_float(t)
        w = (1 - t) / (1 + t)
        out = scale * (1 - w) * _x_over_sinh(beta * w)
        return _scalar_out(out, t)
    return h


def _exp_complex(beta, scale):
    # literal analytic form 2*beta*z(1-z) / ((1+z)^2 sinh(beta(1-z)/(1+z))), times scale
    # written as 2z/(1+z) * x/sinh(x) with x = beta(1-z)/(1+z) so z = 1 is not 0/0
    def h(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            arg = beta * (1 - z) / (1 + z)
            return scale * 2 * z / (1 + z) * _x_over_sinh(arg)
    return h


def _exp_singular(beta):
    def mask(z):
        z = np.asarray(z, dtype=complex)
        near_pole = np.abs(1 + z) < 1e-12
        with np.errstate(all="ignore"):
            arg = beta * (1 - z) / np.where(near_pole, 1, 1 + z)
        k = np.round(arg.imag / np.pi)
        sinh_zero = (np.abs(arg - 1j * np.pi * k) < 1e-9) & (k != 0)
        return near_pole | sinh_zero | ~np.isfinite(arg)
    return mask


def _vn_singular(z):
    return np.asarray(z) == 0


# -- catalog -----------------------------------------------------------------------

ALIASES = {"vn": "von-neumann", "exp": "exp-scheme", "square": "square-control"}


def catalog(id: str, *params, literal: bool = False) -> PetzFunction:
    """Build a catalog Petz function.

    ``exp-scheme`` takes ``beta``; with ``literal=True`` it is the unnormalized
    form with ``h(1) = 1/4`` instead of the canonical ``h(1) = 1``.
    """
    key = ALIASES.get(id, id)
    if key == "von-neumann":
        _expect(params, 0, key)
        return PetzFunction(key, _vn_real, _vn_complex, {}, _vn_singular, True, True)
    if key == "tsallis":
        _expect(params, 1, key)
        q = float(params[0])
        if not 0 < q < 1:
            raise DomainError(f"tsallis q must lie in (0, 1), got {q}")
        return PetzFunction(key, _tsallis_real(q), _tsallis_complex(q), {"q": q},
                            _vn_singular, True, True)
    if key == "power":
        _expect(params, 1, key)
        a = float(params[0])
        if not 0 <= a <= 0.5:
            raise DomainError(f"power exponent a must lie in [0, 1/2], got {a}")
        return PetzFunction(key, _power_real(a), _power_complex(a), {"a": a},
                            _vn_singular, True, a == 0.25)
    if key == "exp-scheme":
        _expect(params, 1, key)
        beta = float(params[0])
        if beta == 0:
            raise DomainError("exp-scheme needs beta != 0")
        scale = 0.25 if literal else 1.0
        p = {"beta": beta, "literal": True} if literal else {"beta": beta}
        return PetzFunction(key, _exp_real(beta, scale), _exp_complex(beta, scale), p,
                            _exp_singular(beta), False, True)
    if key == "square-control":
        _expect(params, 0, key)
        return PetzFunction(key, lambda t: _as_float(t) ** 2,
                            lambda z: np.asarray(z, dtype=complex) ** 2, {}, None, False, False)
    raise DomainError(f"unknown Petz function id {id!r}")


def _expect(params, n, key):
    if len(params) != n:
        raise DomainError(f"{key} takes {n} parameter(s), got {len(params)}")


def parse_function_spec(spec: str) -> PetzFunction:
    """Parse ``id[:param[,param]]``; ``exp-scheme-literal:beta`` selects the literal normalization."""
    name, _, rest = spec.partition(":")
    params = [float(x) for x in rest.split(",") if x.strip()] if rest else []
    if name == "exp-scheme-literal":
        return catalog("exp-scheme", *params, literal=True)
    return catalog(name, *params)


def from_callable(fn, id="tabulated", params=None, operator_monotone=None,
                  symmetric=True, table=None) -> PetzFunction:
    return PetzFunction(id, fn, None, dict(params or {}), None, operator_monotone, symmetric, table)


def symmetry_residual(f: PetzFunction, t):
    """``f(t) - t f(1/t)``; zero for functions obeying the Petz symmetry."""
    t = _as_float(t)
    return f(t) - t * f(1 / t)


def exp_scheme_h_of_w(beta, w, literal=False):
    """Closed form ``beta w (1 - w) / sinh(beta w)`` (divided by 4 when ``literal``)."""
    w = _as_float(w)
    out = (1 - w) * _x_over_sinh(beta * w)
    return out / 4 if literal else out
