"""Divergences, Fisher tensors, qubit Petz metrics and scheme pullbacks.

Metrics are stored in the canonical polar convention

    g = g_w(w) dw (x) dw + g_perp(w) (dtheta (x) dtheta + sin^2 theta dphi (x) dphi)

with ``w`` the signed spectral parameter of ``(sigma0 + w sigma_w) / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidMetric, InvalidPetzFunction, Singular
from .petz import PetzFunction, from_callable
from .qubit import QubitDensity, TangentVector, spectral_decompose
from .tomography import Quorum, SpectralMap, tomogram

CONVENTION = "canonical-polar"
_SERIES_CUTOFF = 1e-8


@dataclass(frozen=True, eq=False)
class MetricCoeffs:
    name: str
    g_w: Callable = field(repr=False)
    g_perp: Callable = field(repr=False)
    convention: str = CONVENTION

    def curve(self, w):
        w = np.asarray(w, dtype=float)
        return np.column_stack([w, self.g_w(w), self.g_perp(w)])


def _open_interval(w):
    w = np.asarray(w, dtype=float)
    if np.any(np.abs(w) >= 1):
        raise Singular("metric coefficients need w in the open interval (-1, 1)")
    return w


def radial_coefficient(w):
    w = _open_interval(w)
    return 1 / (1 - w * w)


# -- classical divergence and Fisher -------------------------------------------


def _check_pair(p, name):
    p = np.asarray(p, dtype=float)
    if p.shape != (2,) or abs(p.sum() - 1) > 1e-12:
        raise DomainError(f"{name} must be a probability pair")
    if np.any(p <= 0) or np.any(p >= 1):
        raise DomainError(f"{name} needs strictly positive entries")
    return p


def classical_tsallis_divergence(p, p_tilde, q) -> float:
    """Relative Tsallis entropy ``(1 - sum p^q p~^(1-q)) / (q (1 - q))``."""
    p = _check_pair(p, "p")
    pt = _check_pair(p_tilde, "p_tilde")
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    return float((1 - np.sum(p**q * pt ** (1 - q))) / (q * (1 - q)))


DIVERGENCE_KINDS = ("classical-tsallis", "quantum-tsallis", "von-neumann")


@dataclass(frozen=True)
class DivergenceSpec:
    kind: str
    q: float | None = None

    def __post_init__(self):
        if self.kind not in DIVERGENCE_KINDS:
            raise DomainError(f"unknown divergence kind {self.kind!r}")
        if self.kind == "von-neumann":
            if self.q is not None:
                raise DomainError("the von Neumann divergence takes no q")
        elif self.q is None or not 0 < self.q < 1:
            raise DomainError(f"q must lie in (0, 1), got {self.q}")

    def metric(self) -> "MetricCoeffs":
        """Qubit metric generated by the quantum divergence (classical kinds have none)."""
        if self.kind == "quantum-tsallis":
            return tsallis_metric(self.q)
        if self.kind == "von-neumann":
            return von_neumann_metric()
        raise DomainError("a classical divergence induces a Fisher coefficient, not a qubit metric")


HESSIAN_STEP = 1e-4


def _binary_divergence(x, xt, q):
    return (1 - x**q * xt ** (1 - q) - (1 - x) ** q * (1 - xt) ** (1 - q)) / (q * (1 - q))


def _mixed_central(x, q, h):
    d = _binary_divergence
    return (d(x + h, x + h, q) - d(x + h, x - h, q) - d(x - h, x + h, q)
            + d(x - h, x - h, q)) / (4 * h * h)


def fisher_from_divergence(p, q, step=HESSIAN_STEP) -> float:
    """Fisher coefficient of a binary distribution parametrized by ``p[0]``.

    Minus the mixed second derivative of the Tsallis divergence on the
    diagonal, by central differences with one level of Richardson
    extrapolation.  Analytically ``1 / (p (1 - p))`` for every ``q``.
    """
    p = _check_pair(p, "p")
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    x = p[0]
    if x - 2 * step <= 0 or x + 2 * step >= 1:
        raise DomainError("p too close to the simplex boundary for the difference step")
    coarse = _mixed_central(x, q, 2 * step)
    fine = _mixed_central(x, q, step)
    return float(-(4 * fine - coarse) / 3)


# -- tomographic tensors ---------------------------------------------------------


def tomographic_tensor(y, j: int) -> float:
    """Diagonal tomographic tensor entry ``1 / (1 - y_j^2)`` of frame ``j`` (0-based)."""
    yj = float(np.asarray(getattr(y, "as_array", lambda: y)())[j])
    if abs(yj) >= 1:
        raise Singular(f"|y_{j}| = {abs(yj)} >= 1")
    return 1 / (1 - yj * yj)


def frame_fisher(probs, dprobs) -> float:
    """``sum_m (dW_m)^2 / W_m`` for one frame's outcome pair and its derivative."""
    probs = np.asarray(probs, dtype=float)
    dprobs = np.asarray(dprobs, dtype=float)
    if np.any(probs <= 0):
        raise Singular("tomogram has a zero outcome")
    return float(np.sum(dprobs**2 / probs))


def quorum_fisher(rho: QubitDensity, drho, quorum: Quorum) -> np.ndarray:
    """Fisher coefficient of each frame's tomogram along the tangent ``drho``."""
    drho = getattr(drho, "A", drho)
    out = []
    for fr in quorum.frames:
        probs = tomogram(rho, fr, quorum.basis)
        rotated = fr.u @ drho @ fr.u.conj().T
        d = np.einsum("im,ij,jm->m", quorum.basis.conj(), rotated, quorum.basis).real
        out.append(frame_fisher(probs, d))
    return np.array(out)


def scheme_fisher(scheme: SpectralMap, w) -> float:
    """Fisher coefficient in ``w`` of the ``u_w`` tomogram of ``F(rho(w))``."""
    wt = float(scheme(w))
    dwt = float(scheme.derivative(w))
    probs = ((1 + wt) / 2, (1 - wt) / 2)
    return frame_fisher(probs, (dwt / 2, -dwt / 2))


# -- quantum metrics ---------------------------------------------------------------


def _pair_diff(w, alpha):
    """``a_alpha - b_alpha`` with ``a = ((1+w)/2)^alpha``, ``b = ((1-w)/2)^alpha``."""
    b = ((1 - w) / 2) ** alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        return b * np.expm1(alpha * (np.log1p(w) - np.log1p(-w)))


def tsallis_gperp(w, q):
    """Tangential Tsallis coefficient for any real ``q`` outside {0, 1}."""
    if q in (0, 1):
        raise DomainError("q must differ from 0 and 1")
    w = _open_interval(w)
    return _pair_diff(w, q) * _pair_diff(w, 1 - q) / (2 * q * (1 - q))


def tsallis_metric(q: float) -> MetricCoeffs:
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    return MetricCoeffs(f"tsallis:{q:g}", radial_coefficient, lambda w: tsallis_gperp(w, q))


def tsallis_q_to_one(w, h=1e-4):
    """Symmetric estimate of the ``q -> 1`` limit: mean of ``q = 1 - h`` and ``q = 1 + h``."""
    return 0.5 * (tsallis_gperp(w, 1 - h) + tsallis_gperp(w, 1 + h))


def von_neumann_gperp(w):
    w = _open_interval(w)
    return w * np.arctanh(w)


def von_neumann_metric() -> MetricCoeffs:
    """``g_perp = (w/2) ln((1+w)/(1-w))``."""
    return MetricCoeffs("von-neumann", radial_coefficient, von_neumann_gperp)


_POSITIVITY_GRID = np.logspace(-4, 4, 161)


def petz_metric(f: PetzFunction) -> MetricCoeffs:
    """Qubit metric of Petz form, ``g_perp = w^2 / ((1 + w) f((1 - w)/(1 + w)))``."""
    vals = f(_POSITIVITY_GRID)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise InvalidPetzFunction(f"{f.label} is not positive on (0, inf)")

    def g_perp(w):
        w = _open_interval(w)
        t = (1 - w) / (1 + w)
        out = w * w / ((1 + w) * f(t))
        return np.where(np.abs(w) < _SERIES_CUTOFF, w * w, out)

    return MetricCoeffs(f"petz:{f.label}", radial_coefficient, g_perp)


def cm_metric_value(f: PetzFunction, rho: QubitDensity, A, B) -> float:
    """``Tr(A c_f(L_rho, R_rho)(B))`` evaluated in the eigenbasis of ``rho``.

    ``c_f(x, y) = 1 / (y f(x / y))`` acts entrywise: ``B_ij -> B_ij c_f(p_i, p_j)``.
    """
    if rho.w >= 1:
        raise Singular("the metric is undefined on pure states")
    A = getattr(A, "A", A)
    B = getattr(B, "A", B)
    p, frame = spectral_decompose(rho)
    u = frame.u
    p = np.asarray(p)
    a = u.conj().T @ A @ u
    b = u.conj().T @ B @ u
    kernel = 1 / (p[None, :] * f(p[:, None] / p[None, :]))
    return float(np.sum(a.T * b * kernel).real)


def cm_quadratic_batch(f: PetzFunction, rhos, tangents):
    """``g_rho(A, A)`` for stacks of states ``(n, 2, 2)`` and tangents ``(n, 2, 2)``."""
    p, v = np.linalg.eigh(rhos)
    if np.any(p <= 0):
        raise Singular("batch contains a state that is not full rank")
    a = np.conj(np.swapaxes(v, -1, -2)) @ tangents @ v
    ratio = p[:, :, None] / p[:, None, :]
    kernel = 1 / (p[:, None, :] * f(ratio))
    return np.sum(np.abs(a) ** 2 * kernel, axis=(-2, -1))


# -- scheme changes ------------------------------------------------------------------


def conformal_factor(scheme: SpectralMap, w):
    """``(1 - w^2) / (1 - w~^2) (dw~/dw)^2``."""
    w = _open_interval(w)
    wt = np.asarray(scheme(w), dtype=float)
    if np.any(np.abs(wt) >= 1):
        raise Singular("scheme maps onto a pure state")
    d = np.asarray(scheme.derivative(w), dtype=float)
    return (1 - w * w) / (1 - wt * wt) * d * d


def pullback_metric(g: MetricCoeffs, scheme: SpectralMap) -> MetricCoeffs:
    def g_w(w):
        w = _open_interval(w)
        wt = _open_interval(scheme(w))
        return g.g_w(wt) * np.asarray(scheme.derivative(w)) ** 2

    def g_perp(w):
        return g.g_perp(_open_interval(scheme(_open_interval(w))))

    return MetricCoeffs(f"{g.name}|{scheme.name}*", g_w, g_perp)


def conformal_quotient(g: MetricCoeffs, scheme: SpectralMap) -> MetricCoeffs:
    """Pullback of ``g`` along ``scheme`` with the conformal factor divided out."""
    pulled = pullback_metric(g, scheme)
    return MetricCoeffs(
        f"{pulled.name}/A",
        lambda w: pulled.g_w(w) / conformal_factor(scheme, w),
        lambda w: pulled.g_perp(w) / conformal_factor(scheme, w),
    )


def extract_petz_function(g: MetricCoeffs, n_table=201) -> PetzFunction:
    """Invert the Petz form: ``h(t(w)) = w^2 / ((1 + w) g_perp(w))`` with ``t = (1-w)/(1+w)``.

    The result evaluates exactly through ``g``; a table on a log-spaced
    ``t`` grid is attached for export.
    """
    probe = np.linspace(-0.99, 0.99, 199)
    probe = probe[np.abs(probe) > 1e-3]
    gp = np.asarray(g.g_perp(probe))
    if not np.all(np.isfinite(gp)) or np.any(gp <= 0):
        raise InvalidMetric(f"{g.name} has a non-positive tangential coefficient")

    def h(t):
        t = np.asarray(t, dtype=float)
        w = (1 - t) / (1 + t)
        small = np.abs(w) < _SERIES_CUTOFF
        ws = np.where(small, 0.5, w)
        out = np.where(small, 1.0, ws * ws / ((1 + ws) * g.g_perp(ws)))
        return float(out) if out.ndim == 0 else out

    t_tab = np.logspace(-2, 2, n_table)
    return from_callable(h, "tabulated", {"source": g.name}, table=(t_tab, h(t_tab)))


def factorize_pullback(f: PetzFunction | MetricCoeffs, scheme: SpectralMap):
    """Split ``scheme^* g_f`` into ``(conformal factor callable, extracted h)``."""
    g = f if isinstance(f, MetricCoeffs) else petz_metric(f)
    quotient = conformal_quotient(g, scheme)
    return (lambda w: conformal_factor(scheme, w)), extract_petz_function(quotient)
