"""Qubit states, Pauli frames, spectral decomposition and random channels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidState

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA1, SIGMA2, SIGMA3)

_HERM_TOL = 1e-14
_BLOCH_TOL = 1e-12


def _dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def polar_from_bloch(y):
    """Return ``(w, theta, phi)`` for a Bloch vector, with ``phi`` in [0, 2pi)."""
    y = np.asarray(y, dtype=float)
    w = float(np.linalg.norm(y))
    if w == 0.0:
        return 0.0, 0.0, 0.0
    theta = float(np.arctan2(np.hypot(y[0], y[1]), y[2]))
    phi = float(np.arctan2(y[1], y[0])) % (2 * np.pi)
    return w, theta, phi


def bloch_from_polar(w, theta, phi):
    return np.array([
        w * np.sin(theta) * np.cos(phi),
        w * np.sin(theta) * np.sin(phi),
        w * np.cos(theta),
    ])


@dataclass(frozen=True)
class BlochVector:
    y1: float
    y2: float
    y3: float

    def __post_init__(self):
        if self.norm > 1 + _BLOCH_TOL:
            raise InvalidState(f"|y| = {self.norm!r} exceeds 1")

    @classmethod
    def from_array(cls, y) -> "BlochVector":
        y = np.asarray(y, dtype=float).reshape(3)
        return cls(float(y[0]), float(y[1]), float(y[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.y1, self.y2, self.y3])

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.y1**2 + self.y2**2 + self.y3**2))


@dataclass(frozen=True, eq=False)
class QubitDensity:
    """A 2x2 density matrix together with its polar Bloch coordinates.

    ``w`` is non-negative; the direction lives in ``(theta, phi)``.  Use
    :func:`density_from_signed` to build a state from a signed spectral
    parameter along a fixed axis.
    """

    matrix: np.ndarray = field(repr=False)
    w: float
    theta: float
    phi: float

    @classmethod
    def from_matrix(cls, matrix) -> "QubitDensity":
        m = np.array(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidState(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.max(np.abs(m - _dagger(m))) > _HERM_TOL:
            raise InvalidState("matrix is not Hermitian")
        if abs(np.trace(m) - 1) > _HERM_TOL:
            raise InvalidState(f"trace {np.trace(m).real!r} != 1")
        y = bloch_of_matrix(m)
        if np.linalg.norm(y) > 1 + _BLOCH_TOL:
            raise InvalidState("matrix has a negative eigenvalue")
        m.setflags(write=False)
        return cls(m, *polar_from_bloch(y))

    @property
    def bloch(self) -> BlochVector:
        return BlochVector.from_array(bloch_from_polar(self.w, self.theta, self.phi))

    @property
    def eigenvalues(self):
        return (1 + self.w) / 2, (1 - self.w) / 2


def bloch_of_matrix(m) -> np.ndarray:
    """Read the Bloch vector ``y_j = Tr(rho sigma_j)``."""
    m = np.asarray(m)
    return np.array([np.trace(m @ s).real for s in PAULIS])


def density_from_bloch(y) -> QubitDensity:
    if not isinstance(y, BlochVector):
        y = BlochVector.from_array(y)
    v = y.as_array()
    m = 0.5 * (SIGMA0 + v[0] * SIGMA1 + v[1] * SIGMA2 + v[2] * SIGMA3)
    m.setflags(write=False)
    return QubitDensity(m, *polar_from_bloch(v))


def density_from_signed(w, theta=0.0, phi=0.0) -> QubitDensity:
    """State ``(sigma0 + w sigma_w(theta, phi)) / 2`` for a signed ``w``.

    A negative ``w`` is stored as ``|w|`` along the antipodal direction.
    """
    return density_from_bloch(bloch_from_polar(w, theta, phi))


def rotated_pauli_basis(theta, phi):
    """Pauli matrices rotated to the local polar frame: ``(sigma_w, sigma_theta, sigma_phi)``."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    sigma_w = st * cp * SIGMA1 + st * sp * SIGMA2 + ct * SIGMA3
    sigma_theta = ct * cp * SIGMA1 + ct * sp * SIGMA2 - st * SIGMA3
    sigma_phi = -sp * SIGMA1 + cp * SIGMA2
    return sigma_w, sigma_theta, sigma_phi


def sigma_w_eigenbasis(theta, phi, gauge="canonical"):
    """Columns ``|m_w=+1>, |m_w=-1>`` of the eigenbasis of ``sigma_w(theta, phi)``.

    ``gauge="canonical"`` fixes each column so its largest-magnitude entry is
    real and positive.  ``gauge="polar"`` is the smooth gauge
    ``(cos(theta/2), e^{i phi} sin(theta/2))`` with the second vector carrying
    an extra ``e^{i theta}`` phase; in that gauge ``sigma_theta`` and
    ``sigma_phi`` have off-diagonal entries ``e^{i(theta-phi)}`` and
    ``-i e^{i(theta-phi)}``.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    plus = np.array([c, np.exp(1j * phi) * s])
    minus = np.array([-np.exp(-1j * phi) * s, c])
    if gauge == "polar":
        minus = np.exp(1j * theta) * minus
    elif gauge == "canonical":
        plus, minus = _fix_phase(plus), _fix_phase(minus)
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    return np.column_stack([plus, minus])


def _fix_phase(v):
    k = int(np.argmax(np.abs(v)))
    return v * (np.abs(v[k]) / v[k])


@dataclass(frozen=True, eq=False)
class UnitaryFrame:
    u: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        if u.shape != (2, 2) or np.max(np.abs(_dagger(u) @ u - SIGMA0)) > 1e-14:
            raise ValueError(f"frame {self.label!r} is not a 2x2 unitary")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


def spectral_decompose(rho: QubitDensity):
    """Return ``(p, U)`` with ``p`` sorted descending and ``rho = U diag(p) U^dagger``.

    For the maximally mixed state the frame is the identity.
    """
    p = rho.eigenvalues
    if rho.w < 1e-14:
        return (0.5, 0.5), UnitaryFrame(SIGMA0, "eigenbasis")
    u = sigma_w_eigenbasis(rho.theta, rho.phi, gauge="canonical")
    return p, UnitaryFrame(u, "eigenbasis")


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Hermitian traceless 2x2 matrix."""

    A: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.A, dtype=complex)
        if np.max(np.abs(a - _dagger(a))) > _HERM_TOL * max(1.0, np.max(np.abs(a))):
            raise ValueError("tangent vector must be Hermitian")
        if abs(np.trace(a)) > _HERM_TOL * max(1.0, np.max(np.abs(a))):
            raise ValueError("tangent vector must be traceless")
        a.setflags(write=False)
        object.__setattr__(self, "A", a)

    @classmethod
    def from_components(cls, x) -> "TangentVector":
        x = np.asarray(x, dtype=float)
        return cls(0.5 * (x[0] * SIGMA1 + x[1] * SIGMA2 + x[2] * SIGMA3))


def coordinate_tangents(rho: QubitDensity):
    """Tangent vectors ``d rho/dw``, ``d rho/d theta``, ``d rho/d phi`` at ``rho``."""
    s_w, s_t, s_p = rotated_pauli_basis(rho.theta, rho.phi)
    return (
        TangentVector(0.5 * s_w),
        TangentVector(0.5 * rho.w * s_t),
        TangentVector(0.5 * rho.w * np.sin(rho.theta) * s_p),
    )


@dataclass(frozen=True, eq=False)
class Channel:
    kraus: tuple

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=complex) for k in self.kraus)
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        if self.completeness_error() > 1e-12:
            raise ValueError("Kraus operators are not trace preserving")

    def completeness_error(self) -> float:
        total = sum(_dagger(k) @ k for k in self.kraus)
        return float(np.max(np.abs(total - SIGMA0)))

    def apply(self, m):
        """Apply the channel to any 2x2 matrix (state or tangent vector)."""
        m = np.asarray(m)
        return sum(k @ m @ _dagger(k) for k in self.kraus)

    def __call__(self, rho: QubitDensity) -> QubitDensity:
        out = self.apply(rho.matrix)
        return QubitDensity.from_matrix(0.5 * (out + _dagger(out)))


def random_isometry_kraus(rng, n=None):
    """Draw Kraus pairs from random 4x2 isometries; shape ``(2, 2, 2)`` or ``(n, 2, 2, 2)``."""
    shape = (4, 2) if n is None else (n, 4, 2)
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    q, r = np.linalg.qr(g)
    # make the QR factor unique: diag(R) real positive
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (np.conj(d) / np.abs(d))[..., None, :]
    return np.stack([q[..., :2, :], q[..., 2:, :]], axis=-3)


def random_channel(seed: int) -> Channel:
    rng = np.random.default_rng(seed)
    k = random_isometry_kraus(rng)
    return Channel((k[0], k[1]))


def random_bloch_vectors(rng, n, w_max=1.0):
    """Uniform samples from the Bloch ball of radius ``w_max``."""
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = w_max * rng.random(n) ** (1 / 3)
    return v * r[:, None]
