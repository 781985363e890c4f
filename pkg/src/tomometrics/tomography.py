"""Spin tomograms, quorums, state reconstruction and tomographic schemes."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateScheme,
    InconsistentTomogram,
    InvalidScheme,
    InvalidTensor,
    NonInvertibleScheme,
)
from .qubit import (
    PAULIS,
    SIGMA0,
    SIGMA1,
    SIGMA2,
    BlochVector,
    QubitDensity,
    UnitaryFrame,
    density_from_bloch,
    density_from_signed,
    rotated_pauli_basis,
    sigma_w_eigenbasis,
)


def _quarter_turn(sign, sigma):
    # exp(sign * i pi/4 * sigma) for sigma**2 == 1
    return (SIGMA0 + sign * 1j * sigma) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class Quorum:
    """Three frames plus the reference basis ``|m>`` the outcomes are read in."""

    frames: tuple
    basis: np.ndarray = field(default_factory=lambda: SIGMA0.copy(), repr=False)
    name: str = "standard"

    def __post_init__(self):
        if len(self.frames) != 3:
            raise ValueError("a qubit quorum has exactly three frames")
        b = np.array(self.basis, dtype=complex)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "frames", tuple(self.frames))

    @property
    def labels(self):
        return [fr.label for fr in self.frames]

    def axes(self) -> np.ndarray:
        """Row ``j`` is the Bloch direction whose ``+`` outcome frame ``j`` measures."""
        m_plus = self.basis[:, 0]
        rows = []
        for fr in self.frames:
            v = fr.u.conj().T @ m_plus
            proj = np.outer(v, v.conj())
            rows.append([np.trace(proj @ s).real for s in PAULIS])
        return np.array(rows)


def standard_quorum() -> Quorum:
    return Quorum(
        (
            UnitaryFrame(_quarter_turn(+1, SIGMA2), "u1"),
            UnitaryFrame(_quarter_turn(-1, SIGMA1), "u2"),
            UnitaryFrame(SIGMA0, "u3"),
        ),
        name="standard",
    )


def rotated_quorum(theta, phi) -> Quorum:
    """Quorum adapted to the local frame ``(sigma_w, sigma_theta, sigma_phi)``.

    Outcomes are read in the eigenbasis of ``sigma_w``.
    """
    _, s_theta, s_phi = rotated_pauli_basis(theta, phi)
    return Quorum(
        (
            UnitaryFrame(_quarter_turn(+1, s_phi), "u_theta"),
            UnitaryFrame(_quarter_turn(-1, s_theta), "u_phi"),
            UnitaryFrame(SIGMA0, "u_w"),
        ),
        basis=sigma_w_eigenbasis(theta, phi, gauge="canonical"),
        name=f"rotated({theta!r},{phi!r})",
    )


def tomogram(rho: QubitDensity, frame: UnitaryFrame, basis=None):
    """Outcome pair ``(<m+|u rho u^+|m+>, <m-|u rho u^+|m->)``."""
    basis = SIGMA0 if basis is None else np.asarray(basis)
    rotated = frame.u @ rho.matrix @ frame.u.conj().T
    diag = np.einsum("im,ij,jm->m", basis.conj(), rotated, basis).real
    return float(diag[0]), float(diag[1])


@dataclass(frozen=True, eq=False)
class Tomogram:
    quorum: Quorum
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(3, 2)
        if np.any(p < -1e-14) or np.any(p > 1 + 1e-14):
            raise InconsistentTomogram("probabilities outside [0, 1]")
        if np.max(np.abs(p.sum(axis=1) - 1)) > 1e-12:
            raise InconsistentTomogram("outcome pairs do not sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def to_dict(self) -> dict:
        return {
            "quorum": self.quorum.name,
            "frames": [
                {"label": fr.label, "u": _complex_to_list(fr.u)} for fr in self.quorum.frames
            ],
            "basis": _complex_to_list(self.quorum.basis),
            "probs": self.probs.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d) -> "Tomogram":
        frames = tuple(
            UnitaryFrame(_list_to_complex(fr["u"]), fr.get("label", "")) for fr in d["frames"]
        )
        basis = _list_to_complex(d["basis"]) if "basis" in d else SIGMA0
        q = Quorum(frames, basis=basis, name=d.get("quorum", "custom"))
        return cls(q, np.asarray(d["probs"], dtype=float))

    @classmethod
    def from_json(cls, text) -> "Tomogram":
        return cls.from_dict(json.loads(text))


def _complex_to_list(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _list_to_complex(rows):
    a = np.asarray(rows, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def tomograms(rho: QubitDensity, quorum: Quorum | None = None) -> Tomogram:
    quorum = standard_quorum() if quorum is None else quorum
    probs = [tomogram(rho, fr, quorum.basis) for fr in quorum.frames]
    return Tomogram(quorum, np.array(probs))


def reconstruct_bloch(t: Tomogram) -> BlochVector:
    """Invert the tomograms of a quorum: ``y = N^{-1} (2 W_+ - 1)``.

    For the standard quorum ``N`` is the identity and this is ``y_j = 2 W_j - 1``.
    """
    n = t.quorum.axes()
    rhs = 2 * t.probs[:, 0] - 1
    if np.allclose(n, np.eye(3), atol=1e-15, rtol=0):
        y = rhs
    else:
        y = np.linalg.solve(n, rhs)
    norm = float(np.linalg.norm(y))
    if norm > 1 + 1e-9:
        raise InconsistentTomogram(f"reconstructed |y| = {norm:.6g} > 1")
    if norm > 1:
        y = y / norm
    return BlochVector.from_array(y)


def bloch_from_tensor(g_jj, sign=1) -> float:
    """Bloch component from a diagonal tomographic tensor entry, ``sign * sqrt(1 - 1/G)``."""
    if g_jj < 1:
        raise InvalidTensor(f"tomographic tensor component {g_jj!r} < 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * float(np.sqrt(1 - 1 / g_jj))


# -- tomographic schemes -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralMap:
    """Scalar map ``w -> w~`` on (-1, 1) induced by a scheme ``F(rho)``.

    ``fn`` and ``dfn`` accept scalars or arrays.
    """

    name: str
    fn: Callable = field(repr=False)
    dfn: Callable = field(repr=False)
    params: dict = field(default_factory=dict)

    def __call__(self, w):
        return self.fn(w)

    def derivative(self, w):
        return self.dfn(w)


def identity_scheme() -> SpectralMap:
    return SpectralMap("identity", lambda w: np.asarray(w, dtype=float) * 1.0,
                       lambda w: np.ones_like(np.asarray(w, dtype=float)))


def flip_scheme() -> SpectralMap:
    """``F(rho) = sigma0 - rho``, i.e. ``w -> -w``."""
    return SpectralMap("flip", lambda w: -np.asarray(w, dtype=float),
                       lambda w: -np.ones_like(np.asarray(w, dtype=float)))


def exponential_scheme(beta) -> SpectralMap:
    """``F(rho) = exp(-beta rho) / Tr exp(-beta rho)``, giving ``w~ = -tanh(beta w / 2)``."""
    beta = float(beta)
    if beta == 0:
        raise DegenerateScheme("beta = 0 gives a constant map")

    def fn(w):
        return -np.tanh(beta * np.asarray(w, dtype=float) / 2)

    def dfn(w):
        return -beta / (2 * np.cosh(beta * np.asarray(w, dtype=float) / 2) ** 2)

    return SpectralMap("exp", fn, dfn, {"beta": beta})


def diagonal_state(w):
    return np.diag([(1 + w) / 2, (1 - w) / 2]).astype(complex)


def _w_of_diagonal(m, atol=1e-12):
    m = np.asarray(m)
    if m.shape != (2, 2):
        raise InvalidScheme("F must return a 2x2 matrix")
    if np.max(np.abs(m - m.conj().T)) > atol:
        raise InvalidScheme("F(rho) is not Hermitian")
    if abs(np.trace(m) - 1) > atol:
        raise InvalidScheme(f"Tr F(rho) = {np.trace(m).real!r} != 1")
    if abs(m[0, 1]) > atol:
        raise InvalidScheme("F(rho) is not diagonal in the eigenbasis of rho")
    d = m.diagonal().real
    if np.min(d) < -atol:
        raise InvalidScheme("F(rho) has a negative eigenvalue")
    return float(d[0] - d[1])


FD_STEP = 1e-5
MONOTONE_SAMPLES = 512


def scheme_from_matrix_function(F, name="custom", params=None) -> SpectralMap:
    """Spectral map of a matrix function ``F`` acting on diagonal states.

    The derivative is a central difference with step ``FD_STEP`` (one-sided
    within ``2 * FD_STEP`` of the endpoints).  ``F`` is screened for validity
    and strict monotonicity on ``MONOTONE_SAMPLES`` points of (-1, 1).
    """

    def scalar(w):
        return _w_of_diagonal(F(diagonal_state(float(w))))

    def fn(w):
        arr = np.asarray(w, dtype=float)
        out = np.array([scalar(x) for x in arr.ravel()]).reshape(arr.shape)
        return out if arr.ndim else float(out)

    def dscalar(w):
        h = FD_STEP
        if w > 1 - 2 * h:
            return (3 * scalar(w) - 4 * scalar(w - h) + scalar(w - 2 * h)) / (2 * h)
        if w < -1 + 2 * h:
            return (-3 * scalar(w) + 4 * scalar(w + h) - scalar(w + 2 * h)) / (2 * h)
        return (scalar(w + h) - scalar(w - h)) / (2 * h)

    def dfn(w):
        arr = np.asarray(w, dtype=float)
        out = np.array([dscalar(x) for x in arr.ravel()]).reshape(arr.shape)
        return out if arr.ndim else float(out)

    grid = np.linspace(-1, 1, MONOTONE_SAMPLES + 2)[1:-1]
    values = fn(grid)
    if np.any(np.abs(values) >= 1):
        raise InvalidScheme("F maps a mixed state onto a pure state")
    steps = np.diff(values)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise NonInvertibleScheme("sampled w -> w~ is not strictly monotone")
    return SpectralMap(name, fn, dfn, dict(params or {}))


def apply_scheme(scheme: SpectralMap, rho: QubitDensity) -> QubitDensity:
    """``F(rho)`` for a full qubit state: same eigenbasis, spectral parameter ``w~(w)``."""
    return density_from_signed(float(scheme(rho.w)), rho.theta, rho.phi)


def tomograms_of_bloch(y, quorum=None) -> Tomogram:
    return tomograms(density_from_bloch(y), quorum)
