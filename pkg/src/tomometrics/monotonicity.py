"""Numerical certification and falsification of operator monotonicity.

All verdicts are sample- or scan-limited.  A ``pass`` means no witness was
found, never that monotonicity was proved.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .geometry import cm_quadratic_batch
from .petz import PetzFunction
from .qubit import PAULIS, SIGMA0, random_isometry_kraus

LOEWNER_TOL = 1e-10
MATRIX_TOL = 1e-9
METRIC_TOL = 1e-9
BLOCK = 1024
MAX_WITNESSES = 16

PASS, VIOLATION, INCONCLUSIVE = "pass", "violation", "inconclusive"


@dataclass
class MonotonicityReport:
    function: str
    params: dict
    test: str
    verdict: str
    witnesses: list = field(default_factory=list)
    samples: int = 0
    seed: int | None = None
    tolerance: float = 0.0
    violations: int = 0
    skipped: int = 0
    note: str = ""

    def __post_init__(self):
        if (self.verdict == VIOLATION) != bool(self.witnesses):
            raise ValueError("verdict must be 'violation' exactly when witnesses exist")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def report_schema() -> dict:
    text = resources.files("tomometrics").joinpath("schemas/monotonicity_report.schema.json").read_text()
    return json.loads(text)


def _no_witness_verdict(f: PetzFunction):
    # a failed search for a violation that is known to exist elsewhere is not a pass
    return INCONCLUSIVE if f.operator_monotone is False else PASS


def _block_rng(seed, block, stream):
    return np.random.default_rng([seed, stream, block])


def _cplx(m):
    m = np.asarray(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _from_cplx(rows):
    a = np.asarray(rows, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


# -- Loewner scan -------------------------------------------------------------------


def loewner_scan(f: PetzFunction, region=(-10.0, 10.0, 0.0, 2.0), grid=(400, 200),
                 tol=LOEWNER_TOL) -> MonotonicityReport:
    """Scan ``Im f(z)`` on a grid in the upper half-plane.

    ``region`` is ``(re_min, re_max, im_min, im_max)``; the lower imaginary
    edge is excluded.  Points in ``f``'s declared singular set, or where the
    evaluator is not finite, are skipped and counted.
    """
    if f.complex is None:
        raise ValueError(f"{f.label} has no analytic extension to scan")
    re_min, re_max, im_min, im_max = map(float, region)
    if im_max <= 0 or im_min < 0:
        raise ValueError("the scan region must lie in the upper half-plane")
    nx, ny = grid
    xs = np.linspace(re_min, re_max, nx)
    ys = np.linspace(im_min, im_max, ny + 1)[1:]
    z = xs[None, :] + 1j * ys[:, None]
    skip = np.zeros(z.shape, dtype=bool)
    if f.singular is not None:
        skip |= f.singular(z)
    with np.errstate(all="ignore"):
        values = f.complex(np.where(skip, 1j, z))
    skip |= ~np.isfinite(values)
    im = np.where(skip, np.inf, values.imag)
    bad = np.argwhere(im < -tol)
    order = np.argsort(im[tuple(bad.T)])[:MAX_WITNESSES]
    witnesses = [
        {"z": [float(z[i, j].real), float(z[i, j].imag)], "im_f": float(im[i, j])}
        for i, j in bad[order]
    ]
    verdict = VIOLATION if witnesses else _no_witness_verdict(f)
    return MonotonicityReport(
        f.id, dict(f.params), "loewner", verdict, witnesses, int(z.size), None, tol,
        violations=int(len(bad)), skipped=int(skip.sum()),
        note=f"grid {nx}x{ny} on Re[{re_min},{re_max}] x Im({im_min},{im_max}]",
    )


def verify_loewner_witness(f: PetzFunction, z, tol=LOEWNER_TOL) -> bool:
    z = complex(*z) if not isinstance(z, complex) else z
    return bool(z.imag > 0 and np.imag(f.complex(np.array([z]))[0]) < -tol)


# -- matrix monotonicity ------------------------------------------------------------


def _haar_unitaries(rng, n, dim):
    g = rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def _apply_function(f, m):
    lam, v = np.linalg.eigh(m)
    return (v * f(lam)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _matrix_block(dim, seed, block):
    """Sample ``BLOCK`` ordered pairs ``A <= B`` of positive definite matrices."""
    rng = _block_rng(seed, block, 1)
    n = BLOCK
    u = _haar_unitaries(rng, n, dim)
    lam = 10.0 ** rng.uniform(-2, 2, (n, dim))
    a = (u * lam[:, None, :]) @ np.conj(np.swapaxes(u, -1, -2))
    m = rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))
    rank = rng.integers(1, dim + 1, n)
    m = m * (np.arange(dim)[None, :, None] < rank[:, None, None])
    p = np.conj(np.swapaxes(m, -1, -2)) @ m
    p /= np.linalg.norm(p, ord=2, axis=(-2, -1))[:, None, None]
    p *= (10.0 ** rng.uniform(-3, 1, n))[:, None, None]
    b = a + p
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2))), 0.5 * (b + np.conj(np.swapaxes(b, -1, -2)))


def matrix_monotonicity_test(f: PetzFunction, dim=2, samples=1000, seed=0,
                             tol=MATRIX_TOL) -> MonotonicityReport:
    """Random search for ``A <= B`` with ``f(B) - f(A)`` not positive semidefinite."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    witnesses, violations, done, block = [], 0, 0, 0
    while done < samples:
        a, b = _matrix_block(dim, seed, block)
        take = min(BLOCK, samples - done)
        a, b = a[:take], b[:take]
        with np.errstate(all="ignore"):
            diff = _apply_function(f, b) - _apply_function(f, a)
            mins = np.linalg.eigvalsh(0.5 * (diff + np.conj(np.swapaxes(diff, -1, -2))))[:, 0]
        hits = np.flatnonzero(mins < -tol)
        violations += len(hits)
        for i in hits[: MAX_WITNESSES - len(witnesses)]:
            witnesses.append({"index": int(done + i), "A": _cplx(a[i]), "B": _cplx(b[i]),
                              "min_eig": float(mins[i])})
        done += take
        block += 1
    verdict = VIOLATION if witnesses else _no_witness_verdict(f)
    return MonotonicityReport(f.id, dict(f.params), f"matrix-{dim}", verdict, witnesses,
                              samples, seed, tol, violations=violations,
                              note="sample-limited random search")


def verify_matrix_witness(f: PetzFunction, A, B, tol=MATRIX_TOL) -> bool:
    """True when ``B - A`` is PSD (to 1e-12) and ``f(B) - f(A)`` has an eigenvalue below ``-tol``."""
    A = _from_cplx(A) if not isinstance(A, np.ndarray) else A
    B = _from_cplx(B) if not isinstance(B, np.ndarray) else B
    if np.linalg.eigvalsh(B - A)[0] < -1e-12:
        return False
    diff = _apply_function(f, B) - _apply_function(f, A)
    return bool(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))[0] < -tol)


# -- metric monotonicity under CPTP maps --------------------------------------------

PURE_GUARD = 1e-6


def _metric_block(seed, block):
    """States, tangents and channels for one block of the CPTP test."""
    rng = _block_rng(seed, block, 2)
    n = BLOCK
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = (1 - PURE_GUARD) * rng.random(n) ** (1 / 3)
    y = v * r[:, None]
    x = rng.standard_normal((n, 3))
    paulis = np.stack(PAULIS)
    rho = 0.5 * (SIGMA0 + np.einsum("nk,kij->nij", y, paulis))
    tangent = 0.5 * np.einsum("nk,kij->nij", x, paulis)
    kraus = random_isometry_kraus(rng, n)
    return rho, tangent, kraus


def _apply_kraus(kraus, m):
    kd = np.conj(np.swapaxes(kraus, -1, -2))
    return np.einsum("nkij,njl,nklm->nim", kraus, m, kd)


def metric_monotonicity_test(f: PetzFunction, samples=10_000, seed=0,
                             tol=METRIC_TOL) -> MonotonicityReport:
    """Check ``g_{phi(rho)}(phi(A), phi(A)) <= g_rho(A, A)`` on random triples.

    A triple counts as violating when the left side exceeds the right side by
    more than ``tol * max(1, g_rho(A, A))``.  Triples whose output state is
    within ``PURE_GUARD`` of the boundary are dropped and replaced by the next
    draw; the number dropped is reported as ``skipped``.
    """
    witnesses, violations, done, skipped, block = [], 0, 0, 0, 0
    while done < samples:
        rho, a, kraus = _metric_block(seed, block)
        out_rho = _apply_kraus(kraus, rho)
        out_a = _apply_kraus(kraus, a)
        out_rho = 0.5 * (out_rho + np.conj(np.swapaxes(out_rho, -1, -2)))
        w_out = np.sqrt(np.maximum(2 * np.einsum("nij,nji->n", out_rho, out_rho).real - 1, 0))
        keep = np.flatnonzero(w_out < 1 - PURE_GUARD)
        skipped += BLOCK - len(keep)
        keep = keep[: samples - done]
        rhs = cm_quadratic_batch(f, rho[keep], a[keep])
        lhs = cm_quadratic_batch(f, out_rho[keep], out_a[keep])
        excess = lhs - rhs
        hits = np.flatnonzero(excess > tol * np.maximum(1.0, rhs))
        violations += len(hits)
        for i in hits[: MAX_WITNESSES - len(witnesses)]:
            k = keep[i]
            witnesses.append({
                "index": int(block * BLOCK + k),
                "rho": _cplx(rho[k]), "A": _cplx(a[k]),
                "kraus": [_cplx(kk) for kk in kraus[k]],
                "lhs": float(lhs[i]), "rhs": float(rhs[i]),
            })
        done += len(keep)
        block += 1
    verdict = VIOLATION if witnesses else _no_witness_verdict(f)
    return MonotonicityReport(f.id, dict(f.params), "cptp", verdict, witnesses, samples, seed,
                              tol, violations=violations, skipped=skipped,
                              note="sample-limited Monte Carlo over 2-Kraus qubit channels")


def verify_metric_witness(f: PetzFunction, witness, tol=METRIC_TOL) -> bool:
    rho = _from_cplx(witness["rho"])[None]
    a = _from_cplx(witness["A"])[None]
    kraus = np.stack([_from_cplx(k) for k in witness["kraus"]])[None]
    rhs = cm_quadratic_batch(f, rho, a)[0]
    out_rho = _apply_kraus(kraus, rho)
    lhs = cm_quadratic_batch(f, 0.5 * (out_rho + np.conj(np.swapaxes(out_rho, -1, -2))),
                             _apply_kraus(kraus, a))[0]
    return bool(lhs - rhs > tol * max(1.0, rhs))
