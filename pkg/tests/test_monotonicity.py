import json

import jsonschema
import mpmath as mp
import numpy as np
import pytest

from tomometrics import monotonicity as mono
from tomometrics.geometry import cm_quadratic_batch
from tomometrics.petz import catalog, from_callable

EXP2_WITNESS = (-1.0, 0.05)
EXP2_WITNESS_IM = -851.834227437  # mpmath, 40 digits, rounded


def identity_fn():
    return from_callable(lambda t: np.asarray(t, dtype=float), "identity", operator_monotone=True)


def validate(report):
    jsonschema.validate(json.loads(report.to_json()), mono.report_schema())


# -- Loewner ---------------------------------------------------------------------------


def test_von_neumann_at_i():
    z = complex(catalog("vn").complex(np.array([1j]))[0])
    assert z == pytest.approx((2 / np.pi) * (1 + 1j), rel=1e-15)


def test_pinned_witness_against_mpmath():
    mp.mp.dps = 40
    z = mp.mpc(*EXP2_WITNESS)
    ref = 2 * 2 * z * (1 - z) / ((1 + z) ** 2 * mp.sinh(2 * (1 - z) / (1 + z)))
    assert float(ref.imag) == pytest.approx(EXP2_WITNESS_IM, abs=1e-9)
    h = catalog("exp-scheme", 2.0)
    assert h.complex(np.array([complex(*EXP2_WITNESS)]))[0].imag == pytest.approx(EXP2_WITNESS_IM, rel=1e-12)
    assert mono.verify_loewner_witness(h, EXP2_WITNESS)


def test_exp_scheme_scan_finds_witness_near_minus_one():
    h = catalog("exp-scheme", 2.0)
    rep = mono.loewner_scan(h, (-1.2, -0.8, 0.0, 0.2))
    assert rep.verdict == mono.VIOLATION
    assert all(abs(complex(*w["z"]) + 1) < 0.25 for w in rep.witnesses)
    assert all(mono.verify_loewner_witness(h, w["z"]) for w in rep.witnesses)
    validate(rep)


@pytest.mark.parametrize("f", [catalog("vn"), catalog("power", 0.0), catalog("power", 0.25),
                               catalog("power", 0.5), catalog("tsallis", 0.1),
                               catalog("tsallis", 0.5), catalog("tsallis", 0.9)],
                         ids=lambda f: f.label)
def test_monotone_functions_pass_the_wide_scan(f):
    rep = mono.loewner_scan(f, (-10, 10, 0, 2), (400, 200))
    assert rep.verdict == mono.PASS and rep.samples == 80_000
    validate(rep)


def test_scan_without_witness_on_non_monotone_function_is_inconclusive():
    rep = mono.loewner_scan(catalog("exp-scheme", 2.0), (0.5, 1.5, 0, 0.3), (40, 20))
    assert rep.verdict == mono.INCONCLUSIVE and not rep.witnesses


def test_scan_validation():
    with pytest.raises(ValueError):
        mono.loewner_scan(catalog("vn"), (-1, 1, -1, 1))
    with pytest.raises(ValueError):
        mono.loewner_scan(from_callable(np.sqrt), (-1, 1, 0, 1))


def test_singular_points_are_skipped():
    rep = mono.loewner_scan(catalog("vn"), (-1, 1, 0, 1), (3, 2))
    assert rep.skipped == 0
    mask_hit = mono.loewner_scan(catalog("exp-scheme", 2.0), (-1.2, -0.8, 0, 0.2))
    assert mask_hit.skipped > 0


# -- matrix monotonicity ---------------------------------------------------------------


def test_identity_never_violates():
    for dim in (2, 3):
        rep = mono.matrix_monotonicity_test(identity_fn(), dim, 2000, seed=3)
        assert rep.verdict == mono.PASS


def test_classic_square_witness():
    sq = catalog("square-control")
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    B = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert np.linalg.eigvalsh(B - A).min() >= 0
    assert np.linalg.det(B @ B - A @ A) == pytest.approx(-1)
    assert mono.verify_matrix_witness(sq, A, B)
    assert not mono.verify_matrix_witness(catalog("vn"), A + np.eye(2), B + np.eye(2))


def test_square_violation_found_and_replays():
    sq = catalog("square-control")
    rep = mono.matrix_monotonicity_test(sq, 2, 1000, seed=7)
    assert rep.verdict == mono.VIOLATION
    for w in rep.witnesses:
        assert mono.verify_matrix_witness(sq, w["A"], w["B"])
        B_minus_A = mono._from_cplx(w["B"]) - mono._from_cplx(w["A"])
        assert np.linalg.eigvalsh(B_minus_A)[0] >= -1e-12
    validate(rep)


def test_von_neumann_matrix_pass():
    rep = mono.matrix_monotonicity_test(catalog("vn"), 2, 10_000, seed=0)
    assert rep.verdict == mono.PASS and rep.violations == 0
    assert mono.matrix_monotonicity_test(catalog("vn"), 3, 2000, seed=0).verdict == mono.PASS


def test_exp_scheme_matrix_search():
    rep = mono.matrix_monotonicity_test(catalog("exp-scheme", 5.0), 2, 5000, seed=0)
    assert rep.verdict in (mono.VIOLATION, mono.INCONCLUSIVE)
    for w in rep.witnesses:
        assert mono.verify_matrix_witness(catalog("exp-scheme", 5.0), w["A"], w["B"])


def test_replay_determinism():
    sq = catalog("square-control")
    a = mono.matrix_monotonicity_test(sq, 3, 1500, seed=11)
    b = mono.matrix_monotonicity_test(sq, 3, 1500, seed=11)
    assert a.to_json() == b.to_json()
    # counter-based blocks: a longer run starts with the same samples
    c = mono.matrix_monotonicity_test(sq, 3, 3000, seed=11)
    assert c.witnesses[: len(a.witnesses)] == a.witnesses


def test_scale_invariance_of_verdicts():
    canon, literal = catalog("exp-scheme", 2.0), catalog("exp-scheme", 2.0, literal=True)
    box = (-1.2, -0.8, 0.0, 0.2)
    assert mono.loewner_scan(canon, box).verdict == mono.loewner_scan(literal, box).verdict
    for f in (catalog("square-control"), catalog("vn"), catalog("exp-scheme", 5.0)):
        a = mono.matrix_monotonicity_test(f, 2, 2000, seed=5)
        b = mono.matrix_monotonicity_test(f.scaled(7.5), 2, 2000, seed=5)
        assert a.verdict == b.verdict
    c = mono.matrix_monotonicity_test(catalog("exp-scheme", 5.0, literal=True), 2, 2000, seed=5)
    assert c.verdict == mono.matrix_monotonicity_test(catalog("exp-scheme", 5.0), 2, 2000, seed=5).verdict


def test_dim_validation():
    with pytest.raises(ValueError):
        mono.matrix_monotonicity_test(catalog("vn"), 4, 10, 0)


# -- metric monotonicity under channels ------------------------------------------------


def test_unitary_channel_gives_equality(rng):
    f = catalog("tsallis", 0.4)
    rho, a, _ = mono._metric_block(0, 0)
    theta = 0.83
    u = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], dtype=complex)
    kraus = np.broadcast_to(np.stack([u, np.zeros((2, 2))]), (len(rho), 2, 2, 2))
    out_rho, out_a = mono._apply_kraus(kraus, rho), mono._apply_kraus(kraus, a)
    lhs, rhs = cm_quadratic_batch(f, out_rho, out_a), cm_quadratic_batch(f, rho, a)
    assert np.allclose(lhs, rhs, rtol=1e-9)


def test_von_neumann_cptp_pass():
    rep = mono.metric_monotonicity_test(catalog("vn"), 10_000, seed=0)
    assert rep.verdict == mono.PASS and rep.samples == 10_000
    validate(rep)


def test_exp_scheme_cptp_search_is_deterministic():
    h = catalog("exp-scheme", 5.0)
    a = mono.metric_monotonicity_test(h, 20_000, seed=1)
    b = mono.metric_monotonicity_test(h, 20_000, seed=1)
    assert a.to_json() == b.to_json()
    assert a.verdict in (mono.VIOLATION, mono.INCONCLUSIVE)
    assert all(mono.verify_metric_witness(h, w) for w in a.witnesses)
    validate(a)


def test_report_contract():
    with pytest.raises(ValueError):
        mono.MonotonicityReport("x", {}, "cptp", mono.VIOLATION, [], 1, 0, 1e-9)
    with pytest.raises(ValueError):
        mono.MonotonicityReport("x", {}, "cptp", mono.PASS, [{"a": 1}], 1, 0, 1e-9)
    bad = {"function": "x", "params": {}, "test": "nope", "verdict": "pass", "witnesses": [],
           "samples": 1, "seed": 0, "tolerance": 1e-9}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, mono.report_schema())
