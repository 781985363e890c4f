import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tomometrics.errors import DomainError
from tomometrics.petz import (
    catalog,
    exp_scheme_h_of_w,
    from_callable,
    parse_function_spec,
    symmetry_residual,
)

mp.mp.dps = 40
Q_GRID = [0.1 * k for k in range(1, 10)]
T_GRID = np.logspace(-3, 3, 601)


def mp_vn(t):
    t = mp.mpf(t)
    return (t - 1) / mp.log(t)


def mp_tsallis(t, q):
    t, q = mp.mpf(t), mp.mpf(q)
    return q * (1 - q) * (t - 1) ** 2 / ((t**q - 1) * (t ** (1 - q) - 1))


def mp_exp_h(t, beta):
    w = (1 - mp.mpf(t)) / (1 + mp.mpf(t))
    return beta * w * (1 - w) / mp.sinh(beta * w)


@pytest.mark.parametrize("t", [1e-3, 0.2, 0.999, 1.5, 40.0, 1e3])
def test_von_neumann_against_mpmath(t):
    assert catalog("vn")(t) == pytest.approx(float(mp_vn(t)), rel=1e-13)


@pytest.mark.parametrize("q", Q_GRID)
def test_tsallis_against_mpmath(q):
    for t in (1e-3, 0.3, 0.9999, 3.0, 700.0):
        assert catalog("tsallis", q)(t) == pytest.approx(float(mp_tsallis(t, q)), rel=1e-12)


@pytest.mark.parametrize("beta", [0.5, 2.0, 5.0])
def test_exp_scheme_against_mpmath(beta):
    h = catalog("exp-scheme", beta)
    for t in (1e-3, 0.25, 0.9999999, 4.0, 1e3):
        assert h(t) == pytest.approx(float(mp_exp_h(t, beta)), rel=1e-12)


def test_values_at_one():
    assert catalog("vn")(1.0) == 1.0
    assert catalog("vn")(1 + 1e-8) == pytest.approx(1 + 0.5e-8, rel=1e-15)
    assert catalog("vn")(1 - 1e-8) == pytest.approx(1 - 0.5e-8, rel=1e-15)
    for q in Q_GRID:
        assert catalog("tsallis", q)(1.0) == 1.0
    assert catalog("exp-scheme", 3.0)(1.0) == 1.0
    assert catalog("exp-scheme", 3.0, literal=True)(1.0) == 0.25


def test_tsallis_half_at_four():
    assert catalog("tsallis", 0.5)(4.0) == pytest.approx(2.25, rel=1e-15)


def test_literal_is_a_quarter_of_canonical():
    t = np.logspace(-2, 2, 50)
    ratio = catalog("exp-scheme", 2.0)(t) / catalog("exp-scheme", 2.0, literal=True)(t)
    assert np.allclose(ratio, 4, rtol=1e-15)
    w = (1 - t) / (1 + t)
    assert np.allclose(catalog("exp-scheme", 2.0, literal=True)(t), exp_scheme_h_of_w(2.0, w, literal=True))


def test_symmetry_of_symmetric_members():
    fs = [catalog("vn"), catalog("power", 0.25)] + [catalog("tsallis", q) for q in Q_GRID]
    fs += [catalog("exp-scheme", b) for b in (0.5, 1.0, 2.0, 5.0)]
    for f in fs:
        assert np.max(np.abs(symmetry_residual(f, T_GRID))) < 1e-12, f.label
    h = catalog("exp-scheme", 2.0)
    assert np.max(np.abs(symmetry_residual(h, [0.1, 0.5, 2, 10]))) < 1e-12


def test_power_asymmetry():
    assert symmetry_residual(catalog("power", 0.5), 4.0) == pytest.approx(3.0)
    assert not catalog("power", 0.3).symmetric and catalog("power", 0.25).symmetric


@given(st.floats(0.05, 0.95), st.floats(1e-3, 1e3))
def test_complex_evaluator_agrees_on_the_real_axis(q, t):
    for f in (catalog("vn"), catalog("tsallis", q), catalog("power", q / 2), catalog("exp-scheme", 3 * q)):
        z = f.complex(np.array([t + 0j]))[0]
        assert z.real == pytest.approx(f(t), rel=1e-13, abs=1e-300)
        assert abs(z.imag) <= 1e-13 * abs(z.real)


def test_exp_complex_matches_mpmath_off_axis():
    h = catalog("exp-scheme", 2.0)

    def ref(z):
        z = mp.mpc(z)
        beta = 2
        return 2 * beta * z * (1 - z) / ((1 + z) ** 2 * mp.sinh(beta * (1 - z) / (1 + z)))

    for z in (-1 + 0.05j, -0.9 + 0.1j, 0.3 + 1.7j, 5 + 0.01j):
        got = h.complex(np.array([z]))[0]
        want = complex(ref(z))
        assert abs(got - want) <= 1e-11 * abs(want)


def test_exp_singular_set():
    mask = catalog("exp-scheme", 2.0).singular
    assert mask(np.array([-1 + 0j]))[0]
    # sinh(2(1-z)/(1+z)) = 0 when 2(1-z)/(1+z) = i pi
    z = (2 - 1j * np.pi) / (2 + 1j * np.pi)
    assert mask(np.array([z]))[0]
    assert not mask(np.array([0.5 + 0.5j]))[0]


def test_catalog_errors():
    with pytest.raises(DomainError):
        catalog("tsallis", 1.0)
    with pytest.raises(DomainError):
        catalog("power", 0.7)
    with pytest.raises(DomainError):
        catalog("exp-scheme", 0.0)
    with pytest.raises(DomainError):
        catalog("nonsense")
    with pytest.raises(DomainError):
        catalog("vn", 1.0)


def test_parse_specs():
    assert parse_function_spec("vn").id == "von-neumann"
    assert parse_function_spec("tsallis:0.5").params == {"q": 0.5}
    assert parse_function_spec("exp-scheme:2").params == {"beta": 2.0}
    assert parse_function_spec("exp-scheme-literal:2")(1.0) == 0.25
    assert parse_function_spec("power:0.25").label == "power:0.25"


def test_scaling_and_callables():
    f = catalog("vn").scaled(3.0)
    assert f(2.0) == pytest.approx(3 * catalog("vn")(2.0))
    with pytest.raises(DomainError):
        catalog("vn").scaled(-1)
    g = from_callable(lambda t: np.sqrt(t), "sqrt")
    assert g(4.0) == 2.0 and g.complex is None


def test_csv_export():
    text = catalog("power", 0.5).to_csv([1.0, 2.0])
    assert text.splitlines() == ["t,f", "1,1", "2,2"]
