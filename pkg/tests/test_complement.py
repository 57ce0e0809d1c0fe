import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dirext.complement import (
    assemble_f,
    contraction_apply,
    energy_pm,
    gamma_decompose,
    l2_pm,
    lemma_gg_check,
    norm_equivalence_report,
    pair_from_cplus,
)
from dirext.errors import NotInSpaceError
from dirext.fixtures import cantor_extension, hat, kplus_profile, random_contraction, random_gap_step_profile
from dirext.functions import (
    ConstantProfile,
    Contraction,
    EmbeddedH1,
    H1Function,
    PiecewiseLinearProfile,
    PolynomialProfile,
)

PARABOLA = PolynomialProfile((0.0, 1.0, -1.0))
XG = np.concatenate([np.linspace(-5.0, -0.05, 50), np.linspace(0.05, 5.0, 50)])


def test_two_line_pair_closed_form(twoline, e25):
    # c+ = (2, 0) on the two half-lines gives c- = (0, -2) and f = example 25
    elem = pair_from_cplus(twoline, [ConstantProfile(2.0), ConstantProfile(0.0)])
    s = np.array([0.0])
    assert elem.cminus_profiles[0].value(s)[0] == pytest.approx(0.0, abs=1e-12)
    assert elem.cminus_profiles[1].value(s)[0] == pytest.approx(-2.0, abs=1e-10)
    np.testing.assert_allclose(assemble_f(elem).value(XG), e25.value(XG), atol=1e-10)


def test_two_line_decomposition_recovers_pair(twoline, e25):
    dec = gamma_decompose(twoline, e25)
    s = np.array([0.0])
    got = [dec.profiles(sign)[n].value(s)[0] for sign in "+-" for n in (0, 1)]
    np.testing.assert_allclose(got, [2.0, 0.0, 0.0, -2.0], atol=1e-10)


def test_two_line_coefficient_norms(twoline):
    elem = pair_from_cplus(twoline, [ConstantProfile(2.0), None])
    for sign in "+-":
        assert energy_pm(twoline, elem.profiles(sign), sign).value == pytest.approx(0.0, abs=1e-14)
        assert l2_pm(twoline, elem.profiles(sign), sign).value == pytest.approx(2.0, abs=1e-8)


def test_norm_report_two_line(twoline, e25):
    rep = norm_equivalence_report(twoline, e25)
    assert rep["E1"] == pytest.approx(1.5, abs=1e-6)
    for sign in "+-":
        assert rep["signs"][sign]["Epm1"] == pytest.approx(2.0, abs=1e-6)
    assert rep["pass"]


def test_cantor_pair_coupling_and_orthogonality(cantor):
    elem = pair_from_cplus(cantor, [PARABOLA])
    assert elem.coupling_residual() < 1e-12
    assert elem.c2_residual() < 1e-8


def test_cantor_round_trip(cantor):
    elem = pair_from_cplus(cantor, [PARABOLA])
    f = assemble_f(elem)
    back = gamma_decompose(cantor, f)
    s = np.linspace(0.0, 1.0, 101)
    for sign in "+-":
        np.testing.assert_allclose(back.profiles(sign)[0].value(s), elem.profiles(sign)[0].value(s), atol=1e-6)


@pytest.mark.parametrize("sign", ["+", "-"])
def test_energy_routes_agree(cantor, sign):
    p = pair_from_cplus(cantor, [PARABOLA]).profiles(sign)
    x = energy_pm(cantor, p, sign, route="x").value
    s = energy_pm(cantor, p, sign, route="s").value
    assert x == pytest.approx(s, rel=1e-6)


def test_coefficient_energies_equal_for_both_signs(cantor):
    # both equal half the W energy of f
    elem = pair_from_cplus(cantor, [PARABOLA])
    ep, em = (energy_pm(cantor, elem.profiles(s), s).value for s in "+-")
    assert ep == pytest.approx(em, rel=1e-8)
    assert ep == pytest.approx(0.64112342676, rel=1e-8)


def test_decompose_rejects_non_member(twoline):
    with pytest.raises(NotInSpaceError):
        gamma_decompose(twoline, EmbeddedH1(twoline, hat()))


@settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.25, 0.5, 2.0]))
def test_norm_equivalence_random(seed, alpha):
    ext = cantor_extension(alpha=alpha, depth=8)
    prof = random_gap_step_profile(np.random.default_rng(seed))
    assert norm_equivalence_report(ext, pair_from_cplus(ext, [prof]))["pass"]


@settings(max_examples=6, deadline=None)
@given(st.lists(st.floats(-2.0, 2.0), min_size=2, max_size=4))
def test_round_trip_random_piecewise_linear(values):
    ext = cantor_extension(alpha=0.5, depth=8)
    nodes = np.linspace(0.0, 1.0, len(values) + 1)
    prof = PiecewiseLinearProfile(tuple(nodes), (*values, 0.0))
    elem = pair_from_cplus(ext, [prof])
    back = gamma_decompose(ext, assemble_f(elem))
    s = np.linspace(0.0, 1.0, 41)
    scale = 1.0 + max(abs(v) for v in values)
    np.testing.assert_allclose(back.profiles("+")[0].value(s), prof.value(s), atol=1e-4 * scale)


@pytest.mark.parametrize(
    "g",
    [H1Function("indicator", {"lo": 0.0, "hi": 1.0}), hat(), H1Function("gaussian", {"center": 0.0, "width": 1.0})],
    ids=["indicator", "hat", "gaussian"],
)
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_integral_lemma(g, lam):
    r = lemma_gg_check(g, lam)
    assert r["pass"]
    assert r["lhs_left"] <= r["bound"]
    assert r["lhs_right"] == pytest.approx(r["lhs_left"], rel=1e-6)


def test_integral_lemma_indicator_value():
    # G = e^{-x}(e^x - 1) on [0, 1] and (e - 1) e^{-x} beyond: total e^{-1}
    r = lemma_gg_check(H1Function("indicator", {"lo": 0.0, "hi": 1.0}), 1.0)
    assert r["lhs_left"] == pytest.approx(math.exp(-1.0), abs=1e-4)


def test_integral_lemma_rejects_lambda():
    with pytest.raises(ValueError):
        lemma_gg_check(hat(), 0.0)


@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize(
    "phi", [Contraction.clamp(-0.3, 0.7), Contraction.clamp(0.0, 0.1), Contraction.identity()], ids=str
)
def test_contraction_never_increases_energy(cantor, phi, sign):
    _, r = contraction_apply(cantor, {0: PARABOLA}, phi, sign)
    assert r["pass"]
    assert r["energy_after"] <= r["energy_before"] + 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_random_contractions_fix_zero_and_are_one_lipschitz(seed):
    phi = random_contraction(np.random.default_rng(seed))
    y = np.linspace(-3.0, 3.0, 301)
    assert phi(np.array([0.0]))[0] == 0.0
    assert np.max(np.abs(np.diff(phi(y)))) <= (y[1] - y[0]) * (1 + 1e-12)


def test_unit_contraction_leaves_complement(cantor):
    f = pair_from_cplus(cantor, [kplus_profile(2.0)]).f
    _, rep = contraction_apply(cantor, f, Contraction.unit())
    assert rep["input_oc_residual"] < 1e-8
    assert rep["max_oc_residual"] > 0.01
