import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirext.errors import ConfigError
from dirext.fixtures import (
    cantor_scale,
    constant_cascade_scale,
    harmonic_squares_scale,
    standard_cantor_block,
)
from dirext.geometry import (
    Cascade,
    IntervalSpec,
    ScaleFunction,
    cantor_cdf,
    cantor_cdf_exact,
    cantor_cdf_inv,
    validate_scale,
)

THIRD = 1.0 / 3.0
# a one-ulp change of the argument moves c by up to ulp**(log2/log3) ~ 1e-10
HOLDER_TOL = 1e-9


# known values of the ternary Cantor function
@pytest.mark.parametrize(
    ("y", "expected"),
    [(0.0, 0.0), (1.0, 1.0), (0.25, 1 / 3), (0.75, 2 / 3), (0.5, 0.5), (1 / 9, 0.25), (2 / 3, 0.5),
     (0.1, 0.2), (0.9, 0.8), (-3.0, 0.0), (7.0, 1.0)],
)
def test_cantor_cdf_known_values(y, expected):
    assert cantor_cdf(y, THIRD) == pytest.approx(expected, abs=HOLDER_TOL)


def test_cantor_cdf_gap_values_are_dyadic_and_resolved():
    y = np.array([0.5, 0.2, 0.8, 0.05])
    v, resolved = cantor_cdf(y, THIRD, return_resolved=True)
    assert resolved.all()
    np.testing.assert_array_equal(v, [0.5, 0.25, 0.75, 0.125])


def test_cantor_cdf_inverse_endpoints_exact():
    np.testing.assert_array_equal(cantor_cdf_inv(np.array([0.0, 1.0]), THIRD), [0.0, 1.0])


def test_cantor_cdf_endpoints_exact():
    v, resolved = cantor_cdf(np.array([0.0, 1.0]), THIRD, return_resolved=True)
    np.testing.assert_array_equal(v, [0.0, 1.0])
    assert not resolved.any()


def test_cantor_cdf_uniform_case_is_identity():
    y = np.linspace(0, 1, 33)
    np.testing.assert_allclose(cantor_cdf(y, 0.5), y, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0))
def test_cantor_cdf_self_similar(y):
    assert cantor_cdf(y / 3.0, THIRD) == pytest.approx(0.5 * cantor_cdf(y, THIRD), abs=HOLDER_TOL)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0))
def test_cantor_cdf_symmetric(y):
    assert cantor_cdf(1.0 - y, THIRD) == pytest.approx(1.0 - cantor_cdf(y, THIRD), abs=HOLDER_TOL)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=30), st.floats(0.05, 0.5))
def test_cantor_cdf_monotone(ys, q):
    ys = np.sort(ys)
    v = cantor_cdf(ys, q)
    assert np.all(np.diff(v) >= -1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0))
def test_cantor_cdf_inverse_is_right_inverse(v):
    y = cantor_cdf_inv(v, THIRD)
    assert cantor_cdf(y, THIRD) == pytest.approx(v, abs=HOLDER_TOL)


@pytest.mark.parametrize(
    ("y", "expected"),
    [(Fraction(1, 3), Fraction(1, 2)), (Fraction(1, 9), Fraction(1, 4)), (Fraction(2, 3), Fraction(1, 2)),
     (Fraction(1, 2), Fraction(1, 2)), (Fraction(7, 9), Fraction(3, 4))],
)
def test_cantor_cdf_exact_in_gap_closure(y, expected):
    value, bound = cantor_cdf_exact(y, Fraction(1, 3))
    assert value == expected and bound == 0


def test_cantor_cdf_exact_bound_contains_value_off_gaps():
    # 1/4 lies in the Cantor set and never reaches a gap
    value, bound = cantor_cdf_exact(Fraction(1, 4), Fraction(1, 3), generations=30)
    assert bound > 0
    assert abs(value - Fraction(1, 3)) <= bound


@pytest.mark.parametrize(
    ("x", "expected"),
    [(Fraction(1, 3), Fraction(1, 2)), (Fraction(1, 9), Fraction(1, 4)), (Fraction(2, 3), Fraction(1, 2)),
     (Fraction(0), Fraction(0)), (Fraction(5), Fraction(1)), (Fraction(-2), Fraction(0))],
)
def test_darning_j_exact(x, expected):
    j = cantor_scale().darning_j(x)
    assert isinstance(j, Fraction)
    assert j == expected


def test_scale_function_adds_identity_and_singular_part():
    sf = cantor_scale()
    x = np.array([-2.0, 0.25, 0.5, 3.0])
    np.testing.assert_allclose(sf.eval_t(x), x + np.array([0.0, 1 / 3, 0.5, 1.0]), atol=1e-14)


def test_scale_inverse_round_trip():
    sf = cantor_scale()
    x = np.linspace(-2.0, 3.0, 101)
    np.testing.assert_allclose(sf.eval_t_inv(sf.eval_t(x)), x, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0))
def test_j_inv_is_generalized_inverse(s):
    sf = cantor_scale()
    x = sf.j_inv(np.array([s]))
    assert sf.darning_j(x)[0] == pytest.approx(s, abs=1e-9)
    # no smaller point reaches s
    assert sf.darning_j(x - 1e-6)[0] <= s + 1e-12


def test_gaps_and_cover_partition_block():
    sf = cantor_scale(depth=6)
    g = sf.gaps(4)
    inner = g.gaps[np.isfinite(g.gaps).all(axis=1)]
    inner = inner[(inner[:, 0] >= 0) & (inner[:, 1] <= 1)]
    assert len(inner) == 2**4 - 1
    assert g.cover_mass.sum() == pytest.approx(1.0)
    assert len(g.cover) == 2**4
    np.testing.assert_allclose(g.cover[:, 1] - g.cover[:, 0], 3.0**-4)


def test_block_validation_rejects_bad_fraction():
    with pytest.raises(ConfigError):
        ScaleFunction(IntervalSpec(-math.inf, math.inf),
                      (type(standard_cantor_block())(Fraction(0), Fraction(1), Fraction(1), Fraction(3, 2), 4),))


def test_validate_passes_on_cantor_line():
    rep = validate_scale(cantor_scale())
    assert rep.passed
    assert {c.name for c in rep.checks} == {"T_inf_left", "T_inf_right", "H1", "H2", "H3"}


def test_validate_flags_missing_singular_mass():
    rep = validate_scale(ScaleFunction(IntervalSpec(-math.inf, math.inf)))
    assert not rep.passed
    assert not rep["H3"].passed


def test_validate_flags_open_endpoint_without_divergence():
    sf = ScaleFunction(IntervalSpec(0.0, math.inf, a_closed=False), (standard_cantor_block(),))
    rep = validate_scale(sf)
    assert not rep["T_inf_left"].passed


def test_divergent_cascade_validates():
    assert validate_scale(constant_cascade_scale()).passed


@pytest.mark.parametrize(
    ("series", "k", "mass"),
    [("constant", 0, 1.0), ("constant", 7, 1.0), ("harmonic_squares", 0, 0.25), ("harmonic_squares", 2, 1 / 16)],
)
def test_cascade_level_masses(series, k, mass):
    assert Cascade("right", series, 10).level_mass(k) == pytest.approx(mass)


def test_harmonic_squares_r_star():
    sf = harmonic_squares_scale()
    assert sf.r_star == pytest.approx(math.pi**2 / 6, abs=1.0 / 200)
    value, bound = sf.r_star_partial()
    assert abs(value - math.pi**2 / 6) <= bound


def test_constant_cascade_r_star_infinite():
    assert constant_cascade_scale().r_star == math.inf


def test_star_endpoints_of_cantor_line():
    sf = cantor_scale()
    assert (sf.l_star, sf.r_star) == (0.0, 1.0)
