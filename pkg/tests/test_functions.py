import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from dirext.errors import ConfigError
from dirext.functions import (
    ComposedProfile,
    ConstantProfile,
    Contraction,
    CutoffProfile,
    DarnedFunction,
    EmbeddedH1,
    ExponentialProfile,
    H1Function,
    PiecewiseLinearProfile,
    PolynomialProfile,
)

H1_CASES = [
    H1Function("hat", {"center": 0.2, "halfwidth": 1.5, "height": 2.0}),
    H1Function("spline", {"center": -0.3, "halfwidth": 2.0}),
    H1Function("bump", {"center": 0.0, "halfwidth": 1.0}),
    H1Function("exponential_piece", {"center": 0.5, "rate": 2.0}),
    H1Function("gaussian", {"center": 0.0, "width": 0.7}),
    H1Function("custom-sampled", {"xs": [-1.0, 0.0, 2.0], "ys": [0.0, 1.0, 0.0]}),
]


@pytest.mark.parametrize("g", H1_CASES, ids=lambda g: g.kind)
@settings(max_examples=50, deadline=None)
@given(x=st.floats(-3.0, 3.0))
def test_h1_derivative_matches_difference_quotient(g, x):
    h = 1e-6
    assume(all(abs(x - b) > 10 * h for b in g.breaks))
    fd = (g.value(x + h) - g.value(x - h)) / (2 * h)
    assert g.deriv(x) == pytest.approx(fd, rel=1e-5, abs=1e-5)


@pytest.mark.parametrize("g", H1_CASES, ids=lambda g: g.kind)
def test_h1_vanishes_off_support(g):
    lo, hi = g.support
    if np.isfinite(lo):
        assert g.value(lo - 0.1) == 0.0 and g.value(hi + 0.1) == 0.0


@pytest.mark.parametrize(
    "params",
    [{"xs": [0.0, 1.0], "ys": [1.0, 0.0]}, {"xs": [1.0, 0.0], "ys": [0.0, 0.0]}, {"xs": [0.0], "ys": [0.0]}],
)
def test_custom_sampled_validation(params):
    with pytest.raises(ConfigError):
        H1Function("custom-sampled", params)


def test_unknown_kind():
    with pytest.raises(ConfigError):
        H1Function("sawtooth", {})


PROFILES = [
    ConstantProfile(2.0),
    PolynomialProfile((0.0, 1.0, -1.0)),
    PiecewiseLinearProfile((0.0, 0.4, 1.0), (1.0, -1.0, 0.0)),
    ExponentialProfile(1.5, -0.7),
    CutoffProfile(ExponentialProfile(1.0, -1.0), k=0.5),
]


@pytest.mark.parametrize("p", PROFILES, ids=lambda p: type(p).__name__)
@settings(max_examples=40, deadline=None)
@given(s=st.floats(-1.0, 2.0))
def test_profile_derivative(p, s):
    h = 1e-6
    assume(all(abs(s - b) > 10 * h for b in getattr(p, "breaks", ())))
    assume(all(abs(s - b) > 10 * h for b in (0.0, 0.4, 1.0, 0.5)))
    fd = (p.value(s + h) - p.value(s - h)) / (2 * h)
    assert p.deriv(s) == pytest.approx(fd, rel=1e-5, abs=1e-5)


@pytest.mark.parametrize(("s", "theta"), [(-1.0, 1.0), (0.0, 1.0), (2.0, 1.0), (3.0, 0.5), (4.0, 0.0), (9.0, 0.0)])
def test_cutoff_theta(s, theta):
    assert CutoffProfile(ConstantProfile(1.0), k=2.0).theta(s) == pytest.approx(theta)


@pytest.mark.parametrize(
    ("nodes", "values"),
    [((0.0, 1.0), (0.0, 2.0)), ((1.0, 2.0), (1.0, 1.0)), ((-1.0, 1.0), (0.5, 0.5)), ((0.0, 0.0), (0.0, 0.0))],
)
def test_contraction_validation(nodes, values):
    with pytest.raises(ConfigError):
        Contraction(nodes, values)


@pytest.mark.parametrize(("y", "expected"), [(-2.0, 0.0), (0.0, 0.0), (0.4, 0.4), (1.0, 1.0), (5.0, 1.0)])
def test_unit_contraction(y, expected):
    assert Contraction.unit()(y) == expected


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_clamp_is_one_lipschitz(a, b):
    phi = Contraction.clamp(-0.3, 0.7)
    assert abs(phi(a) - phi(b)) <= abs(a - b) + 1e-12


def test_composed_profile():
    p = ComposedProfile(Contraction.unit(), PolynomialProfile((0.0, 3.0)))
    np.testing.assert_allclose(p.value(np.array([-1.0, 0.1, 0.5])), [0.0, 0.3, 1.0])


def test_linear_structure_of_extension_functions(twoline, e25):
    g = EmbeddedH1(twoline, H1_CASES[0])
    x = np.array([-2.0, -0.5, 0.5, 2.0])
    np.testing.assert_allclose((2.0 * e25 - g).value(x), 2.0 * e25.value(x) - g.value(x))
    np.testing.assert_allclose((-e25).value(x), -e25.value(x))


def test_darned_function_is_constant_on_gaps(cantor):
    f = DarnedFunction(cantor, {0: PolynomialProfile((0.0, 1.0))})
    # all of (1/3, 2/3) maps to s = 1/2
    np.testing.assert_allclose(f.value(np.array([0.4, 0.5, 0.6])), 0.5)
    np.testing.assert_allclose(f.value(np.array([-3.0, 5.0])), [0.0, 1.0])
