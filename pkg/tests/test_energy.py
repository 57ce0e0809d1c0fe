import math

import numpy as np
import pytest

from dirext.complement import pair_from_cplus
from dirext.energy import (
    energy_E,
    energy_E_alpha,
    energy_measure,
    inner_L2,
    membership_report,
    oc_max_residual,
    oc_residual,
    probe_grid,
)
from dirext.errors import ResolutionError
from dirext.fixtures import hat
from dirext.functions import EmbeddedH1, H1Function, PolynomialProfile


@pytest.mark.parametrize(
    ("form", "expected"),
    [(energy_E, 0.5), (inner_L2, 1.0), (energy_E_alpha, 1.0)],
)
def test_two_line_closed_forms(twoline, e25, form, expected):
    assert form(twoline, e25).value == pytest.approx(expected, abs=1e-8)


def test_two_line_e1(twoline, e25):
    assert energy_E_alpha(twoline, e25, alpha=1.0).value == pytest.approx(1.5, abs=1e-8)


@pytest.mark.parametrize("ext_name", ["twoline", "cantor"])
def test_hat_energy_and_mass(request, ext_name):
    # a hat of half-width 1 and height 1: E = 1/2 * 2 = 1, L2 = 2/3
    ext = request.getfixturevalue(ext_name)
    g = EmbeddedH1(ext, hat(0.5))
    assert energy_E(ext, g).value == pytest.approx(1.0, abs=1e-10)
    assert inner_L2(ext, g).value == pytest.approx(2.0 / 3.0, abs=1e-10)


def test_energy_measure_splits_into_u_and_w(twoline, e25):
    u = energy_measure(twoline, e25, "U").value
    w = energy_measure(twoline, e25, "W").value
    assert u == pytest.approx(1.0, abs=1e-8)
    assert w == 0.0
    assert energy_measure(twoline, e25).value == pytest.approx(u + w)


def test_energy_measure_rejects_region(twoline, e25):
    with pytest.raises(ValueError):
        energy_measure(twoline, e25, "V")


def test_w_energy_positive_on_cantor_pair(cantor):
    f = pair_from_cplus(cantor, [PolynomialProfile((0.0, 1.0, -1.0))]).f
    assert energy_measure(cantor, f, "W").value > 0.1


@pytest.mark.parametrize(("a", "b"), [(1.0, 2.0), (-0.5, 3.0), (2.0, -1.0)])
def test_forms_symmetric_and_polarize(twoline, e25, a, b):
    g = EmbeddedH1(twoline, H1Function("gaussian", {"center": 0.3, "width": 0.7}))
    fg = energy_E_alpha(twoline, e25, g).value
    assert fg == pytest.approx(energy_E_alpha(twoline, g, e25).value, abs=1e-12)
    lhs = energy_E_alpha(twoline, a * e25 + b * g).value
    rhs = a * a * energy_E_alpha(twoline, e25).value + 2 * a * b * fg + b * b * energy_E_alpha(twoline, g).value
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_estimate_reports_panels(twoline, e25):
    est = energy_E(twoline, e25)
    d = est.to_dict()
    assert set(d) == {"value", "est_error", "panels"}
    assert d["panels"] > 0 and d["est_error"] >= 0


def test_oc_residual_vanishes_for_complement_element(twoline, e25):
    x = probe_grid(twoline)
    r = oc_residual(twoline, e25, x[:-1], x[1:])
    assert np.max(np.abs(r)) < 1e-8


def test_oc_residual_of_hat(twoline):
    # F(y) = g'(y) - 2α ∫_{-inf}^y g; F(-2) = 0 and F(2) = -2α * 1
    g = EmbeddedH1(twoline, hat())
    assert oc_residual(twoline, g, -2.0, 2.0) == pytest.approx(-1.0, abs=1e-10)


def test_oc_residual_rejects_unresolved_points(cantor, e25):
    f = pair_from_cplus(cantor, [PolynomialProfile((0.0, 1.0, -1.0))]).f
    with pytest.raises(ResolutionError):
        oc_residual(cantor, f, 0.0, 0.25)


def test_membership(twoline, e25):
    assert membership_report(twoline, e25)["member"]
    assert not membership_report(twoline, EmbeddedH1(twoline, hat()))["member"]


def test_probe_grid_in_gaps(cantor):
    x = probe_grid(cantor, depth=3)
    assert np.all(cantor.parts[0].locate_gap(x))
    assert np.any(x > 1.0) and np.any(x < 0.0)


def test_oc_max_residual_of_cantor_complement(cantor):
    f = pair_from_cplus(cantor, [PolynomialProfile((0.0, 1.0, -1.0))]).f
    res, pts, F = oc_max_residual(cantor, f)
    assert res < 1e-8
    assert pts.size == F.size > 10


def test_two_line_beta():
    from dirext.fixtures import twoline_extension

    assert twoline_extension(alpha=2.0).beta == pytest.approx(2.0)
    assert twoline_extension(alpha=0.125).beta == pytest.approx(math.sqrt(0.25))


def test_oc_residual_hat_hand_value(cantor):
    # f'(0.5) - f'(-0.5) - 2α ∫_{-0.5}^{0.5} (1 - |x|) dx = -1 - 1 - 0.75
    g = EmbeddedH1(cantor, hat())
    assert oc_residual(cantor, g, -0.5, 0.5) == pytest.approx(-2.75, abs=1e-12)
