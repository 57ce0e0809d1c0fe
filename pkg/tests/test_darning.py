import math

import numpy as np
import pytest

from dirext.darning import (
    build_jstar,
    classify_endpoints,
    image_measure,
    representation_check,
    star_energy,
    star_form,
    star_l2,
    theta_cutoff_convergence,
)
from dirext.errors import ClassificationError, DomainError
from dirext.fixtures import (
    LEFT_CASES,
    RIGHT_CASES,
    case_scale,
    constant_cascade_scale,
    endpoint_fixtures,
    half_line_extension,
    harmonic_squares_scale,
)
from dirext.functions import ConstantProfile, ExponentialProfile, PolynomialProfile

PARABOLA = PolynomialProfile((0.0, 1.0, -1.0))


@pytest.fixture(scope="module")
def fixtures():
    return endpoint_fixtures()


@pytest.mark.parametrize("expected", ["R1", "R2", "R3i", "R3ii", "R3iii"])
def test_classification_of_fixtures(fixtures, expected):
    assert classify_endpoints(fixtures[expected]).right == expected


def test_harmonic_r_star_within_bound():
    case = classify_endpoints(harmonic_squares_scale())
    assert abs(case.r_star - math.pi**2 / 6) <= case.r_star_bound <= 1.0 / 200


@pytest.mark.parametrize("left", LEFT_CASES)
@pytest.mark.parametrize("right", RIGHT_CASES)
def test_every_case_pair_is_constructible(left, right):
    case = classify_endpoints(case_scale(left, right))
    assert (case.left, case.right) == (left, right)


# (left, right, sign) -> interval notation of J*; both ends written out
@pytest.mark.parametrize(
    ("left", "right", "sign", "notation"),
    [
        ("L2", "R2", "+", "[-0.5, 0.5]"),
        ("L2", "R2", "-", "[-0.5, 0.5]"),
        ("L2", "R3iii", "+", "[-0.5, 0.5)"),
        ("L2", "R3iii", "-", "[-0.5, 0.5]"),
        ("L3iii", "R2", "+", "[-0.5, 0.5]"),
        ("L3iii", "R2", "-", "(-0.5, 0.5]"),
        ("L1", "R1", "+", "(-inf, inf)"),
        ("L2", "R3ii", "-", "[-0.5, inf)"),
        ("L3ii", "R2", "+", "(-inf, 0.5]"),
    ],
)
def test_jstar_notation(left, right, sign, notation):
    assert build_jstar(classify_endpoints(case_scale(left, right)), sign).notation() == notation


@pytest.mark.parametrize("right", RIGHT_CASES)
def test_r3i_plus_and_minus_differ_only_at_r_star(right):
    case = classify_endpoints(case_scale("L2", right))
    plus, minus = build_jstar(case, "+"), build_jstar(case, "-")
    assert (plus.lo, plus.hi) == (minus.lo, minus.hi)
    if right in ("R3i", "R3iii"):
        assert not plus.hi_closed and minus.hi_closed
    else:
        assert plus.hi_closed == minus.hi_closed


def test_jstar_contains():
    sp = build_jstar(classify_endpoints(case_scale("L3i", "R3iii")), "+")
    assert sp.contains(sp.lo) and not sp.contains(sp.hi)
    assert sp.contains(0.5 * (sp.lo + sp.hi))


def test_atom_at_half_closed_form(cantor):
    # the gap (1/3, 2/3) carries e^{2x} dx for α = 1/2
    m = image_measure(cantor, 0, "+")
    k = int(np.argmin(np.abs(m.positions - 0.5)))
    assert m.positions[k] == 0.5
    assert m.masses[k] == pytest.approx((math.exp(4 / 3) - math.exp(2 / 3)) / 2, abs=1e-12)


@pytest.mark.parametrize(("sign", "total"), [("+", math.exp(2.0) / 2.0), ("-", 0.5)])
def test_image_measure_total_mass(cantor, sign, total):
    # h² dx over the finite side of the line: ∫_{-inf}^1 e^{2x} and ∫_0^inf e^{-2x}
    m = image_measure(cantor, 0, sign)
    assert m.finite_atom_mass() + m.lump_masses.sum() == pytest.approx(total, rel=1e-9)
    assert len(m.infinite) == 1


def test_infinite_atom_forbids_nonzero_values(cantor):
    m = image_measure(cantor, 0, "-")
    with pytest.raises(Exception, match="infinite mass"):
        m.integrate(lambda s: np.ones_like(s))


@pytest.mark.parametrize(("sign", "side"), [("+", "right"), ("-", "left")])
def test_boundary_conditions(cantor, sign, side):
    form = star_form(cantor, 0, sign)
    assert [s for s, _ in form.boundary_conditions()] == [side]
    with pytest.raises(DomainError):
        star_energy(form, ConstantProfile(1.0))


def test_star_energy_of_linear_profile(cantor):
    form = star_form(cantor, 0, "-")
    psi = PolynomialProfile((0.0, 1.0))
    assert star_energy(form, psi) > 0
    assert star_l2(form, psi) > 0


@pytest.mark.parametrize("sign", ["+", "-"])
def test_representation_on_cantor(cantor, sign):
    psi = PARABOLA
    rep = representation_check(star_form(cantor, 0, sign), psi, tol=1e-6)
    assert rep["pass"]
    assert rep["sup"]["difference"] == 0.0


def test_cutoff_needs_infinite_r_star(cantor):
    with pytest.raises(ClassificationError):
        theta_cutoff_convergence(star_form(cantor, 0, "+"), PARABOLA)


def test_cutoff_decreases_on_divergent_cascade():
    ext = half_line_extension(constant_cascade_scale(), alpha=0.25)
    rep = theta_cutoff_convergence(star_form(ext, 0, "+"), ExponentialProfile(1.0, -1.0))
    assert rep["decreasing"]
    assert rep["final"] < 1e-3
    assert rep["values"][0] > rep["values"][-1]
