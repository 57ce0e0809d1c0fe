import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirext.appendix import (
    FatCantorSet,
    SubspaceScale,
    appendix_config_pair,
    fat_cantor_pair,
    probe_points,
    random_pair,
    smooth_violation,
    subspace_bijection_check,
    subspace_pair_residual,
)
from dirext.errors import ConfigError, ResolutionError


@pytest.mark.parametrize("depth", [1, 2, 4, 8, 12])
def test_fat_cantor_measure_closed_form(depth):
    fat = FatCantorSet(0.0, 1.0, depth)
    assert fat.measure == pytest.approx((1 + 2.0**-depth) / 2, abs=1e-14)
    assert len(fat.intervals) == 2**depth
    assert len(fat.removed) == 2**depth - 1


def test_fat_cantor_first_removed_interval():
    fat = FatCantorSet(0.0, 1.0, 3)
    mid = fat.removed[len(fat.removed) // 2]
    np.testing.assert_allclose(mid, [0.375, 0.625])


@pytest.mark.parametrize(
    ("lo", "hi", "depth"), [(1.0, 1.0, 4), (2.0, 1.0, 4), (0.0, np.inf, 4), (0.0, 1.0, 0), (0.0, 1.0, 2.5)]
)
def test_fat_cantor_rejects_bad_input(lo, hi, depth):
    with pytest.raises(ConfigError):
        FatCantorSet(lo, hi, depth)


def test_normalized_cdf_of_b():
    fat = FatCantorSet(0.0, 1.0, 6)
    np.testing.assert_allclose(fat.b(np.array([-1.0, 0.0, 0.5, 1.0, 2.0])), [0, 0, 0.5, 1, 1], atol=1e-14)
    assert np.all(np.diff(fat.b(np.linspace(-0.5, 1.5, 501))) >= 0)


def test_subspace_scale_flat_on_b_and_invertible():
    fat = FatCantorSet(0.0, 1.0, 5)
    s = SubspaceScale(fat)
    # s grows by the removed length over the support
    assert s(np.array([1.0]))[0] == pytest.approx(1.0 - fat.measure)
    gmid = 0.5 * (fat.removed[:, 0] + fat.removed[:, 1])
    np.testing.assert_allclose(s.inverse(s(gmid)), gmid, atol=1e-12)
    assert s.strictly_increasing()


def test_fixture_pair_passes(depth=8):
    pair = fat_cantor_pair(FatCantorSet(0.0, 1.0, depth), 0.5)
    res = subspace_pair_residual(pair)
    assert res["pass"]
    assert res["flat_on_G"] == 0.0
    assert res["coupling"] <= 1e-6
    bij = subspace_bijection_check(pair)
    assert bij["pass"]
    assert max(bij["pair_roundtrip_error"], bij["function_roundtrip_error"]) <= 1e-4


def test_both_coefficient_energies_agree():
    pair = fat_cantor_pair(FatCantorSet(0.0, 1.0, 6), 0.5)
    res = subspace_pair_residual(pair)
    assert res["integrable"]["+"]["energy"] == pytest.approx(res["integrable"]["-"]["energy"], rel=1e-10)


def test_smooth_coefficient_fails_flatness():
    res = subspace_pair_residual(smooth_violation(FatCantorSet(0.0, 1.0, 4)))
    assert not res["pass"]
    assert res["flat_on_G"] > 0.1


def test_probe_on_boundary_is_rejected():
    fat = FatCantorSet(0.0, 1.0, 3)
    pair = fat_cantor_pair(fat, 0.5)
    G, B = probe_points(fat)
    with pytest.raises(ResolutionError):
        subspace_pair_residual(pair, (np.append(G, fat.removed[0, 0]), B))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_pairs(seed):
    pair = random_pair(np.random.default_rng(seed))
    assert subspace_pair_residual(pair)["pass"]
    assert subspace_bijection_check(pair)["pass"]


def test_config_pair():
    pair = appendix_config_pair({"alpha": 1.0, "fat_cantor": {"support": [-1, 2], "depth": 5}})
    assert (pair.fat.lo, pair.fat.hi, pair.alpha) == (-1.0, 2.0, 1.0)
    with pytest.raises(ConfigError):
        appendix_config_pair({"alpha": 1.0})
    with pytest.raises(ConfigError):
        appendix_config_pair({"alpha": -1.0, "fat_cantor": {}})
