import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirext.config import config_from_dict, load_config, parse_interval, parse_number, parse_profile
from dirext.errors import ConfigError
from dirext.fixtures import NAMES, fixture_config
from dirext.functions import ConstantProfile, ExponentialProfile, PiecewiseLinearProfile, PolynomialProfile
from dirext.geometry import FINITE_MASS, INFINITE_MASS


@pytest.mark.parametrize(
    ("raw", "expected"),
    [(1, 1.0), (2.5, 2.5), ("inf", math.inf), ("-inf", -math.inf), ("1/3", 1 / 3), (" 7 ", 7.0)],
)
def test_parse_number(raw, expected):
    assert parse_number(raw) == expected


@given(st.fractions(max_denominator=10**6))
def test_parse_number_exact_round_trip(q):
    assert parse_number(str(q), exact=True) == q


@pytest.mark.parametrize("raw", [True, None, "abc", "1/0", [1]])
def test_parse_number_rejects(raw):
    with pytest.raises(ConfigError):
        parse_number(raw)


def test_exact_block_fields():
    sf = parse_interval({"a": "-inf", "b": "inf", "blocks": [{"lo": 0, "hi": 1, "middle_fraction": "1/3"}]})
    block = sf.blocks[0]
    assert block.middle_fraction == Fraction(1, 3)
    assert isinstance(block.lo, Fraction)


@pytest.mark.parametrize(
    ("record", "left", "right"),
    [
        ({"a": "-inf", "b": "inf"}, FINITE_MASS, FINITE_MASS),
        ({"a": 0, "b": 1, "a_closed": True, "b_closed": True}, FINITE_MASS, FINITE_MASS),
        ({"a": 0, "b": "inf", "a_closed": True}, FINITE_MASS, FINITE_MASS),
    ],
)
def test_tail_flags_default_from_inclusion(record, left, right):
    record = dict(record, blocks=[{"lo": 0, "hi": 1}])
    spec = parse_interval(record).interval
    assert (spec.left_tail, spec.right_tail) == (left, right)


def test_open_finite_endpoint_defaults_to_infinite_tail():
    rec = {"a": "-inf", "b": 0, "cascade": {"side": "right", "series": "constant", "levels": 10}}
    assert parse_interval(rec).interval.right_tail == INFINITE_MASS


@pytest.mark.parametrize(
    ("d", "cls"),
    [
        (None, ConstantProfile),
        ({"kind": "constant", "value": 2}, ConstantProfile),
        ({"kind": "polynomial", "coeffs": [0, 1, -1]}, PolynomialProfile),
        ({"kind": "piecewise_linear", "nodes": [0, 1], "values": [1, 0]}, PiecewiseLinearProfile),
        ({"kind": "exponential", "amp": 1, "rate": -1}, ExponentialProfile),
    ],
)
def test_parse_profile(d, cls):
    assert isinstance(parse_profile(d), cls)


def test_parse_profile_unknown():
    with pytest.raises(ConfigError):
        parse_profile({"kind": "spline"})


@pytest.mark.parametrize("name", NAMES)
def test_fixture_configs_parse(name):
    cfg = config_from_dict(json.loads(json.dumps(fixture_config(name))))
    if cfg.intervals:
        ext = cfg.extension()
        for fname in cfg.functions:
            cfg.function(ext, fname)
        for pname in cfg.pairs:
            assert cfg.pair_profiles(pname)
    else:
        assert cfg.fat_cantor is not None


def test_overrides_take_precedence():
    cfg = config_from_dict({"alpha": 1, "options": {"tol": 1e-3, "nodes": 100}}, tol=1e-8, nodes=None)
    assert cfg.tol == 1e-8 and cfg.nodes == 100


@pytest.mark.parametrize(
    "bad",
    [
        [],
        {"alpha": 0},
        {"alpha": "x"},
        {"alpha": 1, "options": {"format": "xml"}},
        {"alpha": 1, "options": {"nodes": 1}},
        {"alpha": 1, "options": {"tol": -1}},
        {"alpha": 1, "options": {"depth": 0}},
        {"alpha": 1, "intervals": [{"a": 0}]},
        {"alpha": 1, "intervals": [{"a": 0, "b": 1, "blocks": [{"lo": 0}]}]},
        {"alpha": 1, "intervals": [{"a": 0, "b": 1, "cascade": {"side": "up"}}]},
    ],
)
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        config_from_dict(bad)


def test_extension_needs_intervals():
    with pytest.raises(ConfigError):
        config_from_dict({"alpha": 1}).extension()


def test_unknown_names():
    cfg = config_from_dict(fixture_config("example25_twoline"))
    ext = cfg.extension()
    with pytest.raises(ConfigError):
        cfg.function(ext, "nope")
    with pytest.raises(ConfigError):
        cfg.pair_profiles("nope")


def test_unknown_function_kind():
    cfg = config_from_dict(dict(fixture_config("cantor_extension"), functions=[{"name": "g", "kind": "wavelet"}]))
    with pytest.raises(ConfigError):
        cfg.function(cfg.extension(), "g")


def test_overlapping_intervals_rejected():
    d = {"alpha": 1, "intervals": [{"a": "-inf", "b": 1, "blocks": [{"lo": 0, "hi": 1}]},
                                   {"a": 0, "b": "inf", "blocks": [{"lo": 2, "hi": 3}]}]}
    with pytest.raises(ConfigError):
        config_from_dict(d).extension()


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(p)


def test_load_config_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(fixture_config("cantor_extension")), encoding="utf-8")
    cfg = load_config(p, depth=6)
    assert cfg.depth == 6
    assert cfg.intervals[0].blocks[0].depth == 6
