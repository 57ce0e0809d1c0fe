"""JSON run configurations: parsing, validation and object construction.

Numbers may be written as JSON numbers or strings; ``"inf"``/``"-inf"``
denote infinite endpoints and ``"p/q"`` an exact rational (kept as a
:class:`fractions.Fraction` in block fields).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError
from .extension import Extension
from .functions import (
    ConstantProfile,
    DarnedFunction,
    EmbeddedH1,
    ExponentialProfile,
    H1Function,
    PiecewiseLinearProfile,
    PolynomialProfile,
    ZeroFunction,
)
from .geometry import (
    FINITE_MASS,
    INFINITE_MASS,
    CantorBlock,
    Cascade,
    IntervalSpec,
    ScaleFunction,
)

FORMATS = ("json", "csv")


def parse_number(v, exact=False):
    """Float (or Fraction when ``exact``) from a JSON number or string."""
    if isinstance(v, bool):
        raise ConfigError(f"expected a number, got {v!r}")
    if isinstance(v, (int, Fraction)) and exact:
        return Fraction(v)
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        t = v.strip().lower()
        if t in ("inf", "+inf", "infinity"):
            return math.inf
        if t in ("-inf", "-infinity"):
            return -math.inf
        try:
            q = Fraction(t)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse number {v!r}") from exc
        return q if exact else float(q)
    raise ConfigError(f"expected a number, got {v!r}")


def _get(d, key, default=None, kind=None):
    v = d.get(key, default)
    if kind is not None and v is not None and not isinstance(v, kind):
        raise ConfigError(f"field {key!r} has the wrong type: {v!r}")
    return v


def parse_block(d, depth=None):
    try:
        return CantorBlock(
            parse_number(d["lo"], exact=True),
            parse_number(d["hi"], exact=True),
            parse_number(d.get("mass", 1), exact=True),
            parse_number(d.get("middle_fraction", "1/3"), exact=True),
            int(depth if depth is not None else d.get("depth", 10)),
        )
    except KeyError as exc:
        raise ConfigError(f"block is missing field {exc}") from exc


def parse_cascade(d):
    kw = {k: d[k] for k in ("side", "series", "levels", "block_depth") if k in d}
    for k in ("mass", "span", "start", "middle_fraction"):
        if k in d:
            kw[k] = parse_number(d[k])
    try:
        return Cascade(**kw)
    except TypeError as exc:
        raise ConfigError(f"bad cascade: {exc}") from exc


def parse_interval(d, depth=None):
    """ScaleFunction from one interval record.

    Missing tail flags default to the value consistent with endpoint
    inclusion (infinite mass at a finite excluded endpoint).
    """
    if "a" not in d or "b" not in d:
        raise ConfigError("interval needs 'a' and 'b'")
    a, b = parse_number(d["a"]), parse_number(d["b"])
    a_closed = bool(_get(d, "a_closed", False, bool))
    b_closed = bool(_get(d, "b_closed", False, bool))

    def tail(end, closed, key):
        if key in d:
            return d[key]
        return INFINITE_MASS if math.isfinite(end) and not closed else FINITE_MASS

    spec = IntervalSpec(a, b, a_closed, b_closed, tail(a, a_closed, "left_tail"), tail(b, b_closed, "right_tail"))
    blocks = tuple(parse_block(bd, depth) for bd in _get(d, "blocks", [], list))
    cascades = _get(d, "cascades", None, list)
    if cascades is None:
        cascades = [d["cascade"]] if d.get("cascade") else []
    base = d.get("base_point")
    return ScaleFunction(
        spec,
        blocks,
        None if base is None else parse_number(base),
        tuple(parse_cascade(c) for c in cascades),
    )


def parse_profile(d):
    if d is None:
        return ConstantProfile(0.0)
    kind = d.get("kind")
    if kind == "constant":
        return ConstantProfile(parse_number(d.get("value", 0.0)))
    if kind == "polynomial":
        return PolynomialProfile(tuple(parse_number(c) for c in d["coeffs"]))
    if kind == "piecewise_linear":
        return PiecewiseLinearProfile(tuple(parse_number(v) for v in d["nodes"]),
                                      tuple(parse_number(v) for v in d["values"]))
    if kind == "exponential":
        return ExponentialProfile(parse_number(d.get("amp", 1.0)), parse_number(d.get("rate", -1.0)))
    raise ConfigError(f"unknown profile kind {kind!r}")


@dataclass
class RunConfig:
    """A parsed configuration.

    Attributes
    ----------
    alpha : float
    intervals : list of ScaleFunction
    functions : dict
        Raw function descriptors by name.
    pairs : dict
        Raw complement-pair descriptors by name.
    fat_cantor : dict or None
        Subspace configuration (no intervals).
    depth, tol, nodes, seed, format
        Command options; flags override them.
    """

    alpha: float = 0.5
    intervals: list = field(default_factory=list)
    functions: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)
    fat_cantor: dict | None = None
    depth: int | None = None
    tol: float = 1e-6
    nodes: int = 400
    seed: int = 0
    format: str = "json"
    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and self.alpha > 0):
            raise ConfigError("alpha must be a positive number")
        if self.depth is not None and int(self.depth) < 1:
            raise ConfigError("depth must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if int(self.nodes) < 2:
            raise ConfigError("nodes must be >= 2")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")

    def extension(self, require_cover=None):
        """The extension built from the interval list."""
        if not self.intervals:
            raise ConfigError("the configuration has no intervals")
        if require_cover is None:
            ivs = sorted((sf.interval for sf in self.intervals), key=lambda iv: iv.a)
            require_cover = ivs[0].a == -math.inf and ivs[-1].b == math.inf
        return Extension(self.alpha, tuple(self.intervals), require_cover=require_cover)

    def function(self, ext, name):
        """Extension function for the named descriptor."""
        if name not in self.functions:
            raise ConfigError(f"no function named {name!r}")
        return build_function(ext, self.functions[name])

    def pair_profiles(self, name):
        if name not in self.pairs:
            raise ConfigError(f"no pair named {name!r}")
        return {n: parse_profile(p) for n, p in enumerate(self.pairs[name].get("cplus", []))}


def build_function(ext, d):
    """Extension function from a descriptor ``{"kind", "params"}``."""
    from .fixtures import example25_function

    kind = d.get("kind")
    params = d.get("params", {})
    if kind == "example25":
        return example25_function(ext, parse_number(params.get("a", 0.0)))
    if kind == "zero":
        return ZeroFunction(ext)
    if kind == "darned":
        return DarnedFunction(ext, {n: parse_profile(p) for n, p in enumerate(d.get("profiles", []))})
    if kind in H1Function.KINDS:
        return EmbeddedH1(ext, H1Function(kind, {k: v if isinstance(v, list) else parse_number(v)
                                                  for k, v in params.items()}))
    raise ConfigError(f"unknown function kind {kind!r}")


def config_from_dict(d, **overrides) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    opts = dict(d.get("options", {}))
    for k, v in overrides.items():
        if v is not None:
            opts[k] = v
    depth = opts.get("depth")
    try:
        alpha = parse_number(d.get("alpha", 0.5))
        intervals = [parse_interval(iv, depth) for iv in d.get("intervals", [])]
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    fns = {}
    for i, f in enumerate(d.get("functions", [])):
        fns[f.get("name", f"f{i}")] = f
    pairs = {}
    for i, p in enumerate(d.get("pairs", [])):
        pairs[p.get("name", f"pair{i}")] = p
    return RunConfig(
        alpha=alpha,
        intervals=intervals,
        functions=fns,
        pairs=pairs,
        fat_cantor=d.get("fat_cantor"),
        depth=None if depth is None else int(depth),
        tol=float(opts.get("tol", 1e-6)),
        nodes=int(opts.get("nodes", 400)),
        seed=int(opts.get("seed", d.get("seed", 0))),
        format=str(opts.get("format", "json")),
        raw=d,
    )


def load_config(path, **overrides) -> RunConfig:
    """Read a JSON configuration file; raises :class:`ConfigError` on any problem."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(d, **overrides)
