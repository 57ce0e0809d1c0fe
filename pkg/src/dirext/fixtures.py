"""Named, deterministic fixtures used by tests, the acceptance suite and the CLI."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import ConfigError
from .extension import Extension
from .functions import H1Function, PiecewiseSmooth
from .geometry import (
    FINITE_MASS,
    INFINITE_MASS,
    CantorBlock,
    Cascade,
    IntervalSpec,
    ScaleFunction,
)

INF = math.inf


def standard_cantor_block(depth=10):
    return CantorBlock(Fraction(0), Fraction(1), Fraction(1), Fraction(1, 3), depth)


def cantor_scale(depth=10, base_point=0.0):
    """Standard Cantor scale function on the whole line, ``t(x) = x + c(x)``."""
    return ScaleFunction(IntervalSpec(-INF, INF), (standard_cantor_block(depth),), base_point)


def cantor_extension(alpha=0.5, depth=12):
    """Irreducible extension on the line with one standard Cantor block on ``[0, 1]``."""
    return Extension(alpha, (cantor_scale(depth),))


def twoline_extension(alpha=0.5, a=0.0, levels=40, block_depth=3):
    """Two half-lines ``(-inf, a)`` and ``(a, inf)`` with divergent cascades at ``a``.

    The excluded endpoint ``a`` forces the scale function to diverge there; the
    cascades sit on ``[a - 1, a)`` and ``(a, a + 1]``.
    """
    left = ScaleFunction(
        IntervalSpec(-INF, a, right_tail=INFINITE_MASS),
        cascades=(Cascade("right", "constant", levels, block_depth=block_depth),),
    )
    right = ScaleFunction(
        IntervalSpec(a, INF, left_tail=INFINITE_MASS),
        cascades=(Cascade("left", "constant", levels, block_depth=block_depth),),
    )
    return Extension(alpha, (left, right))


def example25_function(ext, a=0.0):
    """``e^{β(x-a)}`` left of ``a`` and ``-e^{β(a-x)}`` right of it."""
    b = ext.beta
    return PiecewiseSmooth(
        ext,
        (lambda x: np.exp(b * (x - a)), lambda x: -np.exp(b * (a - x))),
        (lambda x: b * np.exp(b * (x - a)), lambda x: b * np.exp(b * (a - x))),
        name="example25",
    )


def harmonic_squares_scale(levels=200, block_depth=8, depth=10):
    """``[0, inf)`` with a unit Cantor block on ``[0, 1]`` and blocks of mass
    ``1/(k+1)^2`` on ``[k, k+1]``; base point 0 so that ``r* = Σ 1/k^2``."""
    return ScaleFunction(
        IntervalSpec(0.0, INF, a_closed=True),
        (standard_cantor_block(depth),),
        base_point=0.0,
        cascades=(Cascade("right", "harmonic_squares", levels, start=1.0, block_depth=block_depth),),
    )


def constant_cascade_scale(levels=120, block_depth=8, depth=10):
    """Same geometry with unit mass per level, so ``r* = inf``."""
    return ScaleFunction(
        IntervalSpec(0.0, INF, a_closed=True),
        (standard_cantor_block(depth),),
        base_point=0.0,
        cascades=(Cascade("right", "constant", levels, start=1.0, block_depth=block_depth),),
    )


def cantor_closed_scale(depth=10):
    """Closed interval ``[0, 1]`` carrying one standard Cantor block."""
    return ScaleFunction(IntervalSpec(0.0, 1.0, True, True), (standard_cantor_block(depth),))


def half_line_extension(sf, alpha=0.5):
    """Wrap a single half-line scale function as a stand-alone extension."""
    return Extension(alpha, (sf,), require_cover=False)


def endpoint_fixtures():
    """The scale functions realizing the five right-endpoint cases."""
    ext = twoline_extension()
    return {
        "R1": ext.parts[0],
        "R2": cantor_closed_scale(),
        "R3i": harmonic_squares_scale(),
        "R3ii": constant_cascade_scale(),
        "R3iii": cantor_scale(),
    }


def hat(center=0.0, halfwidth=1.0, height=1.0):
    return H1Function("hat", {"center": center, "halfwidth": halfwidth, "height": height})


def random_smooth_h1(rng, n_terms=3, window=(-4.0, 4.0)):
    """Sum of smooth compactly supported bumps and cubic splines with random parameters."""
    terms = []
    for _ in range(n_terms):
        kind = rng.choice(["bump", "spline"])
        terms.append(
            H1Function(
                str(kind),
                {
                    "center": float(rng.uniform(*window)),
                    "halfwidth": float(rng.uniform(0.3, 2.0)),
                    "height": float(rng.normal()),
                },
            )
        )
    return terms


NAMES = (
    "example25_twoline",
    "cantor_extension",
    "harmonic_squares_R3i",
    "constant_cascade_R3ii",
    "cantor_R3iii",
    "cantor_closed_R2",
    "fat_cantor_subspace",
)


def fixture_config(name, seed=0, alpha=0.5, depth=None):
    """JSON-ready configuration of a named fixture."""
    if name not in NAMES:
        raise ConfigError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    if name == "example25_twoline":
        return {
            "alpha": alpha,
            "intervals": [
                {"a": "-inf", "b": 0, "right_tail": INFINITE_MASS,
                 "cascade": {"side": "right", "series": "constant", "levels": 40, "block_depth": 3}},
                {"a": 0, "b": "inf", "left_tail": INFINITE_MASS,
                 "cascade": {"side": "left", "series": "constant", "levels": 40, "block_depth": 3}},
            ],
            "functions": [{"name": "f", "kind": "example25", "params": {"a": 0.0}},
                          {"name": "hat", "kind": "hat", "params": {"center": 0.0, "halfwidth": 1.0, "height": 1.0}}],
            "pairs": [{"name": "example25", "cplus": [{"kind": "constant", "value": 2.0}, {"kind": "constant", "value": 0.0}]}],
        }
    cantor = {"lo": "0", "hi": "1", "mass": "1", "middle_fraction": "1/3", "depth": depth or 12}
    if name == "cantor_R3iii":
        return {
            "alpha": alpha,
            "intervals": [{"a": "-inf", "b": "inf", "blocks": [dict(cantor, depth=depth or 10)], "base_point": 0}],
            "functions": [{"name": "psi", "kind": "darned",
                           "profiles": [{"kind": "polynomial", "coeffs": [0.0, 1.0, -1.0]}]}],
        }
    if name == "cantor_extension":
        return {
            "alpha": alpha,
            "intervals": [{"a": "-inf", "b": "inf", "blocks": [cantor], "base_point": 0}],
            "functions": [{"name": "hat", "kind": "hat", "params": {"center": 0.5, "halfwidth": 1.0}}],
            "pairs": [{"name": "parabola", "cplus": [{"kind": "polynomial", "coeffs": [0.0, 1.0, -1.0]}]}],
        }
    if name in ("harmonic_squares_R3i", "constant_cascade_R3ii"):
        series = "harmonic_squares" if name.startswith("harmonic") else "constant"
        return {
            "alpha": alpha,
            "intervals": [{"a": 0, "b": "inf", "a_closed": True, "blocks": [dict(cantor, depth=depth or 10)],
                           "base_point": 0,
                           "cascade": {"side": "right", "series": series,
                                       "levels": 200 if series == "harmonic_squares" else 120,
                                       "start": 1, "block_depth": 8}}],
        }
    if name == "cantor_closed_R2":
        return {
            "alpha": alpha,
            "intervals": [{"a": 0, "b": 1, "a_closed": True, "b_closed": True, "blocks": [dict(cantor, depth=depth or 10)]}],
        }
    return {"alpha": alpha, "fat_cantor": {"support": [0, 1], "depth": depth or 8}, "seed": seed}


def kplus_profile(k=2.0):
    """Profile ``ψ₊(s) = 2k (1 - s)`` on the Cantor extension.

    The resulting element equals ``k e^{βx}`` left of the block and vanishes
    against ``h₊`` right of it.
    """
    from .functions import PolynomialProfile

    return PolynomialProfile((2.0 * k, -2.0 * k))


LEFT_CASES = ("L1", "L2", "L3i", "L3ii", "L3iii")
RIGHT_CASES = ("R1", "R2", "R3i", "R3ii", "R3iii")


def case_scale(left, right, levels=16, block_depth=2, depth=6):
    """Scale function realizing a given pair of endpoint cases.

    A unit Cantor block sits on ``[0, 1]``.  Finite endpoints are ``-1`` and
    ``2``; cascades at finite endpoints have span ``1/2``, those at infinite
    endpoints start at ``-1`` and ``2``.
    """
    if left not in LEFT_CASES or right not in RIGHT_CASES:
        raise ConfigError(f"unknown case pair ({left}, {right})")
    cascades = []
    a, a_closed, left_tail = -INF, False, FINITE_MASS
    if left == "L1":
        a, left_tail = -1.0, INFINITE_MASS
        cascades.append(Cascade("left", "constant", levels, span=0.5, block_depth=block_depth))
    elif left == "L2":
        a, a_closed = -1.0, True
    elif left in ("L3i", "L3ii"):
        series = "harmonic_squares" if left == "L3i" else "constant"
        cascades.append(Cascade("left", series, levels, start=-1.0, block_depth=block_depth))
    b, b_closed, right_tail = INF, False, FINITE_MASS
    if right == "R1":
        b, right_tail = 2.0, INFINITE_MASS
        cascades.append(Cascade("right", "constant", levels, span=0.5, block_depth=block_depth))
    elif right == "R2":
        b, b_closed = 2.0, True
    elif right in ("R3i", "R3ii"):
        series = "harmonic_squares" if right == "R3i" else "constant"
        cascades.append(Cascade("right", series, levels, start=2.0, block_depth=block_depth))
    spec = IntervalSpec(a, b, a_closed, b_closed, left_tail, right_tail)
    return ScaleFunction(spec, (standard_cantor_block(depth),), base_point=0.5, cascades=tuple(cascades))


def random_gap_step_profile(rng, max_nodes=5):
    """Random piecewise-linear ``ψ₊`` on ``[0, 1]`` vanishing at ``s = 1``.

    On the Cantor extension ``c₊ = ψ₊ ∘ j`` is a staircase: constant on every
    gap, zero right of the block, so that it is square integrable against
    ``h₊²``.
    """
    from .functions import PiecewiseLinearProfile

    k = int(rng.integers(1, max_nodes + 1))
    nodes = np.concatenate([[0.0], np.sort(rng.uniform(0.02, 0.98, k)), [1.0]])
    nodes = np.unique(np.round(nodes, 6))
    values = rng.normal(size=nodes.size)
    values[-1] = 0.0
    return PiecewiseLinearProfile(tuple(nodes.tolist()), tuple(values.tolist()))


def random_contraction(rng, max_kinks=4):
    """Random piecewise-linear normal contraction (fixes 0, slopes in ``[-1, 1]``)."""
    from .functions import Contraction

    k = int(rng.integers(1, max_kinks + 1))
    nodes = np.unique(np.concatenate([[-3.0, 0.0, 3.0], np.round(rng.uniform(-2.5, 2.5, k), 6)]))
    slopes = rng.uniform(-1.0, 1.0, nodes.size - 1)
    values = np.concatenate([[0.0], np.cumsum(slopes * np.diff(nodes))])
    values -= np.interp(0.0, nodes, values)
    values[np.flatnonzero(nodes == 0.0)] = 0.0
    return Contraction(tuple(nodes.tolist()), tuple(values.tolist()), "random")
