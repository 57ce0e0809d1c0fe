"""The extension: a family of scale functions on intervals covering the line."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .quadrature import Cumulative, lebesgue_rule, tail_window, w_rule


@dataclass(frozen=True)
class Weights:
    """Exponential weights ``h±(x) = exp(±βx)`` with ``β = sqrt(2α)``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")

    @property
    def beta(self):
        return math.sqrt(2.0 * self.alpha)

    def h(self, sign, x):
        return np.exp(_sgn(sign) * self.beta * np.asarray(x, dtype=float))

    def h2_integral(self, sign, lo, hi):
        """Closed-form ``∫_lo^hi h±(x)^2 dx``; infinite limits allowed."""
        k = 2.0 * _sgn(sign) * self.beta
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        with np.errstate(over="ignore"):
            return (np.exp(k * hi) - np.exp(k * lo)) / k


class UnitWeights(Weights):
    """Weights frozen to 1, for test harnesses isolating the singular measure."""

    def h(self, sign, x):
        return np.ones(np.shape(x))

    def h2_integral(self, sign, lo, hi):
        return np.asarray(hi, dtype=float) - np.asarray(lo, dtype=float)


def _sgn(sign):
    if sign in ("+", 1, +1.0):
        return 1.0
    if sign in ("-", -1, -1.0):
        return -1.0
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


@dataclass(frozen=True)
class Extension:
    """Scale functions on disjoint intervals whose union is the line.

    Parameters
    ----------
    alpha : float
        Positive constant of the inner product ``E_α = E + α(·,·)``.
    parts : sequence of ScaleFunction
        Sorted by position; consecutive intervals must share an endpoint.
    depth : int, optional
        Block depth override for quadrature and gap enumeration.
    tail : float
        Truncation distance for unbounded tails.
    max_panel : float
        Maximal Gauss panel length.
    require_cover : bool
        Check that the intervals cover the line up to finitely many points.
    """

    alpha: float
    parts: tuple
    depth: int | None = None
    tail: float = 40.0
    max_panel: float = 0.5
    require_cover: bool = True
    _cache: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        parts = tuple(sorted(self.parts, key=lambda sf: sf.interval.a))
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_cache", {})
        if not parts:
            raise ConfigError("an extension needs at least one interval")
        for p1, p2 in zip(parts, parts[1:]):
            i1, i2 = p1.interval, p2.interval
            if i2.a < i1.b or (i2.a == i1.b and i1.b_closed and i2.a_closed):
                raise ConfigError(f"intervals {i1} and {i2} overlap")
            if self.require_cover and i2.a > i1.b:
                raise ConfigError(f"gap of positive length between {i1} and {i2}")
        if self.require_cover and (parts[0].interval.a > -math.inf or parts[-1].interval.b < math.inf):
            raise ConfigError("intervals must cover the real line")

    def replace(self, **changes):
        kw = dict(alpha=self.alpha, parts=self.parts, depth=self.depth, tail=self.tail,
                  max_panel=self.max_panel, require_cover=self.require_cover)
        kw.update(changes)
        return Extension(**kw)

    @property
    def weights(self):
        return Weights(self.alpha)

    @property
    def beta(self):
        return math.sqrt(2.0 * self.alpha)

    def h(self, sign, x):
        return self.weights.h(sign, x)

    def __len__(self):
        return len(self.parts)

    # -- lookup ----------------------------------------------------------------

    def locate(self, x):
        """Index of the interval containing each point, ``-1`` if none."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, -1, dtype=int)
        for n, sf in enumerate(self.parts):
            out[sf.interval.contains(x)] = n
        return out

    def locate_strict(self, x):
        idx = self.locate(x)
        if np.any(idx < 0):
            raise DomainError(f"points outside every interval: {np.atleast_1d(x)[np.atleast_1d(idx) < 0][:5]}")
        return idx

    def endpoints(self):
        """Finite interval endpoints, sorted and unique."""
        pts = []
        for sf in self.parts:
            for v in (sf.interval.a, sf.interval.b):
                if math.isfinite(v):
                    pts.append(v)
        return np.unique(pts)

    # -- quadrature -----------------------------------------------------------

    def window(self, extra_points=()):
        return tail_window(self.parts, self.tail, extra_points)

    def lebesgue_rule(self, breaks=()):
        """Cached Lebesgue rule over the truncated line, split at ``breaks``."""
        breaks = tuple(sorted(set(float(b) for b in breaks if math.isfinite(b))))
        breaks = tuple(sorted(set(breaks) | set(self.endpoints().tolist())))
        key = ("leb", breaks)
        if key not in self._cache:
            bounds = self.window(breaks)
            self._cache[key] = lebesgue_rule(self.parts, bounds, self.depth, breaks, self.max_panel)
        return self._cache[key]

    def w_rule(self, n, route="s", s_breaks=()):
        """Cached rule for ``∫_{W_n} F(j(x), x) dt`` (see :func:`quadrature.w_rule`)."""
        s_breaks = tuple(sorted(set(float(b) for b in s_breaks)))
        key = ("w", n, route, s_breaks)
        if key not in self._cache:
            self._cache[key] = w_rule(self.parts[n], self.depth, route, s_breaks)
        return self._cache[key]

    def cumulative(self, F, breaks=()):
        """Running Lebesgue integral of ``F`` from ``-inf``."""
        return Cumulative(self.lebesgue_rule(breaks), F)
