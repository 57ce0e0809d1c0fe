"""Orthogonal complements for regular Dirichlet subspaces of ``H^1``.

A subspace is described by an absolutely continuous, strictly increasing
scale ``s`` with ``s' ∈ {0, 1}``; ``G = {s' = 1}``.  Complement elements are

    f = (c₊ h₊ + c₋ h₋) / 2,

where ``c±`` are absolutely continuous in ``x``, flat on ``G`` and coupled by
``c₊' h₊ = c₋' h₋``.  The set ``B = {s' = 0}`` is modelled by a fat Cantor
set truncated at a finite generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from .errors import ConfigError, ResolutionError
from .extension import Weights

_T10, _W10 = np.polynomial.legendre.leggauss(10)


# ---------------------------------------------------------------------------
# The set B and the scale


@dataclass(frozen=True)
class FatCantorSet:
    """Smith-Volterra-Cantor set on ``[lo, hi]`` truncated at ``depth``.

    Generation ``k`` removes an open middle interval of length
    ``4**-k (hi - lo)`` from every remaining piece, so the measure of the
    truncated set is ``(hi - lo) (1 + 2**-depth) / 2``.
    """

    lo: float = 0.0
    hi: float = 1.0
    depth: int = 8
    intervals: np.ndarray = field(default=None, init=False, repr=False, compare=False)
    removed: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ConfigError("fat Cantor support must be a finite interval [a, b] with a < b")
        if int(self.depth) != self.depth or self.depth < 1 or self.depth > 20:
            raise ConfigError("fat Cantor depth must be an integer in [1, 20]")
        L = self.hi - self.lo
        pieces = np.array([[self.lo, self.hi]])
        removed = []
        for k in range(1, int(self.depth) + 1):
            cut = L * 4.0**-k
            mid = 0.5 * (pieces[:, 0] + pieces[:, 1])
            a, b = mid - 0.5 * cut, mid + 0.5 * cut
            removed.append(np.column_stack([a, b]))
            pieces = np.column_stack([
                np.column_stack([pieces[:, 0], a]),
                np.column_stack([b, pieces[:, 1]]),
            ]).reshape(-1, 2)
        object.__setattr__(self, "intervals", pieces)
        rem = np.concatenate(removed)
        object.__setattr__(self, "removed", rem[np.argsort(rem[:, 0])])

    @property
    def measure(self):
        return float(np.sum(self.intervals[:, 1] - self.intervals[:, 0]))

    @property
    def closed_form_measure(self):
        return (self.hi - self.lo) * (1.0 + 2.0 ** -self.depth) / 2.0

    def in_B(self, x):
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(self.intervals[:, 0], x, side="right") - 1
        safe = np.clip(k, 0, None)
        return (k >= 0) & (x <= self.intervals[safe, 1])

    def _cum(self):
        lens = self.intervals[:, 1] - self.intervals[:, 0]
        return np.concatenate([[0.0], np.cumsum(lens)])

    def b(self, x):
        """Normalized distribution function of Lebesgue measure on ``B``."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.intervals[:, 0], self.intervals[:, 1]
        cum = self._cum()
        k = np.clip(np.searchsorted(lo, x, side="right") - 1, 0, lo.size - 1)
        part = np.clip(x - lo[k], 0.0, hi[k] - lo[k])
        v = np.where(x < self.lo, 0.0, cum[k] + part)
        return v / cum[-1]

    def b_deriv(self, x):
        return np.where(self.in_B(x), 1.0 / self.measure, 0.0)

    def breaks(self):
        return self.intervals.ravel()

    def to_dict(self):
        return {"support": [self.lo, self.hi], "depth": int(self.depth), "measure": self.measure,
                "closed_form_measure": self.closed_form_measure, "components": len(self.intervals)}


@dataclass(frozen=True)
class SubspaceScale:
    """``s(x) = ∫_lo^x 1_G``, the scale of the subspace."""

    fat: FatCantorSet

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (x - self.fat.lo) - self.fat.measure * self.fat.b(x)

    def deriv(self, x):
        return np.where(self.fat.in_B(x), 0.0, 1.0)

    def inverse(self, sigma):
        """Left-continuous inverse; ``B`` components collapse to their left ends."""
        sigma = np.asarray(sigma, dtype=float)
        knots = np.concatenate([[self.fat.lo], self.fat.breaks(), [self.fat.hi]])
        s_knots = self(knots)
        # s is piecewise linear with flat pieces on B; invert on the slope-one pieces
        out = np.interp(sigma, s_knots, knots)
        out = np.where(sigma < 0, self.fat.lo + sigma, out)
        top = float(self(np.array([self.fat.hi]))[0])
        return np.where(sigma > top, self.fat.hi + (sigma - top), out)

    def strictly_increasing(self, samples=4097):
        """``s`` increases on every removed gap and outside the support."""
        gaps = self.fat.removed
        return bool(np.all(gaps[:, 1] > gaps[:, 0]))

    def energy_sigma(self, F_deriv, window=(-5.0, 6.0)):
        """``1/2 ∫ F'(σ)² dσ`` for ``f = F ∘ s``, integrating in ``σ``."""
        lo = float(self(np.array([window[0]]))[0])
        hi = float(self(np.array([window[1]]))[0])
        edges = np.linspace(lo, hi, 2001)
        x, w = _gauss(edges[:-1], edges[1:])
        return 0.5 * float(np.dot(w, F_deriv(x) ** 2))

    def energy_x(self, F_deriv, window=(-5.0, 6.0)):
        """``1/2 ∫_G (f')² dx`` for ``f = F ∘ s``, integrating in ``x``."""
        edges = _panel_edges(self.fat, window, 0.01)
        x, w = _gauss(edges[:-1], edges[1:])
        fp = F_deriv(self(x)) * self.deriv(x)
        return 0.5 * float(np.dot(w, fp**2))


def _gauss(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * _T10
    w = half[:, None] * _W10
    return x.ravel(), w.ravel()


def _panel_edges(fat, window, max_len):
    pts = np.concatenate([[window[0], window[1]], fat.breaks(), fat.removed.ravel()])
    pts = np.unique(pts[(pts >= window[0]) & (pts <= window[1])])
    out = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        m = max(1, int(math.ceil((b - a) / max_len)))
        out.append(np.linspace(a, b, m + 1)[1:])
    return np.concatenate(out)


# ---------------------------------------------------------------------------
# Coefficients


class Coefficient:
    """A function of ``x`` with an almost-everywhere derivative."""

    def value(self, x):
        raise NotImplementedError

    def deriv(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)


class ScaledCoefficient(Coefficient):
    def __init__(self, inner, factor):
        self.inner, self.factor = inner, float(factor)

    def value(self, x):
        return self.factor * self.inner.value(x)

    def deriv(self, x):
        return self.factor * self.inner.deriv(x)


class ZeroCoefficient(Coefficient):
    def value(self, x):
        return np.zeros(np.shape(x))

    def deriv(self, x):
        return np.zeros(np.shape(x))


class FatCantorProfile(Coefficient):
    """``c(x) = P(b(x))`` with ``P(t) = t (1 - t) Q(t)`` and ``b`` the distribution function of ``B``.

    Flat on ``G`` and exactly zero outside the support.
    """

    def __init__(self, fat: FatCantorSet, q_coeffs=(4.0,)):
        self.fat = fat
        self.Q = Polynomial(q_coeffs)
        self.dQ = self.Q.deriv()

    def P(self, t):
        return t * (1.0 - t) * self.Q(t)

    def dP(self, t):
        return (1.0 - 2.0 * t) * self.Q(t) + t * (1.0 - t) * self.dQ(t)

    def value(self, x):
        return self.P(self.fat.b(x))

    def deriv(self, x):
        return self.dP(self.fat.b(x)) * self.fat.b_deriv(x)


class SmoothCoefficient(Coefficient):
    def __init__(self, fn, dfn):
        self.fn, self.dfn = fn, dfn

    def value(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def deriv(self, x):
        return self.dfn(np.asarray(x, dtype=float))


class CouplingCminus(Coefficient):
    """``c₋`` solving ``c₋' = c₊' h₊²`` with ``c₋(-inf) = 0``.

    Values at Chebyshev points of every ``B`` component come from Gauss
    quadrature of ``c₊' h₊²``; each component carries a Chebyshev interpolant
    whose derivative is used for ``c₋'``.  On ``G`` the function is constant.
    """

    def __init__(self, fat: FatCantorSet, cplus: Coefficient, alpha, order=14):
        self.fat = fat
        self.w = Weights(alpha)
        lo, hi = fat.intervals[:, 0], fat.intervals[:, 1]
        self.fits = []
        start = 0.0
        self.starts = np.empty(lo.size)
        self.ends = np.empty(lo.size)
        g = lambda z: cplus.deriv(z) * self.w.h("+", z) ** 2
        for i, (a, b) in enumerate(zip(lo, hi)):
            nodes = Chebyshev.basis(order + 1).roots() * 0.5 * (b - a) + 0.5 * (a + b)
            nodes = np.concatenate([[a], nodes, [b]])
            # running integral from a to each node
            z, wz = _gauss(np.full(nodes.size, a), nodes)
            vals = start + np.sum((g(z) * wz).reshape(nodes.size, -1), axis=1)
            self.fits.append(Chebyshev.fit(nodes, vals, order + 1, domain=[a, b]))
            self.starts[i] = start
            start = float(vals[-1])
            self.ends[i] = start
        self.dfits = [c.deriv() for c in self.fits]
        self.limit = start

    def _locate(self, x):
        k = np.searchsorted(self.fat.intervals[:, 0], x, side="right") - 1
        inside = (k >= 0) & (x <= self.fat.intervals[np.clip(k, 0, None), 1])
        return k, inside

    def value(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        k, inside = self._locate(flat)
        out = np.where(k >= 0, self.ends[np.clip(k, 0, None)], 0.0)
        for i in np.unique(k[inside]):
            sel = inside & (k == i)
            out[sel] = self.fits[i](flat[sel])
        return out.reshape(x.shape)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        k, inside = self._locate(flat)
        out = np.zeros(flat.shape)
        for i in np.unique(k[inside]):
            sel = inside & (k == i)
            out[sel] = self.dfits[i](flat[sel])
        return out.reshape(x.shape)


@dataclass
class SubspacePair:
    """Coefficients ``(c₊, c₋)`` together with the assembled function."""

    fat: FatCantorSet
    alpha: float
    cplus: Coefficient
    cminus: Coefficient

    @property
    def weights(self):
        return Weights(self.alpha)

    def f(self, x):
        w = self.weights
        return 0.5 * (self.cplus.value(x) * w.h("+", x) + self.cminus.value(x) * w.h("-", x))

    def f_deriv(self, x):
        w, b = self.weights, self.weights.beta
        hp, hm = w.h("+", x), w.h("-", x)
        return 0.5 * (self.cplus.deriv(x) * hp + b * self.cplus.value(x) * hp
                      + self.cminus.deriv(x) * hm - b * self.cminus.value(x) * hm)

    def u(self, x):
        w = self.weights
        return 0.5 * w.beta * (self.cplus.value(x) * w.h("+", x) - self.cminus.value(x) * w.h("-", x))

    def scaled(self, factor):
        return SubspacePair(self.fat, self.alpha, ScaledCoefficient(self.cplus, factor),
                            ScaledCoefficient(self.cminus, factor))


def fat_cantor_pair(fat: FatCantorSet, alpha=0.5, q_coeffs=(4.0,)) -> SubspacePair:
    """``c₊ = P(b)`` with ``P(t) = t (1 - t) Q(t)`` and ``c₋`` from the coupling relation."""
    cplus = FatCantorProfile(fat, q_coeffs)
    return SubspacePair(fat, alpha, cplus, CouplingCminus(fat, cplus, alpha))


# ---------------------------------------------------------------------------
# Checks


def probe_points(fat: FatCantorSet, per_component=3):
    """Points of ``G`` (gap midpoints and outside points) and interior points of ``B``."""
    G = np.concatenate([0.5 * (fat.removed[:, 0] + fat.removed[:, 1]),
                        [fat.lo - 2.0, fat.lo - 0.5, fat.hi + 0.5, fat.hi + 2.0]])
    t = (np.arange(per_component) + 1.0) / (per_component + 1.0)
    a, b = fat.intervals[:, 0], fat.intervals[:, 1]
    B = (a[:, None] + (b - a)[:, None] * t).ravel()
    return np.sort(G), B


def _window(fat, tail=20.0):
    return (fat.lo - tail, fat.hi + tail)


def _integrate(fat, F, tail=20.0, max_len=0.05):
    edges = _panel_edges(fat, _window(fat, tail), max_len)
    x, w = _gauss(edges[:-1], edges[1:])
    return float(np.dot(w, F(x))), F(np.array(_window(fat, tail)))


def weighted_h1_norms(pair: SubspacePair, sign, tail=20.0):
    """``E±(c, c)`` and ``∫ c² dm±`` for the ``sign`` coefficient."""
    c = pair.cplus if sign == "+" else pair.cminus
    w = pair.weights
    e, e_edge = _integrate(pair.fat, lambda x: 0.5 * c.deriv(x) ** 2 * w.h(sign, x) ** 2, tail)
    m, m_edge = _integrate(pair.fat, lambda x: c.value(x) ** 2 * w.h(sign, x) ** 2, tail)
    return e, m, float(np.max(np.abs(np.concatenate([e_edge, m_edge]))))


def subspace_pair_residual(pair: SubspacePair, probes=None, tol=1e-6):
    """Flatness on ``G``, the coupling on ``B`` and weighted integrability.

    Returns a report with the largest ``|c±'|`` on ``G``, the largest
    ``|c₊' h₊ - c₋' h₋|`` on ``B`` and the weighted ``H^1`` norms.
    """
    fat = pair.fat
    G, B = probe_points(fat) if probes is None else probes
    G = np.asarray(G, dtype=float)
    B = np.asarray(B, dtype=float)
    edges = fat.breaks()
    for pts in (G, B):
        if pts.size and np.min(np.abs(pts[:, None] - edges[None, :])) == 0.0:
            raise ResolutionError("probe point on a boundary of B, where the derivative is undefined")
    if np.any(fat.in_B(G)) or not np.all(fat.in_B(B)):
        raise ResolutionError("probe points are not in the declared part of the line")
    w = pair.weights
    flat = max(float(np.max(np.abs(pair.cplus.deriv(G)))), float(np.max(np.abs(pair.cminus.deriv(G)))))
    coupling = pair.cplus.deriv(B) * w.h("+", B) - pair.cminus.deriv(B) * w.h("-", B)
    scale = 1.0 + float(np.max(np.abs(pair.cplus.deriv(B) * w.h("+", B))))
    coup = float(np.max(np.abs(coupling)))
    integrable = {}
    for sign in ("+", "-"):
        e, m, edge = weighted_h1_norms(pair, sign)
        integrable[sign] = {"energy": e, "l2": m, "tail": edge,
                            "finite": bool(np.isfinite(e) and np.isfinite(m) and edge <= 1e-10 * max(1.0, e + m))}
    ok = flat <= tol and coup <= tol * scale and all(v["finite"] for v in integrable.values())
    return {
        "flat_on_G": flat,
        "coupling": coup,
        "coupling_scale": scale,
        "integrable": integrable,
        "probe_points": {"G": int(G.size), "B": int(B.size)},
        "pass": bool(ok),
    }


class _RecoveredPair:
    """``c± = h∓ (f ± u/β)`` with ``u = f'(x0) + 2α ∫_{x0}^x f`` and ``x0`` in ``G``."""

    def __init__(self, fat, alpha, f, f_deriv, x0=None, tail=20.0):
        self.fat, self.w, self.alpha = fat, Weights(alpha), alpha
        self.f = f
        x0 = fat.lo - 1.0 if x0 is None else x0
        if fat.in_B(np.array([x0]))[0]:
            raise ResolutionError("anchor point must lie in G")
        edges = _panel_edges(fat, (x0, fat.hi + tail), 0.05)
        self.edges = edges
        x, w = _gauss(edges[:-1], edges[1:])
        cell = np.add.reduceat(w * f(x), np.arange(0, x.size, _T10.size))
        self.before = np.concatenate([[0.0], np.cumsum(cell)])
        self.u0 = float(f_deriv(np.array([x0]))[0])
        self.x0 = x0

    def integral(self, x):
        x = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, self.edges.size - 2)
        a = self.edges[k]
        z, wz = _gauss(a, x)
        part = np.sum((self.f(z) * wz).reshape(x.size, -1), axis=1)
        return self.before[k] + part

    def u(self, x):
        return self.u0 + 2.0 * self.alpha * self.integral(np.atleast_1d(x))

    def c(self, sign, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s = 1.0 if sign == "+" else -1.0
        h = self.w.h("-" if s > 0 else "+", x)
        return h * (self.f(x) + s * self.u(x) / self.w.beta)


def subspace_bijection_check(pair: SubspacePair, slack=1e-9, rt_tol=1e-4):
    """Round trips between pair and function, and the norm equivalence.

    ``E_1(f, f) = 1/2 ∫ f'² + ∫ f²`` is the form of ``H^1``, in which the
    complement lives; ``E±,1 = 1/2 ∫ c'² dm± + ∫ c² dm±``.
    """
    fat, alpha = pair.fat, pair.alpha
    G, B = probe_points(fat)
    x = np.sort(np.concatenate([G, B, np.linspace(fat.lo - 3.0, fat.hi + 3.0, 97)]))
    x = x[~np.isin(x, fat.breaks())]
    rec = _RecoveredPair(fat, alpha, pair.f, pair.f_deriv)
    err_pair = max(float(np.max(np.abs(rec.c("+", x) - pair.cplus.value(x)))),
                   float(np.max(np.abs(rec.c("-", x) - pair.cminus.value(x)))))
    w = pair.weights
    f_back = 0.5 * (rec.c("+", x) * w.h("+", x) + rec.c("-", x) * w.h("-", x))
    err_f = float(np.max(np.abs(f_back - pair.f(x))))
    e1, edge = _integrate(fat, lambda z: 0.5 * pair.f_deriv(z) ** 2 + pair.f(z) ** 2)
    lo_c, hi_c = min(alpha, 0.5), 2 * alpha + 4
    signs = {}
    ok = err_pair <= rt_tol and err_f <= rt_tol
    for sign in ("+", "-"):
        e, m, _ = weighted_h1_norms(pair, sign)
        epm = e + m
        lower, upper = e1 - lo_c * epm, hi_c * epm - e1
        passed = lower >= -slack and upper >= -slack
        ok &= passed
        signs[sign] = {"E": e, "Epm1": epm, "lower_margin": lower, "upper_margin": upper, "pass": bool(passed)}
    return {
        "pair_roundtrip_error": err_pair,
        "function_roundtrip_error": err_f,
        "E1": e1,
        "lower_constant": lo_c,
        "upper_constant": hi_c,
        "signs": signs,
        "pass": bool(ok),
    }


def random_pair(rng, alpha=None, depth=6):
    """A fat-Cantor pair with random support, polynomial and ``alpha``."""
    lo = float(rng.uniform(-2.0, 1.0))
    fat = FatCantorSet(lo, lo + float(rng.uniform(0.5, 2.0)), depth)
    a = float(rng.choice([0.25, 0.5, 1.0, 2.0])) if alpha is None else alpha
    return fat_cantor_pair(fat, a, rng.normal(size=3))


def appendix_config_pair(cfg):
    """Build the fixture pair from ``{"fat_cantor": {...}, "alpha": ...}``."""
    fc = cfg.get("fat_cantor")
    if not isinstance(fc, dict):
        raise ConfigError("missing 'fat_cantor' section")
    support = fc.get("support", [0, 1])
    if not (isinstance(support, (list, tuple)) and len(support) == 2):
        raise ConfigError("'support' must be a two-element list")
    fat = FatCantorSet(float(support[0]), float(support[1]), int(fc.get("depth", 8)))
    alpha = float(cfg.get("alpha", 0.5))
    if not alpha > 0:
        raise ConfigError("alpha must be positive")
    q = fc.get("q_coeffs", [4.0])
    return fat_cantor_pair(fat, alpha, q)


def smooth_violation(fat: FatCantorSet, alpha=0.5):
    """A pair whose ``c₊`` varies on ``G``; used to exercise the flatness check."""
    cplus = SmoothCoefficient(lambda x: np.exp(-(x - 0.5 * (fat.lo + fat.hi)) ** 2),
                              lambda x: -2 * (x - 0.5 * (fat.lo + fat.hi)) * np.exp(-(x - 0.5 * (fat.lo + fat.hi)) ** 2))
    return SubspacePair(fat, alpha, cplus, ZeroCoefficient())


__all__ = [
    "CouplingCminus",
    "FatCantorProfile",
    "FatCantorSet",
    "SubspacePair",
    "SubspaceScale",
    "appendix_config_pair",
    "fat_cantor_pair",
    "probe_points",
    "random_pair",
    "smooth_violation",
    "subspace_bijection_check",
    "subspace_pair_residual",
    "weighted_h1_norms",
]
