"""Profiles, Sobolev test functions and functions on an extension.

A function ``f`` on an extension is described per interval by three
evaluators: its value, its derivative on the gaps (where ``dt = dx``) and its
derivative with respect to ``t`` on ``W``, expressed in the darned coordinate
``s = j(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigError

# ---------------------------------------------------------------------------
# Profiles: functions of one variable with derivatives and kink locations


class Profile:
    """A Lipschitz function of one real variable with a derivative evaluator."""

    breaks: tuple = ()

    def value(self, s):
        raise NotImplementedError

    def deriv(self, s):
        raise NotImplementedError

    def __call__(self, s):
        return self.value(s)

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantProfile(Profile):
    c: float = 0.0

    def value(self, s):
        return np.full(np.shape(s), float(self.c))

    def deriv(self, s):
        return np.zeros(np.shape(s))

    def to_dict(self):
        return {"kind": "constant", "value": self.c}


@dataclass(frozen=True)
class PolynomialProfile(Profile):
    """Polynomial with coefficients in increasing degree."""

    coeffs: tuple = (0.0,)

    @property
    def _p(self):
        return Polynomial(self.coeffs)

    def value(self, s):
        s = np.asarray(s, dtype=float)
        return self._p(s) if s.ndim else float(self._p(s))

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        return self._p.deriv()(s) if s.ndim else float(self._p.deriv()(s))

    def to_dict(self):
        return {"kind": "polynomial", "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class PiecewiseLinearProfile(Profile):
    """Linear interpolation through ``(nodes, values)``, constant outside."""

    nodes: tuple = (0.0, 1.0)
    values: tuple = (0.0, 0.0)

    def __post_init__(self):
        if len(self.nodes) != len(self.values) or len(self.nodes) < 2:
            raise ConfigError("piecewise-linear profile needs matching nodes and values")
        if np.any(np.diff(self.nodes) <= 0):
            raise ConfigError("profile nodes must increase")

    @property
    def breaks(self):
        return tuple(self.nodes)

    def value(self, s):
        return np.interp(s, self.nodes, self.values)

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        nodes = np.asarray(self.nodes)
        slopes = np.diff(self.values) / np.diff(nodes)
        k = np.searchsorted(nodes, s, side="right") - 1
        inside = (k >= 0) & (k < slopes.size)
        return np.where(inside, slopes[np.clip(k, 0, slopes.size - 1)], 0.0)

    def to_dict(self):
        return {"kind": "piecewise_linear", "nodes": list(self.nodes), "values": list(self.values)}


@dataclass(frozen=True)
class ExponentialProfile(Profile):
    """``amp * exp(rate * s)``."""

    amp: float = 1.0
    rate: float = -1.0

    def value(self, s):
        return self.amp * np.exp(self.rate * np.asarray(s, dtype=float))

    def deriv(self, s):
        return self.rate * self.value(s)

    def to_dict(self):
        return {"kind": "exponential", "amp": self.amp, "rate": self.rate}


@dataclass(frozen=True)
class CallableProfile(Profile):
    """Profile from explicit value and derivative callables."""

    fn: object = None
    dfn: object = None
    breaks: tuple = ()
    name: str = "callable"

    def value(self, s):
        return self.fn(np.asarray(s, dtype=float))

    def deriv(self, s):
        return self.dfn(np.asarray(s, dtype=float))

    def to_dict(self):
        return {"kind": self.name}


@dataclass(frozen=True)
class LinearProfile(Profile):
    """Linear combination ``Σ c_i ψ_i``."""

    terms: tuple = ()

    @property
    def breaks(self):
        return tuple(sorted({b for _, p in self.terms for b in p.breaks}))

    def value(self, s):
        return sum(c * p.value(s) for c, p in self.terms) + np.zeros(np.shape(s))

    def deriv(self, s):
        return sum(c * p.deriv(s) for c, p in self.terms) + np.zeros(np.shape(s))

    def to_dict(self):
        return {"kind": "linear", "terms": [[c, p.to_dict()] for c, p in self.terms]}


@dataclass(frozen=True)
class CutoffProfile(Profile):
    """``ψ(s) (1 - θ_k(s - s0))`` with ``θ_k`` = 1 on ``[0, k]``, ramping to 0 on ``[k, 2k]``."""

    inner: Profile = None
    k: float = 1.0
    s0: float = 0.0

    @property
    def breaks(self):
        return tuple(sorted(set(self.inner.breaks) | {self.s0 + self.k, self.s0 + 2 * self.k}))

    def theta(self, s):
        u = np.asarray(s, dtype=float) - self.s0
        return np.clip(2.0 - u / self.k, 0.0, 1.0)

    def theta_deriv(self, s):
        u = np.asarray(s, dtype=float) - self.s0
        return np.where((u > self.k) & (u < 2 * self.k), -1.0 / self.k, 0.0)

    def value(self, s):
        return self.inner.value(s) * (1.0 - self.theta(s))

    def deriv(self, s):
        return self.inner.deriv(s) * (1.0 - self.theta(s)) - self.inner.value(s) * self.theta_deriv(s)

    def to_dict(self):
        return {"kind": "cutoff", "k": self.k, "s0": self.s0, "inner": self.inner.to_dict()}


# ---------------------------------------------------------------------------
# Normal contractions


@dataclass(frozen=True)
class Contraction:
    """Piecewise-linear map ``φ`` given by nodes; validated as a normal contraction."""

    nodes: tuple
    values: tuple
    name: str = "piecewise"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.size != values.size or nodes.size < 2 or np.any(np.diff(nodes) <= 0):
            raise ConfigError("contraction needs increasing nodes with matching values")
        if not nodes[0] <= 0.0 <= nodes[-1]:
            raise ConfigError("contraction nodes must bracket 0")
        if abs(np.interp(0.0, nodes, values)) > 1e-15:
            raise ConfigError("a normal contraction must fix 0")
        slopes = np.diff(values) / np.diff(nodes)
        if np.any(np.abs(slopes) > 1.0 + 1e-12):
            raise ConfigError("a normal contraction must be 1-Lipschitz")

    @classmethod
    def unit(cls):
        """``φ(x) = 1 ∧ x ∨ 0``."""
        return cls((-1.0, 0.0, 1.0, 2.0), (0.0, 0.0, 1.0, 1.0), "unit")

    @classmethod
    def clamp(cls, lo, hi):
        return cls((lo - 1.0, lo, hi, hi + 1.0), (lo, lo, hi, hi), f"clamp[{lo},{hi}]")

    @classmethod
    def identity(cls):
        return cls((-1.0, 1.0), (-1.0, 1.0), "identity")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        nodes = np.asarray(self.nodes)
        values = np.asarray(self.values)
        s0 = (values[1] - values[0]) / (nodes[1] - nodes[0])
        s1 = (values[-1] - values[-2]) / (nodes[-1] - nodes[-2])
        out = np.interp(y, nodes, values)
        out = np.where(y < nodes[0], values[0] + s0 * (y - nodes[0]), out)
        return np.where(y > nodes[-1], values[-1] + s1 * (y - nodes[-1]), out)

    def deriv(self, y):
        y = np.asarray(y, dtype=float)
        nodes = np.asarray(self.nodes)
        slopes = np.diff(self.values) / np.diff(nodes)
        k = np.clip(np.searchsorted(nodes, y, side="right") - 1, 0, slopes.size - 1)
        return slopes[k]

    @property
    def kinks(self):
        return tuple(self.nodes)


@dataclass(frozen=True)
class ComposedProfile(Profile):
    """``φ ∘ ψ``; kinks are located on a sampling window ``span``."""

    phi: Contraction = None
    inner: Profile = None
    span: tuple = (0.0, 1.0)

    @property
    def breaks(self):
        s = np.linspace(self.span[0], self.span[1], 4097)
        v = self.inner.value(s)
        out = set(self.inner.breaks)
        for y in self.phi.kinks:
            d = v - y
            idx = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)
            for i in idx:
                lo, hi = s[i], s[i + 1]
                for _ in range(60):
                    m = 0.5 * (lo + hi)
                    if np.sign(self.inner.value(m) - y) == np.sign(d[i]):
                        lo = m
                    else:
                        hi = m
                out.add(0.5 * (lo + hi))
        return tuple(sorted(out))

    def value(self, s):
        return self.phi(self.inner.value(s))

    def deriv(self, s):
        return self.phi.deriv(self.inner.value(s)) * self.inner.deriv(s)

    def to_dict(self):
        return {"kind": "composed", "phi": self.phi.name, "inner": self.inner.to_dict()}


# ---------------------------------------------------------------------------
# Functions in H^1(R)


_BUMP_HINTS = np.array([0.15, 0.3, 0.45, 0.55, 0.65, 0.72, 0.78, 0.84, 0.88, 0.92, 0.95, 0.975, 1.0])


@dataclass(frozen=True)
class H1Function:
    """A Sobolev function of closed form.

    Kinds and parameters:

    * ``hat``: ``center``, ``halfwidth``, ``height``
    * ``spline``: cubic B-spline bump, ``center``, ``halfwidth``, ``height``
    * ``bump``: smooth ``exp(-1/(1-u^2))`` bump, ``center``, ``halfwidth``, ``height``
    * ``exponential_piece``: ``height * exp(-rate |x - center|)``
    * ``gaussian``: ``height * exp(-(x - center)^2 / (2 width^2))``
    * ``indicator``: ``1`` on ``[lo, hi]`` (in ``L^2`` only, for the integral lemma)
    * ``custom-sampled``: linear interpolation through ``xs``/``ys`` with zero ends
    """

    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("hat", "spline", "bump", "exponential_piece", "gaussian", "indicator", "custom-sampled")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown function kind {self.kind!r}")
        if self.kind == "custom-sampled":
            xs, ys = self.params["xs"], self.params["ys"]
            if len(xs) != len(ys) or len(xs) < 2 or np.any(np.diff(xs) <= 0):
                raise ConfigError("custom-sampled function needs increasing xs with matching ys")
            if ys[0] != 0 or ys[-1] != 0:
                raise ConfigError("custom-sampled function must vanish at both ends")

    def _p(self, name, default=None):
        return float(self.params.get(name, default))

    @property
    def support(self):
        k = self.kind
        if k in ("hat", "spline", "bump"):
            c, w = self._p("center", 0.0), self._p("halfwidth", 1.0)
            return (c - w, c + w)
        if k == "indicator":
            return (self._p("lo", 0.0), self._p("hi", 1.0))
        if k == "custom-sampled":
            return (float(self.params["xs"][0]), float(self.params["xs"][-1]))
        return (-math.inf, math.inf)

    @property
    def breaks(self):
        k = self.kind
        c, w = self._p("center", 0.0), self._p("halfwidth", 1.0)
        if k == "hat":
            return (c - w, c, c + w)
        if k == "spline":
            return tuple(c + w * np.array([-1.0, -0.5, 0.0, 0.5, 1.0]))
        if k == "bump":
            # graded toward the flat ends, where the bump varies fastest relative to its size
            return tuple(c + w * np.concatenate([-_BUMP_HINTS[::-1], [0.0], _BUMP_HINTS]))
        if k == "exponential_piece":
            return (c,)
        if k == "indicator":
            return self.support
        if k == "custom-sampled":
            return tuple(float(v) for v in self.params["xs"])
        return ()

    def value(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kind
        h = self._p("height", 1.0)
        c = self._p("center", 0.0)
        if k == "hat":
            w = self._p("halfwidth", 1.0)
            return h * np.clip(1.0 - np.abs(x - c) / w, 0.0, None)
        if k == "spline":
            w = self._p("halfwidth", 1.0)
            u = np.abs(x - c) / w * 2.0
            return h * np.where(u < 1, (4 - 6 * u**2 + 3 * u**3) / 4, np.where(u < 2, (2 - u) ** 3 / 4, 0.0))
        if k == "bump":
            w = self._p("halfwidth", 1.0)
            u = (x - c) / w
            inside = np.abs(u) < 1
            us = np.where(inside, u, 0.0)
            return h * np.where(inside, np.exp(1.0 - 1.0 / (1.0 - us**2)), 0.0)
        if k == "exponential_piece":
            return h * np.exp(-self._p("rate", 1.0) * np.abs(x - c))
        if k == "gaussian":
            s = self._p("width", 1.0)
            return h * np.exp(-((x - c) ** 2) / (2 * s**2))
        if k == "indicator":
            return np.where((x >= self._p("lo", 0.0)) & (x <= self._p("hi", 1.0)), 1.0, 0.0)
        xs, ys = self.params["xs"], self.params["ys"]
        return np.interp(x, xs, ys, left=0.0, right=0.0)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kind
        h = self._p("height", 1.0)
        c = self._p("center", 0.0)
        if k == "hat":
            w = self._p("halfwidth", 1.0)
            return np.where(np.abs(x - c) < w, -h * np.sign(x - c) / w, 0.0)
        if k == "spline":
            w = self._p("halfwidth", 1.0)
            u = np.abs(x - c) / w * 2.0
            du = np.sign(x - c) * 2.0 / w
            d = np.where(u < 1, (-12 * u + 9 * u**2) / 4, np.where(u < 2, -3 * (2 - u) ** 2 / 4, 0.0))
            return h * d * du
        if k == "bump":
            w = self._p("halfwidth", 1.0)
            u = (x - c) / w
            inside = np.abs(u) < 1
            us = np.where(inside, u, 0.0)
            g = np.exp(1.0 - 1.0 / (1.0 - us**2))
            return h * np.where(inside, g * (-2 * us / (1 - us**2) ** 2) / w, 0.0)
        if k == "exponential_piece":
            r = self._p("rate", 1.0)
            return -r * np.sign(x - c) * self.value(x)
        if k == "gaussian":
            s = self._p("width", 1.0)
            return -(x - c) / s**2 * self.value(x)
        if k == "indicator":
            return np.zeros(x.shape)
        xs, ys = np.asarray(self.params["xs"]), np.asarray(self.params["ys"])
        slopes = np.diff(ys) / np.diff(xs)
        j = np.searchsorted(xs, x, side="right") - 1
        inside = (j >= 0) & (j < slopes.size)
        return np.where(inside, slopes[np.clip(j, 0, slopes.size - 1)], 0.0)

    def __call__(self, x):
        return self.value(x)

    def to_dict(self):
        return {"kind": self.kind, "params": dict(self.params)}


# ---------------------------------------------------------------------------
# Functions on an extension


class ExtensionFunction:
    """Base class for functions on an :class:`~dirext.extension.Extension`.

    Subclasses implement ``value_on(n, x)``, ``deriv_u_on(n, x)`` and
    ``deriv_w(n, s, x)`` for points of interval ``n`` (its closure for the
    value, so that one-sided limits at shared endpoints are available).
    """

    ext = None

    def value_on(self, n, x):
        raise NotImplementedError

    def deriv_u_on(self, n, x):
        raise NotImplementedError

    def deriv_w(self, n, s, x):
        """Derivative with respect to ``t`` on ``W_n`` at ``x = j^{-1}(s)``."""
        return np.zeros(np.shape(s))

    @property
    def breaks(self):
        """Points where the value may have kinks (Lebesgue quadrature hints)."""
        return ()

    def s_breaks(self, n):
        """Darned coordinates where ``deriv_w`` may jump on ``W_n``."""
        return ()

    def _dispatch(self, method, x):
        x = np.asarray(x, dtype=float)
        idx = self.ext.locate(x)
        out = np.full(x.shape, np.nan)
        for n in np.unique(idx):
            if n < 0:
                continue
            sel = idx == n
            out[sel] = method(int(n), x[sel])
        return out

    def value(self, x):
        return self._dispatch(self.value_on, x)

    def deriv_u(self, x):
        return self._dispatch(self.deriv_u_on, x)

    def __call__(self, x):
        return self.value(x)

    # linear structure
    def __add__(self, other):
        return LinearCombination(self.ext, ((1.0, self), (1.0, other)))

    def __sub__(self, other):
        return LinearCombination(self.ext, ((1.0, self), (-1.0, other)))

    def __mul__(self, c):
        return LinearCombination(self.ext, ((float(c), self),))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


class ZeroFunction(ExtensionFunction):
    def __init__(self, ext):
        self.ext = ext

    def value_on(self, n, x):
        return np.zeros(np.shape(x))

    def deriv_u_on(self, n, x):
        return np.zeros(np.shape(x))


class EmbeddedH1(ExtensionFunction):
    """A function of ``H^1(R)`` viewed on the extension (no variation on ``W``)."""

    def __init__(self, ext, g: H1Function):
        self.ext = ext
        self.g = g

    def value_on(self, n, x):
        return self.g.value(x)

    def deriv_u_on(self, n, x):
        return self.g.deriv(x)

    @property
    def breaks(self):
        return self.g.breaks


class PiecewiseSmooth(ExtensionFunction):
    """Per-interval smooth functions of ``x`` with no variation on ``W``."""

    def __init__(self, ext, values, derivs, breaks=(), name="piecewise"):
        self.ext = ext
        self.values = tuple(values)
        self.derivs = tuple(derivs)
        self._breaks = tuple(breaks)
        self.name = name

    def value_on(self, n, x):
        return self.values[n](np.asarray(x, dtype=float))

    def deriv_u_on(self, n, x):
        return self.derivs[n](np.asarray(x, dtype=float))

    @property
    def breaks(self):
        return self._breaks


class DarnedFunction(ExtensionFunction):
    """``ψ_n ∘ j_n`` on each interval: constant on gaps, varying only on ``W``.

    Intervals without a profile carry the zero function.
    """

    def __init__(self, ext, profiles):
        self.ext = ext
        if not isinstance(profiles, dict):
            profiles = dict(enumerate(profiles))
        self.profiles = {int(k): v for k, v in profiles.items() if v is not None}

    def profile(self, n):
        return self.profiles.get(n, ConstantProfile(0.0))

    def value_on(self, n, x):
        sf = self.ext.parts[n]
        x = np.asarray(x, dtype=float)
        if not sf.has_singular_mass:
            return self.profile(n).value(np.zeros(x.shape))
        return self.profile(n).value(sf.j_closure(x))

    def deriv_u_on(self, n, x):
        return np.zeros(np.shape(x))

    def deriv_w(self, n, s, x):
        return self.profile(n).deriv(s)

    def s_breaks(self, n):
        return self.profile(n).breaks


class ProfileFunction(ExtensionFunction):
    """``γ_n ∘ t_n`` on each interval from profiles in scale coordinates."""

    def __init__(self, ext, gammas):
        self.ext = ext
        self.gammas = tuple(gammas)

    def value_on(self, n, x):
        return self.gammas[n].value(self.ext.parts[n].eval_t(x))

    def deriv_u_on(self, n, x):
        return self.gammas[n].deriv(self.ext.parts[n].eval_t(x))

    def deriv_w(self, n, s, x):
        return self.gammas[n].deriv(self.ext.parts[n].eval_t(x))

    @property
    def breaks(self):
        out = []
        for n, g in enumerate(self.gammas):
            if g.breaks:
                sf = self.ext.parts[n]
                tb = np.asarray(g.breaks, dtype=float)
                lo, hi = sf.interval.a, sf.interval.b
                t_lo = -np.inf if not math.isfinite(lo) else float(sf.eval_t(lo))
                t_hi = np.inf if not math.isfinite(hi) else float(sf.eval_t(hi))
                tb = tb[(tb > t_lo) & (tb < t_hi)]
                out += sf.eval_t_inv(tb).tolist()
        return tuple(out)

    def s_breaks(self, n):
        g = self.gammas[n]
        if not g.breaks:
            return ()
        sf = self.ext.parts[n]
        x = np.asarray([b for b in self.breaks if sf.interval.contains(b)])
        return tuple(sf.darning_j(x).tolist()) if x.size else ()


class LinearCombination(ExtensionFunction):
    def __init__(self, ext, terms):
        self.ext = ext
        self.terms = tuple(terms)

    def value_on(self, n, x):
        return sum(c * f.value_on(n, x) for c, f in self.terms) + np.zeros(np.shape(x))

    def deriv_u_on(self, n, x):
        return sum(c * f.deriv_u_on(n, x) for c, f in self.terms) + np.zeros(np.shape(x))

    def deriv_w(self, n, s, x):
        return sum(c * f.deriv_w(n, s, x) for c, f in self.terms) + np.zeros(np.shape(s))

    @property
    def breaks(self):
        return tuple(sorted({b for _, f in self.terms for b in f.breaks}))

    def s_breaks(self, n):
        return tuple(sorted({b for _, f in self.terms for b in f.s_breaks(n)}))


class ComposedFunction(ExtensionFunction):
    """``φ ∘ f`` for a normal contraction ``φ``."""

    def __init__(self, phi: Contraction, f: ExtensionFunction):
        self.ext = f.ext
        self.phi = phi
        self.f = f

    def value_on(self, n, x):
        return self.phi(self.f.value_on(n, x))

    def deriv_u_on(self, n, x):
        return self.phi.deriv(self.f.value_on(n, x)) * self.f.deriv_u_on(n, x)

    def deriv_w(self, n, s, x):
        return self.phi.deriv(self.f.value_on(n, x)) * self.f.deriv_w(n, s, x)

    @property
    def breaks(self):
        return self.f.breaks


class TProfileView(Profile):
    """The profile ``γ = f ∘ t_n^{-1}`` of a function in scale coordinates."""

    def __init__(self, f: ExtensionFunction, n: int):
        self.f = f
        self.n = n

    def value(self, tau):
        sf = self.f.ext.parts[self.n]
        return self.f.value_on(self.n, sf.eval_t_inv(tau))

    def deriv(self, tau):
        sf = self.f.ext.parts[self.n]
        x = sf.eval_t_inv(tau)
        in_gap = sf.locate_gap(x)
        out = np.asarray(self.f.deriv_u_on(self.n, x), dtype=float)
        if sf.has_singular_mass and not np.all(in_gap):
            s = sf.j_closure(x)
            out = np.where(in_gap, out, self.f.deriv_w(self.n, s, x))
        return out
