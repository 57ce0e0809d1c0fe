"""The α-orthogonal complement of ``H^1`` through coefficient pairs.

An element ``f`` of the complement is written as

    f = (c₊ h₊ + c₋ h₋) / 2,    h±(x) = exp(±βx),  β = sqrt(2α),

where each ``c±`` is a darned profile ``ψ± ∘ j_n`` on every interval and

    u = (β/2) (c₊ h₊ - c₋ h₋)

extends to an absolutely continuous function with ``u' = 2α f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import Estimate, energy_E_alpha, oc_max_residual, probe_grid
from .errors import InvalidPairError, NotInSpaceError
from .extension import Extension, Weights
from .functions import (
    ComposedFunction,
    ComposedProfile,
    ConstantProfile,
    Contraction,
    DarnedFunction,
    ExtensionFunction,
    H1Function,
    Profile,
)
from .quadrature import _RICHARDSON, gauss_nodes

# ---------------------------------------------------------------------------
# Profile helpers


def as_profiles(ext, profiles):
    """Normalize profiles to a dict ``{n: Profile}`` covering every interval."""
    if isinstance(profiles, DarnedFunction):
        profiles = profiles.profiles
    if not isinstance(profiles, dict):
        profiles = dict(enumerate(profiles))
    return {n: profiles.get(n) or ConstantProfile(0.0) for n in range(len(ext.parts))}




def deriv_at(psi, s, x):
    """``ψ'(s)`` with position-defined profiles evaluated at the given ``x`` in ``W``."""
    if isinstance(psi, _PointwiseProfile) and psi.sf.has_singular_mass:
        return psi._deriv_x(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
    return psi.deriv(s)


class _PointwiseProfile(Profile):
    """A profile defined through positions ``x = j^{-1}(s)`` on one interval.

    Subclasses implement ``_value_x(s, x)`` and ``_deriv_x(s, x)``.  Intervals
    without singular mass carry a constant, evaluated at the base point.
    """

    def __init__(self, ext, n, breaks=()):
        self.ext = ext
        self.n = n
        self.sf = ext.parts[n]
        self.breaks = tuple(breaks)

    def _x(self, s):
        return self.sf.j_inv(s)

    def value(self, s):
        s = np.asarray(s, dtype=float)
        if not self.sf.has_singular_mass:
            x = np.full(s.shape, self.sf.e)
            return self._value_x(np.zeros(s.shape), x)
        return self._value_x(s, self._x(s))

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        if not self.sf.has_singular_mass:
            return np.zeros(s.shape)
        return self._deriv_x(s, self._x(s))


def _cancel(a, b, ulps=64):
    """``a + b`` with results below the rounding floor of the terms set to zero.

    The weights amplify such residues without bound in the tails.
    """
    out = a + b
    floor = ulps * np.finfo(float).eps * (np.abs(a) + np.abs(b))
    return np.where(np.abs(out) <= floor, 0.0, out)


class CminusProfile(_PointwiseProfile):
    """``c₋ = c₊ h₊² - 2β ∫_{-inf}^x c₊ h₊² dz`` on one interval."""

    def __init__(self, ext, n, cplus: DarnedFunction, cumulative):
        super().__init__(ext, n, cplus.profile(n).breaks)
        self.cplus = cplus
        self.cum = cumulative

    def _value_x(self, s, x):
        c = self.cplus.profile(self.n).value(s) if self.sf.has_singular_mass else self.cplus.value_on(self.n, x)
        return _cancel(c * self.ext.h("+", x) ** 2, -2.0 * self.ext.beta * self.cum(x))

    def _deriv_x(self, s, x):
        return deriv_at(self.cplus.profile(self.n), s, x) * self.ext.h("+", x) ** 2

    def to_dict(self):
        return {"kind": "cminus_from_cplus", "interval": self.n}


class CplusProfile(_PointwiseProfile):
    """``c₊ = c₋ h₋² + 2β ∫_x^inf c₋ h₋² dz`` on one interval."""

    def __init__(self, ext, n, cminus: DarnedFunction, cumulative):
        super().__init__(ext, n, cminus.profile(n).breaks)
        self.cminus = cminus
        self.cum = cumulative

    def _value_x(self, s, x):
        c = self.cminus.profile(self.n).value(s) if self.sf.has_singular_mass else self.cminus.value_on(self.n, x)
        return _cancel(c * self.ext.h("-", x) ** 2, 2.0 * self.ext.beta * (self.cum.total - self.cum(x)))

    def _deriv_x(self, s, x):
        return deriv_at(self.cminus.profile(self.n), s, x) * self.ext.h("-", x) ** 2

    def to_dict(self):
        return {"kind": "cplus_from_cminus", "interval": self.n}


class DecomposedProfile(_PointwiseProfile):
    """``c₊ = h₋ (f + u/β)`` or ``c₋ = h₊ (f - u/β)`` from a function and its ``u``."""

    def __init__(self, ext, n, f, u, sign):
        super().__init__(ext, n, f.s_breaks(n))
        self.f = f
        self.u = u
        self.sign = 1.0 if sign == "+" else -1.0

    def _x(self, s):
        # a gap value is sampled inside its gap, where f and u are known exactly
        x = self.sf.j_inv(s)
        g = self.sf.gaps(self.ext.depth)
        if len(g.gaps) == 0:
            return x
        gs = g.gap_S - self.sf._S_e
        k = np.clip(np.searchsorted(gs, s), 0, gs.size - 1)
        hit = np.abs(gs[k] - s) <= 1e-15 * (1.0 + np.abs(s))
        lo, hi = g.gaps[k, 0], g.gaps[k, 1]
        inner = np.where(np.isinf(lo), hi - 1.0, np.where(np.isinf(hi), lo + 1.0, 0.5 * (lo + hi)))
        return np.where(hit, inner, x)

    def _value_x(self, s, x):
        h = self.ext.h("-" if self.sign > 0 else "+", x)
        return h * (self.f.value_on(self.n, x) + self.sign * self.u(x) / self.ext.beta)

    def _deriv_x(self, s, x):
        h = self.ext.h("-" if self.sign > 0 else "+", x)
        return h * self.f.deriv_w(self.n, s, x)

    def deriv(self, s):
        # derivatives live on W: no gap sampling here
        s = np.asarray(s, dtype=float)
        if not self.sf.has_singular_mass:
            return np.zeros(s.shape)
        return self._deriv_x(s, self.sf.j_inv(s))

    def to_dict(self):
        return {"kind": "decomposed", "interval": self.n, "sign": "+" if self.sign > 0 else "-"}


# ---------------------------------------------------------------------------
# Complement elements


class ComplementFunction(ExtensionFunction):
    """``f = (c₊ h₊ + c₋ h₋) / 2`` assembled from a coefficient pair."""

    def __init__(self, elem):
        self.elem = elem
        self.ext = elem.ext

    def value_on(self, n, x):
        e = self.elem
        return 0.5 * (e.cplus.value_on(n, x) * self.ext.h("+", x) + e.cminus.value_on(n, x) * self.ext.h("-", x))

    def deriv_u_on(self, n, x):
        return self.elem.u_on(n, x)

    def deriv_w(self, n, s, x):
        e = self.elem
        return 0.5 * (
            deriv_at(e.cplus.profile(n), s, x) * self.ext.h("+", x)
            + deriv_at(e.cminus.profile(n), s, x) * self.ext.h("-", x)
        )

    def s_breaks(self, n):
        return tuple(sorted(set(self.elem.cplus.s_breaks(n)) | set(self.elem.cminus.s_breaks(n))))


@dataclass
class ComplementElement:
    """A coefficient pair ``(c₊, c₋)`` stored as darned profiles per interval."""

    ext: Extension
    cplus_profiles: dict
    cminus_profiles: dict
    _f: ExtensionFunction = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.cplus_profiles = as_profiles(self.ext, self.cplus_profiles)
        self.cminus_profiles = as_profiles(self.ext, self.cminus_profiles)

    @property
    def cplus(self):
        return DarnedFunction(self.ext, self.cplus_profiles)

    @property
    def cminus(self):
        return DarnedFunction(self.ext, self.cminus_profiles)

    def c(self, sign):
        return self.cplus if sign == "+" else self.cminus

    def profiles(self, sign):
        return self.cplus_profiles if sign == "+" else self.cminus_profiles

    def u_on(self, n, x):
        ext = self.ext
        return 0.5 * ext.beta * (
            self.cplus.value_on(n, x) * ext.h("+", x) - self.cminus.value_on(n, x) * ext.h("-", x)
        )

    def u(self, x):
        return self.f.deriv_u(x)

    @property
    def f(self):
        if self._f is None:
            self._f = ComplementFunction(self)
        return self._f

    def c2_residual(self, depth=4):
        """Largest ``|u(y) - u(x) - 2α ∫_x^y f|`` over pairs of probe points."""
        res, _, _ = oc_max_residual(self.ext, self.f, depth=depth)
        return res

    def coupling_residual(self):
        """Largest ``|ψ₊' h₊ - ψ₋' h₋|`` on the quadrature nodes of every ``W_n``."""
        out = 0.0
        for n, sf in enumerate(self.ext.parts):
            if not sf.has_singular_mass:
                continue
            s = self.ext.w_rule(n, "s").s
            x = sf.j_inv(s)
            r = self.cplus_profiles[n].deriv(s) * self.ext.h("+", x) - self.cminus_profiles[n].deriv(s) * self.ext.h("-", x)
            out = max(out, float(np.max(np.abs(r))) if r.size else 0.0)
        return out


# ---------------------------------------------------------------------------
# Running integrals of c h² in two independent ways


def _lebesgue_cumulative(ext, c: DarnedFunction, sign):
    """``x -> ∫_{-inf}^x c h±² dz`` by Gauss panels."""
    F = lambda x: c.value(x) * ext.h(sign, x) ** 2
    return ext.cumulative(F, ())


class AtomCumulative:
    """``x -> ∫_{-inf}^x c₊ h₊² dz`` by closed-form exponential integrals.

    On every gap ``c₊`` is the constant ``ψ(s_gap)``; on every cover piece it is
    replaced by its value at the centre in the darned coordinate.
    """

    def __init__(self, ext, c: DarnedFunction, sign="+"):
        self.ext = ext
        self.sign = sign
        w = ext.weights
        lo_all, hi_all, val_all = [], [], []
        for n, sf in enumerate(ext.parts):
            psi = c.profile(n)
            g = sf.gaps(ext.depth)
            if sf.has_singular_mass:
                gap_val = psi.value(g.gap_S - sf._S_e)
                cov_val = psi.value(g.cover_S - sf._S_e + 0.5 * g.cover_mass)
            else:
                gap_val = psi.value(np.zeros(len(g.gaps)))
                cov_val = np.zeros(0)
            lo_all += [g.gaps[:, 0], g.cover[:, 0]]
            hi_all += [g.gaps[:, 1], g.cover[:, 1]]
            val_all += [gap_val, cov_val]
            U = g.unresolved
            if len(U):
                mid = np.where(np.isfinite(U[:, 0]) & np.isfinite(U[:, 1]), 0.5 * (U[:, 0] + U[:, 1]),
                               np.where(np.isfinite(U[:, 0]), U[:, 0], U[:, 1]))
                lo_all.append(U[:, 0])
                hi_all.append(U[:, 1])
                val_all.append(c.value_on(n, mid))
        lo = np.concatenate(lo_all)
        hi = np.concatenate(hi_all)
        val = np.concatenate(val_all)
        o = np.argsort(lo, kind="stable")
        self.lo, self.hi, self.val = lo[o], hi[o], val[o]
        with np.errstate(invalid="ignore"):
            mass = np.where(self.val == 0.0, 0.0, self.val * w.h2_integral(sign, self.lo, self.hi))
        self.before = np.concatenate([[0.0], np.cumsum(mass)])
        self.total = float(self.before[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(self.lo, x, side="right") - 1, 0, None)
        top = np.minimum(x, self.hi[k])
        with np.errstate(invalid="ignore"):
            part = np.where(self.val[k] == 0.0, 0.0,
                            self.val[k] * self.ext.weights.h2_integral(self.sign, self.lo[k], top))
        return np.where(x <= self.lo[0], 0.0, self.before[k] + part)


# ---------------------------------------------------------------------------
# Operations


def _check_cplus(ext, cplus: DarnedFunction, sign="+"):
    """Reject coefficients that are not square integrable against ``h±²``."""
    rule = ext.lebesgue_rule(())
    vals = (cplus.value(rule.x) * ext.h(sign, rule.x)) ** 2
    total = float(np.dot(rule.w, vals))
    edge = max(float(vals[0]), float(vals[-1]))
    if not np.isfinite(total) or edge > 1e-10 * max(1.0, total):
        raise NotInSpaceError(f"coefficient is not square integrable against h{sign}^2 (tail integrand {edge:.3g})")
    return total


def cminus_from_cplus(ext, cplus) -> dict:
    """Profiles of ``c₋ = c₊ h₊² - 2β ∫_{-inf}^x c₊ h₊² dz``."""
    c = DarnedFunction(ext, as_profiles(ext, cplus))
    _check_cplus(ext, c, "+")
    cum = _lebesgue_cumulative(ext, c, "+")
    return {n: CminusProfile(ext, n, c, cum) for n in range(len(ext.parts))}


def cplus_from_cminus(ext, cminus) -> dict:
    """Profiles of ``c₊ = c₋ h₋² + 2β ∫_x^inf c₋ h₋² dz`` (mirror formula)."""
    c = DarnedFunction(ext, as_profiles(ext, cminus))
    _check_cplus(ext, c, "-")
    cum = _lebesgue_cumulative(ext, c, "-")
    return {n: CplusProfile(ext, n, c, cum) for n in range(len(ext.parts))}


def pair_from_cplus(ext, cplus) -> ComplementElement:
    profiles = as_profiles(ext, cplus)
    return ComplementElement(ext, profiles, cminus_from_cplus(ext, profiles))


def assemble_f(elem: ComplementElement, check=True, rtol=1e-6) -> ExtensionFunction:
    """``f = (c₊ h₊ + c₋ h₋) / 2``, verifying the coupling of ``u`` first."""
    if check:
        res = elem.c2_residual()
        scale = 1.0 + float(np.max(np.abs(elem.f.deriv_u(probe_grid(elem.ext)))))
        if res > rtol * scale:
            raise InvalidPairError(f"u is not an antiderivative of 2αf (residual {res:.3g})")
    return elem.f


class FromCplusFunction(ExtensionFunction):
    """``f = c₊ h₊ - β h₋ ∫_{-inf}^x c₊ h₊²`` with the integral by closed-form atoms."""

    def __init__(self, ext, cplus):
        self.ext = ext
        self.c = DarnedFunction(ext, as_profiles(ext, cplus))
        _check_cplus(ext, self.c, "+")
        self.cum = AtomCumulative(ext, self.c, "+")

    def value_on(self, n, x):
        ext = self.ext
        return self.c.value_on(n, x) * ext.h("+", x) - ext.beta * ext.h("-", x) * self.cum(x)

    def deriv_u_on(self, n, x):
        return 2.0 * self.ext.alpha * self.ext.h("-", x) * self.cum(x)

    def deriv_w(self, n, s, x):
        return self.c.profile(n).deriv(s) * self.ext.h("+", x)

    def s_breaks(self, n):
        return self.c.s_breaks(n)


def f_from_cplus(ext, cplus) -> ExtensionFunction:
    """The complement element determined by ``c₊`` alone."""
    return FromCplusFunction(ext, cplus)


class _UFromF:
    """``u = df/dt`` on gaps and ``u(x0) + 2α ∫_{x0}^x f`` on ``W``."""

    def __init__(self, ext, f, x0):
        self.ext = ext
        self.f = f
        self.cum = ext.cumulative(f.value, f.breaks)
        self.u0 = float(f.deriv_u(np.array([x0]))[0])
        self.c0 = float(self.cum(np.array([x0]))[0])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        out = np.empty(flat.shape)
        in_gap = np.zeros(flat.shape, dtype=bool)
        idx = self.ext.locate(flat)
        for n in np.unique(idx[idx >= 0]):
            sel = idx == n
            in_gap[sel] = self.ext.parts[n].locate_gap(flat[sel])
        out[in_gap] = self.f.deriv_u(flat[in_gap])
        rest = ~in_gap
        if rest.any():
            out[rest] = self.u0 + 2.0 * self.ext.alpha * (self.cum(flat[rest]) - self.c0)
        return out.reshape(x.shape)


def gamma_decompose(ext, f: ExtensionFunction, u=None, check=True, rtol=1e-6) -> ComplementElement:
    """Coefficients ``c₊ = h₋ (f + u/β)``, ``c₋ = h₊ (f - u/β)`` of ``f``.

    ``u`` is the absolutely continuous extension of ``df/dt`` from the gaps; it
    is built from ``f`` when not supplied.
    """
    if check:
        res, pts, _ = oc_max_residual(ext, f)
        scale = 1.0 + energy_E_alpha(ext, f, alpha=1.0).value
        if res > rtol * scale:
            raise NotInSpaceError(f"function is not orthogonal to H^1 (residual {res:.3g})")
    if u is None:
        pts = probe_grid(ext)
        u = _UFromF(ext, f, float(pts[len(pts) // 2]))
    elif isinstance(u, H1Function):
        u = u.value
    plus = {n: DecomposedProfile(ext, n, f, u, "+") for n in range(len(ext.parts))}
    minus = {n: DecomposedProfile(ext, n, f, u, "-") for n in range(len(ext.parts))}
    return ComplementElement(ext, plus, minus)


# ---------------------------------------------------------------------------
# The coefficient forms


def energy_pm(ext, profiles, sign, weights: Weights | None = None, route="x") -> Estimate:
    """``E±(c, c) = 1/2 Σ_n ∫_{W_n} ψ'(j)^2 h±^2 dt``.

    ``route="x"`` samples cover-piece centres; ``route="s"`` integrates in the
    darned coordinate.  ``weights`` may replace the exponential weights.
    """
    w = ext.weights if weights is None else weights
    profiles = as_profiles(ext, profiles)
    total, corr, panels = 0.0, 0.0, 0
    for n, sf in enumerate(ext.parts):
        if not sf.has_singular_mass:
            continue
        psi = profiles[n]
        rule = ext.w_rule(n, route, psi.breaks)
        vals = deriv_at(psi, rule.s, rule.x) ** 2 * w.h(sign, rule.x) ** 2
        value = rule.integrate(vals)
        total += value
        r = _RICHARDSON[route]
        fine = rule.w > 0
        corr += abs(value - float(np.dot(rule.w[fine], vals[fine])) * (r - 1.0) / r)
        panels += rule.w.size
    if not np.isfinite(total):
        raise NotInSpaceError("coefficient energy is not finite")
    return Estimate(0.5 * total, 0.5 * corr, panels)


def l2_pm(ext, profiles, sign, weights: Weights | None = None) -> Estimate:
    """``∫ c² h±² dx`` by Gauss panels in ``x``."""
    w = ext.weights if weights is None else weights
    c = DarnedFunction(ext, as_profiles(ext, profiles))
    breaks = sorted({b for n in range(len(ext.parts)) for b in _x_breaks(ext, n, c.profile(n).breaks)})
    rule = ext.lebesgue_rule(breaks)
    vals = (c.value(rule.x) * w.h(sign, rule.x)) ** 2
    total = rule.integrate(vals)
    edge = float(vals[0] + vals[-1])
    if not np.isfinite(total) or edge > 1e-10 * max(1.0, total):
        raise NotInSpaceError(f"coefficient is not square integrable against h{sign}^2")
    return Estimate(total, edge, rule.seg_lo.size)


def _x_breaks(ext, n, s_breaks):
    sf = ext.parts[n]
    if not s_breaks or not sf.has_singular_mass:
        return []
    s = np.asarray(s_breaks, dtype=float)
    lo, hi = sf._pieces["S_lo"][0] - sf._S_e, sf._pieces["S_hi"][-1] - sf._S_e
    s = s[(s > lo) & (s < hi)]
    return sf.j_inv(s).tolist() if s.size else []


def energy_pm_1(ext, profiles, sign, weights=None):
    e = energy_pm(ext, profiles, sign, weights)
    m = l2_pm(ext, profiles, sign, weights)
    return Estimate(e.value + m.value, e.est_error + m.est_error, e.panels + m.panels)


def norm_equivalence_report(ext, f_or_elem, slack=1e-9):
    """Compare ``E_1(f, f)`` with ``E±,1`` of the coefficients of ``f``.

    Checks ``(α∧½) E±,1 <= E_1(f, f) <= (2α+4) E±,1`` for both signs.
    """
    if isinstance(f_or_elem, ComplementElement):
        elem, f = f_or_elem, f_or_elem.f
    else:
        f = f_or_elem
        elem = gamma_decompose(ext, f)
    e1 = energy_E_alpha(ext, f, alpha=1.0).value
    a = ext.alpha
    lo_c, hi_c = min(a, 0.5), 2 * a + 4
    out = {"E1": e1, "alpha": a, "lower_constant": lo_c, "upper_constant": hi_c, "signs": {}}
    ok = True
    for sign in ("+", "-"):
        epm = energy_pm_1(ext, elem.profiles(sign), sign).value
        lower = e1 - lo_c * epm
        upper = hi_c * epm - e1
        passed = lower >= -slack and upper >= -slack
        ok &= passed
        out["signs"][sign] = {"Epm1": epm, "lower_margin": lower, "upper_margin": upper, "pass": bool(passed)}
    out["pass"] = bool(ok)
    return out


# ---------------------------------------------------------------------------
# The integral lemma


def _running_exponential(g, lam, lo, hi, panels=400):
    """``∫_lo^hi G(x)^2 dx`` with ``G(x) = e^{-λx} ∫_{-inf}^x g e^{λz} dz`` and the tail beyond ``hi``.

    ``g`` vanishes below ``lo``; beyond ``hi`` it is treated as zero so that
    ``G`` decays like ``e^{-λ(x-hi)}``.
    """
    edges = np.unique(np.concatenate([np.linspace(lo, hi, panels + 1), [b for b in getattr(g, "breaks", ()) if lo < b < hi]]))
    a, b = edges[:-1], edges[1:]
    t, wt = np.polynomial.legendre.leggauss(10)

    def G_at(x, a_cell, start):
        # start = G(a_cell); G(x) = e^{-λ(x-a)} start + ∫_a^x g(z) e^{-λ(x-z)} dz
        z, wz = gauss_nodes(np.full(x.size, 0.0) + a_cell, x, 10)
        z = z.reshape(x.size, 10)
        wz = wz.reshape(x.size, 10)
        return np.exp(-lam * (x - a_cell)) * start + np.sum(g(z) * np.exp(-lam * (x[:, None] - z)) * wz, axis=1)

    # G at the cell edges
    G_edges = [0.0]
    for ai, bi in zip(a, b):
        G_edges.append(float(G_at(np.array([bi]), ai, G_edges[-1])[0]))
    total = 0.0
    for i, (ai, bi) in enumerate(zip(a, b)):
        x = ai + 0.5 * (bi - ai) * (t + 1.0)
        Gx = G_at(x, ai, G_edges[i])
        total += float(np.sum(0.5 * (bi - ai) * wt * Gx**2))
    return total + G_edges[-1] ** 2 / (2.0 * lam)


def lemma_gg_check(g, lam, window=None):
    """Both sides of ``∫ (e^{-λx}∫_{-inf}^x g e^{λz})² dx <= λ^{-2} ‖g‖²`` and its mirror.

    Parameters
    ----------
    g : H1Function or callable
        Square integrable, negligible outside ``window``.
    lam : float
        Positive rate.
    window : (float, float), optional
        Support window; taken from ``g.support`` (or ``±12`` widths for a
        gaussian) when omitted.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if window is None:
        sup = getattr(g, "support", (-math.inf, math.inf))
        if math.isinf(sup[0]) or math.isinf(sup[1]):
            c = float(g.params.get("center", 0.0))
            s = float(g.params.get("width", g.params.get("halfwidth", 1.0)))
            sup = (c - 40 * s, c + 40 * s)
        window = sup
    lo, hi = window
    mirrored = _Mirrored(g)
    left = _running_exponential(g, lam, lo, hi)
    right = _running_exponential(mirrored, lam, -hi, -lo)
    edges = np.unique(np.concatenate([np.linspace(lo, hi, 801), [b for b in getattr(g, "breaks", ()) if lo < b < hi]]))
    x, w = gauss_nodes(edges[:-1], edges[1:], 10)
    norm2 = float(np.sum(w * g(x) ** 2))
    bound = norm2 / lam**2
    return {
        "lambda": lam,
        "lhs_left": left,
        "lhs_right": right,
        "bound": bound,
        "norm2": norm2,
        "pass": bool(left <= bound * (1 + 1e-12) + 1e-15 and right <= bound * (1 + 1e-12) + 1e-15),
    }


class _Mirrored:
    def __init__(self, g):
        self.g = g
        self.breaks = tuple(-b for b in getattr(g, "breaks", ()))

    def __call__(self, x):
        return self.g(-np.asarray(x))


# ---------------------------------------------------------------------------
# Contractions


def contraction_apply(ext, target, phi: Contraction, sign="+", depth=4):
    """Apply a normal contraction to coefficients or to a function.

    For a :class:`ComplementElement` (or a profile mapping) the contraction acts
    on the ``sign`` coefficient and the report compares ``E±`` before and after.
    For an :class:`ExtensionFunction` it acts on the function and the report
    gives the orthogonality residual of the result.
    """
    if not isinstance(phi, Contraction):
        raise TypeError("phi must be a Contraction")
    if isinstance(target, ExtensionFunction):
        g = ComposedFunction(phi, target)
        res, pts, _ = oc_max_residual(ext, g, depth=depth)
        before, _, _ = oc_max_residual(ext, target, depth=depth)
        return g, {"max_oc_residual": res, "input_oc_residual": before, "probe_points": int(pts.size)}
    profiles = target.profiles(sign) if isinstance(target, ComplementElement) else as_profiles(ext, target)
    new = {}
    for n, psi in profiles.items():
        sf = ext.parts[n]
        if sf.has_singular_mass:
            span = (float(sf._pieces["S_lo"][0] - sf._S_e), float(sf._pieces["S_hi"][-1] - sf._S_e))
        else:
            span = (0.0, 1.0)
        new[n] = ComposedProfile(phi, psi, span)
    e0 = energy_pm(ext, profiles, sign).value
    e1 = energy_pm(ext, new, sign).value
    return new, {"energy_before": e0, "energy_after": e1, "pass": bool(e1 <= e0 + 1e-12 * max(1.0, e0))}
