"""Energy forms, inner products and the orthogonality residual.

For ``f`` on an extension,

    E(f, g) = 1/2 Σ_n [ ∫_{U_n} f' g' dx + ∫_{W_n} (df/dt)(dg/dt) dt ],

the first part by Gauss panels on the gaps, the second in the darned
coordinate, where the singular part of ``dt`` becomes Lebesgue measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInSpaceError, ResolutionError
from .functions import ExtensionFunction
from .quadrature import _RICHARDSON


@dataclass(frozen=True)
class Estimate:
    """A computed quantity with an error estimate and the panel count used."""

    value: float
    est_error: float = 0.0
    panels: int = 0

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        return {"value": self.value, "est_error": self.est_error, "panels": self.panels}


def _breaks(*fs):
    return tuple(sorted({b for f in fs for b in f.breaks}))


def _s_breaks(n, *fs):
    return tuple(sorted({b for f in fs for b in f.s_breaks(n)}))


def _finite(value, what):
    if not np.isfinite(value):
        raise NotInSpaceError(f"{what} is not finite")
    return value


def _lebesgue(ext, F, *fs):
    rule = ext.lebesgue_rule(_breaks(*fs))
    vals = F(rule.x)
    total = rule.integrate(vals)
    # crude truncation estimate: integrand size at the window edges
    edge = float(np.abs(vals[0]) + np.abs(vals[-1]))
    return total, edge, rule.seg_lo.size


def _w_part(ext, F, *fs, route="s"):
    """Σ_n ∫_{W_n} F(n, s, x) dt together with a Richardson correction size."""
    total, corr, panels = 0.0, 0.0, 0
    for n, sf in enumerate(ext.parts):
        if not sf.has_singular_mass:
            continue
        rule = ext.w_rule(n, route, _s_breaks(n, *fs))
        if rule.w.size == 0:
            continue
        vals = F(n, rule.s, rule.x)
        value = rule.integrate(vals)
        total += value
        # size of the Richardson correction bounds the error of the fine rule
        r = _RICHARDSON[route]
        fine = rule.w > 0
        corr += abs(value - float(np.dot(rule.w[fine], vals[fine])) * (r - 1.0) / r)
        panels += rule.w.size
    return total, corr, panels


def energy_E(ext, f: ExtensionFunction, g: ExtensionFunction | None = None) -> Estimate:
    """The energy ``E(f, g)``; ``g`` defaults to ``f``."""
    g = f if g is None else g
    u, edge, np_u = _lebesgue(ext, lambda x: f.deriv_u(x) * g.deriv_u(x), f, g)
    w, corr, np_w = _w_part(ext, lambda n, s, x: f.deriv_w(n, s, x) * g.deriv_w(n, s, x), f, g)
    value = _finite(0.5 * (u + w), "energy")
    return Estimate(value, 0.5 * (edge + corr), np_u + np_w)


def inner_L2(ext, f: ExtensionFunction, g: ExtensionFunction | None = None) -> Estimate:
    """``∫ f g dx`` over the union of the intervals."""
    g = f if g is None else g
    v, edge, panels = _lebesgue(ext, lambda x: f.value(x) * g.value(x), f, g)
    return Estimate(_finite(v, "L2 pairing"), edge, panels)


def energy_E_alpha(ext, f, g=None, alpha=None) -> Estimate:
    """``E_α(f, g) = E(f, g) + α (f, g)``; ``alpha`` defaults to the extension's."""
    a = ext.alpha if alpha is None else alpha
    e = energy_E(ext, f, g)
    m = inner_L2(ext, f, g)
    return Estimate(e.value + a * m.value, e.est_error + a * m.est_error, e.panels + m.panels)


def energy_measure(ext, f: ExtensionFunction, region="all") -> Estimate:
    """Energy measure ``μ<f>`` of ``U``, ``W`` or the whole line.

    ``μ<f>(A) = Σ_n ∫_{A ∩ I_n} (df/dt_n)^2 dt_n``; the ``W`` part is
    computed in the darned coordinate.
    """
    if region not in ("U", "W", "all"):
        raise ValueError("region must be 'U', 'W' or 'all'")
    value, err, panels = 0.0, 0.0, 0
    if region in ("U", "all"):
        u, edge, p = _lebesgue(ext, lambda x: f.deriv_u(x) ** 2, f)
        value, err, panels = value + u, err + edge, panels + p
    if region in ("W", "all"):
        w, corr, p = _w_part(ext, lambda n, s, x: f.deriv_w(n, s, x) ** 2, f)
        value, err, panels = value + w, err + corr, panels + p
    return Estimate(_finite(value, "energy measure"), err, panels)


# ---------------------------------------------------------------------------
# Orthogonality residual


def _check_resolved(ext, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    idx = ext.locate_strict(x)
    for n in np.unique(idx):
        sel = idx == n
        if not np.all(ext.parts[n].locate_gap(x[sel])):
            raise ResolutionError(f"points not in a resolved gap: {x[sel][~ext.parts[n].locate_gap(x[sel])][:5]}")
    return x


def oc_residual(ext, f: ExtensionFunction, x, y):
    """``df/dt(y) - df/dt(x) - 2α ∫_x^y f dz`` for gap points ``x`` and ``y``.

    Vanishes for all pairs exactly when ``f`` is ``E_α``-orthogonal to
    ``H^1(R)``.
    """
    xs = _check_resolved(ext, x)
    ys = _check_resolved(ext, y)
    cum = ext.cumulative(f.value, f.breaks)
    out = f.deriv_u(ys) - f.deriv_u(xs) - 2.0 * ext.alpha * (cum(ys) - cum(xs))
    return out if np.ndim(x) or np.ndim(y) else float(out[0])


def probe_grid(ext, depth=4, tail_points=(0.5, 1.0, 2.0, 4.0, 8.0)):
    """Gap points used for the membership test.

    Midpoints of all gaps up to ``depth`` (cascade gaps included), plus points
    at fixed distances beyond the outermost singular pieces.
    """
    pts = []
    for sf in ext.parts:
        g = sf.gaps(depth)
        G = g.gaps
        lo, hi = G[:, 0], G[:, 1]
        fin = np.isfinite(lo) & np.isfinite(hi)
        pts.append(0.5 * (lo[fin] + hi[fin]))
        for a, b in zip(lo[~fin], hi[~fin]):
            base = b if np.isinf(a) else a
            sgn = -1.0 if np.isinf(a) else 1.0
            pts.append(base + sgn * np.asarray(tail_points))
        if G.size == 0 and sf.interval.bounded:
            pts.append(np.array([0.5 * (sf.interval.a + sf.interval.b)]))
    x = np.unique(np.concatenate(pts))
    idx = ext.locate(x)
    keep = idx >= 0
    for n in np.unique(idx[keep]):
        sel = idx == n
        keep[sel] &= ext.parts[n].locate_gap(x[sel])
    return x[keep]


def oc_max_residual(ext, f: ExtensionFunction, points=None, depth=4):
    """Largest ``|oc_residual|`` over all pairs of probe points.

    Returns ``(max_residual, points, F)`` where ``F(y) = df/dt(y) - 2α∫_{x0}^y f``;
    the residual of a pair is a difference of two ``F`` values.
    """
    pts = probe_grid(ext, depth) if points is None else _check_resolved(ext, points)
    cum = ext.cumulative(f.value, f.breaks)
    F = f.deriv_u(pts) - 2.0 * ext.alpha * cum(pts)
    return float(F.max() - F.min()), pts, F


def membership_report(ext, f, depth=4, rtol=1e-6):
    """Whether ``f`` passes the orthogonality test on the probe grid."""
    res, pts, _ = oc_max_residual(ext, f, depth=depth)
    scale = 1.0 + energy_E_alpha(ext, f, alpha=1.0).value
    return {"max_residual": res, "probe_points": int(pts.size), "tolerance": rtol * scale,
            "member": bool(res <= rtol * scale)}
