"""Quadrature rules for Lebesgue integrals and for integrals against ``dt`` on ``W``.

Lebesgue integrals use Gauss-Legendre panels on the gaps and a midpoint rule
on the residual cover (whose Lebesgue measure vanishes geometrically with the
depth).  Integrals against the singular part of ``dt`` come in two flavours:

* ``"x"`` -- one node per cover piece at the piece centre in ``x``, weighted
  by the piece mass.  The error is quadratic in the piece mass.
* ``"s"`` -- four Gauss-Legendre nodes in the darned coordinate ``s = j(x)`` with
  ``x = j^{-1}(s)`` evaluated exactly.  The error is bilinear in piece mass
  and piece length.

Both are combined with the next coarser depth by one Richardson step, with the
combination folded into the weights.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

_GL = {n: np.polynomial.legendre.leggauss(n) for n in (2, 3, 4, 6, 10)}

# Richardson factors for the two W-routes: errors scale like 4**-d and 6**-d.
_RICHARDSON = {"x": 4.0, "s": 6.0}


class LebesgueRule(NamedTuple):
    """Nodes, weights and panel structure of a Lebesgue rule.

    ``seg_lo``/``seg_hi`` are the panels in increasing order, ``seg_gauss``
    marks Gauss panels versus midpoint panels (short cover pieces),
    ``seg`` maps every node to its panel and ``part`` every panel to its
    interval index.
    """

    x: np.ndarray
    w: np.ndarray
    seg: np.ndarray
    seg_lo: np.ndarray
    seg_hi: np.ndarray
    seg_gauss: np.ndarray
    seg_part: np.ndarray

    @property
    def part(self):
        return self.seg_part[self.seg]

    def integrate(self, values):
        return float(np.dot(self.w, values))


class WRule(NamedTuple):
    """Nodes for ``∫_W F(s, x) dt``: darned coordinate, position, weight."""

    s: np.ndarray
    x: np.ndarray
    w: np.ndarray

    def integrate(self, values):
        return float(np.dot(self.w, values))


def _split_panels(lo, hi, max_len, breaks):
    """Split panels at interior breakpoints and to a maximal length."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if breaks.size:
        # points strictly inside some panel
        idx = np.searchsorted(lo, breaks, side="right") - 1
        ok = (idx >= 0) & (breaks > lo[np.clip(idx, 0, None)]) & (breaks < hi[np.clip(idx, 0, None)])
        if ok.any():
            edges = np.concatenate([lo, hi, breaks[ok]])
            edges = np.unique(edges)
            mids = 0.5 * (edges[:-1] + edges[1:])
            j = np.searchsorted(lo, mids, side="right") - 1
            inside = (j >= 0) & (mids < hi[np.clip(j, 0, None)])
            lo, hi = edges[:-1][inside], edges[1:][inside]
    n = np.maximum(1, np.ceil((hi - lo) / max_len).astype(int))
    rep_lo = np.repeat(lo, n)
    rep_len = np.repeat((hi - lo) / n, n)
    k = np.arange(n.sum()) - np.repeat(np.cumsum(n) - n, n)
    new_lo = rep_lo + k * rep_len
    return new_lo, new_lo + rep_len


def gauss_nodes(lo, hi, order):
    """Gauss-Legendre nodes and weights on each panel, flattened row-wise."""
    t, wt = _GL[order]
    lo = np.asarray(lo, dtype=float)[:, None]
    hi = np.asarray(hi, dtype=float)[:, None]
    half = 0.5 * (hi - lo)
    return (lo + half * (t + 1.0)).ravel(), (half * wt).ravel()


def lebesgue_rule(parts, bounds, depth=None, breaks=(), max_len=0.5, short=1e-3, short_cover=1e-4):
    """Build a Lebesgue rule over the intervals of ``parts``.

    Parameters
    ----------
    parts : sequence of ScaleFunction
    bounds : (float, float)
        Truncation window for unbounded intervals.
    depth : int, optional
        Block depth override.
    breaks : sequence of float
        Points where integrands may have kinks; gaps are split there.
    max_len : float
        Maximal Gauss panel length.
    short : float
        Gauss panels shorter than this get 4 nodes instead of 10.
    short_cover : float
        Cover pieces shorter than this use a midpoint rule instead of 4 Gauss nodes.
    """
    T_lo, T_hi = bounds
    seg_lo, seg_hi, seg_gauss, seg_part = [], [], [], []
    for n, sf in enumerate(parts):
        g = sf.gaps(depth)
        G = g.gaps
        U = g.unresolved
        glo = np.concatenate([G[:, 0], U[:, 0]])
        ghi = np.concatenate([G[:, 1], U[:, 1]])
        glo, ghi = np.clip(glo, T_lo, T_hi), np.clip(ghi, T_lo, T_hi)
        keep = ghi > glo
        order = np.argsort(glo[keep], kind="stable")
        glo, ghi = glo[keep][order], ghi[keep][order]
        glo, ghi = _split_panels(glo, ghi, max_len, breaks)
        C = g.cover
        C = C[(C[:, 1] > T_lo) & (C[:, 0] < T_hi)]
        # long cover pieces (shallow blocks) get Gauss nodes, short ones a midpoint
        long_cover = (C[:, 1] - C[:, 0]) >= short_cover
        seg_lo += [glo, C[:, 0]]
        seg_hi += [ghi, C[:, 1]]
        seg_gauss += [np.ones(glo.size, bool), long_cover]
        seg_part += [np.full(glo.size, n), np.full(len(C), n)]
    seg_lo = np.concatenate(seg_lo)
    seg_hi = np.concatenate(seg_hi)
    seg_gauss = np.concatenate(seg_gauss)
    seg_part = np.concatenate(seg_part)
    order = np.lexsort((seg_hi, seg_lo))
    seg_lo, seg_hi, seg_gauss, seg_part = seg_lo[order], seg_hi[order], seg_gauss[order], seg_part[order]
    xs, ws, segs = [], [], []
    length = seg_hi - seg_lo
    for sel, order_ in (
        (seg_gauss & (length >= short), 10),
        (seg_gauss & (length < short), 4),
    ):
        idx = np.flatnonzero(sel)
        x, w = gauss_nodes(seg_lo[idx], seg_hi[idx], order_)
        xs.append(x)
        ws.append(w)
        segs.append(np.repeat(idx, order_))
    idx = np.flatnonzero(~seg_gauss)
    xs.append(0.5 * (seg_lo[idx] + seg_hi[idx]))
    ws.append(length[idx])
    segs.append(idx)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    seg = np.concatenate(segs)
    o = np.argsort(x, kind="stable")
    return LebesgueRule(x[o], w[o], seg[o], seg_lo, seg_hi, seg_gauss, seg_part)


class Cumulative:
    """Running integral ``x -> ∫_{-inf}^x F(z) dz`` on a Lebesgue rule.

    ``F`` is called once on the rule nodes and then on partial-panel nodes for
    each query batch.
    """

    def __init__(self, rule: LebesgueRule, F):
        self.rule = rule
        self.F = F
        vals = F(rule.x)
        per_seg = np.bincount(rule.seg, weights=rule.w * vals, minlength=rule.seg_lo.size)
        self.before = np.concatenate([[0.0], np.cumsum(per_seg)])
        self.total = float(self.before[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = x.ravel()
        r = self.rule
        k = np.clip(np.searchsorted(r.seg_lo, x, side="right") - 1, 0, None)
        below = x <= r.seg_lo[0]
        base = self.before[k]
        lo = r.seg_lo[k]
        hi = r.seg_hi[k]
        inside = x < hi
        part = np.zeros(x.shape)
        top = np.clip(x, lo, hi)
        # full panel if x is past the end of its panel
        full = ~inside
        part[full] = self.before[k[full] + 1] - base[full]
        gauss = inside & r.seg_gauss[k]
        if gauss.any():
            gx, gw = gauss_nodes(lo[gauss], top[gauss], 10)
            part[gauss] = (gw * self.F(gx)).reshape(-1, 10).sum(axis=1)
        mid = inside & ~r.seg_gauss[k]
        if mid.any():
            xm = 0.5 * (lo[mid] + top[mid])
            part[mid] = self.F(xm) * (top[mid] - lo[mid])
        out = np.where(below, 0.0, base + part)
        return out.reshape(shape)


def _refine_piece(lo, hi, mass, S_lo, q, s_breaks, extra):
    """Split one cover piece along the children that contain a break in ``s``."""
    out = []
    stack = [(lo, hi, mass, S_lo, 0)]
    while stack:
        a, b, m, s0, lvl = stack.pop()
        crosses = np.any((s_breaks > s0) & (s_breaks < s0 + m))
        if not crosses or lvl >= extra:
            out.append((a, b, m, s0))
            continue
        child = (b - a) * q
        stack.append((a, a + child, 0.5 * m, s0, lvl + 1))
        stack.append((b - child, b, 0.5 * m, s0 + 0.5 * m, lvl + 1))
    return out


def _cover_pieces(sf, depth, s_breaks, shift=0, extra=30):
    """Cover pieces at a depth, refined around darned-coordinate breaks.

    Returns ``(lo, hi, mass, s_lo)`` arrays with ``s_lo`` in darned
    coordinates.
    """
    g = sf.gaps(depth, shift)
    lo, hi = g.cover[:, 0], g.cover[:, 1]
    mass = g.cover_mass
    s_lo = g.cover_S - sf._S_e
    s_breaks = np.asarray(s_breaks, dtype=float)
    if s_breaks.size == 0 or lo.size == 0:
        return lo, hi, mass, s_lo
    hit = np.zeros(lo.size, dtype=bool)
    for b in s_breaks:
        hit |= (s_lo < b) & (s_lo + mass > b)
    if not hit.any():
        return lo, hi, mass, s_lo
    p = sf._pieces
    rows = []
    for i in np.flatnonzero(hit):
        k = np.searchsorted(p["lo"], lo[i], side="right") - 1
        rows += _refine_piece(lo[i], hi[i], mass[i], s_lo[i], p["q"][k], s_breaks, extra)
    rows = np.array(rows).reshape(-1, 4)
    keep = ~hit
    lo = np.concatenate([lo[keep], rows[:, 0]])
    hi = np.concatenate([hi[keep], rows[:, 1]])
    mass = np.concatenate([mass[keep], rows[:, 2]])
    s_lo = np.concatenate([s_lo[keep], rows[:, 3]])
    o = np.argsort(lo, kind="stable")
    return lo[o], hi[o], mass[o], s_lo[o]


def _w_rule_single(sf, depth, route, s_breaks, shift):
    lo, hi, mass, s_lo = _cover_pieces(sf, depth, s_breaks, shift)
    if route == "x":
        return s_lo + 0.5 * mass, 0.5 * (lo + hi), mass
    # an even order keeps nodes off the dyadic points where j^{-1} jumps
    # split each piece's s-range at the breaks
    s_a, s_b = s_lo, s_lo + mass
    b = np.asarray(s_breaks, dtype=float)
    if b.size:
        edges_a, edges_b = [], []
        for a_, b_ in zip(s_a, s_b):
            inner = b[(b > a_) & (b < b_)]
            e = np.concatenate([[a_], np.sort(inner), [b_]])
            edges_a.append(e[:-1])
            edges_b.append(e[1:])
        s_a, s_b = np.concatenate(edges_a), np.concatenate(edges_b)
    s, w = gauss_nodes(s_a, s_b, 4)
    s = np.clip(s, s_lo.min(), (s_lo + mass).max())
    return s, sf.j_inv(s), w


def w_rule(sf, depth, route="s", s_breaks=()):
    """Rule for ``∫_{W} F(j(x), x) dt(x)`` on one interval.

    Parameters
    ----------
    sf : ScaleFunction
    depth : int or None
        Block depth override; the Richardson partner uses one generation less.
    route : {"x", "s"}
    s_breaks : sequence of float
        Darned coordinates where ``F`` may have kinks.

    Returns
    -------
    WRule
        Empty when the interval carries no resolved singular mass.
    """
    if route not in _RICHARDSON:
        raise ValueError(f"route must be 'x' or 's', got {route!r}")
    if not sf.has_singular_mass:
        z = np.zeros(0)
        return WRule(z, z, z)
    fine = _w_rule_single(sf, depth, route, s_breaks, 0)
    coarse = _w_rule_single(sf, depth, route, s_breaks, 1)
    r = _RICHARDSON[route]
    s = np.concatenate([fine[0], coarse[0]])
    x = np.concatenate([fine[1], coarse[1]])
    w = np.concatenate([fine[2] * r / (r - 1.0), -coarse[2] / (r - 1.0)])
    return WRule(s, x, w)


def tail_window(parts, tail, extra_points=()):
    """Truncation window: finite geometry of all parts widened by ``tail``."""
    pts = [0.0]
    for sf in parts:
        iv = sf.interval
        for v in (iv.a, iv.b, sf.e):
            if math.isfinite(v):
                pts.append(v)
        p = sf._pieces
        if p["lo"].size:
            enum = p["enumerated"]
            if enum.any():
                pts += [float(p["lo"][enum].min()), float(p["hi"][enum].max())]
    pts += [float(v) for v in extra_points if math.isfinite(v)]
    return min(pts) - tail, max(pts) + tail
