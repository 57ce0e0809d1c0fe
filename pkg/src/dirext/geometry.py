"""Intervals, Cantor-type scale functions and the darning CDF.

A scale function on an interval ``I`` is ``t(x) = x + S(x)`` where ``S`` is a
continuous nondecreasing singular function built from Cantor blocks and
optional cascades of blocks accumulating at an endpoint.  The set where
``S`` grows is ``W``; its complement in ``I`` is a union of open gaps ``U``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import polygamma

from .errors import ConfigError, DomainError, RangeError

FINITE_MASS = "finite_singular_mass"
INFINITE_MASS = "infinite_singular_mass"
TAIL_FLAGS = (FINITE_MASS, INFINITE_MASS)

# 2**-64 is far below double resolution, so the digit recursions stop here.
MAX_GENERATIONS = 64
# Number of cascade levels kept for evaluation (enumeration uses ``levels``).
_CASCADE_CAP_FINITE = 1000
_CASCADE_CAP_INFINITE = 4096


# ---------------------------------------------------------------------------
# Cantor block CDF


def cantor_cdf(y, q, generations=MAX_GENERATIONS, return_resolved=False):
    """Evaluate the CDF of a middle-removal Cantor measure on ``[0, 1]``.

    Parameters
    ----------
    y : array_like
        Points, clipped to ``[0, 1]``.
    q : float or array_like
        Length fraction of each child interval, ``q = (1 - r) / 2`` for a
        removed middle fraction ``r``.
    generations : int
        Maximum recursion depth.
    return_resolved : bool
        Also return a mask of points that landed in a removed gap.

    Returns
    -------
    ndarray
        CDF values; a point in a gap gets the exact dyadic value.
    """
    y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
    shape = y.shape
    q = np.broadcast_to(np.asarray(q, dtype=float), shape).ravel()
    y = y.ravel()
    out = np.zeros(y.shape)
    resolved = np.zeros(y.shape, dtype=bool)
    # the endpoints never resolve; their values are exact
    out[y >= 1.0] = 1.0
    idx = np.flatnonzero((y > 0.0) & (y < 1.0))
    yy, qq = y[idx], q[idx]
    acc = np.zeros(idx.size)
    scale = 1.0
    for _ in range(generations):
        if idx.size == 0:
            break
        left = yy < qq
        right = yy > 1.0 - qq
        mid = ~left & ~right
        acc = acc + np.where(mid | right, 0.5 * scale, 0.0)
        if mid.any():
            out[idx[mid]] = acc[mid]
            resolved[idx[mid]] = True
            keep = ~mid
            idx, yy, qq, acc, left, right = idx[keep], yy[keep], qq[keep], acc[keep], left[keep], right[keep]
        yy = np.where(left, yy / qq, (yy - (1.0 - qq)) / qq)
        scale *= 0.5
    out[idx] = acc + scale * yy
    out = out.reshape(shape)
    if return_resolved:
        return out, resolved.reshape(shape)
    return out


def cantor_cdf_exact(y, q, generations=200):
    """Rational-arithmetic Cantor CDF.

    Returns ``(value, bound)``; ``bound`` is zero when the recursion lands in
    a gap (or on 0 or 1), otherwise the mass of the unresolved piece.
    """
    y = Fraction(y)
    q = Fraction(q)
    if y <= 0:
        return Fraction(0), Fraction(0)
    if y >= 1:
        return Fraction(1), Fraction(0)
    out = Fraction(0)
    scale = Fraction(1)
    for _ in range(generations):
        if y < q:
            y = y / q
        elif y > 1 - q:
            out += scale / 2
            y = (y - (1 - q)) / q
        else:
            return out + scale / 2, Fraction(0)
        scale /= 2
        if y == 0:
            return out, Fraction(0)
        if y == 1:
            return out + scale, Fraction(0)
    return out + scale * y, scale


def cantor_cdf_inv(v, q, generations=MAX_GENERATIONS):
    """Smallest ``y`` in the Cantor set with ``cantor_cdf(y) >= v``."""
    v = v_in = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    q = np.broadcast_to(np.asarray(q, dtype=float), v.shape)
    offset = np.zeros(v.shape)
    width = np.ones(v.shape)
    for _ in range(generations):
        right = v > 0.5
        offset = offset + np.where(right, (1.0 - q) * width, 0.0)
        v = np.where(right, 2.0 * v - 1.0, 2.0 * v)
        width = width * q
    out = offset + width * v
    # the supremum of the set is the only preimage of 1
    return np.where(v_in >= 1.0, 1.0, out)


def _scale_inv_piece(tau, length, mass, q, generations=MAX_GENERATIONS):
    """Solve ``length*y + mass*c(y) = tau`` for ``x = length*y`` on one piece."""
    tau = np.asarray(tau, dtype=float)
    x = np.zeros(tau.shape)
    length = np.broadcast_to(np.asarray(length, dtype=float), tau.shape).copy()
    mass = np.broadcast_to(np.asarray(mass, dtype=float), tau.shape).copy()
    q = np.broadcast_to(np.asarray(q, dtype=float), tau.shape)
    active = np.ones(tau.shape, dtype=bool)
    for _ in range(generations):
        if not active.any():
            break
        left_end = length * q + 0.5 * mass
        right_start = length * (1.0 - q) + 0.5 * mass
        left = tau <= left_end
        right = tau >= right_start
        gap = active & ~left & ~right
        x = np.where(gap, x + length * q + (tau - left_end), x)
        active &= ~gap
        x = np.where(active & right, x + length * (1.0 - q), x)
        tau = np.where(right, tau - right_start, tau)
        length = length * q
        mass = 0.5 * mass
    total = length + mass
    frac = np.divide(tau, total, out=np.zeros_like(tau), where=total > 0)
    return np.where(active, x + length * frac, x)


# ---------------------------------------------------------------------------
# Specifications


@dataclass(frozen=True)
class IntervalSpec:
    """An interval with endpoint inclusion and tail-mass flags."""

    a: float
    b: float
    a_closed: bool = False
    b_closed: bool = False
    left_tail: str = FINITE_MASS
    right_tail: str = FINITE_MASS

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigError(f"interval needs a < b, got ({self.a}, {self.b})")
        if self.a_closed and math.isinf(self.a):
            raise ConfigError("an infinite endpoint cannot be closed")
        if self.b_closed and math.isinf(self.b):
            raise ConfigError("an infinite endpoint cannot be closed")
        for flag in (self.left_tail, self.right_tail):
            if flag not in TAIL_FLAGS:
                raise ConfigError(f"unknown tail flag {flag!r}")

    @property
    def bounded(self):
        return math.isfinite(self.a) and math.isfinite(self.b)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        lo = (x >= self.a) if self.a_closed else (x > self.a)
        hi = (x <= self.b) if self.b_closed else (x < self.b)
        return lo & hi

    def in_closure(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.a) & (x <= self.b)

    def tail_consistent(self, side):
        """Whether the declared tail flag matches endpoint inclusion."""
        end, closed, flag = (
            (self.a, self.a_closed, self.left_tail)
            if side == "left"
            else (self.b, self.b_closed, self.right_tail)
        )
        if math.isinf(end):
            return True
        return flag == (FINITE_MASS if closed else INFINITE_MASS)

    def __str__(self):
        lb = "[" if self.a_closed else "("
        rb = "]" if self.b_closed else ")"
        return f"{lb}{self.a:g}, {self.b:g}{rb}"


@dataclass(frozen=True)
class CantorBlock:
    """Cantor measure of total ``mass`` on ``[lo, hi]``.

    ``middle_fraction`` is the removed middle proportion per generation and
    ``depth`` the generation used for gap enumeration and quadrature.  Values
    may be given as :class:`fractions.Fraction` for exact evaluation.
    """

    lo: float | Fraction
    hi: float | Fraction
    mass: float | Fraction = 1
    middle_fraction: float | Fraction = Fraction(1, 3)
    depth: int = 10

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError("block needs lo < hi")
        if not self.mass > 0:
            raise ConfigError("block mass must be positive")
        if not 0 < self.middle_fraction < 1:
            raise ConfigError("middle_fraction must lie in (0, 1)")
        if int(self.depth) < 0:
            raise ConfigError("block depth must be nonnegative")

    @property
    def q(self):
        return (1 - self.middle_fraction) / 2

    def cdf(self, x):
        """Cumulative singular mass of ``[lo, x]``."""
        x = np.asarray(x, dtype=float)
        y = (x - float(self.lo)) / (float(self.hi) - float(self.lo))
        return float(self.mass) * cantor_cdf(y, float(self.q))

    def cdf_exact(self, x):
        y = (Fraction(x) - Fraction(self.lo)) / (Fraction(self.hi) - Fraction(self.lo))
        value, bound = cantor_cdf_exact(y, Fraction(self.q))
        return Fraction(self.mass) * value, Fraction(self.mass) * bound

    def cover_length(self, depth=None):
        """Lebesgue measure of the generation-``depth`` cover."""
        d = self.depth if depth is None else depth
        return (float(self.hi) - float(self.lo)) * (2 * float(self.q)) ** d


SERIES = ("constant", "harmonic_squares")


@dataclass(frozen=True)
class Cascade:
    """Blocks accumulating at one endpoint of the interval.

    Level ``k`` carries mass ``mass`` (series ``"constant"``, divergent) or
    ``mass / (k + 2)**2`` (series ``"harmonic_squares"``, convergent).  At a
    finite endpoint ``b`` level ``k`` occupies
    ``[b - span*2**-k, b - span*2**-(k+1)]``; at an infinite endpoint it
    occupies ``[start + k*span, start + (k+1)*span]`` (mirrored on the left).
    ``levels`` is the number of levels enumerated for gaps and quadrature.
    """

    side: str
    series: str = "constant"
    levels: int = 40
    mass: float = 1.0
    span: float = 1.0
    start: float | None = None
    middle_fraction: float = 1.0 / 3.0
    block_depth: int = 3

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ConfigError(f"cascade side must be 'left' or 'right', got {self.side!r}")
        if self.series not in SERIES:
            raise ConfigError(f"unknown cascade series {self.series!r}")
        if self.levels < 1 or self.span <= 0 or self.mass <= 0:
            raise ConfigError("cascade needs levels >= 1, span > 0, mass > 0")

    @property
    def divergent(self):
        return self.series == "constant"

    def level_mass(self, k):
        k = np.asarray(k, dtype=float)
        if self.series == "constant":
            return self.mass * np.ones_like(k)
        return self.mass / (k + 2.0) ** 2

    def partial_mass(self, n):
        """Total mass of levels ``0 .. n-1``."""
        if self.series == "constant":
            return self.mass * n
        # sum_{k<n} 1/(k+2)^2 = (pi^2/6 - 1) - psi_1(n + 2)
        return self.mass * (math.pi**2 / 6.0 - 1.0 - float(polygamma(1, n + 2)))

    @property
    def total_mass(self):
        if self.divergent:
            return math.inf
        return self.mass * (math.pi**2 / 6.0 - 1.0)

    def remainder_bound(self, n):
        """Upper bound on the mass of levels ``>= n``."""
        if self.divergent:
            return math.inf
        return self.mass / (n + 1.0)


# ---------------------------------------------------------------------------
# Panels: gaps and residual cover of W at a given depth


class GapList(NamedTuple):
    """Gaps of ``U`` and the residual cover of ``W`` at a given depth.

    ``gaps`` is an ``(m, 2)`` array of open intervals, ``gap_S`` the value of
    the singular function on each.  ``cover`` is a ``(k, 2)`` array of closed
    intervals with singular masses ``cover_mass`` and singular-function values
    ``cover_S`` at their left ends.  ``unresolved`` holds the cascade regions
    beyond the enumerated levels as ``(lo, hi, mass)`` rows (mass may be inf).
    """

    gaps: np.ndarray
    gap_S: np.ndarray
    cover: np.ndarray
    cover_mass: np.ndarray
    cover_S: np.ndarray
    unresolved: np.ndarray


def _block_panels(lo, hi, mass, q, depth, S_lo):
    """Leaves and internal gaps of one block at generation ``depth``."""
    los = np.array([lo])
    lens = np.array([hi - lo])
    for _ in range(depth):
        child = lens * q
        los = np.column_stack([los, los + lens - child]).ravel()
        lens = np.repeat(child, 2)
    n = los.size
    leaf_mass = mass / n
    cover = np.column_stack([los, los + lens])
    cover_S = S_lo + leaf_mass * np.arange(n)
    gaps = np.column_stack([cover[:-1, 1], cover[1:, 0]])
    gap_S = S_lo + leaf_mass * np.arange(1, n)
    return gaps, gap_S, cover, np.full(n, leaf_mass), cover_S


# ---------------------------------------------------------------------------
# Scale function


@dataclass(frozen=True)
class ScaleFunction:
    """Scale function ``t(x) = x + S(x)`` on an interval.

    Parameters
    ----------
    interval : IntervalSpec
    blocks : sequence of CantorBlock
        Blocks with disjoint interiors inside the interval.
    base_point : float, optional
        Reference point ``e`` of the darning CDF ``j(x) = S(x) - S(e)``.
        Defaults to the midpoint of a bounded interval, 0 for an unbounded
        interval containing 0, and otherwise one unit inside the finite
        endpoint.
    cascades : sequence of Cascade
        At most one per side.
    """

    interval: IntervalSpec
    blocks: tuple = ()
    base_point: float | None = None
    cascades: tuple = ()
    _pieces: dict = field(default=None, init=False, repr=False, compare=False)
    _cache: dict = field(default=None, init=False, repr=False, compare=False)
    _S_e: float = field(default=0.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(sorted(self.blocks, key=lambda b: b.lo)))
        object.__setattr__(self, "cascades", tuple(self.cascades))
        object.__setattr__(self, "_cache", {})
        iv = self.interval
        sides = [c.side for c in self.cascades]
        if len(set(sides)) != len(sides):
            raise ConfigError("at most one cascade per side")
        for b in self.blocks:
            if b.lo < iv.a or b.hi > iv.b:
                raise ConfigError(f"block [{b.lo}, {b.hi}] not inside {iv}")
        for b1, b2 in zip(self.blocks, self.blocks[1:]):
            if b2.lo < b1.hi:
                raise ConfigError("block supports must have disjoint interiors")
        if self.base_point is None:
            object.__setattr__(self, "base_point", self._default_base_point())
        e = float(self.base_point)
        if not (iv.a <= e <= iv.b) or (e == iv.a and not iv.a_closed) or (
            e == iv.b and not iv.b_closed
        ):
            raise ConfigError(f"base point {e} not in {iv}")
        object.__setattr__(self, "_pieces", self._materialize())
        object.__setattr__(self, "_S_e", float(self.singular_cdf(e)))

    # -- construction ------------------------------------------------------

    def _default_base_point(self):
        a, b = self.interval.a, self.interval.b
        if math.isfinite(a) and math.isfinite(b):
            return 0.5 * (a + b)
        if a < 0 < b:
            return 0.0
        return a + 1.0 if math.isfinite(a) else b - 1.0

    def cascade(self, side):
        for c in self.cascades:
            if c.side == side:
                return c
        return None

    def _cascade_levels(self, c):
        """Supports of the materialized levels of a cascade (outward order)."""
        iv = self.interval
        end = iv.b if c.side == "right" else iv.a
        if math.isfinite(end):
            k = np.arange(_CASCADE_CAP_FINITE)
            near = c.span * 0.5 ** (k + 1)
            far = c.span * 0.5**k
            if c.side == "right":
                lo, hi = end - far, end - near
            else:
                lo, hi = end + near, end + far
            keep = lo < hi
            keep &= (lo > iv.a) if c.side == "left" else (hi < iv.b)
            keep[: c.levels] = True
            return lo[keep], hi[keep], k[keep]
        k = np.arange(_CASCADE_CAP_INFINITE)
        if c.start is not None:
            start = float(c.start)
        else:
            his = [float(b.hi) for b in self.blocks] if c.side == "right" else [
                float(b.lo) for b in self.blocks
            ]
            if his:
                start = max(his) if c.side == "right" else min(his)
            else:
                start = self.interval.a if c.side == "right" else self.interval.b
                if not math.isfinite(start):
                    start = 0.0
        if c.side == "right":
            return start + k * c.span, start + (k + 1) * c.span, k
        return start - (k + 1) * c.span, start - k * c.span, k

    def _materialize(self):
        """Sorted table of singular pieces with singular-function offsets."""
        rows = []  # (lo, hi, mass, q, depth, enumerated, origin)
        for b in self.blocks:
            rows.append((float(b.lo), float(b.hi), float(b.mass), float(b.q), int(b.depth), True, "block"))
        for c in self.cascades:
            lo, hi, k = self._cascade_levels(c)
            masses = c.level_mass(k)
            q = (1.0 - c.middle_fraction) / 2.0
            for li, hi_, kk, m in zip(lo, hi, k, masses):
                rows.append((li, hi_, float(m), q, c.block_depth, bool(kk < c.levels), c.side))
        rows.sort(key=lambda r: r[0])
        for r1, r2 in zip(rows, rows[1:]):
            if r2[0] < r1[1] - 1e-15 * max(1.0, abs(r1[1])):
                raise ConfigError("cascade levels overlap blocks")
        lo = np.array([r[0] for r in rows], dtype=float)
        hi = np.array([r[1] for r in rows], dtype=float)
        mass = np.array([r[2] for r in rows], dtype=float)
        q = np.array([r[3] for r in rows], dtype=float)
        depth = np.array([r[4] for r in rows], dtype=int)
        enumerated = np.array([r[5] for r in rows], dtype=bool)
        origin = np.array([r[6] for r in rows], dtype=object)
        # S is measured from the inner end of a left cascade (or from a).
        left = origin == "left"
        S_lo = np.concatenate([[0.0], np.cumsum(mass)[:-1]]) if rows else np.zeros(0)
        if left.any():
            S_lo = S_lo - mass[left].sum()
        return dict(lo=lo, hi=hi, mass=mass, q=q, depth=depth, enumerated=enumerated,
                    origin=origin, S_lo=S_lo, S_hi=S_lo + mass)

    # -- basic geometry ------------------------------------------------------

    @property
    def has_singular_mass(self):
        return self._pieces["lo"].size > 0

    @property
    def e(self):
        return float(self.base_point)

    @property
    def l(self):
        """Infimum of ``W`` (``-inf`` for an unbounded left cascade)."""
        if not self.has_singular_mass:
            return math.nan
        c = self.cascade("left")
        if c is not None:
            return self.interval.a
        return float(self._pieces["lo"][0])

    @property
    def r(self):
        """Supremum of ``W``."""
        if not self.has_singular_mass:
            return math.nan
        c = self.cascade("right")
        if c is not None:
            return self.interval.b
        return float(self._pieces["hi"][-1])

    def _check_domain(self, x, closure=True):
        x = np.asarray(x, dtype=float)
        ok = self.interval.in_closure(x) if closure else self.interval.contains(x)
        if not np.all(ok):
            raise DomainError(f"points outside {self.interval}: {np.atleast_1d(x)[~np.atleast_1d(ok)][:5]}")
        return x

    def singular_cdf(self, x):
        """Singular part ``S(x)``; signed infinity at a divergent endpoint."""
        x = np.asarray(x, dtype=float)
        p = self._pieces
        if p["lo"].size == 0:
            return np.zeros(x.shape)
        idx = np.searchsorted(p["lo"], x, side="right") - 1
        safe = np.clip(idx, 0, None)
        inside = (idx >= 0) & (x <= p["hi"][safe])
        length = p["hi"][safe] - p["lo"][safe]
        frac = np.zeros(x.shape)
        if inside.any():
            frac[inside] = cantor_cdf((x[inside] - p["lo"][safe[inside]]) / length[inside], p["q"][safe[inside]])
        S = np.where(inside, p["S_lo"][safe] + p["mass"][safe] * frac, p["S_hi"][safe])
        S = np.where(idx < 0, p["S_lo"][0], S)
        iv = self.interval
        for c in self.cascades:
            end = iv.b if c.side == "right" else iv.a
            at_end = x == end
            if c.side == "right":
                val = math.inf if c.divergent else p["S_lo"][p["origin"] == "right"][0] + c.total_mass
            else:
                val = -math.inf if c.divergent else -c.total_mass
            S = np.where(at_end, val, S)
        return S

    def eval_t(self, x):
        """Scale function ``t(x) = x + S(x)`` on the closure of the interval.

        Exact :class:`~fractions.Fraction` input returns an exact value when
        the digit recursion terminates.
        """
        if isinstance(x, Fraction):
            return x + self.singular_cdf_exact(x)
        x = self._check_domain(x)
        with np.errstate(invalid="ignore"):
            return x + self.singular_cdf(x)

    def eval_t_with_bound(self, x):
        """Return ``(t(x), bound)`` with the truncation bound of the evaluation."""
        x = self._check_domain(x)
        return self.eval_t(x), self.truncation_bound()

    def truncation_bound(self, depth=None):
        """Singular mass left unresolved by the depth-``depth`` cover, per point."""
        p = self._pieces
        if p["lo"].size == 0:
            return 0.0
        d = p["depth"] if depth is None else np.full(p["depth"].shape, depth)
        return float(np.max(p["mass"] * 0.5 ** d))

    def singular_cdf_exact(self, x):
        """Exact singular part for rational input (blocks only)."""
        x = Fraction(x)
        if not (self.interval.a <= x <= self.interval.b):
            raise DomainError(f"{x} outside {self.interval}")
        if self.cascades:
            raise NotImplementedError("exact evaluation supports plain blocks only")
        total = Fraction(0)
        for b in self.blocks:
            if x >= Fraction(b.hi):
                total += Fraction(b.mass)
            elif x > Fraction(b.lo):
                value, bound = b.cdf_exact(x)
                if bound:
                    raise RangeError(f"exact recursion for {x} did not terminate")
                total += value
        return total

    def darning_j(self, x):
        """Darning CDF ``j(x) = S(x) - S(e)``, the signed singular mass of ``(e, x]``."""
        if isinstance(x, Fraction):
            if not self.interval.contains(float(x)):
                raise DomainError(f"{x} outside {self.interval}")
            return self.singular_cdf_exact(x) - self.singular_cdf_exact(Fraction(self.base_point))
        x = np.asarray(x, dtype=float)
        if not np.all(self.interval.contains(x)):
            raise DomainError(f"points outside {self.interval}")
        return self.singular_cdf(x) - self._S_e

    def j_closure(self, x):
        """Darning CDF extended to the closure, with signed infinities."""
        x = self._check_domain(x)
        with np.errstate(invalid="ignore"):
            return self.singular_cdf(x) - self._S_e

    @property
    def l_star(self):
        if not self.has_singular_mass:
            return math.nan
        c = self.cascade("left")
        if c is not None and c.divergent:
            return -math.inf
        if c is not None:
            return -c.total_mass - self._S_e
        return float(self._pieces["S_lo"][0]) - self._S_e

    @property
    def r_star(self):
        if not self.has_singular_mass:
            return math.nan
        c = self.cascade("right")
        p = self._pieces
        if c is not None and c.divergent:
            return math.inf
        if c is not None:
            first = p["S_lo"][p["origin"] == "right"][0]
            return first + c.total_mass - self._S_e
        return float(p["S_hi"][-1]) - self._S_e

    def r_star_partial(self):
        """Partial sum of ``r*`` over enumerated levels with a remainder bound."""
        c = self.cascade("right")
        if c is None:
            return self.r_star, 0.0
        p = self._pieces
        first = p["S_lo"][p["origin"] == "right"][0]
        return first + c.partial_mass(c.levels) - self._S_e, c.remainder_bound(c.levels)

    def j_inv(self, s):
        """Generalized inverse: smallest ``x`` in the closure of ``W`` with ``j(x) >= s``."""
        s = np.asarray(s, dtype=float)
        p = self._pieces
        if p["lo"].size == 0:
            raise RangeError("no singular mass: j is constant")
        v = s + self._S_e
        lo_s, hi_s = p["S_lo"][0], p["S_hi"][-1]
        if np.any(v < lo_s - 1e-12 * max(1.0, abs(lo_s))) or np.any(v > hi_s + 1e-12 * max(1.0, abs(hi_s))):
            raise RangeError("value outside the materialized range of j")
        idx = np.clip(np.searchsorted(p["S_hi"], v, side="left"), 0, p["lo"].size - 1)
        frac = (v - p["S_lo"][idx]) / p["mass"][idx]
        length = p["hi"][idx] - p["lo"][idx]
        return p["lo"][idx] + length * cantor_cdf_inv(frac, p["q"][idx])

    def eval_t_inv(self, s):
        """Inverse of the scale function by descent through the block structure."""
        s = np.asarray(s, dtype=float)
        p = self._pieces
        iv = self.interval
        t_a = float(self.eval_t(iv.a)) if math.isfinite(iv.a) else -math.inf
        t_b = float(self.eval_t(iv.b)) if math.isfinite(iv.b) else math.inf
        if np.any(s < t_a) or np.any(s > t_b) or np.any(np.isnan(s)):
            raise RangeError(f"value outside the range ({t_a}, {t_b}) of t")
        if p["lo"].size == 0:
            return s.copy()
        T_lo = p["lo"] + p["S_lo"]
        T_hi = p["hi"] + p["S_hi"]
        idx = np.searchsorted(T_lo, s, side="right") - 1
        safe = np.clip(idx, 0, None)
        inside = (idx >= 0) & (s <= T_hi[safe])
        x_in = p["lo"][safe] + _scale_inv_piece(
            s - T_lo[safe], p["hi"][safe] - p["lo"][safe], p["mass"][safe], p["q"][safe]
        )
        x_gap = p["hi"][safe] + (s - T_hi[safe])
        x = np.where(inside, x_in, x_gap)
        return np.where(idx < 0, s - p["S_lo"][0], x)

    def measure_dt(self, lo, hi, lo_closed=False, hi_closed=True):
        """``dt`` measure of an interval: Lebesgue part of the gaps plus singular mass.

        The singular measure has no atoms, so endpoint inclusion only matters
        through the domain check.
        """
        self._check_domain([lo, hi])
        if hi < lo:
            raise DomainError("empty interval")
        S = self.singular_cdf(np.array([lo, hi], dtype=float))
        lebesgue_gaps = hi - lo  # m(W) = 0
        return float(lebesgue_gaps + S[1] - S[0])

    # -- gaps and residual cover --------------------------------------------

    def gaps(self, depth=None, shift=0):
        """Gaps of ``U`` and the residual cover of ``W``.

        Parameters
        ----------
        depth : int, optional
            Generation for every block; per-block depths are used when omitted.
            Cascade levels always use their own ``block_depth``.
        shift : int
            Subtracted from every generation (used for Richardson partners).
        """
        key = ("gaps", depth, shift)
        if key in self._cache:
            return self._cache[key]
        p = self._pieces
        iv = self.interval
        gaps, gap_S, cover, cmass, cS = [], [], [], [], []
        unresolved = []
        enum = np.flatnonzero(p["enumerated"])
        for i in enum:
            d = int(p["depth"][i]) if depth is None or p["origin"][i] != "block" else int(depth)
            d = max(d - shift, 0)
            g, gs, c, cm, cs = _block_panels(p["lo"][i], p["hi"][i], p["mass"][i], p["q"][i], d, p["S_lo"][i])
            gaps.append(g)
            gap_S.append(gs)
            cover.append(c)
            cmass.append(cm)
            cS.append(cs)
        # regions beyond the enumerated cascade levels
        for c in self.cascades:
            tail_mass = c.total_mass - c.partial_mass(c.levels)
            levels = np.flatnonzero((p["origin"] == c.side) & p["enumerated"])
            if c.side == "right":
                lo_u = p["hi"][levels].max()
                unresolved.append((lo_u, iv.b, tail_mass))
            else:
                hi_u = p["lo"][levels].min()
                unresolved.append((iv.a, hi_u, tail_mass))
        # outer gaps between consecutive resolved pieces and the interval ends
        edges = []
        if enum.size:
            e_lo, e_hi = p["lo"][enum], p["hi"][enum]
            e_S_lo, e_S_hi = p["S_lo"][enum], p["S_hi"][enum]
            left_end = iv.a if self.cascade("left") is None else None
            right_end = iv.b if self.cascade("right") is None else None
            if left_end is not None and left_end < e_lo[0]:
                edges.append((left_end, e_lo[0], e_S_lo[0]))
            for k in range(enum.size - 1):
                if e_hi[k] < e_lo[k + 1]:
                    edges.append((e_hi[k], e_lo[k + 1], e_S_hi[k]))
            if right_end is not None and e_hi[-1] < right_end:
                edges.append((e_hi[-1], right_end, e_S_hi[-1]))
        else:
            edges.append((iv.a, iv.b, 0.0))
        if edges:
            gaps.append(np.array([[e[0], e[1]] for e in edges]))
            gap_S.append(np.array([e[2] for e in edges]))
        cat = lambda xs, w: np.concatenate(xs) if xs else np.zeros((0, w) if w else 0)
        G = cat(gaps, 2).reshape(-1, 2)
        GS = cat(gap_S, 0)
        order = np.argsort(G[:, 0], kind="stable")
        C = cat(cover, 2).reshape(-1, 2)
        CM = cat(cmass, 0)
        CS = cat(cS, 0)
        corder = np.argsort(C[:, 0], kind="stable")
        keep = G[order, 1] > G[order, 0]
        out = GapList(
            gaps=G[order][keep],
            gap_S=GS[order][keep],
            cover=C[corder],
            cover_mass=CM[corder],
            cover_S=CS[corder],
            unresolved=np.array(unresolved, dtype=float).reshape(-1, 3),
        )
        self._cache[key] = out
        return out

    def locate_gap(self, x):
        """Mask of points that lie in a gap of ``U`` (resolved to machine depth)."""
        x = np.asarray(x, dtype=float)
        p = self._pieces
        if p["lo"].size == 0:
            return self.interval.contains(x)
        idx = np.searchsorted(p["lo"], x, side="right") - 1
        safe = np.clip(idx, 0, None)
        inside = (idx >= 0) & (x <= p["hi"][safe])
        length = p["hi"][safe] - p["lo"][safe]
        y = (x - p["lo"][safe]) / length
        _, resolved = cantor_cdf(y, p["q"][safe], return_resolved=True)
        interior = (y > 0) & (y < 1)
        in_gap = np.where(inside, resolved & interior, True)
        # points before the first piece lie in a gap unless a left cascade sits there
        if self.cascade("left") is not None:
            in_gap &= idx >= 0
        if self.cascade("right") is not None:
            in_gap &= x < p["hi"][-1]
        return in_gap & self.interval.contains(x)


# ---------------------------------------------------------------------------
# Validation


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str = ""


class ValidationReport(NamedTuple):
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }

    def __getitem__(self, name):
        if isinstance(name, int):
            return tuple.__getitem__(self, name)
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_scale(spec: IntervalSpec | ScaleFunction, sf: ScaleFunction | None = None, depth=6):
    """Check endpoint divergence and the structural assumptions on ``W``.

    Returns a report with one entry per condition:

    * ``T_inf_left`` / ``T_inf_right`` -- the scale function diverges at an
      endpoint exactly when the endpoint is excluded, and the declared tail
      flag agrees;
    * ``H1`` -- the gaps are open, disjoint and inside the interval;
    * ``H2`` -- every residual-cover piece carries positive singular mass;
    * ``H3`` -- the total singular mass is positive.
    """
    if sf is None:
        sf, spec = spec, spec.interval
    checks = []
    for side in ("left", "right"):
        end = spec.a if side == "left" else spec.b
        closed = spec.a_closed if side == "left" else spec.b_closed
        flag = spec.left_tail if side == "left" else spec.right_tail
        c = sf.cascade(side)
        name = f"T_inf_{side}"
        if math.isinf(end):
            checks.append(Check(name, True, "infinite endpoint: identity part diverges"))
            continue
        diverges = c is not None and c.divergent
        ok = diverges == (not closed) and spec.tail_consistent(side)
        detail = f"endpoint {end:g} {'closed' if closed else 'open'}, cascade {'divergent' if diverges else 'absent or convergent'}, flag {flag}"
        if ok and diverges:
            # monotone divergence of truncated values
            partial = [c.partial_mass(n) for n in (1, 2, 4, 8, 16, 32)]
            ok = all(b > a for a, b in zip(partial, partial[1:]))
        checks.append(Check(name, bool(ok), detail))
    g = sf.gaps(depth)
    G = g.gaps
    h1 = bool(
        np.all(G[:, 1] > G[:, 0])
        and np.all(G[1:, 0] >= G[:-1, 1])
        and (G.size == 0 or (G[0, 0] >= spec.a and G[-1, 1] <= spec.b))
    )
    checks.append(Check("H1", h1, f"{len(G)} open gaps at depth {depth}"))
    h2 = bool(np.all(g.cover_mass > 0)) and bool(np.all(g.cover[:, 1] > g.cover[:, 0]))
    checks.append(Check("H2", h2, f"{len(g.cover)} cover pieces with positive mass"))
    total = float(sf._pieces["mass"].sum())
    checks.append(Check("H3", total > 0, f"singular mass {total:g}"))
    return ValidationReport(tuple(checks))

