"""Darning: collapse every gap of an interval to a point.

The map ``j_n`` sends ``W_n`` onto a subinterval ``J*`` of the line and every
gap to a single point.  A coefficient ``c = ψ ∘ j_n`` becomes the function
``ψ`` on ``J*``; the weighted measure ``h±² dx`` becomes the image measure,
which is purely atomic, and the energy becomes

    E*(ψ, ψ) = 1/2 ∫_{J*} ψ'(s)² h*(s)² ds,   h*(j(x)) = h±(x) on W_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complement import energy_pm
from .errors import ClassificationError, DomainError, NotInSpaceError
from .extension import _sgn
from .functions import CutoffProfile, Profile
from .geometry import ScaleFunction, validate_scale

LEFT_CASES = ("L1", "L2", "L3i", "L3ii", "L3iii")
RIGHT_CASES = ("R1", "R2", "R3i", "R3ii", "R3iii")


def _fmt(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


@dataclass(frozen=True)
class EndpointCase:
    """Endpoint behaviour of one interval on both sides."""

    left: str
    right: str
    l: float
    r: float
    l_star: float
    r_star: float
    r_star_bound: float = 0.0

    def to_dict(self):
        return {
            "left": self.left,
            "right": self.right,
            "l": _fmt(self.l),
            "r": _fmt(self.r),
            "l_star": _fmt(self.l_star),
            "r_star": _fmt(self.r_star),
            "r_star_truncation_bound": _fmt(self.r_star_bound),
        }


def classify_endpoints(sf: ScaleFunction, spec=None, depth=6) -> EndpointCase:
    """Classify both endpoints of an interval.

    Right end (the left is mirrored):

    * ``R1``  finite ``b`` outside the interval, so ``r = b`` and ``r* = inf``;
    * ``R2``  ``b`` inside the interval;
    * ``R3i`` ``b = inf``, ``W`` unbounded, finite total singular mass;
    * ``R3ii`` ``b = inf``, ``W`` unbounded, infinite singular mass;
    * ``R3iii`` ``b = inf``, ``W`` bounded above.
    """
    spec = sf.interval if spec is None else spec
    if spec != sf.interval:
        raise ClassificationError("interval specification does not match the scale function")
    if not sf.has_singular_mass:
        raise ClassificationError("interval carries no singular mass")
    report = validate_scale(sf, depth=depth)
    if not report.passed:
        bad = [c.name for c in report.checks if not c.passed]
        raise ClassificationError(f"scale function fails {', '.join(bad)}")

    def side(end, closed, cascade, mirror):
        prefix = "L" if mirror else "R"
        if math.isfinite(end):
            if closed:
                if cascade is not None and cascade.divergent:
                    raise ClassificationError(f"{prefix}2 endpoint with divergent mass")
                return prefix + "2"
            if cascade is None or not cascade.divergent:
                raise ClassificationError(f"excluded finite endpoint {end} without divergent mass")
            return prefix + "1"
        if cascade is None:
            return prefix + "3iii"
        return prefix + ("3ii" if cascade.divergent else "3i")

    left = side(spec.a, spec.a_closed, sf.cascade("left"), True)
    right = side(spec.b, spec.b_closed, sf.cascade("right"), False)
    r_star = sf.r_star
    bound = 0.0
    if right == "R3i":
        _, bound = sf.r_star_partial()
    return EndpointCase(left, right, sf.l, sf.r, sf.l_star, r_star, bound)


# ---------------------------------------------------------------------------
# The darned interval


@dataclass(frozen=True)
class DarnedSpace:
    """``J*`` for one sign, together with the image ``j(I_n)``."""

    sign: str
    case: EndpointCase
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    image_lo_closed: bool
    image_hi_closed: bool

    def contains(self, s):
        s = np.asarray(s, dtype=float)
        a = (s >= self.lo) if self.lo_closed else (s > self.lo)
        b = (s <= self.hi) if self.hi_closed else (s < self.hi)
        return a & b

    def notation(self, image=False):
        lc, hc = (self.image_lo_closed, self.image_hi_closed) if image else (self.lo_closed, self.hi_closed)
        return f"{'[' if lc else '('}{_fmt(self.lo)}, {_fmt(self.hi)}{']' if hc else ')'}"

    def to_dict(self):
        return {
            "sign": self.sign,
            "case": [self.case.left, self.case.right],
            "J_star": self.notation(),
            "j_image": self.notation(image=True),
            "lo": _fmt(self.lo),
            "hi": _fmt(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


# endpoint inclusion in J*, per sign
_RIGHT_IN = {"+": {"R2"}, "-": {"R2", "R3i", "R3iii"}}
_LEFT_IN = {"+": {"L2", "L3i", "L3iii"}, "-": {"L2"}}
# endpoint inclusion in j(I_n)
_IMAGE_IN = {"R1": False, "R2": True, "R3i": False, "R3ii": False, "R3iii": True}


def build_jstar(case: EndpointCase, sign) -> DarnedSpace:
    """Build ``J*`` for ``sign`` from the endpoint inclusion table."""
    sign = "+" if _sgn(sign) > 0 else "-"
    hi_closed = case.right in _RIGHT_IN[sign]
    lo_closed = case.left in _LEFT_IN[sign]
    img_hi = _IMAGE_IN[case.right]
    img_lo = _IMAGE_IN["R" + case.left[1:]]
    # an infinite endpoint is never included
    if math.isinf(case.r_star):
        hi_closed = img_hi = False
    if math.isinf(case.l_star):
        lo_closed = img_lo = False
    return DarnedSpace(sign, case, case.l_star, case.r_star, lo_closed, hi_closed, img_lo, img_hi)


# ---------------------------------------------------------------------------
# The image measure


@dataclass
class ImageMeasure:
    """Image of ``h±² dx`` on one interval under ``j_n``.

    ``positions``/``masses`` are the atoms of the gaps resolved at the chosen
    depth.  ``lump_positions``/``lump_masses`` carry the mass of the residual
    cover of ``W`` (centred in the darned coordinate) and of cascade regions
    beyond the enumerated levels; they vanish as the depth grows.  Infinite
    masses are kept in ``infinite`` as ``(position, side)`` and are never
    summed.
    """

    ext: object
    n: int
    sign: str
    depth: int | None
    positions: np.ndarray
    masses: np.ndarray
    lump_positions: np.ndarray
    lump_masses: np.ndarray
    infinite: list

    @property
    def sf(self):
        return self.ext.parts[self.n]

    def finite_atom_mass(self):
        return float(self.masses.sum())

    def h_star(self, s):
        """Energy weight ``h*(s) = h±(j^{-1}(s))``."""
        return self.ext.h(self.sign, self.sf.j_inv(s))

    def integrate(self, F):
        """``∫ F d m*`` including the residual lumps; infinite atoms must see ``F = 0``."""
        total = float(np.dot(F(self.positions), self.masses))
        if self.lump_masses.size:
            total += float(np.dot(F(self.lump_positions), self.lump_masses))
        for pos, _side in self.infinite:
            v = float(np.asarray(F(np.array([pos])))[0]) if math.isfinite(pos) else 0.0
            if abs(v) > 1e-12:
                raise NotInSpaceError(f"function is nonzero ({v:.3g}) on an atom of infinite mass at s={pos}")
        return total

    def atom_table(self):
        rows = [{"position": float(p), "mass": float(m)} for p, m in zip(self.positions, self.masses)]
        rows += [{"position": _fmt(float(p)), "mass": "inf", "side": side} for p, side in self.infinite]
        return rows

    def to_dict(self, limit=None):
        table = self.atom_table()
        return {
            "interval": self.n,
            "sign": self.sign,
            "depth": self.depth,
            "atoms": table if limit is None else table[:limit],
            "atom_count": len(table),
            "finite_atom_mass": self.finite_atom_mass(),
            "residual_mass": float(self.lump_masses.sum()),
        }


def image_measure(ext, n, sign, depth=None) -> ImageMeasure:
    """Atoms of the image of ``h±² dx`` under ``j_n`` at the given depth."""
    sign = "+" if _sgn(sign) > 0 else "-"
    sf = ext.parts[n]
    depth = ext.depth if depth is None else depth
    g = sf.gaps(depth)
    w = ext.weights
    S_e = sf._S_e
    pos = g.gap_S - S_e
    with np.errstate(over="ignore"):
        mass = w.h2_integral(sign, g.gaps[:, 0], g.gaps[:, 1])
    infinite = []
    finite = np.isfinite(mass)
    for (lo, hi), p in zip(g.gaps[~finite], pos[~finite]):
        infinite.append((float(p), "left" if np.isinf(lo) else "right"))
    lump_pos = [g.cover_S - S_e + 0.5 * g.cover_mass]
    lump_mass = [w.h2_integral(sign, g.cover[:, 0], g.cover[:, 1])]
    for lo, hi, m in g.unresolved:
        right = np.isinf(hi) or (hi == sf.interval.b)
        with np.errstate(over="ignore"):
            mm = float(w.h2_integral(sign, lo, hi))
        end = sf.r_star if right else sf.l_star
        if not math.isfinite(mm):
            infinite.append((float(end), "right" if right else "left"))
            continue
        # the unresolved region maps onto (S(lo), end); lump it at the inner end
        s_in = float(sf.j_closure(lo if right else hi))
        lump_pos.append(np.array([s_in]))
        lump_mass.append(np.array([mm]))
    return ImageMeasure(
        ext, n, sign, depth, pos[finite], mass[finite],
        np.concatenate(lump_pos), np.concatenate(lump_mass), infinite,
    )


# ---------------------------------------------------------------------------
# The star form


@dataclass
class StarForm:
    """Darned space, image measure and domain flags for one interval and sign."""

    ext: object
    n: int
    space: DarnedSpace
    measure: ImageMeasure

    @property
    def sign(self):
        return self.space.sign

    @property
    def case(self):
        return self.space.case

    def boundary_conditions(self):
        """Endpoints where ``ψ`` must vanish: ``(side, position)`` pairs."""
        out = []
        if self.case.right == "R3iii" and self.sign == "+":
            out.append(("right", self.case.r_star))
        if self.case.left == "L3iii" and self.sign == "-":
            out.append(("left", self.case.l_star))
        return out

    def to_dict(self):
        return {
            "case": self.case.to_dict(),
            "space": self.space.to_dict(),
            "boundary_zero": [{"side": s, "position": _fmt(p)} for s, p in self.boundary_conditions()],
        }


def star_form(ext, n, sign, depth=None) -> StarForm:
    case = classify_endpoints(ext.parts[n])
    return StarForm(ext, n, build_jstar(case, sign), image_measure(ext, n, sign, depth))


def _check_boundary(form: StarForm, psi: Profile, tol):
    for side, pos in form.boundary_conditions():
        v = float(np.asarray(psi.value(np.array([pos])))[0])
        if abs(v) > tol:
            raise DomainError(f"profile must vanish at the {side} end s={pos:g} of J*, got {v:.6g}")


def star_energy(form: StarForm, psi: Profile, tol=1e-9) -> float:
    """``1/2 ∫_{J*} ψ'(s)² h*(s)² ds`` by Gauss rules in ``s``."""
    _check_boundary(form, psi, tol)
    ext, n = form.ext, form.n
    sf = ext.parts[n]
    if not sf.has_singular_mass:
        return 0.0
    rule = ext.w_rule(n, "s", psi.breaks)
    vals = psi.deriv(rule.s) ** 2 * ext.h(form.sign, rule.x) ** 2
    value = 0.5 * rule.integrate(vals)
    if not np.isfinite(value):
        raise NotInSpaceError("star energy is not finite")
    return value


def star_l2(form: StarForm, psi: Profile) -> float:
    """``∫ ψ² d m*`` as a sum over atoms and residual lumps."""
    return form.measure.integrate(lambda s: psi.value(s) ** 2)


def _x_space_l2(form: StarForm, psi: Profile):
    ext, n = form.ext, form.n
    sf = ext.parts[n]
    rule = ext.lebesgue_rule(())
    inside = sf.interval.contains(rule.x)
    x = rule.x[inside]
    vals = np.zeros(rule.x.shape)
    vals[inside] = psi.value(sf.j_closure(x)) ** 2 * ext.h(form.sign, x) ** 2
    return rule.integrate(vals)


def _s_samples(form: StarForm, count=2001):
    sf = form.ext.parts[form.n]
    p = sf._pieces
    lo = float(p["S_lo"][0] - sf._S_e)
    hi = float(p["S_hi"][-1] - sf._S_e)
    return np.linspace(lo, hi, count)


def representation_check(form: StarForm, psi: Profile, tol=1e-6):
    """Sup norm, energy and ``L²`` norm agree between ``x`` space and ``J*``.

    The energy in ``x`` space samples cover-piece centres, the star energy
    integrates in ``s``; the ``L²`` norm in ``x`` space uses Gauss panels, the
    star one sums atoms.
    """
    ext, n = form.ext, form.n
    sf = ext.parts[n]
    s = _s_samples(form)
    x = np.concatenate([sf.j_inv(s), _gap_points(sf, ext.depth)])
    sup_x = float(np.max(np.abs(psi.value(sf.j_closure(x)))))
    sup_s = float(np.max(np.abs(psi.value(np.concatenate([s, form.measure.positions])))))
    profiles = {k: None for k in range(len(ext.parts))}
    profiles[n] = psi
    e_x = energy_pm(ext, profiles, form.sign, route="x").value
    e_s = star_energy(form, psi)
    l2_x = _x_space_l2(form, psi)
    l2_s = star_l2(form, psi)
    rows = {
        "sup": (sup_x, sup_s),
        "energy": (e_x, e_s),
        "l2": (l2_x, l2_s),
    }
    out = {"pass": True}
    for name, (a, b) in rows.items():
        diff = abs(a - b)
        ok = diff <= tol * max(1.0, abs(a))
        out[name] = {"x_space": a, "star": b, "difference": diff, "pass": bool(ok)}
        out["pass"] &= bool(ok)
    return out


def _gap_points(sf, depth):
    G = sf.gaps(depth).gaps
    fin = np.isfinite(G[:, 0]) & np.isfinite(G[:, 1])
    return 0.5 * (G[fin, 0] + G[fin, 1])


def theta_cutoff_convergence(form: StarForm, psi: Profile, k_list=(1, 2, 4, 8, 16, 32), s0=0.0):
    """``E*₁(ψ (1 - θ_k))`` for a cutoff ``θ_k`` equal to 1 on ``[s0, s0 + k]``.

    Requires ``r* = inf`` (cases R1 and R3ii).
    """
    if form.case.right not in ("R1", "R3ii"):
        raise ClassificationError(f"cutoff convergence needs r* = inf, got case {form.case.right}")
    values = []
    for k in k_list:
        tail = CutoffProfile(inner=psi, k=float(k), s0=s0)
        values.append(star_energy(form, tail) + star_l2(form, tail))
    values = np.asarray(values)
    decreasing = bool(np.all(np.diff(values) <= 1e-12 * max(1.0, values[0])))
    return {"k": list(map(float, k_list)), "values": values.tolist(), "decreasing": decreasing,
            "final": float(values[-1])}
