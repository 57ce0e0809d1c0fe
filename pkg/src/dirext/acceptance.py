"""The acceptance suite: fourteen numbered criteria with JSON-ready reports.

Every criterion is a function returning :class:`CriterionResult`; the CLI
(``check all``) and ``tests/test_acceptance.py`` both run them from here.
"""

from __future__ import annotations

import inspect
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .appendix import (
    FatCantorSet,
    fat_cantor_pair,
    subspace_bijection_check,
    subspace_pair_residual,
)
from .complement import (
    assemble_f,
    contraction_apply,
    energy_pm,
    gamma_decompose,
    lemma_gg_check,
    norm_equivalence_report,
    pair_from_cplus,
)
from .darning import (
    build_jstar,
    classify_endpoints,
    representation_check,
    star_form,
    theta_cutoff_convergence,
)
from .energy import energy_E, energy_E_alpha, energy_measure, inner_L2
from .fixtures import (
    LEFT_CASES,
    RIGHT_CASES,
    cantor_extension,
    cantor_scale,
    case_scale,
    constant_cascade_scale,
    endpoint_fixtures,
    example25_function,
    half_line_extension,
    hat,
    kplus_profile,
    random_contraction,
    random_gap_step_profile,
    random_smooth_h1,
    twoline_extension,
)
from .functions import (
    ConstantProfile,
    Contraction,
    EmbeddedH1,
    ExponentialProfile,
    H1Function,
    PolynomialProfile,
)
from .oracle import convergence_report


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}"

    def to_dict(self):
        return {"criterion": self.number, "title": self.title, "pass": self.passed,
                "seconds": round(self.seconds, 3), "details": self.details}


def _timed(number, title):
    def wrap(fn):
        def run(**kw):
            t0 = time.perf_counter()
            passed, details = fn(**kw)
            return CriterionResult(number, title, bool(passed), details, time.perf_counter() - t0)

        run.number = number
        run.title = title
        run.params = tuple(inspect.signature(fn).parameters)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def _grid():
    return np.concatenate([np.linspace(-6.0, -0.05, 60), np.linspace(0.05, 6.0, 60)])


# ---------------------------------------------------------------------------


@_timed(1, "orthogonality of the two-line element to random smooth H1 functions")
def orthogonality(seed=0, count=20):
    ext = twoline_extension(alpha=0.5)
    f = example25_function(ext)
    e1f = energy_E_alpha(ext, f, alpha=1.0).value
    rng = np.random.default_rng(seed)
    worst = 0.0
    rows = []
    for _ in range(count):
        terms = random_smooth_h1(rng)
        g = EmbeddedH1(ext, terms[0])
        for t in terms[1:]:
            g = g + EmbeddedH1(ext, t)
        pairing = energy_E_alpha(ext, f, g).value
        scale = math.sqrt(e1f * energy_E_alpha(ext, g, alpha=1.0).value)
        ratio = abs(pairing) / scale
        worst = max(worst, ratio)
        rows.append(ratio)
    return worst <= 1e-6, {"max_ratio": worst, "tolerance": 1e-6, "samples": count}


@_timed(2, "closed-form energies of the two-line element")
def closed_forms():
    ext = twoline_extension(alpha=0.5)
    f = example25_function(ext)
    got = {"E": energy_E(ext, f).value, "L2": inner_L2(ext, f).value, "E_alpha": energy_E_alpha(ext, f).value}
    want = {"E": 0.5, "L2": 1.0, "E_alpha": 1.0}
    err = {k: abs(got[k] - want[k]) for k in want}
    return max(err.values()) <= 1e-6, {"values": got, "expected": want, "errors": err}


def _roundtrips(ext, cplus, s_grid, x_grid):
    elem = pair_from_cplus(ext, cplus)
    f = assemble_f(elem)
    back = gamma_decompose(ext, f)
    pair_err = 0.0
    for sign in ("+", "-"):
        for n in range(len(ext.parts)):
            a, b = elem.profiles(sign)[n], back.profiles(sign)[n]
            pair_err = max(pair_err, float(np.max(np.abs(a.value(s_grid) - b.value(s_grid)))))
    f2 = assemble_f(gamma_decompose(ext, f))
    f_err = float(np.max(np.abs(f2.value(x_grid) - f.value(x_grid))))
    return pair_err, f_err


@_timed(3, "round trips between coefficient pairs and functions")
def roundtrips(depth=10):
    ext = twoline_extension(alpha=0.5)
    s = np.array([0.0])
    p_cf, f_cf = _roundtrips(ext, [ConstantProfile(2.0), ConstantProfile(0.0)], s, _grid())
    # against the closed form as well
    f = example25_function(ext)
    direct = float(np.max(np.abs(assemble_f(pair_from_cplus(ext, [ConstantProfile(2.0), None])).value(_grid())
                                 - f.value(_grid()))))
    ce = cantor_extension(alpha=0.5, depth=depth)
    sg = np.linspace(0.0, 1.0, 201)
    xg = np.concatenate([np.linspace(-3.0, 4.0, 301), ce.parts[0].j_inv(sg[1:-1])])
    p_c, f_c = _roundtrips(ce, [PolynomialProfile((0.0, 1.0, -1.0))], sg, xg)
    ok = max(p_cf, f_cf, direct) <= 1e-8 and max(p_c, f_c) <= 1e-4
    return ok, {
        "closed_form": {"pair_roundtrip": p_cf, "function_roundtrip": f_cf, "vs_closed_form": direct, "tolerance": 1e-8},
        "cantor": {"depth": depth, "pair_roundtrip": p_c, "function_roundtrip": f_c, "tolerance": 1e-4},
    }


@_timed(4, "norm equivalence on random gap-step elements")
def norm_equivalence(seed=0, count=100, alphas=(0.25, 0.5, 2.0), depth=8):
    ext = twoline_extension(alpha=0.5)
    rep = norm_equivalence_report(ext, example25_function(ext))
    e25 = {"E1": rep["E1"], "Epm1": {s: rep["signs"][s]["Epm1"] for s in "+-"}}
    e25_ok = abs(rep["E1"] - 1.5) <= 1e-6 and all(abs(v - 2.0) <= 1e-6 for v in e25["Epm1"].values())
    rng = np.random.default_rng(seed)
    failures, worst = 0, math.inf
    for a in alphas:
        ce = cantor_extension(alpha=a, depth=depth)
        for _ in range(count):
            r = norm_equivalence_report(ce, pair_from_cplus(ce, [random_gap_step_profile(rng)]), slack=1e-9)
            failures += not r["pass"]
            for s in "+-":
                worst = min(worst, r["signs"][s]["lower_margin"], r["signs"][s]["upper_margin"])
    return e25_ok and failures == 0 and rep["pass"], {
        "example25": e25, "example25_expected": {"E1": 1.5, "Epm1": 2.0},
        "random": {"alphas": list(alphas), "per_alpha": count, "failures": failures, "smallest_margin": worst},
    }


@_timed(5, "integral lemma for indicator, hat and gaussian")
def integral_lemma():
    gs = {
        "indicator": H1Function("indicator", {"lo": 0.0, "hi": 1.0}),
        "hat": hat(),
        "gaussian": H1Function("gaussian", {"center": 0.0, "width": 1.0}),
    }
    rows, ok = [], True
    for name, g in gs.items():
        for lam in (0.5, 1.0, 2.0):
            r = lemma_gg_check(g, lam)
            ok &= r["pass"]
            rows.append({"g": name, **r})
    ind = next(r for r in rows if r["g"] == "indicator" and r["lambda"] == 1.0)
    ref = math.exp(-1.0)
    ok &= abs(ind["lhs_left"] - ref) <= 1e-4
    return ok, {"rows": rows, "indicator_lambda1": ind["lhs_left"], "expected": ref}


@_timed(6, "exact darning CDF values on the standard Cantor block")
def darning_exact():
    sf = cantor_scale()
    pts = {Fraction(1, 3): Fraction(1, 2), Fraction(1, 9): Fraction(1, 4), Fraction(2, 3): Fraction(1, 2)}
    got = {str(x): sf.darning_j(x) for x in pts}
    ok = all(sf.darning_j(x) == v for x, v in pts.items())
    return ok, {"values": {k: str(v) for k, v in got.items()}}


@_timed(7, "endpoint classification of the five fixtures")
def classification():
    out, ok = {}, True
    for expected, sf in endpoint_fixtures().items():
        case = classify_endpoints(sf)
        ok &= case.right == expected
        out[expected] = case.to_dict()
    hs = classify_endpoints(endpoint_fixtures()["R3i"])
    levels = endpoint_fixtures()["R3i"].cascade("right").levels
    err = abs(hs.r_star - math.pi**2 / 6)
    ok &= err <= hs.r_star_bound and hs.r_star_bound <= 1.0 / levels
    return ok, {"cases": out, "r_star": hs.r_star, "r_star_error": err, "truncation_bound": hs.r_star_bound,
                "bound_limit": 1.0 / levels}


# inclusion of r*, l* in J* per sign and of the endpoints in j(I), written out in full
_EXPECTED_RIGHT = {
    "R1": {"+": False, "-": False, "image": False},
    "R2": {"+": True, "-": True, "image": True},
    "R3i": {"+": False, "-": True, "image": False},
    "R3ii": {"+": False, "-": False, "image": False},
    "R3iii": {"+": False, "-": True, "image": True},
}
_EXPECTED_LEFT = {
    "L1": {"+": False, "-": False, "image": False},
    "L2": {"+": True, "-": True, "image": True},
    "L3i": {"+": True, "-": False, "image": False},
    "L3ii": {"+": False, "-": False, "image": False},
    "L3iii": {"+": True, "-": False, "image": True},
}


@_timed(8, "J* inclusion table over all endpoint-case pairs")
def jstar_table():
    mismatches = []
    checked = 0
    for left in LEFT_CASES:
        for right in RIGHT_CASES:
            case = classify_endpoints(case_scale(left, right))
            if (case.left, case.right) != (left, right):
                mismatches.append({"pair": [left, right], "classified": [case.left, case.right]})
                continue
            for sign in "+-":
                sp = build_jstar(case, sign)
                want = {
                    "hi_closed": _EXPECTED_RIGHT[right][sign],
                    "lo_closed": _EXPECTED_LEFT[left][sign],
                    "image_hi_closed": _EXPECTED_RIGHT[right]["image"],
                    "image_lo_closed": _EXPECTED_LEFT[left]["image"],
                }
                for k, v in want.items():
                    checked += 1
                    if getattr(sp, k) != v:
                        mismatches.append({"pair": [left, right], "sign": sign, "flag": k, "expected": v})
    return not mismatches, {"checked": checked, "mismatches": mismatches}


@_timed(9, "coefficient energy equals half the W energy measure")
def energy_identity(seed=0):
    ce = cantor_extension(alpha=0.5)
    rng = np.random.default_rng(seed)
    fixtures = {
        "cantor_parabola": [PolynomialProfile((0.0, 1.0, -1.0))],
        "cantor_kplus": [kplus_profile(2.0)],
        "cantor_random_step": [random_gap_step_profile(rng)],
    }
    rows, ok = {}, True
    for name, cplus in fixtures.items():
        f = pair_from_cplus(ce, cplus).f
        w = energy_measure(ce, f, "W").value
        dec = gamma_decompose(ce, f)
        row = {"half_mu_W": 0.5 * w}
        for sign in "+-":
            e = energy_pm(ce, dec.profiles(sign), sign).value
            row[f"E{sign}"] = e
            row[f"diff{sign}"] = abs(e - 0.5 * w)
            ok &= abs(e - 0.5 * w) <= 1e-6 and w > 0
        rows[name] = row
    return ok, {"fixtures": rows, "tolerance": 1e-6}


# reference value for the atom at s = 1/2 as stated in the acceptance list; the
# closed form (e^{4/3} - e^{2/3}) / 2 = 0.9229669... differs from it by 3.3e-5
ATOM_HALF_STATED = 0.92300


@_timed(10, "regular representation on the Cantor star fixture")
def representation():
    ce = cantor_extension(alpha=0.5)
    form = star_form(ce, 0, "+")
    rep = representation_check(form, PolynomialProfile((0.0, 1.0, -1.0)), tol=1e-6)
    pos = form.measure.positions
    k = int(np.argmin(np.abs(pos - 0.5)))
    mass = float(form.measure.masses[k])
    # the atom is the gap (1/3, 2/3) carrying e^{2x} dx
    closed = (math.exp(4.0 / 3.0) - math.exp(2.0 / 3.0)) / 2.0
    rep["sup"]["exact"] = rep["sup"]["difference"] == 0.0
    closed_ok = abs(pos[k] - 0.5) < 1e-12 and abs(mass - closed) <= 1e-12
    stated_ok = abs(mass - ATOM_HALF_STATED) <= 1e-5
    ok = rep["pass"] and rep["sup"]["exact"] and closed_ok and stated_ok
    return ok, {"check": rep, "atom_half": {
        "position": float(pos[k]), "mass": mass, "closed_form": closed, "closed_form_pass": closed_ok,
        "stated": ATOM_HALF_STATED, "stated_difference": abs(mass - ATOM_HALF_STATED), "stated_pass": stated_ok}}


@_timed(11, "contractions: coefficient energies never grow, the complement is not Markovian")
def markov(seed=0, count=100):
    ce = cantor_extension(alpha=0.5)
    rng = np.random.default_rng(seed)
    violations, worst = 0, -math.inf
    for i in range(count):
        sign = "+" if i % 2 == 0 else "-"
        phi = Contraction.clamp(-0.3, 0.7) if i % 4 == 0 else random_contraction(rng)
        _, r = contraction_apply(ce, {0: random_gap_step_profile(rng)}, phi, sign)
        violations += not r["pass"]
        worst = max(worst, r["energy_after"] - r["energy_before"])
    f = pair_from_cplus(ce, [kplus_profile(2.0)]).f
    _, rep = contraction_apply(ce, f, Contraction.unit())
    ok = violations == 0 and rep["max_oc_residual"] > 0.01
    return ok, {"violations": violations, "largest_energy_change": worst, "samples": count,
                "unit_contraction": rep, "threshold": 0.01}


@_timed(12, "Galerkin oracle recovers both parts of the mixed fixture")
def oracle(n_list=(50, 100, 200, 400)):
    ext = twoline_extension(alpha=0.5)
    h = EmbeddedH1(ext, hat())
    f = example25_function(ext) + h
    rep = convergence_report(ext, f, n_list=n_list, h1_part=h, required=(-1.0, 0.0, 1.0))
    last = rep["rows"][-1]
    pyth = max(r["pythagoras_gap"] / max(1.0, r["energy_f"]) for r in rep["rows"])
    ok = last["residual_energy"] <= 1e-3 and rep["strictly_decreasing"] and pyth <= 1e-10
    return ok, {**rep, "final_residual": last["residual_energy"], "max_relative_pythagoras_gap": pyth}


@_timed(13, "fat Cantor subspace pair: coupling, round trip, norm equivalence")
def appendix(depth=8):
    fat = FatCantorSet(0.0, 1.0, depth)
    pair = fat_cantor_pair(fat, 0.5)
    res = subspace_pair_residual(pair)
    bij = subspace_bijection_check(pair)
    measure_ok = abs(fat.measure - fat.closed_form_measure) <= 1e-12
    ok = res["coupling"] <= 1e-6 and res["pass"] and bij["pass"] and measure_ok
    return ok, {"measure": fat.measure, "closed_form_measure": fat.closed_form_measure,
                "residual": res, "bijection": bij}


@_timed(14, "cutoff energies on the divergent cascade fixture")
def theta_cutoff():
    ext = half_line_extension(constant_cascade_scale(), alpha=0.25)
    form = star_form(ext, 0, "+")
    rep = theta_cutoff_convergence(form, ExponentialProfile(1.0, -1.0))
    ok = rep["decreasing"] and rep["final"] < 1e-3
    return ok, {**rep, "alpha": 0.25, "psi": "exp(-s)", "limit": 1e-3}


CRITERIA = (
    orthogonality, closed_forms, roundtrips, norm_equivalence, integral_lemma, darning_exact,
    classification, jstar_table, energy_identity, representation, markov, oracle, appendix, theta_cutoff,
)


def run_all(seed=0, only=None):
    """Run the criteria (all, or the numbers in ``only``) in order."""
    out = []
    for c in CRITERIA:
        if only and c.number not in only:
            continue
        kw = {"seed": seed} if "seed" in c.params else {}
        out.append(c(**kw))
    return out
