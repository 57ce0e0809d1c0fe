"""Command line interface.

Exit status is 0 when every check passes, 1 when a check fails and 2 on a
configuration error; errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, DirextError
from .functions import EmbeddedH1, ZeroFunction

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


# ---------------------------------------------------------------------------
# Output


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


def dumps_json(obj):
    return json.dumps(_clean(obj), indent=2, ensure_ascii=False) + "\n"


def _fmt_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return f"{v:.17g}" if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


def dumps_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt_cell(v) for v in r])
    return buf.getvalue()


class Output:
    """Collects artifacts; prints the main one and writes all to ``--out``."""

    def __init__(self, args):
        self.fmt = args.format or "json"
        self.out = Path(args.out) if args.out else None
        self.files = {}

    def add(self, name, text):
        self.files[name] = text

    def emit(self, main):
        sys.stdout.write(self.files[main])
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)
            for name, text in self.files.items():
                with open(self.out / name, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)

    def report(self, stem, obj, table=None):
        """Main report as JSON, or as CSV when requested and a table is given."""
        self.add(f"{stem}.json", dumps_json(obj))
        if table is not None:
            self.add(f"{stem}.csv", dumps_csv(*table))
        main = f"{stem}.csv" if self.fmt == "csv" and table is not None else f"{stem}.json"
        self.emit(main)


def _error(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


# ---------------------------------------------------------------------------
# Helpers


def _load(args, need_intervals=True):
    from .config import load_config

    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config, depth=args.depth, tol=args.tol, nodes=args.nodes, seed=args.seed,
                      format=args.format)
    if need_intervals and not cfg.intervals:
        raise ConfigError("the configuration has no intervals")
    return cfg


def _functions(cfg, ext, names):
    names = names or list(cfg.functions)
    if not names:
        return {}
    return {n: cfg.function(ext, n) for n in names}


def _x_grid(ext, count=401):
    lo, hi = -4.0, 4.0
    for sf in ext.parts:
        for v in (sf.interval.a, sf.interval.b):
            if math.isfinite(v):
                lo, hi = min(lo, v - 1.0), max(hi, v + 1.0)
    x = np.linspace(lo, hi, count)
    return x[ext.locate(x) >= 0]


def _pick_interval(ext, n):
    if n is None:
        n = next((k for k, sf in enumerate(ext.parts) if sf.has_singular_mass), 0)
    if not 0 <= n < len(ext.parts):
        raise ConfigError(f"interval index {n} out of range")
    return n


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args, out):
    from .geometry import validate_scale

    cfg = _load(args)
    reports = []
    for n, sf in enumerate(cfg.intervals):
        r = validate_scale(sf, depth=cfg.depth or 6).to_dict()
        r["interval"] = n
        r["spec"] = str(sf.interval)
        reports.append(r)
    passed = all(r["passed"] for r in reports)
    cover = None
    try:
        cfg.extension()
        cover = True
    except ConfigError as exc:
        cover = str(exc)
    rows = [(r["interval"], c["name"], c["passed"], c["detail"]) for r in reports for c in r["checks"]]
    out.report("validate", {"passed": passed, "intervals": reports, "extension": cover},
               (("interval", "check", "passed", "detail"), rows))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_eval(args, out):
    cfg = _load(args)
    ext = cfg.extension()
    x = np.asarray(args.points, dtype=float) if args.points else _x_grid(ext)
    fns = _functions(cfg, ext, args.function)
    idx = ext.locate(x)
    t = np.full(x.shape, np.nan)
    j = np.full(x.shape, np.nan)
    for n in np.unique(idx[idx >= 0]):
        sel = idx == n
        sf = ext.parts[n]
        t[sel] = sf.eval_t(x[sel])
        j[sel] = sf.j_closure(x[sel])
    cols = {"x": x, "interval": idx, "t": t, "j": j}
    for name, f in fns.items():
        cols[name] = f.value(x)
    header = tuple(cols)
    rows = list(zip(*[np.asarray(v).tolist() for v in cols.values()]))
    out.add("plot_eval.csv", dumps_csv(header, rows))
    out.report("eval", {"columns": list(header), "rows": [list(r) for r in rows]}, (header, rows))
    return EXIT_OK


def cmd_energy(args, out):
    from .complement import energy_pm, gamma_decompose
    from .energy import energy_E, energy_E_alpha, energy_measure, inner_L2
    from .errors import NotInSpaceError

    cfg = _load(args)
    ext = cfg.extension()
    result = {"alpha": ext.alpha, "functions": {}, "pairs": {}}
    rows = []
    for name, f in _functions(cfg, ext, args.function).items():
        rec = {
            "E": energy_E(ext, f).to_dict(),
            "L2": inner_L2(ext, f).to_dict(),
            "E_alpha": energy_E_alpha(ext, f).to_dict(),
            "mu_U": energy_measure(ext, f, "U").to_dict(),
            "mu_W": energy_measure(ext, f, "W").to_dict(),
        }
        try:
            dec = gamma_decompose(ext, f, rtol=cfg.tol)
            rec["E_plus"] = energy_pm(ext, dec.profiles("+"), "+").to_dict()
            rec["E_minus"] = energy_pm(ext, dec.profiles("-"), "-").to_dict()
        except NotInSpaceError as exc:
            rec["complement"] = f"not in the complement: {exc}"
        result["functions"][name] = rec
        for k, v in rec.items():
            if isinstance(v, dict):
                rows.append((name, k, v["value"], v["est_error"]))
    for name in cfg.pairs:
        prof = cfg.pair_profiles(name)
        from .complement import pair_from_cplus

        elem = pair_from_cplus(ext, prof)
        rec = {"E_plus": energy_pm(ext, elem.profiles("+"), "+").to_dict(),
               "E_minus": energy_pm(ext, elem.profiles("-"), "-").to_dict(),
               "half_mu_W": 0.5 * energy_measure(ext, elem.f, "W").value}
        result["pairs"][name] = rec
        rows += [(f"pair:{name}", k, rec[k]["value"], rec[k]["est_error"]) for k in ("E_plus", "E_minus")]
    out.report("energy", result, (("name", "quantity", "value", "est_error"), rows))
    return EXIT_OK


def cmd_gamma(args, out):
    from .complement import assemble_f, gamma_decompose, pair_from_cplus

    cfg = _load(args)
    ext = cfg.extension()
    tol = cfg.tol
    x = _x_grid(ext)
    result, ok, rows = {}, True, []
    for name in cfg.pairs:
        elem = pair_from_cplus(ext, cfg.pair_profiles(name))
        f = assemble_f(elem, rtol=tol)
        back = gamma_decompose(ext, f, rtol=tol)
        f2 = assemble_f(back, rtol=tol)
        err_pair = max(float(np.nanmax(np.abs(elem.c(s).value(x) - back.c(s).value(x)))) for s in "+-")
        err_f = float(np.nanmax(np.abs(f2.value(x) - f.value(x))))
        passed = err_pair <= tol and err_f <= tol
        ok &= passed
        result[name] = {"pair_roundtrip": err_pair, "function_roundtrip": err_f, "tolerance": tol,
                        "coupling_residual": elem.coupling_residual(), "pass": passed}
        rows.append((name, err_pair, err_f, passed))
        out.add(f"plot_gamma_{name}.csv", dumps_csv(
            ("x", "f", "cplus", "cminus"),
            list(zip(x.tolist(), f.value(x).tolist(), elem.cplus.value(x).tolist(), elem.cminus.value(x).tolist()))))
    if not cfg.pairs:
        raise ConfigError("the configuration has no pairs")
    out.report("gamma", {"pairs": result, "pass": ok},
               (("pair", "pair_roundtrip", "function_roundtrip", "pass"), rows))
    return EXIT_OK if ok else EXIT_FAIL


def _psi_for(cfg, form):
    """Profile for the star-form checks.

    The first darned function in the configuration, else ``(s - l*)(r* - s)``
    on a bounded range and ``exp(l* - s)`` when ``r*`` is infinite.
    """
    from .config import parse_profile
    from .functions import ExponentialProfile, PolynomialProfile

    n = form.n
    for d in cfg.functions.values():
        if d.get("kind") == "darned":
            profs = d.get("profiles", [])
            if n < len(profs) and profs[n] is not None:
                return parse_profile(profs[n])
    lo, hi = form.case.l_star, form.case.r_star
    lo = lo if math.isfinite(lo) else 0.0
    if math.isfinite(hi):
        return PolynomialProfile((-lo * hi, lo + hi, -1.0))
    return ExponentialProfile(math.exp(lo), -1.0)


def cmd_darn(args, out):
    from .darning import (
        classify_endpoints,
        image_measure,
        representation_check,
        star_form,
        theta_cutoff_convergence,
    )

    cfg = _load(args)
    ext = cfg.extension(require_cover=False)
    n = _pick_interval(ext, args.interval)
    sf = ext.parts[n]
    sign = args.sign or ("-" if sf.interval.b == math.inf else "+")
    if args.action == "classify":
        case = classify_endpoints(sf)
        d = case.to_dict()
        res = {"interval": n, "left_case": case.left, "right_case": case.right,
               "l_star": d["l_star"], "r_star": d["r_star"], "r_star_truncation_bound": d["r_star_truncation_bound"],
               "J_star": {s: star_form(ext, n, s, cfg.depth).space.to_dict() for s in "+-"}}
        out.report("classify", res, (("interval", "left_case", "right_case", "l_star", "r_star"),
                                     [(n, case.left, case.right, case.l_star, case.r_star)]))
        return EXIT_OK
    if args.action == "measure":
        m = image_measure(ext, n, sign, cfg.depth)
        rows = [(r["position"], r["mass"]) for r in m.atom_table()]
        out.add("plot_atoms.csv", dumps_csv(("position", "mass"), rows))
        out.report("measure", m.to_dict(), (("position", "mass"), rows))
        return EXIT_OK
    form = star_form(ext, n, sign, cfg.depth)
    psi = _psi_for(cfg, form)
    rep = {"form": form.to_dict(), "representation": representation_check(form, psi, tol=cfg.tol)}
    ok = rep["representation"]["pass"]
    if form.case.right in ("R1", "R3ii"):
        rep["cutoff"] = theta_cutoff_convergence(form, psi)
        ok &= rep["cutoff"]["decreasing"]
    rep["pass"] = bool(ok)
    rows = [(k, v["x_space"], v["star"], v["difference"], v["pass"])
            for k, v in rep["representation"].items() if isinstance(v, dict)]
    out.report("darn_check", rep, (("quantity", "x_space", "star", "difference", "pass"), rows))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(args, out):
    from .oracle import GalerkinMesh, convergence_report, discrete_decompose

    cfg = _load(args)
    ext = cfg.extension()
    fns = _functions(cfg, ext, args.function)
    if not fns:
        raise ConfigError("the configuration has no functions to decompose")
    f = ZeroFunction(ext)
    h1 = ZeroFunction(ext)
    required = {-1.0, 0.0, 1.0}
    for g in fns.values():
        f = f + g
        if isinstance(g, EmbeddedH1):
            h1 = h1 + g
            required |= {float(b) for b in g.breaks}
    required = tuple(sorted(required))
    if args.action == "decompose":
        mesh = GalerkinMesh(ext, cfg.nodes, required=required)
        d = discrete_decompose(mesh, f, h1)
        res = {"N": cfg.nodes, "dofs": mesh.N, "functions": list(fns), **d.to_dict(),
               "energy_f": float(d.f @ mesh.K @ d.f), "energy_f1": float(d.f1 @ mesh.K @ d.f1),
               "energy_f2": float(d.f2 @ mesh.K @ d.f2)}
        x = mesh.x_nodes[1:-1]
        out.add("plot_decompose.csv", dumps_csv(
            ("x", "f", "f1", "f2"),
            list(zip(x.tolist(), mesh.evaluate(d.f, x).tolist(), mesh.evaluate(d.f1, x).tolist(),
                     mesh.evaluate(d.f2, x).tolist()))))
        out.report("decompose", res, (("N", "residual_energy", "residual_l2"),
                                      [(cfg.nodes, d.residual_energy, d.residual_l2)]))
        return EXIT_OK if d.residual_energy <= 1e-3 else EXIT_FAIL
    base = cfg.nodes
    if base % 16:
        raise ConfigError("oracle converge runs N/8, N/4, N/2, N cells; --nodes must be a multiple of 16")
    n_list = [base // 8, base // 4, base // 2, base]
    rep = convergence_report(ext, f, n_list=n_list, h1_part=h1, required=required)
    rows = [(r["level"], r["N"], r["residual_energy"], r["residual_l2"]) for r in rep["rows"]]
    out.report("converge", rep, (("level", "N", "residual_energy", "residual_l2"), rows))
    return EXIT_OK if rep["converged"] else EXIT_FAIL


def cmd_check(args, out):
    from .acceptance import CRITERIA, run_all

    if args.what == "all":
        only = None
    else:
        try:
            only = {int(v) for v in args.what.split(",")}
        except ValueError as exc:
            raise ConfigError("check takes 'all' or a comma-separated list of criterion numbers") from exc
        unknown = only - {c.number for c in CRITERIA}
        if unknown:
            raise ConfigError(f"unknown criteria {sorted(unknown)}")
    seed = 0 if args.seed is None else args.seed
    results = run_all(seed=seed, only=only)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    payload = {"seed": seed, "passed": all(r.passed for r in results),
               "criteria": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results]}
    rows = [(r.number, r.title, r.passed) for r in results]
    out.report("acceptance", payload, (("criterion", "title", "pass"), rows))
    return EXIT_OK if payload["passed"] else EXIT_FAIL


def cmd_fixture(args, out):
    from .fixtures import fixture_config

    seed = 0 if args.seed is None else args.seed
    cfg = fixture_config(args.name, seed=seed, depth=args.depth)
    out.add(f"{args.name}.json", dumps_json(cfg))
    out.emit(f"{args.name}.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _common(p):
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--out", help="directory for report and plot-data files")
    p.add_argument("--depth", type=int, help="block depth override")
    p.add_argument("--tol", type=float, help="tolerance for pass/fail checks")
    p.add_argument("--nodes", type=int, help="oracle mesh cells")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="format of the printed report")


def build_parser():
    from .fixtures import NAMES

    parser = argparse.ArgumentParser(prog="dirext", description="Dirichlet extensions of 1D Brownian motion")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the scale functions of a configuration")
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="tabulate t, j and functions on a grid")
    _common(p)
    p.add_argument("--function", action="append", help="function name (repeatable; default all)")
    p.add_argument("--points", type=float, nargs="+", help="evaluation points")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("energy", help="energies, energy measures and coefficient energies")
    _common(p)
    p.add_argument("--function", action="append", help="function name (repeatable; default all)")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("gamma", help="round trips between coefficient pairs and functions")
    _common(p)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("darn", help="darning: classification, image measure, representation check")
    p.add_argument("action", choices=("classify", "measure", "check"))
    _common(p)
    p.add_argument("--interval", type=int, help="interval index (default: first with singular mass)")
    p.add_argument("--sign", choices=("+", "-"),
                   help="weight sign (default '-' on intervals unbounded to the right, else '+')")
    p.set_defaults(func=cmd_darn)

    p = sub.add_parser("oracle", help="Galerkin decomposition and convergence study")
    p.add_argument("action", choices=("decompose", "converge"))
    _common(p)
    p.add_argument("--function", action="append", help="functions to sum (default all)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="run acceptance criteria")
    p.add_argument("what", help="'all' or comma-separated criterion numbers")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fixture", help="write a named fixture configuration")
    p.add_argument("name", choices=NAMES)
    _common(p)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    out = Output(args)
    try:
        return args.func(args, out)
    except ConfigError as exc:
        return _error("ConfigError", str(exc), EXIT_CONFIG)
    except DirextError as exc:
        return _error(type(exc).__name__, str(exc), EXIT_FAIL)
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
