import csv
import io
import json

import pytest

from dirext.cli import main
from dirext.fixtures import fixture_config


@pytest.fixture(scope="module")
def configs(tmp_path_factory):
    d = tmp_path_factory.mktemp("cfg")
    out = {}
    for name in ("example25_twoline", "cantor_extension", "harmonic_squares_R3i", "cantor_closed_R2"):
        p = d / f"{name}.json"
        p.write_text(json.dumps(fixture_config(name)), encoding="utf-8")
        out[name] = str(p)
    p = d / "noblocks.json"
    p.write_text(json.dumps({"alpha": 0.5, "intervals": [{"a": "-inf", "b": "inf"}]}), encoding="utf-8")
    out["noblocks"] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_fixture_command_emits_config(capsys):
    code, out, _ = run(capsys, "fixture", "cantor_extension")
    assert code == 0
    assert json.loads(out) == json.loads(json.dumps(fixture_config("cantor_extension")))


def test_validate_ok(capsys, configs):
    code, out, _ = run(capsys, "validate", "--config", configs["cantor_extension"])
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_validate_without_blocks_fails_h3(capsys, configs):
    code, out, _ = run(capsys, "validate", "--config", configs["noblocks"])
    assert code == 1
    checks = {c["name"]: c["passed"] for c in json.loads(out)["intervals"][0]["checks"]}
    assert checks["H3"] is False


def test_classify_harmonic(capsys, configs):
    code, out, _ = run(capsys, "darn", "classify", "--config", configs["harmonic_squares_R3i"])
    d = json.loads(out)
    assert code == 0
    assert d["right_case"] == "R3i"
    assert d["r_star"] == pytest.approx(1.6449, abs=5e-3)


def test_darn_check_passes_on_closed_interval(capsys, configs):
    code, out, _ = run(capsys, "darn", "check", "--config", configs["cantor_closed_R2"])
    assert code == 0
    assert json.loads(out)["representation"]["pass"]


def test_darn_measure_csv(capsys, configs, tmp_path):
    code, out, _ = run(capsys, "darn", "measure", "--config", configs["cantor_extension"], "--depth", "4",
                       "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["position", "mass"]
    assert (tmp_path / "plot_atoms.csv").exists()
    assert (tmp_path / "measure.json").exists()


def test_eval_csv_is_lf_and_full_precision(capsys, configs):
    code, out, _ = run(capsys, "eval", "--config", configs["example25_twoline"], "--points", "0.1", "-0.3",
                       "--format", "csv")
    assert code == 0
    assert "\r" not in out
    header, *rows = list(csv.reader(io.StringIO(out)))
    assert header == ["x", "interval", "t", "j", "f", "hat"]
    # 17 significant digits round-trip every double
    assert float(rows[0][0]) == 0.1
    assert rows[0][0] == "0.10000000000000001"


def test_output_is_deterministic(capsys, configs):
    args = ("energy", "--config", configs["example25_twoline"])
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_energy_report(capsys, configs):
    code, out, _ = run(capsys, "energy", "--config", configs["example25_twoline"], "--function", "f")
    d = json.loads(out)
    assert code == 0
    assert d["functions"]["f"]["E"]["value"] == pytest.approx(0.5, abs=1e-8)
    assert d["functions"]["f"]["E_alpha"]["value"] == pytest.approx(1.0, abs=1e-8)


def test_gamma_round_trip(capsys, configs):
    code, out, _ = run(capsys, "gamma", "--config", configs["example25_twoline"])
    assert code == 0
    assert json.loads(out)["pairs"]["example25"]["pass"]


def test_oracle_converge(capsys, configs, tmp_path):
    code, out, _ = run(capsys, "oracle", "converge", "--config", configs["example25_twoline"], "--nodes", "400",
                       "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["N"]) for r in rows] == [50, 100, 200, 400]
    res = [float(r["residual_energy"]) for r in rows]
    assert all(b < a for a, b in zip(res, res[1:]))
    saved = json.loads((tmp_path / "converge.json").read_text(encoding="utf-8"))
    assert saved["strictly_decreasing"]


def test_oracle_decompose(capsys, configs):
    code, out, _ = run(capsys, "oracle", "decompose", "--config", configs["example25_twoline"], "--nodes", "100")
    d = json.loads(out)
    assert code == 0
    assert d["residual_energy"] < 1e-2


def test_check_selected_criteria(capsys):
    code, out, err = run(capsys, "check", "6,8")
    assert code == 0
    assert [c["criterion"] for c in json.loads(out)["criteria"]] == [6, 8]
    assert "criterion  6 PASS" in err


def test_check_reports_failure_with_exit_one(capsys):
    # the stated atom value disagrees with the closed form; see README
    code, out, _ = run(capsys, "check", "10")
    assert code == 1
    details = json.loads(out)["criteria"][0]["details"]
    assert details["atom_half"]["closed_form_pass"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ("validate",),
        ("validate", "--config", "/nonexistent/config.json"),
        ("check", "99"),
        ("check", "one"),
        ("oracle", "converge", "--config", "CFG", "--nodes", "200"),
        ("eval", "--config", "CFG", "--function", "nope"),
    ],
)
def test_config_errors_exit_two(capsys, configs, argv):
    argv = [configs["cantor_extension"] if a == "CFG" else a for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["error"] == "ConfigError"


def test_bad_arguments_exit_two(capsys):
    assert main(["darn", "bogus"]) == 2
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_oracle_converge_exact_fixture_passes(capsys, configs):
    code, out, _ = run(capsys, "oracle", "converge", "--config", configs["cantor_extension"], "--nodes", "64")
    assert code == 0
    assert json.loads(out)["exact"]
