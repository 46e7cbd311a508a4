"""Tests for the command line."""

from __future__ import annotations

import json
import math

import pytest

from bpire.cli import build_parser, main
from bpire.const import (
    ENV_SEED,
    EXIT_ACCEPTANCE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
)
from bpire.report import KEY_RESULTS, MANIFEST_FILE


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv(ENV_SEED, raising=False)


def _results(path):
    return json.loads(path.read_text(encoding="utf-8"))[KEY_RESULTS]


def test_kappa_subcommand(tmp_path):
    assert main(["kappa", "--model", "ENV-D", "--out", str(tmp_path), "-q"]) == EXIT_OK
    results = _results(tmp_path / "kappa.json")
    assert results["kappa"] == pytest.approx(3.0, abs=1e-9)
    assert results["regime"] == "above2"
    assert results["tilted_mean_log_m"] > 0.0
    assert (tmp_path / MANIFEST_FILE).exists()


def test_kappa_on_site_law(tmp_path):
    assert main(["kappa", "--model", "SITES-A", "--out", str(tmp_path), "-q"]) == EXIT_OK
    assert _results(tmp_path / "kappa.json")["kappa"] == pytest.approx(2.0, abs=1e-9)


def test_kappa_from_file(tmp_path, config_dir):
    out = tmp_path / "out"
    assert main(["kappa", "--model", str(config_dir / "poisson.yaml"), "--out", str(out)]) == EXIT_OK
    assert _results(out / "kappa.json")["nonarithmetic_hint"]


def test_missing_model_is_usage_error(tmp_path):
    assert main(["kappa", "--out", str(tmp_path)]) == EXIT_USAGE


def test_rwre_needs_site_law(tmp_path):
    assert main(["rwre", "--model", "ENV-A", "--out", str(tmp_path)]) == EXIT_USAGE


def test_missing_file_is_validation_error(tmp_path):
    code = main(["kappa", "--model", str(tmp_path / "absent.yaml"), "--out", str(tmp_path)])
    assert code == EXIT_VALIDATION


def test_invalid_model_is_validation_error(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(
        "atoms:\n"
        "  - prob: 0.5\n"
        "    offspring: {kind: geometric, param: 0.5}\n"
        "    immigration: {kind: deterministic, param: 1}\n",
        encoding="utf-8",
    )
    assert main(["kappa", "--model", str(path), "--out", str(tmp_path)]) == EXIT_VALIDATION


@pytest.mark.parametrize(
    "argv",
    [["bogus"], ["kappa", "--nope"], ["simulate", "--count", "many"], []],
)
def test_argument_errors_exit_with_usage_code(argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == EXIT_USAGE


def test_parser_maps_rwre_flags():
    args = build_parser().parse_args(["rwre", "--model", "SITES-A", "--n", "50", "--reps", "10"])
    assert args.walk_n == 50
    assert args.walk_reps == 10


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_SEED, "5")
    assert main(["kappa", "--model", "ENV-A", "--seed", "9", "--out", str(tmp_path)]) == EXIT_OK
    manifest = json.loads((tmp_path / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["master_seed"] == 5


def test_simulate_is_reproducible(tmp_path):
    runs = []
    for workers in ("1", "2"):
        out = tmp_path / f"w{workers}"
        argv = ["simulate", "--model", "ENV-A", "--count", "2000", "--seed", "3"]
        assert main([*argv, "--workers", workers, "--out", str(out), "-q"]) == EXIT_OK
        runs.append(out)
    first, second = runs
    for name in ("simulate.json", "simulate_batch.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    results = _results(first / "simulate.json")
    assert results["count"] == 2000
    assert results["mean"] >= 1.0


def test_simulate_burn_in_flag(tmp_path):
    argv = ["simulate", "--model", "ENV-D", "--count", "1000", "--burn-in", "5"]
    assert main([*argv, "--out", str(tmp_path), "-q"]) == EXIT_OK
    assert _results(tmp_path / "simulate.json")["burn_in"] == 5


def test_out_names_a_csv_file(tmp_path):
    target = tmp_path / "runs" / "batch.csv"
    argv = ["simulate", "--model", "ENV-A", "--count", "500", "--out", str(target), "-q"]
    assert main(argv) == EXIT_OK
    assert target.exists()
    assert (tmp_path / "runs" / "simulate.json").exists()
    assert (tmp_path / "runs" / "manifest.json").exists()
    assert not (tmp_path / "runs" / "simulate_batch.csv").exists()


def test_out_names_a_json_file(tmp_path):
    target = tmp_path / "kappa_d.json"
    assert main(["kappa", "--model", "ENV-D", "--out", str(target), "-q"]) == EXIT_OK
    assert _results(target)["kappa"] == pytest.approx(3.0, abs=1e-9)


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert "0.1.0" in capsys.readouterr().out


def _kappa_report(tmp_path, name, model):
    target = tmp_path / f"{name}.json"
    assert main(["kappa", "--model", model, "--out", str(target), "-q"]) == EXIT_OK
    return target


def test_compare_reports_of_one_model(tmp_path):
    first = _kappa_report(tmp_path, "a", "ENV-D")
    second = _kappa_report(tmp_path, "b", "ENV-D")
    out = tmp_path / "cmp"
    assert main(["compare", str(first), str(second), "--out", str(out), "-q"]) == EXIT_OK
    results = _results(out / "compare.json")
    assert results["values"]["kappa"] == pytest.approx([3.0, 3.0], abs=1e-9)
    assert results["spread"]["kappa"] == 0.0
    assert "regime" not in results["values"]


def test_compare_rejects_other_model(tmp_path):
    first = _kappa_report(tmp_path, "a", "ENV-A")
    second = _kappa_report(tmp_path, "d", "ENV-D")
    out = tmp_path / "cmp"
    assert main(["compare", str(first), str(second), "--out", str(out), "-q"]) == EXIT_VALIDATION
    assert not (out / "compare.json").exists()


def test_compare_needs_two_reports(tmp_path):
    first = _kappa_report(tmp_path, "a", "ENV-D")
    assert main(["compare", str(first), "--out", str(tmp_path / "cmp"), "-q"]) == EXIT_USAGE


def test_compare_unreadable_report(tmp_path):
    first = _kappa_report(tmp_path, "a", "ENV-D")
    absent = tmp_path / "absent.json"
    code = main(["compare", str(first), str(absent), "--out", str(tmp_path / "cmp"), "-q"])
    assert code == EXIT_VALIDATION


@pytest.mark.slow
def test_extremes_subcommand(tmp_path):
    argv = [
        "extremes",
        "--model",
        "ENV-B",
        "--n",
        "200",
        "--reps",
        "2000",
        "--c",
        str(3 / math.log(2)),
        "--out",
        str(tmp_path),
    ]
    assert main(argv) == EXIT_OK
    results = _results(tmp_path / "extremes.json")
    assert results["theta_exact"]["value"] == pytest.approx(1 / 6)
    assert (tmp_path / "extremes_scaled_maxima.csv").exists()


@pytest.mark.slow
def test_report_env_a(tmp_path):
    code = main(["report", "--preset", "ENV-A", "--out", str(tmp_path)])
    assert code in (EXIT_OK, EXIT_ACCEPTANCE)
    results = _results(tmp_path / "report.json")
    assert results["checks"]
    assert results["passed"] == (code == EXIT_OK)
