"""Tests for manifests and result files."""

from __future__ import annotations

import json

import numpy as np
import pytest

from bpire.exceptions import FingerprintMismatchError, ParseError
from bpire.report import (
    KEY_MANIFEST_HASH,
    KEY_MODEL_FINGERPRINT,
    KEY_RESULTS,
    MANIFEST_FILE,
    RunManifest,
    compare_reports,
    load_report,
    load_reports,
    read_batch_csv,
    write_batch_csv,
    write_json_report,
    write_manifest,
)


@pytest.fixture
def manifest() -> RunManifest:
    return RunManifest(
        master_seed=7,
        model_fingerprint="ab" * 32,
        subcommand="kappa",
        flags={"budget": "quick"},
    )


def test_content_hash_ignores_volatile_fields(manifest):
    other = RunManifest(
        master_seed=7,
        model_fingerprint="ab" * 32,
        subcommand="kappa",
        flags={"budget": "quick"},
        wall_time=12.5,
        workers=8,
    )
    assert manifest.content_hash() == other.content_hash()
    reseeded = RunManifest(7 + 1, "ab" * 32, "kappa", {"budget": "quick"})
    assert manifest.content_hash() != reseeded.content_hash()


def test_write_manifest(tmp_path, manifest):
    manifest.wall_time = 3.25
    path = write_manifest(tmp_path, manifest)
    assert path.name == MANIFEST_FILE
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["wall_time"] == 3.25
    assert payload["master_seed"] == 7
    assert payload[KEY_MANIFEST_HASH] == manifest.content_hash()


def test_json_report_round_trip(tmp_path, manifest):
    path = write_json_report(tmp_path / "kappa.json", {"kappa": 2.0}, manifest)
    payload = load_report(path, manifest.model_fingerprint)
    assert payload[KEY_RESULTS] == {"kappa": 2.0}
    assert payload[KEY_MANIFEST_HASH] == manifest.content_hash()
    assert "wall_time" not in payload


def test_json_report_bytes_are_stable(tmp_path, manifest):
    first = write_json_report(tmp_path / "a.json", {"x": np.float64(0.5)}, manifest)
    manifest.wall_time = 99.0
    manifest.workers = 4
    second = write_json_report(tmp_path / "b.json", {"x": np.float64(0.5)}, manifest)
    assert first.read_bytes() == second.read_bytes()


def test_fingerprint_mismatch(tmp_path, manifest):
    path = write_json_report(tmp_path / "kappa.json", {}, manifest)
    with pytest.raises(FingerprintMismatchError):
        load_report(path, "cd" * 32)


def test_load_reports_same_model(tmp_path, manifest):
    first = write_json_report(tmp_path / "a.json", {"a": 1}, manifest)
    second = write_json_report(tmp_path / "b.json", {"b": 2}, manifest)
    reports = load_reports([first, second])
    assert [r[KEY_RESULTS] for r in reports] == [{"a": 1}, {"b": 2}]

    manifest.model_fingerprint = "cd" * 32
    third = write_json_report(tmp_path / "c.json", {}, manifest)
    with pytest.raises(FingerprintMismatchError):
        load_reports([first, third])


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_load_report_rejects_other_files(tmp_path, content):
    path = tmp_path / "other.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ParseError):
        load_report(path)


def test_load_report_missing(tmp_path):
    with pytest.raises(ParseError):
        load_report(tmp_path / "absent.json")


def test_batch_csv_integers(tmp_path, manifest):
    values = np.array([1, 5, 2, 40], dtype=np.int64)
    path = write_batch_csv(tmp_path / "batch.csv", values, manifest)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# {KEY_MANIFEST_HASH}={manifest.content_hash()}"
    assert lines[1] == f"# {KEY_MODEL_FINGERPRINT}={manifest.model_fingerprint}"
    assert lines[2] == "# index,value"
    assert lines[3] == "0,1"
    np.testing.assert_array_equal(read_batch_csv(path), values)


def test_batch_csv_floats(tmp_path, manifest):
    values = np.array([0.1, 1.0 / 3.0, 2.5e-12])
    path = write_batch_csv(tmp_path / "sums.csv", values, manifest, column="sum")
    assert "# index,sum" in path.read_text(encoding="utf-8")
    np.testing.assert_array_equal(read_batch_csv(path), values)


def test_read_batch_csv_errors(tmp_path):
    with pytest.raises(ParseError):
        read_batch_csv(tmp_path / "absent.csv")
    path = tmp_path / "bad.csv"
    path.write_text("0,x\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_batch_csv(path)


def test_compare_reports_pairs_numeric_leaves(tmp_path, manifest):
    first = write_json_report(
        tmp_path / "a.json", {"kappa": 2.0, "fit": {"alpha": 1.5}, "regime": "above2"}, manifest
    )
    second = write_json_report(
        tmp_path / "b.json", {"kappa": 2.0, "fit": {"alpha": 1.25}, "passed": True}, manifest
    )
    table = compare_reports([first, second])
    assert table[KEY_MODEL_FINGERPRINT] == manifest.model_fingerprint
    assert table["values"] == {"fit.alpha": [1.5, 1.25], "kappa": [2.0, 2.0]}
    assert table["spread"]["fit.alpha"] == pytest.approx(0.25)
    assert table["spread"]["kappa"] == 0.0


def test_compare_reports_guards_fingerprint(tmp_path, manifest):
    first = write_json_report(tmp_path / "a.json", {"kappa": 2.0}, manifest)
    manifest.model_fingerprint = "cd" * 32
    second = write_json_report(tmp_path / "b.json", {"kappa": 3.0}, manifest)
    with pytest.raises(FingerprintMismatchError):
        compare_reports([first, second])
