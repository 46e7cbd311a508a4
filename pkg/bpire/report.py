"""Run manifests and the JSON / CSV files written for every run."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .const import _LOGGER, TOOL_VERSION
from .exceptions import FingerprintMismatchError, ParseError
from .utils import fingerprint, to_builtin

MANIFEST_FILE = "manifest.json"
KEY_MANIFEST_HASH = "manifest_hash"
KEY_MODEL_FINGERPRINT = "model_fingerprint"
KEY_RESULTS = "results"

# fields that may differ between runs without changing any result
_VOLATILE_FIELDS = ("wall_time", "workers")


@dataclass
class RunManifest:
    """Everything needed to reproduce a run bit for bit."""

    master_seed: int
    model_fingerprint: str
    subcommand: str
    flags: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0
    workers: int = 1
    tool_version: str = TOOL_VERSION

    def as_dict(self) -> dict[str, Any]:
        return to_builtin(asdict(self))

    def content_hash(self) -> str:
        """Hash of the manifest without wall time and worker count."""
        data = self.as_dict()
        for name in _VOLATILE_FIELDS:
            data.pop(name, None)
        return fingerprint(data)


def _dump(payload: dict[str, Any]) -> str:
    return json.dumps(to_builtin(payload), indent=2, sort_keys=True) + "\n"


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    """Write the full manifest, volatile fields included, next to the results."""
    path = Path(out_dir) / MANIFEST_FILE
    payload = manifest.as_dict()
    payload[KEY_MANIFEST_HASH] = manifest.content_hash()
    path.write_text(_dump(payload), encoding="utf-8")
    return path


def write_json_report(
    path: Path, results: dict[str, Any], manifest: RunManifest
) -> Path:
    """
    Write a JSON report.

    The file carries only the manifest hash and the model fingerprint, so two
    runs with the same seed, model and flags produce identical bytes.
    """
    path = Path(path)
    payload = {
        KEY_MANIFEST_HASH: manifest.content_hash(),
        KEY_MODEL_FINGERPRINT: manifest.model_fingerprint,
        KEY_RESULTS: results,
    }
    path.write_text(_dump(payload), encoding="utf-8")
    _LOGGER.debug("wrote %s", path)
    return path


def write_batch_csv(
    path: Path, values: np.ndarray, manifest: RunManifest, column: str = "value"
) -> Path:
    """Write ``index,<column>`` rows; the manifest hash goes in a ``#`` header."""
    path = Path(path)
    values = np.asarray(values)
    fmt = "%d" if np.issubdtype(values.dtype, np.integer) else "%.17g"
    np.savetxt(
        path,
        np.column_stack([np.arange(values.size), values.ravel()]),
        fmt=["%d", fmt],
        delimiter=",",
        header=(
            f"{KEY_MANIFEST_HASH}={manifest.content_hash()}\n"
            f"{KEY_MODEL_FINGERPRINT}={manifest.model_fingerprint}\n"
            f"index,{column}"
        ),
    )
    _LOGGER.debug("wrote %s values to %s", values.size, path)
    return path


def read_batch_csv(path: Path) -> np.ndarray:
    """Values column of a file written by ``write_batch_csv``."""
    try:
        table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as err:
        msg = f"cannot read batch file {path}: {err}"
        raise ParseError(msg) from err
    return table[:, 1]


def load_report(path: Path, expected_fingerprint: str | None = None) -> dict[str, Any]:
    """
    Read a JSON report.

    :param expected_fingerprint: model fingerprint the report must carry
    :raises FingerprintMismatchError: when the report was made from another model
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        msg = f"cannot read report {path}: {err}"
        raise ParseError(msg) from err
    if not isinstance(payload, dict) or KEY_MODEL_FINGERPRINT not in payload:
        msg = f"{path} is not a bpire report"
        raise ParseError(msg)
    found = payload[KEY_MODEL_FINGERPRINT]
    if expected_fingerprint is not None and found != expected_fingerprint:
        msg = f"{path} was produced from model {found[:12]}, expected {expected_fingerprint[:12]}"
        raise FingerprintMismatchError(msg)
    return payload


def load_reports(paths: list[Path]) -> list[dict[str, Any]]:
    """Load reports that must all stem from the same model."""
    reports: list[dict[str, Any]] = []
    for path in paths:
        expected = reports[0][KEY_MODEL_FINGERPRINT] if reports else None
        reports.append(load_report(path, expected))
    return reports


def _numeric_leaves(node: Any, prefix: str = "") -> dict[str, float]:
    if isinstance(node, dict):
        out: dict[str, float] = {}
        for key, value in node.items():
            out.update(_numeric_leaves(value, f"{prefix}.{key}" if prefix else str(key)))
        return out
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        return {}
    return {prefix: float(node)}


def compare_reports(paths: list[Path]) -> dict[str, Any]:
    """
    Numeric results shared by reports of one model, side by side.

    :raises FingerprintMismatchError: when the reports stem from different models
    """
    reports = load_reports(paths)
    leaves = [_numeric_leaves(report.get(KEY_RESULTS, {})) for report in reports]
    shared = sorted(set.intersection(*(set(leaf) for leaf in leaves)))
    return {
        KEY_MODEL_FINGERPRINT: reports[0][KEY_MODEL_FINGERPRINT],
        "reports": [str(path) for path in paths],
        "values": {key: [leaf[key] for leaf in leaves] for key in shared},
        "spread": {
            key: max(leaf[key] for leaf in leaves) - min(leaf[key] for leaf in leaves)
            for key in shared
        },
    }
