"""Output writers with provenance headers, and a joblib store for ensembles."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping

import joblib
import numpy as np
import pandas as pd

from stable_trees.config import get_chunk_size

CSV_FLOAT_FORMAT = "%.12g"


def provenance(alpha: float | None, seed: int | None, **extra: Any) -> dict[str, Any]:
    """{alpha, seed, version} plus the replica stream layout."""

    from stable_trees import __version__

    record: dict[str, Any] = {"alpha": alpha, "seed": seed, "version": __version__}
    if seed is not None:
        record["streams"] = (
            f"SeedSequence(seed).spawn(chunks), chunk size {get_chunk_size()}"
        )
    record.update(extra)
    return record


def _plain(value: Any) -> Any:
    """numpy scalars and arrays as JSON-native values; non-finite floats as null."""

    if isinstance(value, Mapping):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def dumps_json(payload: Mapping[str, Any]) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def write_json(payload: Mapping[str, Any], path: str | Path) -> Path:
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(dumps_json(payload), encoding="utf-8")
    return output_path


def render_csv(frame: pd.DataFrame, header: Mapping[str, Any]) -> str:
    """CSV with '# key: value' provenance lines above the column header."""

    lines = "".join(f"# {key}: {_plain(value)}\n" for key, value in header.items())
    body = frame.to_csv(index=False, lineterminator="\n", float_format=CSV_FLOAT_FORMAT)
    return lines + body


def write_csv(
    frame: pd.DataFrame, path: str | Path, header: Mapping[str, Any]
) -> Path:
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(render_csv(frame, header))
    return output_path


def read_csv(path: str | Path) -> tuple[pd.DataFrame, dict[str, str]]:
    """Inverse of ``write_csv``: the frame and its provenance header."""

    csv_path = Path(path)
    header: dict[str, str] = {}
    with csv_path.open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition(": ")
            header[key] = value
    return pd.read_csv(csv_path, comment="#"), header


def save_ensemble(ensemble: Any, directory: str | Path, name: str) -> str:
    """Serialize an ensemble to ``<directory>/<name>.joblib`` and return the path."""

    output_dir = Path(directory)
    output_dir.mkdir(parents=True, exist_ok=True)
    save_path = output_dir / f"{name}.joblib"
    joblib.dump(ensemble, save_path)
    return str(save_path)


def load_ensemble(path: str | Path) -> Any:
    ensemble_path = Path(path)
    if not ensemble_path.exists():
        raise FileNotFoundError(f"Ensemble file not found: {ensemble_path}")
    return joblib.load(ensemble_path)
