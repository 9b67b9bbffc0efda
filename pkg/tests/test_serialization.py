import json
import math

import numpy as np
import pandas as pd
import pytest

from stable_trees import __version__
from stable_trees.serialization import (
    dumps_json,
    load_ensemble,
    provenance,
    read_csv,
    render_csv,
    save_ensemble,
    write_csv,
    write_json,
)


def test_provenance_records_stream_layout_only_with_a_seed():
    seeded = provenance(1.5, 7, profile="quick")

    assert seeded["version"] == __version__
    assert seeded["profile"] == "quick"
    assert "SeedSequence" in seeded["streams"]
    assert "streams" not in provenance(1.5, None)


def test_render_csv_puts_provenance_above_header():
    frame = pd.DataFrame({"x": [0.1, 0.2], "p": [1.0 / 3.0, 0.5]})

    text = render_csv(frame, {"alpha": 1.5, "seed": None})

    lines = text.splitlines()
    assert lines[:3] == ["# alpha: 1.5", "# seed: None", "x,p"]
    assert lines[3] == "0.1,0.333333333333"
    assert text.endswith("\n")


def test_write_csv_and_read_csv_are_inverse(tmp_path):
    frame = pd.DataFrame({"stat": ["mean"], "estimate": [1.25], "replicas": [10]})

    path = write_csv(frame, tmp_path / "out" / "sub.csv", {"alpha": 1.5, "seed": 7})
    loaded, header = read_csv(path)

    assert header == {"alpha": "1.5", "seed": "7"}
    pd.testing.assert_frame_equal(loaded, frame)


def test_dumps_json_is_sorted_and_writes_nulls():
    payload = {
        "b": np.float64(math.inf),
        "a": np.arange(3),
        "c": (np.int64(4), float("nan")),
    }

    text = dumps_json(payload)

    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text) == {"a": [0, 1, 2], "b": None, "c": [4, None]}


def test_write_json_creates_directories(tmp_path):
    path = write_json({"seed": 7}, tmp_path / "a" / "b.json")

    assert json.loads(path.read_text(encoding="utf-8")) == {"seed": 7}


def test_ensemble_store_round_trip(tmp_path):
    ensemble = {"weights": np.array([0.5, 1.5])}

    path = save_ensemble(ensemble, tmp_path / "store", "weights")
    loaded = load_ensemble(path)

    assert path.endswith("weights.joblib")
    np.testing.assert_array_equal(loaded["weights"], ensemble["weights"])


def test_load_ensemble_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="Ensemble file not found"):
        load_ensemble(tmp_path / "missing.joblib")
