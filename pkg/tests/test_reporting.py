"""Serialization contracts: JSON and CSV output must be stable enough to
byte-compare across runs, and check semantics must treat non-finite values
as failures."""

import json
import math

import numpy as np
import pytest

from conelab.reporting import (
    Check,
    Report,
    jsonable,
    resolve_outdir,
    write_csv,
    write_json,
    write_svg_polylines,
)


def test_jsonable_conversions():
    blob = jsonable(
        {
            "a": np.float64(1.5),
            "b": np.int32(7),
            "c": np.arange(3),
            "d": (1, 2),
            "e": [True, None],
        }
    )
    assert blob == {"a": 1.5, "b": 7, "c": [0, 1, 2], "d": [1, 2], "e": [True, None]}
    # round-trips through the json module without custom encoders
    json.dumps(blob)
    with pytest.raises(TypeError):
        jsonable(object())


def test_write_json_stable_bytes(tmp_path):
    path = tmp_path / "r.json"
    write_json(path, {"zeta": 1, "alpha": (2.0, 3.0)})
    first = path.read_bytes()
    assert first.endswith(b"\n")
    # keys are sorted regardless of insertion order
    assert first.index(b"alpha") < first.index(b"zeta")
    write_json(path, {"alpha": (2.0, 3.0), "zeta": 1})
    assert path.read_bytes() == first


def test_write_csv_cell_formats(tmp_path):
    path = tmp_path / "s.csv"
    write_csv(path, ["t", "v", "n", "ok", "tag"], [[0.1, 1.0 / 3.0, 4, True, "hi"]])
    text = path.read_text()
    lines = text.splitlines()
    assert lines[0] == "t,v,n,ok,tag"
    assert lines[1] == f"{0.1!r},{1.0 / 3.0!r},4,true,hi"


def test_check_semantics():
    assert Check("m", 1e-12, 1e-10, "max").passed
    assert not Check("m", 1e-8, 1e-10, "max").passed
    assert Check("o", 3.9, 3.5, "min").passed
    assert not Check("o", 3.1, 3.5, "min").passed
    # a NaN or infinity never counts as passing, whatever the direction
    assert not Check("m", math.nan, 1e-10, "max").passed
    assert not Check("o", math.inf, 3.5, "min").passed


def test_report_accumulates_and_serializes(tmp_path):
    r = Report("demo", {"n": 64})
    r.add("residual", 1e-12, 1e-10, "max")
    r.add("order", 2.0, 3.5, "min")
    assert not r.passed
    blob = r.to_dict()
    assert blob["command"] == "demo"
    assert blob["config"] == {"n": 64}
    assert blob["passed"] is False
    assert blob["checks"]["residual"]["passed"] is True
    assert blob["checks"]["order"] == {
        "value": 2.0,
        "threshold": 3.5,
        "kind": "min",
        "passed": False,
    }
    lines = r.summary_lines()
    assert lines[0].startswith("[PASS] residual:")
    assert lines[1].startswith("[FAIL] order:")
    assert ">=" in lines[1]
    r.extra["note"] = "aux"
    r.write(tmp_path / "report.json")
    loaded = json.loads((tmp_path / "report.json").read_text())
    assert loaded["extra"]["note"] == "aux"


def test_svg_writer(tmp_path):
    path = tmp_path / "fig.svg"
    t = np.linspace(0, 1, 20)
    write_svg_polylines(
        path,
        [
            ("one", np.column_stack([t, np.sin(t)])),
            ("two", np.column_stack([t, np.cos(t)])),
        ],
        title="demo",
    )
    text = path.read_text()
    assert text.count("<polyline") >= 2
    assert "demo" in text
    assert "one" in text and "two" in text
    with pytest.raises(ValueError, match="curve"):
        write_svg_polylines(tmp_path / "e.svg", [])


def test_resolve_outdir_priority(tmp_path, monkeypatch):
    monkeypatch.delenv("CONELAB_OUT", raising=False)
    assert resolve_outdir(None) == "."
    env_dir = tmp_path / "env"
    monkeypatch.setenv("CONELAB_OUT", str(env_dir))
    assert resolve_outdir(None) == str(env_dir)
    assert env_dir.is_dir()
    flag_dir = tmp_path / "flag"
    assert resolve_outdir(str(flag_dir)) == str(flag_dir)
    assert flag_dir.is_dir()
