from __future__ import annotations

import json

import numpy as np

from tlsclock.export import atomic_write_text, read_csv, write_csv, write_json, write_trajectory_csv


def test_csv_round_trip_full_precision(tmp_path):
    vals = [1 / 3, np.pi * 1e-17, -2.5e300]
    path = write_csv(tmp_path / "sub" / "x.csv", ["a"], [[v] for v in vals])
    header, rows = read_csv(path)
    assert header == ["a"]
    assert [float(r[0]) for r in rows] == vals


def test_json_numpy_values(tmp_path):
    path = write_json(tmp_path / "x.json", {"a": np.float64(0.1), "b": np.arange(3)})
    assert json.loads(path.read_text()) == {"a": 0.1, "b": [0, 1, 2]}


def test_atomic_overwrite(tmp_path):
    p = tmp_path / "f.txt"
    atomic_write_text(p, "one")
    atomic_write_text(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in tmp_path.iterdir()] == ["f.txt"]


def test_trajectory_columns(tmp_path):
    t = np.array([0.0, 1.0])
    traj = np.array([[0.0, 0.0, -1.0], [0.1, 0.2, 0.5]])
    path = write_trajectory_csv(tmp_path / "t.csv", t, traj, {"extra": [7, 8]})
    header, rows = read_csv(path)
    assert header == ["t", "u", "v", "w", "Pe", "extra"]
    assert float(rows[1][4]) == 0.75
