# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Test the CSV, OBJ and SVG writers.
"""

import os

import numpy as np
import pandas as pd  # type: ignore

from wulffdual import exporters


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as file:
        return file.read()


def test_write_csv_round_trips_floats(tmp_path):
    """
    Floats survive the CSV and lines end in a bare newline.
    """
    values = np.array([1.0 / 3.0, np.pi, -2.5e-17])
    path = exporters.write_csv(pd.DataFrame({"value": values}), os.path.join(str(tmp_path), "sub", "values.csv"))
    with open(path, "rb") as file:
        raw = file.read()
    assert b"\r\n" not in raw
    assert raw.startswith(b"value\n")
    loaded = pd.read_csv(path, float_precision="round_trip")
    assert np.array_equal(loaded["value"].to_numpy(), values)


def test_points_frame():
    """
    Coordinate columns come first, extra columns after.
    """
    frame = exporters.points_frame(np.eye(3), inside=np.array([True, False, True]))
    assert list(frame.columns) == ["x", "y", "z", "inside"]
    assert list(exporters.points_frame(np.zeros((2, 2))).columns) == ["x", "y"]


def test_write_obj(tmp_path):
    """
    Planar vertices are padded to 3D and indices are written one-based.
    """
    path = exporters.write_obj(
        os.path.join(str(tmp_path), "mesh.obj"),
        np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        polylines=[[0, 1]],
        faces=np.array([[0, 1, 2]]),
    )
    lines = _read(path).splitlines()
    assert lines == ["v 0 0 0", "v 1 0 0", "v 0 1 0", "l 1 2", "f 1 2 3"]


def test_write_closed_curves(tmp_path):
    """
    Each curve is closed and offsets continue across curves.
    """
    square = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    path = exporters.write_closed_curves(os.path.join(str(tmp_path), "curves.obj"), [square, 2 * square])
    lines = _read(path).splitlines()
    assert sum(line.startswith("v ") for line in lines) == 8
    assert [line for line in lines if line.startswith("l ")] == ["l 1 2 3 4 1", "l 5 6 7 8 5"]


def test_write_point_cloud(tmp_path):
    """
    Every point gets its own one-vertex polyline.
    """
    path = exporters.write_point_cloud(os.path.join(str(tmp_path), "cloud.obj"), np.eye(3)[:2])
    assert _read(path).splitlines()[-2:] == ["l 1", "l 2"]


def test_curve_frame_closes_curves():
    """
    The first row of each curve is repeated at its end.
    """
    triangle = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    frame = exporters.curve_frame({"a": triangle, "b": 2 * triangle})
    assert len(frame) == 8
    first = frame[frame["curve"] == "a"]
    assert first["order"].tolist() == [0, 1, 2, 3]
    assert first.iloc[-1][["x", "y"]].tolist() == [1.0, 0.0]


def test_plot_scene_is_deterministic(tmp_path):
    """
    Drawing the same scene twice gives the same bytes.
    """
    angles = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
    circle = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    scene = {"circle": circle, "ellipse": circle * np.array([2.0, 1.0])}
    first = exporters.plot_scene(scene, os.path.join(str(tmp_path), "first.svg"), "scene")
    second = exporters.plot_scene(scene, os.path.join(str(tmp_path), "second.svg"), "scene")
    with open(first, "rb") as file_a, open(second, "rb") as file_b:
        content = file_a.read()
        assert content == file_b.read()
    assert b"<svg" in content
