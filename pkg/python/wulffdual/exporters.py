# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Writers for the CSV tables, OBJ polylines and meshes, and SVG scenes produced
by the command line.
"""

import os
from typing import Dict, Optional, Sequence

import matplotlib  # type: ignore

matplotlib.use("Agg")

# pylint: disable=wrong-import-position
import matplotlib.pyplot as plt  # type: ignore
import numpy as np
import pandas as pd  # type: ignore
import seaborn as sns  # type: ignore
from loguru import logger

FLOAT_FORMAT = "%.17g"
SVG_SALT = "wulffdual"


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_csv(frame: pd.DataFrame, path: str) -> str:
    """
    Write a table with round-trip float formatting and "." decimals.
    """
    _ensure_parent(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("wrote {} rows to {}", len(frame), path)
    return path


def points_frame(points: np.ndarray, **columns: np.ndarray) -> pd.DataFrame:
    """
    Rows of coordinates x, y[, z] followed by extra named columns.
    """
    names = ["x", "y", "z", "w"][: points.shape[1]]
    data = {name: points[:, k] for k, name in enumerate(names)}
    data.update(columns)
    return pd.DataFrame(data)


def write_obj(
    path: str,
    vertices: np.ndarray,
    polylines: Sequence[Sequence[int]] = (),
    faces: Optional[np.ndarray] = None,
) -> str:
    """
    Write vertices with polyline (l) and triangle (f) elements. Indices are
    zero-based on input and written one-based.
    """
    _ensure_parent(path)
    padded = np.zeros((vertices.shape[0], 3))
    padded[:, : min(3, vertices.shape[1])] = vertices[:, :3]
    with open(path, "w", encoding="utf-8") as obj_file:
        for vertex in padded:
            obj_file.write("v " + " ".join(f"{c:.17g}" for c in vertex) + "\n")
        for line in polylines:
            obj_file.write("l " + " ".join(str(i + 1) for i in line) + "\n")
        if faces is not None:
            for face in faces:
                obj_file.write("f " + " ".join(str(i + 1) for i in face) + "\n")
    logger.debug("wrote {} vertices to {}", vertices.shape[0], path)
    return path


def write_closed_curves(path: str, curves: Sequence[np.ndarray]) -> str:
    """
    Several closed polylines in one OBJ file.
    """
    vertices = []
    polylines = []
    offset = 0
    for curve in curves:
        count = curve.shape[0]
        vertices.append(curve)
        polylines.append(list(range(offset, offset + count)) + ([offset] if count > 2 else []))
        offset += count
    stacked = np.vstack(vertices) if vertices else np.zeros((0, 3))
    return write_obj(path, stacked, polylines)


def write_point_cloud(path: str, points: np.ndarray) -> str:
    """
    Isolated points, one degenerate polyline each so viewers show them.
    """
    return write_obj(path, points, [[i] for i in range(points.shape[0])])


def curve_frame(curves: Dict[str, np.ndarray]) -> pd.DataFrame:
    """
    Long-form table of planar closed curves: curve, order, x, y.
    """
    frames = []
    for name, curve in curves.items():
        closed = np.vstack([curve, curve[:1]])
        frames.append(
            pd.DataFrame({"curve": name, "order": np.arange(closed.shape[0]), "x": closed[:, 0], "y": closed[:, 1]})
        )
    return pd.concat(frames, ignore_index=True)


def plot_scene(curves: Dict[str, np.ndarray], path: str, title: str = "") -> str:
    """
    Draw planar closed curves in one equal-aspect scene and save it as SVG.
    The output is byte-identical for identical input.
    """
    _ensure_parent(path)
    data = curve_frame(curves)
    with plt.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        fig, axes = plt.subplots(figsize=(6, 6))
        sns.lineplot(data=data, x="x", y="y", hue="curve", units="curve", estimator=None, sort=False, ax=axes)
        axes.set_aspect("equal")
        axes.scatter([0.0], [0.0], marker="+", color="black")
        if title:
            axes.set_title(title)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.debug("drew {} curves to {}", len(curves), path)
    return path
