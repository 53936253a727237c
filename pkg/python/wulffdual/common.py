# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Common module for tolerances, sample grids and run configuration.
"""

import argparse
import functools
import json
import os
import sys
from dataclasses import asdict, dataclass, replace
from hashlib import sha256
from typing import Any, Dict

import numpy as np
from loguru import logger

from wulffdual import sphere_geometry

OUT_DIR = "out"


# pylint: disable=too-many-instance-attributes
@dataclass(frozen=True)
class Tolerances:
    """
    Every numeric threshold used by the library, in one place.
    """

    degenerate: float = 1e-6
    value: float = 1e-6
    match: float = 1e-5
    convex: float = 1e-7
    convex_fast: float = 1e-9
    strict_curvature: float = 1e-7
    involution: float = 1e-7
    product: float = 1e-7
    inequality_slack: float = 1e-9
    equality: float = 1e-7
    refine: float = 1e-10
    newton_gradient: float = 1e-11
    merge: float = 1e-6
    seed_factor: float = 4.0
    multiplicity_value: float = 1e-6
    multiplicity_spread: float = 1e-3

    def with_overrides(self, **overrides: Any) -> "Tolerances":
        """
        Copy with some thresholds replaced; ``None`` values are ignored.
        """
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def summary(self) -> str:
        """
        One-line rendering for reports.
        """
        return ", ".join(f"{k}={v:g}" for k, v in asdict(self).items())


@dataclass(frozen=True)
class Grid:
    """
    Resolution of the validation grids.
    """

    circle_samples: int = 4096
    icosphere_level: int = 5

    def points(self, dim: int) -> np.ndarray:
        """
        Validation grid of S^dim: uniform angles for the circle, icosphere
        vertices for the 2-sphere.
        """
        return grid_points(self, dim)

    def spacing(self, dim: int) -> float:
        """
        Typical arc length between neighbouring grid points.
        """
        if dim == 1:
            return 2.0 * np.pi / self.circle_samples
        return sphere_geometry.icosphere(self.icosphere_level).mean_edge_angle

    def angles(self) -> np.ndarray:
        """
        Angles of the circle grid.
        """
        return 2.0 * np.pi * np.arange(self.circle_samples) / self.circle_samples


@functools.lru_cache(maxsize=16)
def grid_points(grid: Grid, dim: int) -> np.ndarray:
    """
    Cached validation grid for a given resolution and dimension.
    """
    if dim == 1:
        points = sphere_geometry.angles_to_points(grid.angles())
    elif dim == 2:
        points = np.array(sphere_geometry.icosphere(grid.icosphere_level).vertices)
    else:
        raise ValueError(f"unsupported sphere dimension {dim}")
    points.setflags(write=False)
    return points


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_GRID = Grid()


@dataclass
class Config:
    """
    Store of config to set up and run a command.
    """

    command: str
    out: str

    def output_dir(self) -> str:
        """
        Return the output directory for this run, hashed from the config when
        none was given.
        """
        if self.out:
            return self.out
        config_str = json.dumps(asdict(self), sort_keys=True)
        hashed_config = sha256(config_str.encode("utf-8")).hexdigest()
        return os.path.join(OUT_DIR, self.command, hashed_config[:16])

    def to_str(self) -> str:
        """
        Convert the config to a string.
        """
        config_dict = asdict(self)
        string_parts = []
        for k, value in config_dict.items():
            if isinstance(value, list):
                string_parts.append(f"{k}={'_'.join(str(v) for v in value)}")
            else:
                string_parts.append(f"{k}={value}")
        return ",".join(string_parts)

    def write(self, out_dir: str) -> str:
        """
        Write the config as config.json into the output directory.
        """
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "config.json")
        with open(path, "w", encoding="utf-8") as config_file:
            config_file.write(json.dumps(self.to_dict(), indent=2))
        return path

    def to_dict(self) -> Dict[str, Any]:
        """
        Dictionary form of the config.
        """
        return asdict(self)


def setup_logging(verbose: bool) -> None:
    """
    Send logs to stderr, keeping stdout free for reports.
    """
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def get_argument_parser() -> argparse.ArgumentParser:
    """
    Get the default argument parser with common flags.
    """
    parser = argparse.ArgumentParser(
        prog="wulffdual",
        description="Convex integrands, Wulff shapes and their duals",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="verbose output")
    parser.add_argument("--out", type=str, default="", help="output directory")
    return parser
