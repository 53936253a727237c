# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Common utils for testing.
"""

import os
from typing import Union

import numpy as np
import pytest

from wulffdual import common, fixtures, sphere_geometry
from wulffdual.integrand_model import Integrand

# coarse sphere grid for the slower n = 2 suites
COARSE_GRID = common.Grid(icosphere_level=4)


def assert_close(actual: Union[float, np.ndarray], expected: Union[float, np.ndarray], tol: float):
    """
    Assert the largest absolute difference is below tol.
    """
    difference = float(np.max(np.abs(np.asarray(actual, dtype=float) - np.asarray(expected, dtype=float))))
    assert difference < tol, f"difference {difference:.3e} exceeds {tol:.1e}"


def random_sphere_points(count: int, dim: int, seed: int = 0) -> np.ndarray:
    """
    Uniformly distributed points of S^dim from a fixed seed.
    """
    rng = np.random.default_rng(seed)
    return sphere_geometry.normalize_rows(rng.normal(size=(count, dim + 1)))


def random_cap_points(count: int, seed: int, height: float = 0.2) -> np.ndarray:
    """
    Random points of S^2 above the given height, so inside an open hemisphere.
    """
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < count:
        candidate = sphere_geometry.normalize_rows(rng.normal(size=(1, 3)))[0]
        if candidate[2] > height:
            points.append(candidate)
    return np.array(points)


def write_text(directory: str, name: str, text: str) -> str:
    """
    Write a file into a directory and return its path.
    """
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as out:
        out.write(text)
    return path


@pytest.fixture(name="ball", scope="module")
def fixture_ball() -> Integrand:
    """
    The constant integrand 1 on the circle.
    """
    return fixtures.ball(1)


@pytest.fixture(name="disc", scope="module")
def fixture_disc() -> Integrand:
    """
    The translated disc 1 + 0.2 cos.
    """
    return fixtures.translated_disc()


@pytest.fixture(name="ellipse", scope="module")
def fixture_ellipse() -> Integrand:
    """
    The centred ellipse with semi-axes 2 and 1.
    """
    return fixtures.ellipse()


@pytest.fixture(name="nonconvex", scope="module")
def fixture_nonconvex() -> Integrand:
    """
    1 + 0.5 cos 2theta, not a convex integrand.
    """
    return fixtures.nonconvex()


@pytest.fixture(name="degenerate", scope="module")
def fixture_degenerate() -> Integrand:
    """
    Strictly convex with a degenerate critical point.
    """
    return fixtures.degenerate()


@pytest.fixture(name="flat_blend", scope="module")
def fixture_flat_blend() -> Integrand:
    """
    Convex but not strictly convex.
    """
    return fixtures.flat_blend()


@pytest.fixture(name="harmonic", scope="module")
def fixture_harmonic() -> Integrand:
    """
    Stable strictly convex integrand on S^2.
    """
    return fixtures.harmonic()


@pytest.fixture(name="harmonic_coarse", scope="module")
def fixture_harmonic_coarse() -> Integrand:
    """
    The harmonic fixture on a coarser icosphere.
    """
    return fixtures.harmonic(COARSE_GRID)


@pytest.fixture(name="harmonic_mirror", scope="module")
def fixture_harmonic_mirror() -> Integrand:
    """
    Mirror-symmetric harmonic fixture with a repeated critical value.
    """
    return fixtures.harmonic_mirror()
