# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Named integrands with known closed-form behaviour.
"""

import math
from typing import Callable, Dict

import numpy as np

from wulffdual import common
from wulffdual.integrand_model import (
    ConstantIntegrand,
    CurvatureProfileIntegrand,
    FourierIntegrand,
    HarmonicIntegrand,
    Integrand,
    QuadraticIntegrand,
)

FLAT_HALF_WIDTH = 0.3
FLAT_BLEND_WIDTH = 0.1


def ball(dim: int = 1, grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    The constant 1, whose Wulff shape is the unit ball.
    """
    return ConstantIntegrand(dim, 1.0, grid)


def translated_disc(grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    1 + 0.2 cos(theta): the unit disc centred at (0.2, 0).
    """
    return FourierIntegrand(1.0, {1: 0.2}, grid=grid)


def translated_disc_dual(points: np.ndarray) -> np.ndarray:
    """
    Closed-form dual of the translated disc, 1 / (-0.2 cos + sqrt(1 - 0.04 sin^2)).
    """
    return 1.0 / (-0.2 * points[:, 0] + np.sqrt(1.0 - 0.04 * points[:, 1] ** 2))


def translated_disc_radial(points: np.ndarray) -> np.ndarray:
    """
    Radial function of the disc of radius 1 centred at (0.2, 0).
    """
    return 0.2 * points[:, 0] + np.sqrt(1.0 - 0.04 * points[:, 1] ** 2)


def ellipse(grid: common.Grid = common.DEFAULT_GRID) -> QuadraticIntegrand:
    """
    sqrt(4 cos^2 + sin^2): the ellipse with semi-axes 2 and 1.
    """
    return QuadraticIntegrand(np.diag([4.0, 1.0]), grid)


def ellipse_radial(points: np.ndarray) -> np.ndarray:
    """
    Radial function 2 / sqrt(cos^2 + 4 sin^2) of the ellipse.
    """
    return 2.0 / np.sqrt(points[:, 0] ** 2 + 4.0 * points[:, 1] ** 2)


def ellipse_dual(points: np.ndarray) -> np.ndarray:
    """
    Closed-form dual sqrt(cos^2 + 4 sin^2) / 2 of the ellipse.
    """
    return np.sqrt(points[:, 0] ** 2 + 4.0 * points[:, 1] ** 2) / 2.0


def nonconvex(grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    1 + 0.5 cos(2 theta), not a convex integrand near theta = 0 and pi.
    """
    return FourierIntegrand(1.0, {2: 0.5}, grid=grid)


def degenerate(grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    1 + 0.2 cos(theta) + 0.1 sin(2 theta), degenerate critical point at 3pi/2.
    """
    return FourierIntegrand(1.0, {1: 0.2}, {2: 0.1}, grid=grid)


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """
    C-infinity step from 0 (x <= 0) to 1 (x >= 1).
    """

    def bump(t: np.ndarray) -> np.ndarray:
        positive = t > 0.0
        return np.where(positive, np.exp(-1.0 / np.where(positive, t, 1.0)), 0.0)

    left, right = bump(x), bump(1.0 - x)
    return left / (left + right)


def flat_weight(angles: np.ndarray) -> np.ndarray:
    """
    1 on |theta| <= 0.3, 0 beyond 0.4, smooth in between.
    """
    wrapped = np.abs(np.mod(angles + np.pi, 2.0 * np.pi) - np.pi)
    return 1.0 - _smooth_step((wrapped - FLAT_HALF_WIDTH) / FLAT_BLEND_WIDTH)


def flat_blend_profile(samples: int = 2**15) -> Callable[[np.ndarray], np.ndarray]:
    """
    Radius of curvature (1 - w)(1 - lam cos) vanishing on the flat arc, with
    lam chosen so the profile closes up.
    """
    angles = 2.0 * np.pi * np.arange(samples) / samples
    keep = 1.0 - flat_weight(angles)
    lam = float(np.mean(keep * np.cos(angles)) / np.mean(keep * np.cos(angles) ** 2))

    def profile(theta: np.ndarray) -> np.ndarray:
        return (1.0 - flat_weight(theta)) * (1.0 - lam * np.cos(theta))

    return profile


def flat_blend(grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    A C-infinity convex integrand that is not strictly convex: its Wulff
    shape has a vertex in direction 0, so the inverted graph contains a
    segment and the dual has a corner at pi.
    """
    return CurvatureProfileIntegrand(flat_blend_profile(), grid=grid)


HARMONIC_COEFFICIENTS = {
    (0, 0): math.sqrt(4.0 * math.pi),
    (1, 0): 0.1,
    (2, 1): 0.05,
    (1, -1): 0.04,
}


def harmonic(grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    1 + 0.1 Y_10 + 0.05 Y_21 + 0.04 Y_1-1 on S^2, a stable strictly convex
    integrand with two critical points, one maximum and one minimum; the
    Y_1-1 term removes the saddles of the mirror-symmetric fixture below.
    """
    return HarmonicIntegrand(HARMONIC_COEFFICIENTS, grid)


def harmonic_mirror(grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    1 + 0.1 Y_10 + 0.05 Y_21, symmetric under y -> -y; two mirrored saddles
    share the value 1, so it is not stable.
    """
    coefficients = {k: v for k, v in HARMONIC_COEFFICIENTS.items() if k != (1, -1)}
    return HarmonicIntegrand(coefficients, grid)


FIXTURES: Dict[str, Callable[[common.Grid], Integrand]] = {
    "ball": lambda grid: ball(1, grid),
    "ball2": lambda grid: ball(2, grid),
    "disc": translated_disc,
    "ellipse": ellipse,
    "nonconvex": nonconvex,
    "degenerate": degenerate,
    "flat-blend": flat_blend,
    "harmonic": harmonic,
    "harmonic-mirror": harmonic_mirror,
}


def fixture(name: str, grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    Build a named fixture.
    """
    try:
        factory = FIXTURES[name]
    except KeyError as exc:
        raise ValueError(f"unknown fixture {name!r}, choose from {', '.join(FIXTURES)}") from exc
    return factory(grid)
