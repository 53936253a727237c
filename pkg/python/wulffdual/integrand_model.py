# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Positive functions on S^1 and S^2 with their intrinsic derivatives, and the
integrand definition file format.

Every integrand evaluates on arrays of sphere points (rows). Gradients are
returned as ambient tangent vectors and Hessians as ambient (d, d) matrices
acting on the tangent space; ``hessian`` restricts one to a chart.
"""

import abc
import functools
import math
import os
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd  # type: ignore
from loguru import logger
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import CubicSpline  # type: ignore
from scipy.spatial import cKDTree  # type: ignore

from wulffdual import common, sphere_geometry
from wulffdual.errors import (
    KindMismatchError,
    MissingKeyError,
    NonFiniteValueError,
    PositivityError,
    SampleFileError,
    SpecError,
    UnknownKeyError,
)
from wulffdual.sphere_geometry import Chart, SpherePoint


class Jet(NamedTuple):
    """
    Values, ambient gradients and ambient Hessians at a batch of points.
    """

    values: np.ndarray
    gradients: np.ndarray
    hessians: np.ndarray


class Integrand(abc.ABC):
    """
    A positive function on S^dim.
    """

    #: derivatives are analytic rather than interpolated
    exact_derivatives = True

    def __init__(self, dim: int, grid: common.Grid = common.DEFAULT_GRID):
        if dim not in (1, 2):
            raise ValueError(f"integrands live on S^1 or S^2, not S^{dim}")
        self.dim = dim
        self.grid = grid

    @abc.abstractmethod
    def jet(self, points: np.ndarray) -> Jet:
        """
        Values and first and second intrinsic derivatives at points.
        """
        raise NotImplementedError

    def values(self, points: np.ndarray) -> np.ndarray:
        """
        Values at points.
        """
        return self.jet(points).values

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """
        Intrinsic gradients at points, as ambient tangent vectors.
        """
        return self.jet(points).gradients

    def hessians(self, points: np.ndarray) -> np.ndarray:
        """
        Intrinsic Hessians at points, as ambient matrices.
        """
        return self.jet(points).hessians

    def grid_points(self) -> np.ndarray:
        """
        The validation grid of this integrand's sphere.
        """
        return self.grid.points(self.dim)

    @functools.cached_property
    def floor(self) -> float:
        """
        Minimum value on the validation grid.
        """
        return float(np.min(self.values(self.grid_points())))

    def validate(self, line: Optional[int] = None) -> "Integrand":
        """
        Check positivity on the validation grid.
        """
        points = self.grid_points()
        values = self.values(points)
        worst = int(np.argmin(values))
        if not np.all(np.isfinite(values)) or values[worst] <= 0.0:
            raise PositivityError(points[worst], float(values[worst]), line)
        logger.debug("{} positive with floor {:.6g}", type(self).__name__, values[worst])
        return self

    def __call__(self, point: SpherePoint) -> float:
        return evaluate(self, point)


def _as_rows(points: np.ndarray) -> np.ndarray:
    return np.atleast_2d(np.asarray(points, dtype=float))


class CircleIntegrand(Integrand):
    """
    Integrand on S^1 given through derivatives in the angle.
    """

    def __init__(self, grid: common.Grid = common.DEFAULT_GRID):
        super().__init__(1, grid)

    @abc.abstractmethod
    def angle_jet(self, angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Value and first two angle derivatives.
        """
        raise NotImplementedError

    def jet(self, points: np.ndarray) -> Jet:
        points = _as_rows(points)
        angles = sphere_geometry.points_to_angles(points)
        value, first, second = self.angle_jet(angles)
        tangents = sphere_geometry.circle_tangents(points)
        return Jet(
            value,
            first[:, None] * tangents,
            second[:, None, None] * tangents[:, :, None] * tangents[:, None, :],
        )

    def values(self, points: np.ndarray) -> np.ndarray:
        return self.angle_jet(sphere_geometry.points_to_angles(_as_rows(points)))[0]


class AmbientIntegrand(Integrand):
    """
    Integrand given as the restriction of a smooth function of R^{n+1}.
    """

    @abc.abstractmethod
    def ambient_jet(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Value, Euclidean gradient and Euclidean Hessian of the extension.
        """
        raise NotImplementedError

    def jet(self, points: np.ndarray) -> Jet:
        points = _as_rows(points)
        value, grad, hess = self.ambient_jet(points)
        projector = sphere_geometry.tangent_projectors(points)
        radial = np.sum(points * grad, axis=1)
        tangential = np.einsum("mij,mj->mi", projector, grad)
        intrinsic = projector @ hess @ projector - radial[:, None, None] * projector
        return Jet(value, tangential, intrinsic)


class ConstantIntegrand(Integrand):
    """
    A constant function.
    """

    def __init__(self, dim: int, value: float = 1.0, grid: common.Grid = common.DEFAULT_GRID):
        super().__init__(dim, grid)
        self.value = float(value)

    def jet(self, points: np.ndarray) -> Jet:
        points = _as_rows(points)
        count, ambient = points.shape
        return Jet(
            np.full(count, self.value),
            np.zeros((count, ambient)),
            np.zeros((count, ambient, ambient)),
        )


class FourierIntegrand(CircleIntegrand):
    """
    a0 + sum_k (cos_k cos k theta + sin_k sin k theta).
    """

    def __init__(
        self,
        a0: float,
        cos: Optional[Dict[int, float]] = None,
        sin: Optional[Dict[int, float]] = None,
        grid: common.Grid = common.DEFAULT_GRID,
    ):
        super().__init__(grid)
        self.a0 = float(a0)
        self.cos = {int(k): float(v) for k, v in (cos or {}).items()}
        self.sin = {int(k): float(v) for k, v in (sin or {}).items()}

    def angle_jet(self, angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        value = np.full(angles.shape, self.a0)
        first = np.zeros(angles.shape)
        second = np.zeros(angles.shape)
        for k, coeff in self.cos.items():
            value += coeff * np.cos(k * angles)
            first -= coeff * k * np.sin(k * angles)
            second -= coeff * k * k * np.cos(k * angles)
        for k, coeff in self.sin.items():
            value += coeff * np.sin(k * angles)
            first += coeff * k * np.cos(k * angles)
            second -= coeff * k * k * np.sin(k * angles)
        return value, first, second


class SampledCircleIntegrand(CircleIntegrand):
    """
    Periodic cubic spline through samples (angle, value).
    """

    exact_derivatives = False

    def __init__(self, angles: np.ndarray, values: np.ndarray, grid: common.Grid = common.DEFAULT_GRID):
        super().__init__(grid)
        angles = np.mod(np.asarray(angles, dtype=float), 2.0 * np.pi)
        order = np.argsort(angles)
        angles, values = angles[order], np.asarray(values, dtype=float)[order]
        if np.any(np.diff(angles) <= 0.0):
            raise ValueError("sample angles must be distinct modulo 2pi")
        self.start = angles[0]
        knots = np.append(angles, angles[0] + 2.0 * np.pi)
        self.spline = CubicSpline(knots, np.append(values, values[0]), bc_type="periodic")

    def angle_jet(self, angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        wrapped = self.start + np.mod(angles - self.start, 2.0 * np.pi)
        return self.spline(wrapped), self.spline(wrapped, 1), self.spline(wrapped, 2)


class CurvatureProfileIntegrand(CircleIntegrand):
    """
    Support function of the plane convex body whose radius of curvature is a
    given non-negative profile R, i.e. the solution of g + g'' = R with
    vanishing first Fourier modes.
    """

    def __init__(
        self,
        profile: Callable[[np.ndarray], np.ndarray],
        samples: int = 2**15,
        grid: common.Grid = common.DEFAULT_GRID,
    ):
        super().__init__(grid)
        self.profile = profile
        knots = 2.0 * np.pi * np.arange(samples + 1) / samples
        radius = profile(knots)
        if np.min(radius) < 0.0:
            raise ValueError("curvature radius profile must be non-negative")
        cos_part = CubicSpline(knots, radius * np.cos(knots)).antiderivative()
        sin_part = CubicSpline(knots, radius * np.sin(knots)).antiderivative()
        closure = (float(cos_part(2.0 * np.pi)), float(sin_part(2.0 * np.pi)))
        scale = float(np.mean(radius)) * 2.0 * np.pi
        if max(abs(closure[0]), abs(closure[1])) > 1e-8 * scale:
            raise ValueError(f"curvature profile does not close up: {closure}")
        self._cos_part = cos_part
        self._sin_part = sin_part
        self._drift = closure
        self._shift = (0.0, 0.0)
        base = self._raw_value(knots[:-1])
        self._shift = (
            -2.0 * float(np.mean(base * np.cos(knots[:-1]))),
            -2.0 * float(np.mean(base * np.sin(knots[:-1]))),
        )

    def _antiderivatives(self, angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        fraction = angles / (2.0 * np.pi)
        return (
            self._cos_part(angles) - fraction * self._drift[0],
            self._sin_part(angles) - fraction * self._drift[1],
        )

    def _raw_value(self, angles: np.ndarray) -> np.ndarray:
        cos_int, sin_int = self._antiderivatives(angles)
        return (
            np.sin(angles) * cos_int
            - np.cos(angles) * sin_int
            + self._shift[0] * np.cos(angles)
            + self._shift[1] * np.sin(angles)
        )

    def angle_jet(self, angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        angles = np.mod(angles, 2.0 * np.pi)
        cos_int, sin_int = self._antiderivatives(angles)
        value = self._raw_value(angles)
        first = (
            np.cos(angles) * cos_int
            + np.sin(angles) * sin_int
            - self._shift[0] * np.sin(angles)
            + self._shift[1] * np.cos(angles)
        )
        second = self.profile(angles) - value
        return value, first, second


def _legendre_part(degree: int, order: int) -> Dict[int, float]:
    """
    Coefficients (by power of z) of the associated Legendre factor with r = 1.
    """
    terms: Dict[int, float] = {}
    for k in range((degree - order) // 2 + 1):
        power = degree - 2 * k - order
        coeff = (
            (-1) ** k
            * math.comb(degree, k)
            * math.comb(2 * degree - 2 * k, degree)
            * math.factorial(degree - 2 * k)
            // math.factorial(power)
        )
        terms[power] = terms.get(power, 0.0) + coeff / 2.0**degree
    return terms


_COS_QUARTER = (1, 0, -1, 0)
_SIN_QUARTER = (0, 1, 0, -1)


def _azimuthal_part(order: int, cosine: bool) -> Dict[Tuple[int, int], float]:
    """
    Coefficients (by powers of x, y) of Re or Im of (x + iy)^order.
    """
    table = _COS_QUARTER if cosine else _SIN_QUARTER
    terms: Dict[Tuple[int, int], float] = {}
    for p in range(order + 1):
        coeff = math.comb(order, p) * table[(order - p) % 4]
        if coeff:
            terms[(p, order - p)] = float(coeff)
    return terms


def real_harmonic_cube(degree: int, order: int) -> np.ndarray:
    """
    Coefficient cube c[i, j, k] of x^i y^j z^k for the orthonormal real
    spherical harmonic Y_{degree, order} restricted to the unit sphere.
    """
    if degree < 0 or abs(order) > degree:
        raise ValueError(f"invalid spherical harmonic ({degree}, {order})")
    m = abs(order)
    norm = math.sqrt((2 * degree + 1) / (4.0 * math.pi))
    norm *= math.sqrt((1 if m == 0 else 2) * math.factorial(degree - m) / math.factorial(degree + m))
    cube = np.zeros((degree + 1, degree + 1, degree + 1))
    for z_power, z_coeff in _legendre_part(degree, m).items():
        for (x_power, y_power), xy_coeff in _azimuthal_part(m, order >= 0).items():
            cube[x_power, y_power, z_power] += norm * z_coeff * xy_coeff
    return cube


class HarmonicIntegrand(AmbientIntegrand):
    """
    Finite sum of real spherical harmonics on S^2.
    """

    def __init__(self, coefficients: Dict[Tuple[int, int], float], grid: common.Grid = common.DEFAULT_GRID):
        super().__init__(2, grid)
        self.coefficients = {(int(l), int(m)): float(c) for (l, m), c in coefficients.items()}
        top = max([l for l, _ in self.coefficients] + [0])
        cube = np.zeros((top + 1,) * 3)
        for (degree, order), coeff in self.coefficients.items():
            part = real_harmonic_cube(degree, order)
            size = degree + 1
            cube[:size, :size, :size] += coeff * part
        self.cube = cube
        self.first = [npoly.polyder(cube, axis=a) for a in range(3)]
        self.second = [[npoly.polyder(self.first[a], axis=b) for b in range(3)] for a in range(3)]

    def ambient_jet(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x, y, z = points[:, 0], points[:, 1], points[:, 2]
        value = npoly.polyval3d(x, y, z, self.cube)
        grad = np.stack([npoly.polyval3d(x, y, z, c) for c in self.first], axis=1)
        hess = np.stack(
            [np.stack([npoly.polyval3d(x, y, z, c) for c in row], axis=1) for row in self.second],
            axis=1,
        )
        return value, grad, hess


class QuadraticIntegrand(AmbientIntegrand):
    """
    sqrt(theta^T M theta) for a symmetric positive definite M, the support
    function of a centred ellipse or ellipsoid.
    """

    def __init__(self, matrix: np.ndarray, grid: common.Grid = common.DEFAULT_GRID):
        matrix = np.asarray(matrix, dtype=float)
        super().__init__(matrix.shape[0] - 1, grid)
        if not np.allclose(matrix, matrix.T) or np.min(np.linalg.eigvalsh(matrix)) <= 0.0:
            raise ValueError("quadratic integrand needs a symmetric positive definite matrix")
        self.matrix = matrix

    def ambient_jet(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        image = points @ self.matrix
        value = np.sqrt(np.sum(image * points, axis=1))
        grad = image / value[:, None]
        hess = self.matrix[None, :, :] / value[:, None, None] - (
            image[:, :, None] * image[:, None, :]
        ) / (value**3)[:, None, None]
        return value, grad, hess

    def dual(self) -> "QuadraticIntegrand":
        """
        Closed-form dual: the quadratic integrand of the inverse matrix.
        """
        return QuadraticIntegrand(np.linalg.inv(self.matrix), self.grid)


def _gnomonic_design(coords: np.ndarray) -> np.ndarray:
    u, v = coords[..., 0], coords[..., 1]
    return np.stack(
        [np.ones_like(u), u, v, u * u, u * v, v * v, u**3, u * u * v, u * v * v, v**3],
        axis=-1,
    )


class SampledSphereIntegrand(Integrand):
    """
    Samples on S^2 interpolated by weighted cubic least-squares patches in
    the gnomonic chart at each query point, in place of barycentric cubic
    patches over the icosphere faces. A face patch is only C^0 across edges,
    so its Hessian jumps there; the chart fit gives value, gradient and
    Hessian of one cubic at every query point.
    """

    exact_derivatives = False

    def __init__(
        self,
        points: np.ndarray,
        values: np.ndarray,
        neighbours: int = 20,
        grid: common.Grid = common.DEFAULT_GRID,
    ):
        super().__init__(2, grid)
        self.points = sphere_geometry.normalize_rows(np.asarray(points, dtype=float))
        self.samples = np.asarray(values, dtype=float)
        self.neighbours = min(neighbours, self.points.shape[0])
        if self.neighbours < 10:
            raise ValueError("sampled sphere integrand needs at least 10 samples")
        self.tree = cKDTree(self.points)

    def jet(self, points: np.ndarray) -> Jet:
        points = _as_rows(points)
        distances, index = self.tree.query(points, k=self.neighbours)
        near = self.points[index]
        frames = sphere_geometry.tangent_frames(points)
        heights = np.einsum("mkd,md->mk", near, points)
        coords = np.einsum("mkd,mnd->mkn", near, frames) / heights[:, :, None]
        reach = 1.1 * distances[:, -1:]
        weights = 1.0 - (distances / reach) ** 2
        design = _gnomonic_design(coords) * weights[:, :, None]
        rhs = self.samples[index] * weights
        coeff = np.einsum("mck,mk->mc", np.linalg.pinv(design), rhs)
        grad_chart = coeff[:, 1:3]
        hess_chart = np.stack(
            [
                np.stack([2.0 * coeff[:, 3], coeff[:, 4]], axis=1),
                np.stack([coeff[:, 4], 2.0 * coeff[:, 5]], axis=1),
            ],
            axis=1,
        )
        gradients = np.einsum("mn,mnd->md", grad_chart, frames)
        hessians = np.einsum("mni,mnk,mkj->mij", frames, hess_chart, frames)
        return Jet(coeff[:, 0], gradients, hessians)


class AntipodalReciprocal(Integrand):
    """
    theta -> 1 / g(-theta).
    """

    def __init__(self, base: Integrand):
        super().__init__(base.dim, base.grid)
        self.base = base
        self.exact_derivatives = base.exact_derivatives

    def jet(self, points: np.ndarray) -> Jet:
        points = _as_rows(points)
        value, grad, hess = self.base.jet(-points)
        outer = grad[:, :, None] * grad[:, None, :]
        return Jet(
            1.0 / value,
            grad / (value**2)[:, None],
            -hess / (value**2)[:, None, None] + 2.0 * outer / (value**3)[:, None, None],
        )

    def values(self, points: np.ndarray) -> np.ndarray:
        return 1.0 / self.base.values(-_as_rows(points))


class HalfSquare(Integrand):
    """
    theta -> g(theta)^2 / 2.
    """

    def __init__(self, base: Integrand):
        super().__init__(base.dim, base.grid)
        self.base = base
        self.exact_derivatives = base.exact_derivatives

    def jet(self, points: np.ndarray) -> Jet:
        value, grad, hess = self.base.jet(_as_rows(points))
        return Jet(
            0.5 * value**2,
            value[:, None] * grad,
            value[:, None, None] * hess + grad[:, :, None] * grad[:, None, :],
        )


def _single(point: SpherePoint, g: Integrand) -> np.ndarray:
    if point.dim != g.dim:
        raise ValueError(f"point of S^{point.dim} given to an integrand on S^{g.dim}")
    return point.coords[None, :]


def evaluate(g: Integrand, point: SpherePoint) -> float:
    """
    Value of the integrand at a point.
    """
    return float(g.values(_single(point, g))[0])


def gradient(g: Integrand, point: SpherePoint) -> np.ndarray:
    """
    Intrinsic gradient at a point, as a tangent vector.
    """
    return g.gradients(_single(point, g))[0]


def hessian(g: Integrand, point: SpherePoint, chart: Optional[Chart] = None) -> np.ndarray:
    """
    Intrinsic Hessian in the normal coordinates of a chart centred at the point.
    """
    if chart is None:
        chart = sphere_geometry.tangent_frame(point)
    elif not np.allclose(chart.center.coords, point.coords, atol=1e-12):
        raise ValueError("chart must be centred at the evaluation point")
    ambient = g.hessians(_single(point, g))[0]
    chart_hessian = chart.frame @ ambient @ chart.frame.T
    return 0.5 * (chart_hessian + chart_hessian.T)


def antipodal_reciprocal(g: Integrand) -> Integrand:
    """
    The integrand theta -> 1 / g(-theta).
    """
    return AntipodalReciprocal(g)


def half_square(g: Integrand) -> Integrand:
    """
    The integrand theta -> g(theta)^2 / 2.
    """
    return HalfSquare(g)


def quadratic(matrix: np.ndarray, grid: common.Grid = common.DEFAULT_GRID) -> QuadraticIntegrand:
    """
    The integrand sqrt(theta^T M theta).
    """
    return QuadraticIntegrand(matrix, grid)


def curvature_profile(
    profile: Callable[[np.ndarray], np.ndarray], grid: common.Grid = common.DEFAULT_GRID
) -> CurvatureProfileIntegrand:
    """
    The centred support function with radius of curvature ``profile``.
    """
    return CurvatureProfileIntegrand(profile, grid=grid)


KINDS = ("fourier", "harmonic", "sampled")

_COS_KEY = re.compile(r"^cos(\d+)$")
_SIN_KEY = re.compile(r"^sin(\d+)$")
_HARMONIC_KEY = re.compile(r"^y\s+(-?\d+)\s+(-?\d+)$")


# pylint: disable=too-many-instance-attributes
@dataclass
class IntegrandSpec:
    """
    Parsed content of an integrand definition file.
    """

    dim: int
    kind: str
    a0: Optional[float] = None
    cos: Dict[int, float] = field(default_factory=dict)
    sin: Dict[int, float] = field(default_factory=dict)
    harmonics: Dict[Tuple[int, int], float] = field(default_factory=dict)
    values: Optional[str] = None
    base_dir: str = "."
    lines: Dict[str, int] = field(default_factory=dict)


def _parse_float(text: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise NonFiniteValueError(f"not a number: {text!r}", line) from exc
    if not math.isfinite(value):
        raise NonFiniteValueError(f"not a finite number: {text!r}", line)
    return value


# pylint: disable=too-many-branches
def parse_spec(text: str, base_dir: str = ".") -> IntegrandSpec:
    """
    Parse an integrand definition file.
    """
    raw: Dict[str, Tuple[str, int]] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise SpecError(f"expected 'key = value', got {content!r}", number)
        key, value = (part.strip() for part in content.split("=", 1))
        key = " ".join(key.split())
        if key in raw:
            raise SpecError(f"duplicate key {key!r} (first on line {raw[key][1]})", number)
        raw[key] = (value, number)

    for required in ("dim", "kind"):
        if required not in raw:
            raise MissingKeyError(f"missing required key {required!r}")
    dim_text, dim_line = raw.pop("dim")
    if dim_text not in ("1", "2"):
        raise SpecError(f"dim must be 1 or 2, got {dim_text!r}", dim_line)
    kind, kind_line = raw.pop("kind")
    if kind not in KINDS:
        raise SpecError(f"kind must be one of {', '.join(KINDS)}, got {kind!r}", kind_line)
    spec = IntegrandSpec(dim=int(dim_text), kind=kind, base_dir=base_dir)
    spec.lines.update({"dim": dim_line, "kind": kind_line})
    if (spec.dim, kind) in ((2, "fourier"), (1, "harmonic")):
        raise KindMismatchError(f"kind {kind} is not available for dim {spec.dim}", kind_line)

    for key, (value, number) in raw.items():
        spec.lines[key] = number
        cos_match, sin_match = _COS_KEY.match(key), _SIN_KEY.match(key)
        harmonic_match = _HARMONIC_KEY.match(key)
        if key == "values":
            if kind != "sampled":
                raise KindMismatchError("'values' is only valid for kind sampled", number)
            spec.values = value
        elif key == "a0" or cos_match or sin_match:
            if kind != "fourier":
                raise KindMismatchError(f"{key!r} is only valid for kind fourier", number)
            coeff = _parse_float(value, number)
            if key == "a0":
                spec.a0 = coeff
                continue
            match = cos_match or sin_match
            assert match is not None
            order = int(match.group(1))
            if order < 1:
                raise UnknownKeyError(f"unknown key {key!r}: orders start at 1", number)
            (spec.cos if cos_match else spec.sin)[order] = coeff
        elif harmonic_match:
            if kind != "harmonic":
                raise KindMismatchError(f"{key!r} is only valid for kind harmonic", number)
            degree, order = int(harmonic_match.group(1)), int(harmonic_match.group(2))
            if degree < 0 or abs(order) > degree:
                raise SpecError(f"harmonic needs -L <= M <= L, got L={degree} M={order}", number)
            spec.harmonics[(degree, order)] = _parse_float(value, number)
        else:
            raise UnknownKeyError(f"unknown key {key!r}", number)

    if kind == "sampled" and spec.values is None:
        raise MissingKeyError("sampled integrands need a 'values' key", kind_line)
    return spec


def render_spec(spec: IntegrandSpec) -> str:
    """
    Write a spec back in the definition file format.
    """
    lines = [f"dim = {spec.dim}", f"kind = {spec.kind}"]
    if spec.a0 is not None:
        lines.append(f"a0 = {spec.a0!r}")
    lines += [f"cos{k} = {v!r}" for k, v in sorted(spec.cos.items())]
    lines += [f"sin{k} = {v!r}" for k, v in sorted(spec.sin.items())]
    lines += [f"y {l} {m} = {v!r}" for (l, m), v in sorted(spec.harmonics.items())]
    if spec.values is not None:
        lines.append(f"values = {spec.values}")
    return "\n".join(lines) + "\n"


def _read_samples(spec: IntegrandSpec, columns: Tuple[str, ...]) -> pd.DataFrame:
    line = spec.lines.get("values")
    assert spec.values is not None
    path = spec.values if os.path.isabs(spec.values) else os.path.join(spec.base_dir, spec.values)
    try:
        table = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise SampleFileError(f"cannot read samples from {path}: {exc}", line) from exc
    missing = [c for c in columns if c not in table.columns]
    if missing:
        raise SampleFileError(f"sample file {path} lacks columns {missing}", line)
    try:
        numbers = table[list(columns)].to_numpy(dtype=float)
    except ValueError as exc:
        raise NonFiniteValueError(f"sample file {path} has non-numeric entries", line) from exc
    if not np.all(np.isfinite(numbers)):
        raise NonFiniteValueError(f"sample file {path} has non-finite entries", line)
    return table


def build(spec: IntegrandSpec, grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    Build and validate the integrand described by a spec.
    """
    integrand: Integrand
    if spec.kind == "fourier":
        integrand = FourierIntegrand(spec.a0 or 0.0, spec.cos, spec.sin, grid)
        line = spec.lines.get("a0", spec.lines.get("kind"))
    elif spec.kind == "harmonic":
        integrand = HarmonicIntegrand(spec.harmonics, grid)
        line = spec.lines.get("kind")
    elif spec.dim == 1:
        table = _read_samples(spec, ("theta", "value"))
        try:
            integrand = SampledCircleIntegrand(table["theta"].to_numpy(), table["value"].to_numpy(), grid)
        except ValueError as exc:
            raise SampleFileError(str(exc), spec.lines.get("values")) from exc
        line = spec.lines.get("values")
        if np.min(table["value"]) <= 0.0:
            worst = int(np.argmin(table["value"].to_numpy()))
            witness = sphere_geometry.angles_to_points(np.array([table["theta"].iloc[worst]]))[0]
            raise PositivityError(witness, float(table["value"].iloc[worst]), line)
    else:
        table = _read_samples(spec, ("x", "y", "z", "value"))
        if len(table) != sphere_geometry.icosphere(grid.icosphere_level).vertices.shape[0]:
            logger.warning("sample file has {} rows, not a level-{} icosphere", len(table), grid.icosphere_level)
        integrand = SampledSphereIntegrand(table[["x", "y", "z"]].to_numpy(), table["value"].to_numpy(), grid=grid)
        line = spec.lines.get("values")
        if np.min(table["value"]) <= 0.0:
            worst = int(np.argmin(table["value"].to_numpy()))
            raise PositivityError(table[["x", "y", "z"]].to_numpy()[worst], float(table["value"].iloc[worst]), line)
    logger.debug("built {} integrand on S^{}", spec.kind, spec.dim)
    return integrand.validate(line)


def load(path: str, grid: common.Grid = common.DEFAULT_GRID) -> Integrand:
    """
    Parse and build an integrand definition file.
    """
    with open(path, "r", encoding="utf-8") as spec_file:
        text = spec_file.read()
    return build(parse_spec(text, os.path.dirname(os.path.abspath(path))), grid)
