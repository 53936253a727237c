# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Geometric primitives on punctured Euclidean space and on spheres.

Points of a sphere are stored as unit vectors. The ``*_rows`` functions are the
vectorised forms used by the numerical modules and take arrays of shape
(m, d) whose rows are points.
"""

import functools
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from wulffdual.errors import GeometryError

POLE_TOL = 1e-12
ANTIPODAL_TOL = 1e-9


@dataclass(frozen=True)
class SpherePoint:
    """
    A unit vector, renormalised on construction.
    """

    coords: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=float).reshape(-1)
        norm = np.linalg.norm(coords)
        if norm == 0.0 or not np.isfinite(norm):
            raise GeometryError("a sphere point needs a finite non-zero vector")
        coords = coords / norm
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_angle(cls, angle: float) -> "SpherePoint":
        """
        Point of the unit circle at the given angle.
        """
        return cls(np.array([np.cos(angle), np.sin(angle)]))

    @property
    def dim(self) -> int:
        """
        Dimension of the sphere this point lives on.
        """
        return self.coords.shape[0] - 1

    @property
    def angle(self) -> float:
        """
        Angle in [0, 2pi) of a point of the unit circle.
        """
        if self.dim != 1:
            raise GeometryError("only points of the circle have an angle")
        return float(points_to_angles(self.coords[None, :])[0])

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.coords)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpherePoint):
            return NotImplemented
        return bool(np.array_equal(self.coords, other.coords))

    def __hash__(self) -> int:
        return hash(self.coords.tobytes())


@dataclass(frozen=True)
class PolarPoint:
    """
    Polar plot expression (direction, radius) of a point of punctured space.
    """

    direction: SpherePoint
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise GeometryError(f"polar radius must be positive, got {self.radius}")

    def to_vector(self) -> np.ndarray:
        """
        Cartesian coordinates of the point.
        """
        return self.radius * self.direction.coords

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "PolarPoint":
        """
        Polar expression of a non-zero vector.
        """
        vector = np.asarray(vector, dtype=float)
        radius = float(np.linalg.norm(vector))
        if radius == 0.0:
            raise GeometryError("the origin has no polar expression")
        return cls(SpherePoint(vector), radius)


@dataclass(frozen=True)
class Chart:
    """
    Orthonormal tangent frame at a point, used as normal coordinates.

    ``frame`` has shape (n, n + 1); its rows are the tangent vectors.
    """

    center: SpherePoint
    frame: np.ndarray = field(compare=False)

    def exp(self, xi: np.ndarray) -> SpherePoint:
        """
        Map normal coordinates to the sphere.
        """
        return SpherePoint(exp_rows(self.center.coords[None, :], (xi @ self.frame)[None, :])[0])

    def log(self, point: SpherePoint) -> np.ndarray:
        """
        Normal coordinates of a point (inverse of exp away from the antipode).
        """
        tangent = log_rows(self.center.coords[None, :], point.coords[None, :])[0]
        return self.frame @ tangent


def inversion(point: PolarPoint) -> PolarPoint:
    """
    inv(theta, r) = (-theta, 1/r).
    """
    return PolarPoint(-point.direction, 1.0 / point.radius)


def north_pole(ambient_dim: int) -> np.ndarray:
    """
    The last standard basis vector of R^ambient_dim.
    """
    pole = np.zeros(ambient_dim)
    pole[-1] = 1.0
    return pole


def central_project(point: SpherePoint) -> np.ndarray:
    """
    Central projection of the open northern hemisphere onto the plane x_last = 1.
    """
    return central_project_rows(point.coords[None, :])[0]


def central_project_rows(points: np.ndarray) -> np.ndarray:
    """
    Row-wise central projection.
    """
    points = np.atleast_2d(points)
    height = points[:, -1]
    if np.any(height <= POLE_TOL):
        raise GeometryError("central projection needs points of the open northern hemisphere")
    return points / height[:, None]


def central_lift(x: np.ndarray) -> SpherePoint:
    """
    Inverse of the central projection: (x, 1) / |(x, 1)|.
    """
    return SpherePoint(central_lift_rows(np.asarray(x, dtype=float)[None, :])[0])


def central_lift_rows(x: np.ndarray) -> np.ndarray:
    """
    Row-wise central lift.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    lifted = np.hstack([x, np.ones((x.shape[0], 1))])
    return lifted / np.linalg.norm(lifted, axis=1, keepdims=True)


def spherical_blowup(point: SpherePoint) -> SpherePoint:
    """
    Psi_N(P) = (N - (N.P) P) / sqrt(1 - (N.P)^2).
    """
    return SpherePoint(blowup_rows(point.coords[None, :])[0])


def blowup_rows(points: np.ndarray) -> np.ndarray:
    """
    Row-wise spherical blow-up at the north pole.
    """
    points = np.atleast_2d(points)
    cos_n = points[:, -1]
    if np.any(np.abs(cos_n) >= 1.0 - POLE_TOL):
        raise GeometryError("spherical blow-up is undefined at the poles")
    pole = north_pole(points.shape[1])
    numerator = pole[None, :] - cos_n[:, None] * points
    return numerator / np.sqrt(1.0 - cos_n**2)[:, None]


def blowup_differential_rows(points: np.ndarray, tangents: np.ndarray) -> np.ndarray:
    """
    Derivative of the blow-up at each point applied to tangent vectors.

    ``tangents`` has shape (m, k, d) and the result has the same shape.
    """
    cos_n = points[:, -1]
    sin_n = np.sqrt(1.0 - cos_n**2)
    pole = north_pole(points.shape[1])
    d_cos = tangents[:, :, -1]
    numerator = pole[None, :] - cos_n[:, None] * points
    first = -(d_cos[:, :, None] * points[:, None, :] + cos_n[:, None, None] * tangents)
    second = numerator[:, None, :] * (cos_n / sin_n**2)[:, None, None] * d_cos[:, :, None]
    return (first + second) / sin_n[:, None, None]


def blowup_conjugate(point: PolarPoint) -> PolarPoint:
    """
    The blow-up conjugated by central projection back to punctured space.
    """
    lifted = central_lift(point.to_vector())
    blown = spherical_blowup(lifted)
    projected = central_project(blown)[:-1]
    return PolarPoint.from_vector(projected)


def geodesic_distance(first: SpherePoint, second: SpherePoint) -> float:
    """
    Arc length between two points of the same sphere.
    """
    if first.coords.shape != second.coords.shape:
        raise GeometryError("points live on spheres of different dimension")
    return float(geodesic_distance_rows(first.coords[None, :], second.coords[None, :])[0])


def geodesic_distance_rows(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """
    Row-wise arc length, computed with atan2 for accuracy near 0 and pi.
    """
    cross = np.linalg.norm(first - second * np.sum(first * second, axis=-1, keepdims=True), axis=-1)
    dot = np.sum(first * second, axis=-1)
    return np.arctan2(cross, dot)


def arc_point(first: SpherePoint, second: SpherePoint, t: float) -> SpherePoint:
    """
    Normalised convex combination ((1 - t) P + t Q) / |(1 - t) P + t Q|.
    """
    if not 0.0 <= t <= 1.0:
        raise GeometryError(f"arc parameter must lie in [0, 1], got {t}")
    if np.dot(first.coords, second.coords) <= -1.0 + ANTIPODAL_TOL:
        raise GeometryError("no arc joins antipodal points")
    return SpherePoint((1.0 - t) * first.coords + t * second.coords)


def tangent_frame(center: SpherePoint) -> Chart:
    """
    Deterministic orthonormal tangent frame at a point.
    """
    return Chart(center, tangent_frames(center.coords[None, :])[0])


@functools.lru_cache(maxsize=None)
def _other_axes(ambient_dim: int) -> np.ndarray:
    return np.array([[i for i in range(ambient_dim) if i != skip] for skip in range(ambient_dim)])


def tangent_frames(points: np.ndarray) -> np.ndarray:
    """
    Gram-Schmidt on the coordinate axes, skipping the axis most parallel to
    each point. Returns shape (m, n, d).
    """
    points = np.atleast_2d(points)
    count, ambient = points.shape
    skip = np.argmax(np.abs(points), axis=1)
    axes = np.eye(ambient)[_other_axes(ambient)[skip]]
    frames = np.empty((count, ambient - 1, ambient))
    for k in range(ambient - 1):
        vec = axes[:, k, :] - np.sum(axes[:, k, :] * points, axis=1, keepdims=True) * points
        for j in range(k):
            vec -= np.sum(vec * frames[:, j, :], axis=1, keepdims=True) * frames[:, j, :]
        frames[:, k, :] = vec / np.linalg.norm(vec, axis=1, keepdims=True)
    return frames


def project_tangent(points: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """
    Remove the normal component of ambient vectors at sphere points.
    """
    return vectors - np.sum(vectors * points, axis=-1, keepdims=True) * points


def tangent_projectors(points: np.ndarray) -> np.ndarray:
    """
    Orthogonal projectors I - x x^T onto tangent spaces, shape (m, d, d).
    """
    ambient = points.shape[1]
    return np.eye(ambient)[None, :, :] - points[:, :, None] * points[:, None, :]


def exp_rows(points: np.ndarray, tangents: np.ndarray) -> np.ndarray:
    """
    Exponential map of the unit sphere, row-wise.
    """
    norm = np.linalg.norm(tangents, axis=1, keepdims=True)
    safe = np.where(norm > 0.0, norm, 1.0)
    moved = np.cos(norm) * points + np.sin(norm) * tangents / safe
    return moved / np.linalg.norm(moved, axis=1, keepdims=True)


def log_rows(points: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """
    Inverse exponential map of the unit sphere, row-wise.
    """
    direction = project_tangent(points, targets)
    norm = np.linalg.norm(direction, axis=1, keepdims=True)
    distance = geodesic_distance_rows(points, targets)[:, None]
    safe = np.where(norm > 0.0, norm, 1.0)
    return np.where(norm > 0.0, direction * distance / safe, 0.0)


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """
    Scale each row to unit length.
    """
    return vectors / np.linalg.norm(vectors, axis=-1, keepdims=True)


def angles_to_points(angles: np.ndarray) -> np.ndarray:
    """
    Points of the unit circle at the given angles, shape (m, 2).
    """
    angles = np.asarray(angles, dtype=float)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def points_to_angles(points: np.ndarray) -> np.ndarray:
    """
    Angles in [0, 2pi) of points of the unit circle.
    """
    return np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * np.pi)


def circle_tangents(points: np.ndarray) -> np.ndarray:
    """
    Counter-clockwise unit tangents of the circle, (-sin, cos).
    """
    return np.stack([-points[:, 1], points[:, 0]], axis=-1)


@dataclass(frozen=True)
class Icosphere:
    """
    Geodesic icosahedral mesh of the unit sphere S^2.
    """

    vertices: np.ndarray
    faces: np.ndarray
    edges: np.ndarray

    @property
    def edge_angles(self) -> np.ndarray:
        """
        Arc lengths of all mesh edges.
        """
        return geodesic_distance_rows(self.vertices[self.edges[:, 0]], self.vertices[self.edges[:, 1]])

    @property
    def mean_edge_angle(self) -> float:
        """
        Mean arc length of the mesh edges.
        """
        return float(np.mean(self.edge_angles))

    @property
    def max_edge_angle(self) -> float:
        """
        Longest mesh edge.
        """
        return float(np.max(self.edge_angles))

    def ring_minima(self, values: np.ndarray) -> np.ndarray:
        """
        Vertices whose value is no larger than at any 1-ring neighbour.
        """
        larger = np.zeros(self.vertices.shape[0], dtype=bool)
        first, second = self.edges[:, 0], self.edges[:, 1]
        np.logical_or.at(larger, first, values[first] > values[second])
        np.logical_or.at(larger, second, values[second] > values[first])
        return ~larger

    def boundary(self, indicator: np.ndarray) -> np.ndarray:
        """
        Vertices with a 1-ring neighbour of different indicator.
        """
        first, second = self.edges[:, 0], self.edges[:, 1]
        differ = indicator[first] != indicator[second]
        marked = np.zeros(self.vertices.shape[0], dtype=bool)
        marked[first[differ]] = True
        marked[second[differ]] = True
        return marked


_ICOSAHEDRON_FACES = np.array(
    [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ]
)


@functools.lru_cache(maxsize=None)
def icosphere(level: int) -> Icosphere:
    """
    Subdivide the icosahedron ``level`` times, projecting midpoints to the
    sphere and merging shared midpoints.
    """
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = np.array(
        [
            [-1, golden, 0],
            [1, golden, 0],
            [-1, -golden, 0],
            [1, -golden, 0],
            [0, -1, golden],
            [0, 1, golden],
            [0, -1, -golden],
            [0, 1, -golden],
            [golden, 0, -1],
            [golden, 0, 1],
            [-golden, 0, -1],
            [-golden, 0, 1],
        ],
        dtype=float,
    )
    vertices = normalize_rows(vertices)
    faces = _ICOSAHEDRON_FACES.copy()
    for _ in range(level):
        count = vertices.shape[0]
        pairs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
        pairs = np.sort(pairs, axis=1)
        unique_pairs, inverse = np.unique(pairs, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        midpoints = normalize_rows(vertices[unique_pairs[:, 0]] + vertices[unique_pairs[:, 1]])
        vertices = np.vstack([vertices, midpoints])
        n_faces = faces.shape[0]
        mid_ab = count + inverse[:n_faces]
        mid_bc = count + inverse[n_faces : 2 * n_faces]
        mid_ca = count + inverse[2 * n_faces :]
        faces = np.concatenate(
            [
                np.stack([faces[:, 0], mid_ab, mid_ca], axis=1),
                np.stack([faces[:, 1], mid_bc, mid_ab], axis=1),
                np.stack([faces[:, 2], mid_ca, mid_bc], axis=1),
                np.stack([mid_ab, mid_bc, mid_ca], axis=1),
            ]
        )
    pairs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    edges = np.unique(np.sort(pairs, axis=1), axis=0)
    for array in (vertices, faces, edges):
        array.setflags(write=False)
    return Icosphere(vertices, faces, edges)


def great_circle(normal: np.ndarray, samples: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Uniform samples of the great circle of S^2 orthogonal to ``normal``,
    with the unit tangent at each sample.
    """
    frame = tangent_frames(normalize_rows(np.asarray(normal, dtype=float)[None, :]))[0]
    angles = 2.0 * np.pi * np.arange(samples) / samples
    points = np.cos(angles)[:, None] * frame[0] + np.sin(angles)[:, None] * frame[1]
    tangents = -np.sin(angles)[:, None] * frame[0] + np.cos(angles)[:, None] * frame[1]
    return points, tangents
