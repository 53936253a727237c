# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Hemispheres, spherical polar sets, spherical convex hulls and spherical Wulff
shapes, sampled as indicators on an icosphere of S^2.
"""

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
import pandas as pd  # type: ignore
from loguru import logger
from scipy.optimize import linprog, nnls  # type: ignore
from scipy.spatial import cKDTree  # type: ignore

from wulffdual import sphere_geometry
from wulffdual.errors import NotHemisphericalError, SampleFileError, UnsupportedDimensionError
from wulffdual.integrand_model import Integrand
from wulffdual.sphere_geometry import SpherePoint

REGION_LEVEL = 5
HULL_RESIDUAL = 1e-10
CHUNK = 512

Predicate = Callable[[np.ndarray], np.ndarray]


@functools.lru_cache(maxsize=8)
def _grid_tree(level: int) -> cKDTree:
    return cKDTree(sphere_geometry.icosphere(level).vertices)


def hemisphere_contains(centre: SpherePoint, point: SpherePoint) -> bool:
    """
    Whether ``point`` lies in the closed hemisphere H(centre) = {Q | centre . Q >= 0}.
    """
    return bool(np.dot(centre.coords, point.coords) >= 0.0)


@dataclass(frozen=True)
class FinitePointSet:
    """
    Finitely many points of a sphere, all inside some open hemisphere.
    """

    points: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        points = sphere_geometry.normalize_rows(np.atleast_2d(np.asarray(self.points, dtype=float)))
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        if not self.hemispherical():
            raise NotHemisphericalError(f"{points.shape[0]} points are not contained in an open hemisphere")

    @property
    def ambient_dim(self) -> int:
        """
        Dimension of the ambient Euclidean space.
        """
        return self.points.shape[1]

    @property
    def rank(self) -> int:
        """
        Dimension of the linear span of the points.
        """
        return int(np.linalg.matrix_rank(self.points, tol=1e-10))

    def hemispherical(self) -> bool:
        """
        Whether some centre P has P . Q > 0 for every point Q, found by a
        linear program maximising the smallest such product.
        """
        dim = self.points.shape[1]
        # variables (P, s): maximise s with Q_i . P >= s and |P_j| <= 1
        cost = np.zeros(dim + 1)
        cost[-1] = -1.0
        upper = np.hstack([-self.points, np.ones((self.points.shape[0], 1))])
        result = linprog(
            cost,
            A_ub=upper,
            b_ub=np.zeros(self.points.shape[0]),
            bounds=[(-1.0, 1.0)] * dim + [(None, 1.0)],
            method="highs",
        )
        return bool(result.status == 0 and -result.fun > 1e-9)


def load_points(path: str) -> FinitePointSet:
    """
    Read a CSV with one unit vector per row, with or without a header.
    """
    try:
        frame = pd.read_csv(path, header=None, comment="#")
        if not all(pd.api.types.is_numeric_dtype(kind) for kind in frame.dtypes):
            frame = pd.read_csv(path, comment="#")
        values = frame.to_numpy(dtype=float)
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise SampleFileError(f"cannot read points from {path}: {exc}") from exc
    if values.ndim != 2 or values.shape[0] == 0 or not np.all(np.isfinite(values)):
        raise SampleFileError(f"{path} holds no finite point rows")
    if np.any(np.linalg.norm(values, axis=1) < 1e-12):
        raise SampleFileError(f"{path} contains a zero vector")
    return FinitePointSet(values)


def _polar_predicate(generators: np.ndarray) -> Predicate:
    def inside(points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if generators.shape[0] == 0:
            return np.ones(points.shape[0], dtype=bool)
        result = np.empty(points.shape[0], dtype=bool)
        for start in range(0, points.shape[0], CHUNK):
            dots = points[start : start + CHUNK] @ generators.T
            result[start : start + CHUNK] = np.min(dots, axis=1) >= 0.0
        return result

    return inside


@dataclass(frozen=True)
class SphericalRegion:
    """
    A subset of S^2 sampled as an indicator on the icosphere vertices.

    ``members`` are points known to belong to the region in addition to the
    sampled ones (the generators of a hull), and ``predicate`` is an exact
    membership test when one is available.
    """

    indicator: np.ndarray = field(compare=False)
    level: int = REGION_LEVEL
    predicate: Optional[Predicate] = field(default=None, compare=False)
    members: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)), compare=False)
    kind: str = "region"

    @property
    def grid(self) -> np.ndarray:
        """
        Sample points of the indicator.
        """
        return sphere_geometry.icosphere(self.level).vertices

    @property
    def band_width(self) -> float:
        """
        Width of the boundary band, two grid cells.
        """
        return 2.0 * sphere_geometry.icosphere(self.level).mean_edge_angle

    @property
    def sampled_points(self) -> np.ndarray:
        """
        Grid points inside the region together with the known members.
        """
        return np.vstack([self.grid[self.indicator], self.members])

    @property
    def fraction(self) -> float:
        """
        Share of grid points inside.
        """
        return float(np.mean(self.indicator))

    def boundary_points(self) -> np.ndarray:
        """
        Grid points with a neighbour of different indicator.
        """
        return self.grid[sphere_geometry.icosphere(self.level).boundary(self.indicator)]

    def contains(self, points: np.ndarray) -> np.ndarray:
        """
        Membership of arbitrary points, exact when a predicate is known and
        otherwise read from the nearest grid point.
        """
        points = np.atleast_2d(points)
        if self.predicate is not None:
            return self.predicate(points)
        return self.indicator[_grid_tree(self.level).query(points)[1]]

    def to_frame(self) -> pd.DataFrame:
        """
        Indicator as a table of grid points.
        """
        grid = self.grid
        return pd.DataFrame({"x": grid[:, 0], "y": grid[:, 1], "z": grid[:, 2], "inside": self.indicator})


def _region(predicate: Predicate, level: int, members: Optional[np.ndarray] = None, kind: str = "region") -> SphericalRegion:
    indicator = predicate(sphere_geometry.icosphere(level).vertices)
    indicator.setflags(write=False)
    return SphericalRegion(
        indicator,
        level,
        predicate,
        np.zeros((0, 3)) if members is None else members,
        kind,
    )


def polar_set(source: Union[FinitePointSet, SphericalRegion], level: int = REGION_LEVEL) -> SphericalRegion:
    """
    The intersection of the closed hemispheres H(P) over all P in the source.

    A finite point set gives the exact predicate min_i P_i . Q >= 0. A sampled
    region uses its sampled points and known members.
    """
    if isinstance(source, FinitePointSet):
        generators = source.points
        if source.ambient_dim != 3:
            predicate = _polar_predicate(generators)
            return SphericalRegion(np.zeros(0, dtype=bool), level, predicate, np.zeros((0, 3)), "polar")
    else:
        generators = source.sampled_points
        level = source.level
    logger.debug("polar set of {} generators", generators.shape[0])
    return _region(_polar_predicate(generators), level, kind="polar")


def _cone_normals(points: np.ndarray) -> np.ndarray:
    """
    Inward normals of the planes through the origin bounding the cone over a
    full-rank point set in R^3.
    """
    normals = []
    for first, second in itertools.combinations(range(points.shape[0]), 2):
        normal = np.cross(points[first], points[second])
        size = np.linalg.norm(normal)
        if size < 1e-12:
            continue
        normal /= size
        sides = points @ normal
        if np.all(sides >= -1e-12):
            normals.append(normal)
        elif np.all(sides <= 1e-12):
            normals.append(-normal)
    return np.array(normals).reshape(-1, 3)


def hull_membership(source: FinitePointSet, points: np.ndarray) -> np.ndarray:
    """
    Whether each point is a normalised nonnegative combination of the source,
    decided by nonnegative least squares.
    """
    matrix = source.points.T
    result = np.empty(points.shape[0], dtype=bool)
    for row, point in enumerate(np.atleast_2d(points)):
        _, residual = nnls(matrix, point)
        result[row] = residual < HULL_RESIDUAL
    return result


def spherical_convex_hull(source: FinitePointSet, level: int = REGION_LEVEL) -> SphericalRegion:
    """
    s-conv of a hemispherical point set.

    The predicate solves the nonnegative least-squares problem; the grid
    indicator uses the bounding planes of the cone when the set spans R^3.
    """
    if source.ambient_dim != 3:
        raise UnsupportedDimensionError("spherical convex hulls are sampled on S^2 only")

    def predicate(points: np.ndarray) -> np.ndarray:
        return hull_membership(source, points)

    if source.rank == 3:
        normals = _cone_normals(source.points)

        def planes(points: np.ndarray) -> np.ndarray:
            return np.all(np.atleast_2d(points) @ normals.T >= 0.0, axis=1)

        indicator = planes(sphere_geometry.icosphere(level).vertices)
    else:
        indicator = predicate(sphere_geometry.icosphere(level).vertices)
    indicator.setflags(write=False)
    return SphericalRegion(indicator, level, predicate, source.points, "hull")


class RegionComparison(NamedTuple):
    """
    Result of comparing two sampled regions outside their boundary bands.
    """

    agree: bool
    max_discrepancy: float
    mismatched: int


def region_agreement(first: SphericalRegion, second: SphericalRegion) -> RegionComparison:
    """
    Compare two regions on the same grid; disagreements count only when they
    lie farther than the band width from both boundaries.
    """
    if first.level != second.level:
        raise ValueError("regions are sampled on different grids")
    differ = first.indicator != second.indicator
    if not np.any(differ):
        return RegionComparison(True, 0.0, 0)
    boundary = np.vstack([first.boundary_points(), second.boundary_points()])
    if boundary.shape[0] == 0:
        return RegionComparison(False, np.pi, int(np.sum(differ)))
    chords, _ = cKDTree(boundary).query(first.grid[differ])
    angles = 2.0 * np.arcsin(np.minimum(chords / 2.0, 1.0))
    worst = float(np.max(angles))
    outside = int(np.sum(angles > first.band_width))
    return RegionComparison(outside == 0, worst, outside)


def maehara_check(source: FinitePointSet, level: int = REGION_LEVEL) -> RegionComparison:
    """
    Compare the polar of the spherical convex hull of the set with the
    intersection of the hemispheres of its points.
    """
    hull = spherical_convex_hull(source, level)
    comparison = region_agreement(polar_set(hull), polar_set(source, level))
    logger.debug("hull polar vs hemisphere intersection: {}", comparison)
    return comparison


@dataclass(frozen=True)
class DoublePolarReport:
    """
    Outcome of comparing a spherical convex hull with its double polar.
    """

    status: str
    agreement: Optional[RegionComparison]
    inclusion: bool

    @property
    def passed(self) -> bool:
        """
        Agreement and inclusion both hold.
        """
        return self.status == "agree" and self.inclusion


def double_polar_check(source: FinitePointSet, level: int = REGION_LEVEL) -> DoublePolarReport:
    """
    Check that the hull equals its double polar and is contained in it.
    Hulls without interior points are reported as degenerate.
    """
    if source.ambient_dim != 3 or source.rank < 3:
        return DoublePolarReport("degenerate", None, True)
    hull = spherical_convex_hull(source, level)
    double = polar_set(polar_set(hull))
    inclusion = bool(np.all(double.indicator[hull.indicator]))
    agreement = region_agreement(hull, double)
    return DoublePolarReport("agree" if agreement.agree else "disagree", agreement, inclusion)


def lifted_graph_blowup(g: Integrand) -> np.ndarray:
    """
    Blow-up of the centrally lifted graph of a circle integrand on its grid,
    (-theta, g(theta)) / sqrt(1 + g(theta)^2).
    """
    if g.dim != 1:
        raise UnsupportedDimensionError("spherical Wulff shapes are sampled for circle integrands")
    points = g.grid_points()
    values = g.values(points)
    lifted = sphere_geometry.central_lift_rows(points * values[:, None])
    return sphere_geometry.blowup_rows(lifted)


def spherical_wulff(g: Integrand, level: int = REGION_LEVEL) -> SphericalRegion:
    """
    The polar of the blown-up lifted graph of g; its central projection is
    the Wulff shape of g.
    """
    blown = lifted_graph_blowup(g)
    return _region(_polar_predicate(blown), level, kind="spherical wulff")


def spherical_dual_wulff(g: Integrand, level: int = REGION_LEVEL) -> SphericalRegion:
    """
    The polar of the spherical Wulff shape of g.
    """
    return polar_set(spherical_wulff(g, level))


def lifted_body(radii: np.ndarray, level: int = REGION_LEVEL) -> SphericalRegion:
    """
    Central lift of a star-shaped planar body given by radii on a uniform
    angle grid, sampled on the upper hemisphere.
    """
    angles = 2.0 * np.pi * np.arange(radii.size) / radii.size

    def predicate(points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        upper = points[:, -1] > sphere_geometry.POLE_TOL
        inside = np.zeros(points.shape[0], dtype=bool)
        projected = points[upper, :-1] / points[upper, -1:]
        direction = np.mod(np.arctan2(projected[:, 1], projected[:, 0]), 2.0 * np.pi)
        reach = np.interp(direction, angles, radii, period=2.0 * np.pi)
        inside[upper] = np.linalg.norm(projected, axis=1) <= reach
        return inside

    return _region(predicate, level, kind="lifted body")


class ConvexityCheck(NamedTuple):
    """
    Result of testing arcs between random pairs of region points.
    """

    convex: bool
    violations: int
    pairs: int


def is_spherical_convex(
    region: SphericalRegion,
    pairs: int = 200,
    rng: Optional[np.random.Generator] = None,
    samples: int = 16,
) -> ConvexityCheck:
    """
    Sample arcs between random pairs of region points and report arc points
    that leave the region beyond the boundary band.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    inside = region.grid[region.indicator]
    if inside.shape[0] < 2:
        return ConvexityCheck(True, 0, 0)
    boundary = region.boundary_points()
    tree = cKDTree(boundary) if boundary.shape[0] else None
    first = inside[rng.integers(0, inside.shape[0], pairs)]
    second = inside[rng.integers(0, inside.shape[0], pairs)]
    usable = np.sum(first * second, axis=1) > -1.0 + sphere_geometry.ANTIPODAL_TOL
    first, second = first[usable], second[usable]
    t = np.linspace(0.0, 1.0, samples)
    arcs = (1.0 - t)[None, :, None] * first[:, None, :] + t[None, :, None] * second[:, None, :]
    arcs = sphere_geometry.normalize_rows(arcs.reshape(-1, 3))
    outside = ~region.contains(arcs)
    if np.any(outside) and tree is not None:
        chords, _ = tree.query(arcs[outside])
        far = 2.0 * np.arcsin(np.minimum(chords / 2.0, 1.0)) > region.band_width
        outside[np.flatnonzero(outside)[~far]] = False
    violations = int(np.sum(outside.reshape(-1, samples).any(axis=1)))
    return ConvexityCheck(violations == 0, violations, int(first.shape[0]))


def intersect(first: SphericalRegion, second: SphericalRegion) -> SphericalRegion:
    """
    Intersection of two regions on the same grid.
    """
    if first.level != second.level:
        raise ValueError("regions are sampled on different grids")
    indicator = first.indicator & second.indicator
    indicator.setflags(write=False)
    predicate: Optional[Predicate] = None
    if first.predicate is not None and second.predicate is not None:
        left, right = first.predicate, second.predicate

        def both(points: np.ndarray) -> np.ndarray:
            return left(points) & right(points)

        predicate = both
    return SphericalRegion(indicator, first.level, predicate, np.zeros((0, 3)), "intersection")
