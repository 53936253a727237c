# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Fronts on S^(n+1): the centrally lifted boundary of a Wulff shape, spherical
duals and pedals, wave fronts, and the caustic and symmetry set of the
wave-front family.

A front is stored with first-order data in the tangent chart of each
parameter point. For curves (n = 1) the chart coordinate is the angle.
"""

import functools
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq, least_squares  # type: ignore
from scipy.spatial import cKDTree  # type: ignore
from scipy.spatial.distance import directed_hausdorff  # type: ignore

from wulffdual import common, sphere_geometry
from wulffdual.errors import FrontError, UnsupportedDimensionError
from wulffdual.integrand_model import AntipodalReciprocal, HalfSquare, Integrand
from wulffdual.morse_stability import CriticalSet, find_critical_points
from wulffdual.wulff_duality import chart_hessians, classify, dual_integrand

AMBIGUOUS_NORMAL = 1e-9
LOCUS_MERGE = 1e-9
PAIR_MERGE = 1e-7
PAIR_RESIDUAL = 1e-9
PAIR_SEPARATION = 1e-3
SPEED_FACTOR = 1e-4
NEIGHBOUR_FACTOR = 4.0
PAIR_BUCKET = 8
FRONT_PROXIMITY = 0.02
T_SAMPLES = 257


def default_t_grid() -> np.ndarray:
    """
    Uniform wave-front parameters between the front and its dual.
    """
    return np.linspace(-np.pi / 2.0, np.pi / 2.0, T_SAMPLES)


@dataclass(frozen=True)
class FrontSample:
    """
    A sampled front with positions, chart velocities and the N-side unit
    normal with its chart derivatives.
    """

    params: np.ndarray = field(compare=False)
    positions: np.ndarray = field(compare=False)
    velocities: np.ndarray = field(compare=False)
    normals: np.ndarray = field(compare=False)
    normal_velocities: Optional[np.ndarray] = field(default=None, compare=False)
    ambiguous: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool), compare=False)
    source: Optional[Callable[[np.ndarray], "FrontSample"]] = field(default=None, compare=False)
    label: str = "front"

    @property
    def dim(self) -> int:
        """
        Dimension of the parameter sphere.
        """
        return self.velocities.shape[1]

    @property
    def speeds(self) -> np.ndarray:
        """
        Volume factor of the chart velocities, the speed for curves.
        """
        gram = np.einsum("mjd,mkd->mjk", self.velocities, self.velocities)
        return np.sqrt(np.maximum(np.linalg.det(gram), 0.0))

    def at(self, params: np.ndarray) -> "FrontSample":
        """
        Re-evaluate the same front at other parameter points.
        """
        if self.source is None:
            raise FrontError(f"{self.label} cannot be re-evaluated")
        return self.source(params)


def _lift_derivatives(x: np.ndarray, first: np.ndarray, second: np.ndarray) -> Tuple[np.ndarray, ...]:
    """
    Central lift of planar data with its first and second chart derivatives.
    """
    scale = np.sqrt(1.0 + np.sum(x**2, axis=1))
    homogeneous = np.hstack([x, np.ones((x.shape[0], 1))])
    zero = np.zeros(first.shape[:-1] + (1,))
    padded_first = np.concatenate([first, zero], axis=-1)
    padded_second = np.concatenate([second, np.zeros(second.shape[:-1] + (1,))], axis=-1)
    s1, s3, s5 = scale[:, None, None], scale[:, None, None] ** 3, scale[:, None, None] ** 5

    def linear(padded: np.ndarray, raw: np.ndarray, s_1, s_3, lift) -> np.ndarray:
        along = np.einsum("md,m...d->m...", x, raw)
        return padded / s_1 - lift * along[..., None] / s_3

    positions = homogeneous / scale[:, None]
    velocities = linear(padded_first, first, s1, s3, homogeneous[:, None, :])
    along = np.einsum("md,mjd->mj", x, first)
    dots = np.einsum("mjd,mkd->mjk", first, first)
    lift = homogeneous[:, None, None, :]
    quadratic = (
        -padded_first[:, :, None, :] * along[:, None, :, None] / s3[..., None]
        - padded_first[:, None, :, :] * along[:, :, None, None] / s3[..., None]
        - lift * dots[..., None] / s3[..., None]
        + 3.0 * lift * (along[:, :, None] * along[:, None, :])[..., None] / s5[..., None]
    )
    second_lift = quadratic + linear(padded_second, second, s1[..., None], s3[..., None], lift)
    return positions, velocities, second_lift


def _normals(positions: np.ndarray, velocities: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unit normals orthogonal to the position and velocities, on the N side.
    """
    stacked = np.concatenate([positions[:, None, :], velocities], axis=1)
    normals = np.linalg.svd(stacked)[2][:, -1, :]
    normals = normals * np.where(normals[:, -1] < 0.0, -1.0, 1.0)[:, None]
    ambiguous = np.abs(normals[:, -1]) < AMBIGUOUS_NORMAL
    if np.any(ambiguous):
        logger.warning("{} front samples have no N-side normal", int(np.sum(ambiguous)))
    return normals, ambiguous


def _normal_velocities(normals: np.ndarray, velocities: np.ndarray, second: np.ndarray) -> np.ndarray:
    """
    Chart derivatives of the unit normal from the second fundamental form.
    """
    shape = np.einsum("md,mjkd->mjk", normals, second)
    gram = np.einsum("mjd,mkd->mjk", velocities, velocities)
    coefficients = -np.swapaxes(np.linalg.solve(gram, shape), 1, 2)
    return np.einsum("mjl,mld->mjd", coefficients, velocities)


def _lift_at(hat: Integrand, params: np.ndarray) -> FrontSample:
    params = sphere_geometry.normalize_rows(np.atleast_2d(params))
    jet = hat.jet(params)
    if hat.dim == 1:
        frames = sphere_geometry.circle_tangents(params)[:, None, :]
    else:
        frames = sphere_geometry.tangent_frames(params)
    values = jet.values
    grad = np.einsum("mnd,md->mn", frames, jet.gradients)
    hess = chart_hessians(frames, jet.hessians)
    dim = frames.shape[1]
    x = values[:, None] * params
    first = grad[:, :, None] * params[:, None, :] + values[:, None, None] * frames
    second = (
        hess[..., None] * params[:, None, None, :]
        + grad[:, :, None, None] * frames[:, None, :, :]
        + grad[:, None, :, None] * frames[:, :, None, :]
        - values[:, None, None, None] * np.eye(dim)[None, :, :, None] * params[:, None, None, :]
    )
    positions, velocities, second_lift = _lift_derivatives(x, first, second)
    normals, ambiguous = _normals(positions, velocities)
    normal_velocities = _normal_velocities(normals, velocities, second_lift)
    return FrontSample(
        params,
        positions,
        velocities,
        normals,
        normal_velocities,
        ambiguous,
        functools.partial(_lift_at, hat),
        "lifted graph",
    )


def lift_integrand(g: Integrand, params: Optional[np.ndarray] = None) -> FrontSample:
    """
    Central lift of the graph of theta -> 1 / g(-theta), which is the
    boundary of the Wulff shape of the dual.
    """
    hat = AntipodalReciprocal(g)
    return _lift_at(hat, g.grid_points() if params is None else params)


def _dual_at(front: FrontSample) -> FrontSample:
    if front.normal_velocities is None:
        raise FrontError(f"{front.label} has no normal derivatives")
    side = np.where(front.positions[:, -1] < 0.0, -1.0, 1.0)
    ambiguous = np.abs(front.positions[:, -1]) < AMBIGUOUS_NORMAL
    source = None
    if front.source is not None:
        parent = front.source

        def source(params: np.ndarray) -> FrontSample:
            return _dual_at(parent(params))

    return FrontSample(
        front.params,
        front.normals,
        front.normal_velocities,
        side[:, None] * front.positions,
        side[:, None, None] * front.velocities,
        ambiguous,
        source,
        f"dual of {front.label}",
    )


def spherical_dual_map(front: FrontSample) -> FrontSample:
    """
    The N-side unit normal of the tangent great hypersphere at each sample.
    """
    return _dual_at(front)


def _pedal_at(front: FrontSample) -> FrontSample:
    positions = sphere_geometry.blowup_rows(front.normals)
    if front.normal_velocities is None:
        velocities = np.zeros((positions.shape[0], front.dim, positions.shape[1]))
    else:
        velocities = sphere_geometry.blowup_differential_rows(front.normals, front.normal_velocities)
    normals, ambiguous = _normals(positions, velocities)
    source = None
    if front.source is not None:
        parent = front.source

        def source(params: np.ndarray) -> FrontSample:
            return _pedal_at(parent(params))

    return FrontSample(
        front.params, positions, velocities, normals, None, ambiguous, source, f"pedal of {front.label}"
    )


def spherical_pedal(front: FrontSample) -> FrontSample:
    """
    Spherical pedal with respect to N as the blow-up of the spherical dual.
    """
    return _pedal_at(front)


def spherical_pedal_direct(front: FrontSample) -> np.ndarray:
    """
    Spherical pedal as the point of each tangent great hypersphere nearest to
    N, from an orthonormal basis of its span.
    """
    spans = np.concatenate([front.positions[:, None, :], front.velocities], axis=1)
    basis = np.linalg.qr(np.swapaxes(spans, 1, 2))[0]
    pole = sphere_geometry.north_pole(front.positions.shape[1])
    nearest = np.einsum("mdk,mk->md", basis, np.einsum("mdk,d->mk", basis, pole))
    return sphere_geometry.normalize_rows(nearest)


def _wave_at(front: FrontSample, t: float) -> FrontSample:
    if front.normal_velocities is None:
        raise FrontError(f"{front.label} has no normal derivatives")
    cos_t, sin_t = np.cos(t), np.sin(t)
    source = None
    if front.source is not None:
        parent = front.source

        def source(params: np.ndarray) -> FrontSample:
            return _wave_at(parent(params), t)

    return FrontSample(
        front.params,
        cos_t * front.positions + sin_t * front.normals,
        cos_t * front.velocities + sin_t * front.normal_velocities,
        -sin_t * front.positions + cos_t * front.normals,
        -sin_t * front.velocities + cos_t * front.normal_velocities,
        front.ambiguous,
        source,
        f"{front.label} at t={t:.6g}",
    )


def wave_front(front: FrontSample, t: float) -> FrontSample:
    """
    Move every sample a geodesic distance t along its normal great circle.
    """
    if not abs(t) < np.pi:
        raise FrontError(f"wave-front parameter must satisfy |t| < pi, got {t}")
    return _wave_at(front, t)


@dataclass(frozen=True)
class SingularPoint:
    """
    One point of a caustic or symmetry set, with the wave-front parameter,
    the front parameters involved and how many samples merged into it.
    """

    t: float
    params: np.ndarray = field(compare=False)
    position: np.ndarray = field(compare=False)
    multiplicity: int = 1


@dataclass(frozen=True)
class SingularLocus:
    """
    Sampled caustic or symmetry set.
    """

    kind: str
    points: Tuple[SingularPoint, ...]
    t_grid: np.ndarray = field(compare=False)
    theta_step: float = 0.0

    def __len__(self) -> int:
        return len(self.points)

    @property
    def positions(self) -> np.ndarray:
        """
        Positions as rows.
        """
        if not self.points:
            return np.zeros((0, 3))
        return np.array([p.position for p in self.points])

    @property
    def t_step(self) -> float:
        """
        Spacing of the wave-front parameters.
        """
        return float(np.max(np.diff(self.t_grid))) if self.t_grid.size > 1 else 0.0

    def distance_to(self, target: np.ndarray) -> float:
        """
        Smallest geodesic distance from the locus to a point.
        """
        if not self.points:
            return float("inf")
        return float(np.min(sphere_geometry.geodesic_distance_rows(self.positions, target[None, :])))


def _merge(points: List[SingularPoint], radius: float) -> List[SingularPoint]:
    """
    Merge points at the same position, summing their multiplicities.
    """
    if not points:
        return []
    positions = np.array([p.position for p in points])
    tree = cKDTree(positions)
    taken = np.zeros(len(points), dtype=bool)
    merged = []
    for i, point in enumerate(points):
        if taken[i]:
            continue
        group = [j for j in tree.query_ball_point(positions[i], radius) if not taken[j]]
        taken[group] = True
        multiplicity = sum(points[j].multiplicity for j in group)
        merged.append(replace(point, multiplicity=multiplicity))
    return merged


def _require_curve(front: FrontSample) -> None:
    if front.dim != 1:
        raise UnsupportedDimensionError("caustics and symmetry sets are sampled for curves only")
    if front.normal_velocities is None:
        raise FrontError(f"{front.label} has no normal derivatives")


def caustic_sample(front: FrontSample, t_grid: Optional[np.ndarray] = None) -> SingularLocus:
    """
    Singular points of the wave fronts: for each sample, the parameters t
    where the signed speed (cos t + c sin t)|T| changes sign, refined with
    Brent's method.
    """
    _require_curve(front)
    t_grid = default_t_grid() if t_grid is None else np.sort(np.asarray(t_grid, dtype=float))
    tangents = front.velocities[:, 0, :]
    speed = np.linalg.norm(tangents, axis=1)
    rate = np.sum(front.normal_velocities[:, 0, :] * tangents, axis=1) / speed**2
    signed = np.cos(t_grid)[None, :] + rate[:, None] * np.sin(t_grid)[None, :]
    singular_tol = SPEED_FACTOR * float(np.median(speed))
    found: List[SingularPoint] = []
    rows, cols = np.nonzero((signed[:, :-1] * signed[:, 1:] < 0.0) | (signed[:, :-1] == 0.0))
    for row, col in zip(rows, cols):
        c = rate[row]

        def sigma(t: float, c=c) -> float:
            return float(np.cos(t) + c * np.sin(t))

        t_root = t_grid[col] if signed[row, col] == 0.0 else brentq(sigma, t_grid[col], t_grid[col + 1], xtol=1e-15)
        if abs(sigma(t_root)) * speed[row] >= singular_tol:
            continue
        position = np.cos(t_root) * front.positions[row] + np.sin(t_root) * front.normals[row]
        found.append(SingularPoint(float(t_root), front.params[row : row + 1], position))
    merged = _merge(found, LOCUS_MERGE)
    logger.debug("caustic: {} roots, {} distinct points", len(found), len(merged))
    theta_step = 2.0 * np.pi / front.params.shape[0]
    return SingularLocus("caustic", tuple(merged), t_grid, theta_step)


def _pair_candidates(positions: np.ndarray, speeds: np.ndarray, angles: np.ndarray, pair_tol: float) -> List[Tuple[int, int]]:
    """
    Sample pairs on different branches that come within pair_tol.
    """
    pairs = cKDTree(positions).query_pairs(pair_tol, output_type="ndarray")
    if pairs.size == 0:
        return []
    gap = np.abs(np.mod(angles[pairs[:, 0]] - angles[pairs[:, 1]] + np.pi, 2.0 * np.pi) - np.pi)
    slow = np.minimum(speeds[pairs[:, 0]], speeds[pairs[:, 1]])
    reach = NEIGHBOUR_FACTOR * pair_tol / np.maximum(slow, 1e-300)
    pairs = pairs[(gap > PAIR_SEPARATION) & (gap > reach)]
    chosen: List[Tuple[int, int]] = []
    for first, second in pairs:
        if any(abs(first - a) <= PAIR_BUCKET and abs(second - b) <= PAIR_BUCKET for a, b in chosen):
            continue
        chosen.append((int(first), int(second)))
    return chosen


def symmetry_sample(front: FrontSample, t_grid: Optional[np.ndarray] = None) -> SingularLocus:
    """
    Self-intersections of the wave fronts: pairs of distinct parameters sent
    to the same point, found with a KD-tree and refined by least squares on
    the position difference.
    """
    _require_curve(front)
    if front.source is None:
        raise FrontError(f"{front.label} cannot be re-evaluated for refinement")
    t_grid = default_t_grid() if t_grid is None else np.sort(np.asarray(t_grid, dtype=float))
    angles = sphere_geometry.points_to_angles(front.params)
    theta_step = 2.0 * np.pi / angles.size
    pair_tol = 2.0 * theta_step
    found: List[SingularPoint] = []
    for t in t_grid:
        moved = _wave_at(front, float(t))
        spread = np.max(np.linalg.norm(moved.positions - np.mean(moved.positions, axis=0), axis=1))
        if spread < pair_tol:
            centre = sphere_geometry.normalize_rows(np.mean(moved.positions, axis=0)[None, :])[0]
            found.append(SingularPoint(float(t), front.params, centre, angles.size))
            continue
        speeds = np.linalg.norm(moved.velocities[:, 0, :], axis=1)
        refined: List[Tuple[float, float]] = []
        for first, second in _pair_candidates(moved.positions, speeds, angles, pair_tol):

            def mismatch(pair: np.ndarray, t=t) -> np.ndarray:
                sample = _wave_at(front.at(sphere_geometry.angles_to_points(pair)), float(t))
                return sample.positions[0] - sample.positions[1]

            result = least_squares(
                mismatch, np.array([angles[first], angles[second]]), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
            )
            separation = abs(np.mod(result.x[0] - result.x[1] + np.pi, 2.0 * np.pi) - np.pi)
            if np.linalg.norm(result.fun) >= PAIR_RESIDUAL or separation <= PAIR_SEPARATION:
                continue
            pair = tuple(sorted(np.mod(result.x, 2.0 * np.pi)))
            if any(abs(pair[0] - a) < PAIR_MERGE and abs(pair[1] - b) < PAIR_MERGE for a, b in refined):
                continue
            refined.append((float(pair[0]), float(pair[1])))
            sample = _wave_at(front.at(sphere_geometry.angles_to_points(np.array(pair))), float(t))
            found.append(SingularPoint(float(t), sample.params, sample.positions[0]))
    logger.debug("symmetry set: {} points over {} wave fronts", len(found), t_grid.size)
    return SingularLocus("symmetry", tuple(found), t_grid, theta_step)


def hausdorff_distance(first: np.ndarray, second: np.ndarray) -> float:
    """
    Symmetric Hausdorff distance between two point sets.
    """
    first, second = np.atleast_2d(first), np.atleast_2d(second)
    if first.shape[0] == 0 and second.shape[0] == 0:
        return 0.0
    if first.shape[0] == 0 or second.shape[0] == 0:
        return float("inf")
    return float(max(directed_hausdorff(first, second)[0], directed_hausdorff(second, first)[0]))


@dataclass(frozen=True)
class LocusComparison:
    """
    A locus of a front compared with the same locus of its spherical dual.
    """

    kind: str
    distance: float
    tolerance: float
    front: SingularLocus
    dual: SingularLocus

    @property
    def agree(self) -> bool:
        """
        Within the Hausdorff tolerance.
        """
        return self.distance <= self.tolerance


def dual_locus_comparison(front: FrontSample, kind: str = "caustic", samples: int = T_SAMPLES) -> LocusComparison:
    """
    Compare the caustic or symmetry set of a front with that of its spherical
    dual, using wave-front parameters in [0, pi/2] for the front and the
    matching parameters pi/2 - t for the dual.
    """
    t_grid = np.linspace(0.0, np.pi / 2.0, samples)
    sampler = caustic_sample if kind == "caustic" else symmetry_sample
    front_locus = sampler(front, t_grid)
    dual_locus = sampler(spherical_dual_map(front), np.pi / 2.0 - t_grid)
    distance = hausdorff_distance(front_locus.positions, dual_locus.positions)
    tolerance = 2.0 * (front_locus.t_step + front_locus.theta_step)
    return LocusComparison(kind, distance, tolerance, front_locus, dual_locus)


@dataclass(frozen=True)
class MembershipReport:
    """
    Whether N belongs to a locus of the lifted front, decided from critical
    points, with the sampled-locus cross-check for curves.
    """

    member: bool
    reason: str
    critical: CriticalSet
    front_distance: Optional[float] = None
    front_agrees: Optional[bool] = None


def _cross_check(g: Integrand, kind: str, member: bool) -> Tuple[Optional[float], Optional[bool]]:
    if g.dim != 1:
        return None, None
    front = lift_integrand(g)
    sampler = caustic_sample if kind == "caustic" else symmetry_sample
    locus = sampler(front)
    distance = locus.distance_to(sphere_geometry.north_pole(3))
    return distance, (distance < FRONT_PROXIMITY) == member


def origin_in_caustic(
    g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES, cross_check: bool = True
) -> MembershipReport:
    """
    N lies on the caustic of the lifted front exactly when g has a degenerate
    critical point.
    """
    critical = find_critical_points(g, tolerances)
    if critical.non_isolated:
        member, reason = True, "every point is critical"
    else:
        degenerate = [p for p in critical if p.degenerate]
        member = bool(degenerate)
        reason = f"{len(degenerate)} degenerate critical points"
    distance, agrees = _cross_check(g, "caustic", member) if cross_check else (None, None)
    return MembershipReport(member, reason, critical, distance, agrees)


def origin_in_symmetry_set(
    g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES, cross_check: bool = True
) -> MembershipReport:
    """
    N lies on the symmetry set of the lifted front exactly when two distinct
    critical points of g share their value.
    """
    critical = find_critical_points(g, tolerances)
    if critical.non_isolated:
        member, reason = True, "every point is critical"
    else:
        values = np.sort([p.value for p in critical])
        gaps = np.diff(values)
        member = bool(np.any(gaps < tolerances.value))
        reason = f"smallest critical value gap {np.min(gaps):.3g}" if gaps.size else "fewer than two critical points"
    distance, agrees = _cross_check(g, "symmetry", member) if cross_check else (None, None)
    return MembershipReport(member, reason, critical, distance, agrees)


@dataclass(frozen=True)
class HeightCheck:
    """
    Residuals of the two candidate relations between g and the geodesic
    height of the lifted front over N.
    """

    direct_residual: float
    antipodal_residual: float

    @property
    def antipodal_holds(self) -> bool:
        """
        g(-theta) = tan(pi/2 - height(theta)) to rounding.
        """
        return self.antipodal_residual < 1e-9


def spherical_height_check(g: Integrand) -> HeightCheck:
    """
    Compare g(theta) and g(-theta) with tan(pi/2 - d(lift(theta), N)).
    """
    front = lift_integrand(g)
    pole = sphere_geometry.north_pole(front.positions.shape[1])
    height = sphere_geometry.geodesic_distance_rows(front.positions, pole[None, :])
    predicted = np.tan(np.pi / 2.0 - height)
    params = front.params
    scale = np.maximum(1.0, np.abs(predicted))
    direct = float(np.max(np.abs(g.values(params) - predicted) / scale))
    antipodal = float(np.max(np.abs(g.values(-params) - predicted) / scale))
    return HeightCheck(direct, antipodal)


@dataclass(frozen=True)
class EuclideanMembership:
    """
    Origin membership in the Euclidean caustic and symmetry set of the Wulff
    boundary, next to the spherical memberships of N.
    """

    caustic: bool
    symmetry: bool
    spherical_caustic: bool
    spherical_symmetry: bool
    hypothesis: bool = True

    @property
    def agree(self) -> bool:
        """
        Both memberships coincide for a strictly convex integrand.
        """
        return self.hypothesis and self.caustic == self.spherical_caustic and self.symmetry == self.spherical_symmetry


def euclidean_origin_membership(
    g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES
) -> EuclideanMembership:
    """
    Decide origin membership from the distance-squared function of the
    radially parametrised Wulff boundary, theta -> |r(theta)|^2 / 2.
    """
    convexity = classify(g, tolerances)
    if not convexity.is_strictly_convex:
        return EuclideanMembership(False, False, False, False, hypothesis=False)
    dual = dual_integrand(g, tolerances=tolerances, report=convexity)
    distance_squared = HalfSquare(AntipodalReciprocal(dual))
    euclidean = origin_in_caustic(distance_squared, tolerances, cross_check=False)
    euclidean_sym = origin_in_symmetry_set(distance_squared, tolerances, cross_check=False)
    spherical = origin_in_caustic(g, tolerances, cross_check=False)
    spherical_sym = origin_in_symmetry_set(g, tolerances, cross_check=False)
    return EuclideanMembership(euclidean.member, euclidean_sym.member, spherical.member, spherical_sym.member)
