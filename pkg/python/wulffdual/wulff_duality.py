# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Wulff shapes, support and radial functions, dual convex integrands and
convexity classification.

The dual integrand has two evaluation paths. The Andrews path inverts the
boundary map v -> g(v) v + grad g(v) by Newton's method and needs a strictly
convex integrand. The oracle path minimises g(v) / (u . v) directly and is
valid for any positive integrand.
"""

import functools
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import optimize  # type: ignore
from scipy.linalg import null_space  # type: ignore
from scipy.spatial import ConvexHull, cKDTree  # type: ignore

from wulffdual import common, sphere_geometry
from wulffdual.errors import GeometryError, NotConvexIntegrandError
from wulffdual.integrand_model import Integrand, Jet
from wulffdual.sphere_geometry import PolarPoint, SpherePoint

NEWTON_ITERATIONS = 60
NEWTON_STEP_CAP = 0.5
ANDREWS_RESIDUAL = 1e-13
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
GOLDEN_ITERATIONS = 200
CHUNK = 256
PROBE_RESOLUTIONS = (2**10, 2**11, 2**12)
PROBE_CIRCLES = np.array([[0.3, 0.5, 0.81], [0.9, -0.2, 0.4], [-0.1, 0.7, -0.7]])


def andrews_points(g: Integrand, points: np.ndarray, jet: Optional[Jet] = None) -> np.ndarray:
    """
    Row-wise g(v) v + grad g(v).
    """
    if jet is None:
        jet = g.jet(points)
    return jet.values[:, None] * points + jet.gradients


def andrews_boundary(g: Integrand, theta: SpherePoint) -> np.ndarray:
    """
    The boundary point g(theta) theta + grad g(theta) of the Wulff shape.
    """
    return andrews_points(g, theta.coords[None, :])[0]


def chart_hessians(frames: np.ndarray, hessians: np.ndarray) -> np.ndarray:
    """
    Restrict ambient Hessians to tangent frames, shape (m, n, n).
    """
    restricted = np.einsum("mid,mde,mje->mij", frames, hessians, frames)
    return 0.5 * (restricted + np.swapaxes(restricted, 1, 2))


def solve_batched(matrices: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Solve (m, n, n) systems, falling back to the pseudo-inverse when singular.
    """
    det = np.abs(np.linalg.det(matrices))
    scale = np.max(np.abs(matrices), axis=(1, 2)) ** matrices.shape[1]
    regular = det > 1e-12 * np.maximum(scale, 1e-300)
    out = np.empty_like(rhs)
    if np.any(regular):
        out[regular] = np.linalg.solve(matrices[regular], rhs[regular][..., None])[..., 0]
    if np.any(~regular):
        out[~regular] = np.einsum("mij,mj->mi", np.linalg.pinv(matrices[~regular]), rhs[~regular])
    return out


class RadialSolution(NamedTuple):
    """
    Radius of the Wulff boundary in each direction with the outer normal
    (minimising constraint direction) there.
    """

    radii: np.ndarray
    normals: np.ndarray
    multiple: np.ndarray


class AndrewsInverter:
    """
    Newton inversion of the boundary map of a strictly convex integrand:
    for each direction u find v with g(v) v + grad g(v) a positive multiple of u.
    """

    def __init__(self, g: Integrand):
        self.g = g
        seeds = g.grid_points()
        self.seeds = seeds
        directions = sphere_geometry.normalize_rows(andrews_points(g, seeds))
        self.tree = cKDTree(directions)

    def solve(self, targets: np.ndarray) -> Tuple[np.ndarray, np.ndarray, Jet]:
        """
        Normals v, boundary points and the integrand jet at v.
        """
        targets = np.atleast_2d(targets)
        normals = self.seeds[self.tree.query(targets)[1]].copy()
        target_frames = sphere_geometry.tangent_frames(targets)
        active = np.ones(targets.shape[0], dtype=bool)
        jet = Jet(*(np.array(part, dtype=float) for part in self.g.jet(normals)))
        for _ in range(NEWTON_ITERATIONS):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            sub = Jet(jet.values[idx], jet.gradients[idx], jet.hessians[idx])
            v = normals[idx]
            u = targets[idx]
            boundary = andrews_points(self.g, v, sub)
            along = np.sum(boundary * u, axis=1)
            residual = np.einsum("mnd,md->mn", target_frames[idx], boundary - along[:, None] * u)
            size = np.linalg.norm(boundary, axis=1)
            converged = np.linalg.norm(residual, axis=1) <= ANDREWS_RESIDUAL * size
            v_frames = sphere_geometry.tangent_frames(v)
            linear = sub.hessians + sub.values[:, None, None] * sphere_geometry.tangent_projectors(v)
            system = np.einsum("mid,mde,mje->mij", target_frames[idx], linear, v_frames)
            step = -solve_batched(system, residual)
            norm = np.linalg.norm(step, axis=1, keepdims=True)
            step *= np.minimum(1.0, NEWTON_STEP_CAP / np.maximum(norm, 1e-300))
            converged |= norm[:, 0] < 1e-15
            moving = idx[~converged]
            if moving.size:
                normals[moving] = sphere_geometry.exp_rows(
                    v[~converged], np.einsum("mn,mnd->md", step[~converged], v_frames[~converged])
                )
                fresh = self.g.jet(normals[moving])
                jet.values[moving] = fresh.values
                jet.gradients[moving] = fresh.gradients
                jet.hessians[moving] = fresh.hessians
            active[idx[converged]] = False
        if np.any(active):
            logger.warning("Andrews inversion did not converge for {} directions", int(np.sum(active)))
        boundary = andrews_points(self.g, normals, jet)
        if np.any(np.sum(boundary * targets, axis=1) <= 0.0):
            logger.warning("Andrews inversion landed on the wrong side for some directions")
        return normals, boundary, jet


def _circle_oracle(g: Integrand, targets: np.ndarray, tolerances: common.Tolerances) -> RadialSolution:
    """
    Grid minimisation of g(v) / (u . v) on the circle with vectorised
    golden-section refinement in the angle.
    """
    grid_points = g.grid_points()
    grid_angles = sphere_geometry.points_to_angles(grid_points)
    spacing = 2.0 * np.pi / grid_points.shape[0]
    grid_values = g.values(grid_points)
    count = targets.shape[0]
    best_angle = np.empty(count)
    best_ratio = np.empty(count)
    multiple = np.zeros(count, dtype=bool)
    for start in range(0, count, CHUNK):
        u = targets[start : start + CHUNK]
        dots = u @ grid_points.T
        ratio = np.where(dots > 1e-12, grid_values[None, :] / np.where(dots > 1e-12, dots, 1.0), np.inf)
        best = np.argmin(ratio, axis=1)
        low = ratio[np.arange(u.shape[0]), best]
        local = (ratio <= np.roll(ratio, 1, axis=1)) & (ratio <= np.roll(ratio, -1, axis=1))
        near = local & (ratio - low[:, None] <= tolerances.multiplicity_value)
        offset = np.abs(np.mod(grid_angles[None, :] - grid_angles[best][:, None] + np.pi, 2.0 * np.pi) - np.pi)
        spread = np.max(np.where(near, offset, 0.0), axis=1)
        multiple[start : start + CHUNK] = spread > tolerances.multiplicity_spread
        best_angle[start : start + CHUNK] = grid_angles[best]
        best_ratio[start : start + CHUNK] = low

    def ratio_at(angles: np.ndarray) -> np.ndarray:
        v = sphere_geometry.angles_to_points(angles)
        return g.values(v) / np.sum(v * targets, axis=1)

    low, high = best_angle - spacing, best_angle + spacing
    inner_low = high - GOLDEN * (high - low)
    inner_high = low + GOLDEN * (high - low)
    f_low, f_high = ratio_at(inner_low), ratio_at(inner_high)
    for _ in range(GOLDEN_ITERATIONS):
        if np.max(high - low) <= tolerances.refine * 1e-2:
            break
        left = f_low < f_high
        high = np.where(left, inner_high, high)
        low = np.where(left, low, inner_low)
        probe = np.where(left, high - GOLDEN * (high - low), low + GOLDEN * (high - low))
        f_probe = ratio_at(probe)
        inner_high, f_high, inner_low, f_low = (
            np.where(left, inner_low, probe),
            np.where(left, f_low, f_probe),
            np.where(left, probe, inner_high),
            np.where(left, f_probe, f_high),
        )
    angles = 0.5 * (low + high)
    refined = ratio_at(angles)
    improved = refined <= best_ratio
    angles = np.where(improved, angles, best_angle)
    radii = np.where(improved, refined, best_ratio)
    if np.any(multiple):
        logger.debug("radial minimiser not unique in {} directions", int(np.sum(multiple)))
    return RadialSolution(radii, sphere_geometry.angles_to_points(angles), multiple)


def _sphere_oracle(g: Integrand, targets: np.ndarray, tolerances: common.Tolerances) -> RadialSolution:
    """
    Grid minimisation of g(v) / (u . v) on S^2 refined with Nelder-Mead in a
    tangent chart.
    """
    grid_points = g.grid_points()
    grid_values = g.values(grid_points)
    count = targets.shape[0]
    radii = np.empty(count)
    normals = np.empty_like(targets)
    for start in range(0, count, CHUNK):
        u = targets[start : start + CHUNK]
        dots = u @ grid_points.T
        ratio = np.where(dots > 1e-12, grid_values[None, :] / np.where(dots > 1e-12, dots, 1.0), np.inf)
        best = np.argmin(ratio, axis=1)
        for offset, (target, seed) in enumerate(zip(u, grid_points[best])):
            frame = sphere_geometry.tangent_frames(seed[None, :])[0]

            def objective(xi: np.ndarray, seed=seed, frame=frame, target=target) -> float:
                v = seed + xi @ frame
                v = v / np.linalg.norm(v)
                dot = float(v @ target)
                if dot <= 1e-12:
                    return np.inf
                return float(g.values(v[None, :])[0]) / dot

            result = optimize.minimize(
                objective,
                np.zeros(2),
                method="Nelder-Mead",
                options={"xatol": tolerances.refine * 1e-2, "fatol": 1e-15, "maxiter": 4000},
            )
            v = seed + result.x @ frame
            normals[start + offset] = v / np.linalg.norm(v)
            radii[start + offset] = min(float(result.fun), float(ratio[offset, best[offset]]))
    return RadialSolution(radii, normals, np.zeros(count, dtype=bool))


def radial_minimum(
    g: Integrand, directions: np.ndarray, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES
) -> RadialSolution:
    """
    min over v with u . v > 0 of g(v) / (u . v), the radial function of the
    Wulff shape, together with the minimising normal.
    """
    directions = sphere_geometry.normalize_rows(np.atleast_2d(directions))
    if g.dim == 1:
        return _circle_oracle(g, directions, tolerances)
    return _sphere_oracle(g, directions, tolerances)


def andrews_radial(g: Integrand, directions: np.ndarray) -> RadialSolution:
    """
    Radial function of the Wulff shape of a strictly convex integrand through
    the inverted boundary map.
    """
    directions = sphere_geometry.normalize_rows(np.atleast_2d(directions))
    normals, boundary, _ = _inverter(g).solve(directions)
    radii = np.sum(boundary * directions, axis=1)
    return RadialSolution(radii, normals, np.zeros(directions.shape[0], dtype=bool))


@functools.lru_cache(maxsize=32)
def _inverter(g: Integrand) -> AndrewsInverter:
    return AndrewsInverter(g)


class DualIntegrand(Integrand):
    """
    delta(theta) = 1 / r(-theta), where r is the radial function of the Wulff
    shape of the base integrand.
    """

    def __init__(self, base: Integrand, method: str, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES):
        super().__init__(base.dim, base.grid)
        if method not in ("andrews", "oracle"):
            raise ValueError(f"unknown dual method {method!r}")
        self.base = base
        self.method = method
        self.tolerances = tolerances
        self.exact_derivatives = method == "andrews" and base.exact_derivatives

    def solve(self, points: np.ndarray) -> RadialSolution:
        """
        Radial data of the base Wulff shape in the antipodal directions.
        """
        targets = -np.atleast_2d(points)
        if self.method == "andrews":
            return andrews_radial(self.base, targets)
        return radial_minimum(self.base, targets, self.tolerances)

    def values(self, points: np.ndarray) -> np.ndarray:
        return 1.0 / self.solve(points).radii

    def jet(self, points: np.ndarray) -> Jet:
        points = np.atleast_2d(points)
        targets = -points
        if self.method == "andrews":
            normals, boundary, base_jet = _inverter(self.base).solve(targets)
            radii = np.sum(boundary * targets, axis=1)
        else:
            solution = radial_minimum(self.base, targets, self.tolerances)
            normals, radii = solution.normals, solution.radii
            base_jet = self.base.jet(normals)
        values = 1.0 / radii
        base_values = base_jet.values
        gradients = sphere_geometry.project_tangent(points, -normals / base_values[:, None])

        theta_frames = sphere_geometry.tangent_frames(points)
        v_frames = sphere_geometry.tangent_frames(normals)
        linear = base_jet.hessians + base_values[:, None, None] * sphere_geometry.tangent_projectors(normals)
        system = np.einsum("mid,mde,mje->mij", theta_frames, linear, v_frames)
        dim = self.dim
        response = np.stack(
            [-radii[:, None] * solve_batched(system, np.broadcast_to(np.eye(dim)[k], (points.shape[0], dim))) for k in range(dim)],
            axis=2,
        )
        grad_chart = np.einsum("mnd,md->mn", v_frames, base_jet.gradients)
        # derivative of -v / g(v) along the v frame, shape (m, d, n)
        pushed = -np.swapaxes(v_frames, 1, 2) / base_values[:, None, None] + normals[:, :, None] * grad_chart[
            :, None, :
        ] / (base_values**2)[:, None, None]
        coupling = np.einsum("mid,mdn,mnj->mij", theta_frames, pushed, response)
        chart = 0.5 * (coupling + np.swapaxes(coupling, 1, 2)) - values[:, None, None] * np.eye(dim)[None, :, :]
        hessians = np.einsum("mid,mij,mje->mde", theta_frames, chart, theta_frames)
        return Jet(values, gradients, hessians)


@dataclass(frozen=True)
class Bitangent:
    """
    A vertex of the Wulff shape whose normal cone is the arc from ``start``
    counter-clockwise over ``length``.
    """

    start: float
    length: float
    vertex: np.ndarray = field(compare=False)


class ConvexifiedIntegrand(Integrand):
    """
    Support function of the Wulff shape of the base integrand, computed from
    the convex hull of the points v / g(v) (the polar body).
    """

    def __init__(self, base: Integrand):
        super().__init__(base.dim, base.grid)
        self.base = base
        self.exact_derivatives = base.exact_derivatives
        points = base.grid_points()
        polar = points / base.values(points)[:, None]
        self.hull = ConvexHull(polar)
        if self.dim == 1:
            self.bitangents = self._circle_bitangents(points)
            logger.debug("convexify found {} bitangent vertices", len(self.bitangents))
        else:
            self._setup_facets(points)

    def _circle_bitangents(self, points: np.ndarray) -> List[Bitangent]:
        count = points.shape[0]
        spacing = 2.0 * np.pi / count
        angles = sphere_geometry.points_to_angles(points)
        found = []
        for first, second in self.hull.simplices:
            gap = (second - first) % count
            if gap in (1, count - 1):
                continue
            if gap > count // 2:
                first, second = second, first
                gap = count - gap
            start = angles[first]
            end = start + gap * spacing

            def mismatch(pair: np.ndarray) -> np.ndarray:
                ends = sphere_geometry.angles_to_points(pair)
                boundary = andrews_points(self.base, ends)
                return boundary[0] - boundary[1]

            seed = np.array([start, end])
            vertex = None
            if np.linalg.norm(mismatch(seed)) > 1e-12:
                result = optimize.root(mismatch, seed, method="hybr")
                close = np.all(np.abs(result.x - seed) <= 2.0 * spacing)
                if result.success and close and np.linalg.norm(mismatch(result.x)) < 1e-10:
                    seed = result.x
                    vertex = andrews_points(self.base, sphere_geometry.angles_to_points(seed[:1]))[0]
            else:
                vertex = andrews_points(self.base, sphere_geometry.angles_to_points(seed[:1]))[0]
            if vertex is None:
                normals = sphere_geometry.angles_to_points(seed)
                vertex = np.linalg.solve(normals, self.base.values(normals))
                logger.debug("bitangent at {:.4f} kept unrefined", start)
            found.append(Bitangent(float(np.mod(seed[0], 2.0 * np.pi)), float(seed[1] - seed[0]), vertex))
        return found

    def _setup_facets(self, points: np.ndarray) -> None:
        equations = self.hull.equations
        self.facet_vectors = equations[:, :-1] / (-equations[:, -1])[:, None]
        corners = points[self.hull.simplices]
        spans = np.max(
            np.stack(
                [
                    sphere_geometry.geodesic_distance_rows(corners[:, a], corners[:, b])
                    for a, b in ((0, 1), (1, 2), (2, 0))
                ],
                axis=1,
            ),
            axis=1,
        )
        reach = 2.0 * sphere_geometry.icosphere(self.grid.icosphere_level).max_edge_angle
        self.local_facets = spans <= reach

    def _planes(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        For each point, whether the base integrand applies and otherwise the
        vertex whose support function applies.
        """
        count = points.shape[0]
        local = np.ones(count, dtype=bool)
        vertices = np.zeros_like(points)
        if self.dim == 1:
            angles = sphere_geometry.points_to_angles(points)
            for bitangent in self.bitangents:
                inside = np.mod(angles - bitangent.start, 2.0 * np.pi) <= bitangent.length
                local &= ~inside
                vertices[inside] = bitangent.vertex
        else:
            for start in range(0, count, CHUNK):
                scores = points[start : start + CHUNK] @ self.facet_vectors.T
                best = np.argmax(scores, axis=1)
                local[start : start + CHUNK] = self.local_facets[best]
                vertices[start : start + CHUNK] = self.facet_vectors[best]
        return local, vertices

    def jet(self, points: np.ndarray) -> Jet:
        points = np.atleast_2d(points)
        local, vertices = self._planes(points)
        values = np.empty(points.shape[0])
        gradients = np.empty_like(points)
        hessians = np.empty((points.shape[0], points.shape[1], points.shape[1]))
        if np.any(local):
            base = self.base.jet(points[local])
            values[local], gradients[local], hessians[local] = base
        flat = ~local
        if np.any(flat):
            support = np.sum(points[flat] * vertices[flat], axis=1)
            values[flat] = support
            gradients[flat] = sphere_geometry.project_tangent(points[flat], vertices[flat])
            hessians[flat] = -support[:, None, None] * sphere_geometry.tangent_projectors(points[flat])
        return Jet(values, gradients, hessians)

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        local, vertices = self._planes(points)
        values = np.sum(points * vertices, axis=1)
        if np.any(local):
            values[local] = self.base.values(points[local])
        return values


@dataclass(frozen=True)
class ConvexityReport:
    """
    Convexity and strict convexity verdicts with the tightest witnesses.
    """

    is_convex_integrand: bool
    is_strictly_convex: bool
    witness: SpherePoint
    margin: float
    curvature_witness: SpherePoint
    curvature_margin: float
    method: str

    def __post_init__(self) -> None:
        if self.is_strictly_convex and not self.is_convex_integrand:
            raise ValueError("strict convexity implies convexity")


def principal_curvatures(g: Integrand, points: np.ndarray, jet: Optional[Jet] = None) -> np.ndarray:
    """
    Principal curvatures of the inverted graph {theta / g(theta)} at each
    point, shape (m, n).
    """
    if jet is None:
        jet = g.jet(points)
    frames = sphere_geometry.tangent_frames(points)
    dim = frames.shape[1]
    hess = chart_hessians(frames, jet.hessians)
    grad = np.einsum("mnd,md->mn", frames, jet.gradients)
    values = jet.values
    boundary = np.sqrt(values**2 + np.sum(grad**2, axis=1))
    second = (hess + values[:, None, None] * np.eye(dim)) / (values * boundary)[:, None, None]
    metric = np.eye(dim)[None, :, :] / (values**2)[:, None, None] + grad[:, :, None] * grad[:, None, :] / (
        values**4
    )[:, None, None]
    return np.sort(np.linalg.eigvals(np.linalg.solve(metric, second)).real, axis=1)


def classify(g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES) -> ConvexityReport:
    """
    Decide whether g is a convex integrand and whether it is strictly convex.
    """
    points = g.grid_points()
    jet = g.jet(points)
    if g.exact_derivatives:
        frames = sphere_geometry.tangent_frames(points)
        width = chart_hessians(frames, jet.hessians) + jet.values[:, None, None] * np.eye(g.dim)
        margins = np.linalg.eigvalsh(width)[:, 0]
        worst = int(np.argmin(margins))
        margin = float(margins[worst])
        convex = margin > -tolerances.convex_fast
        method = "curvature"
    else:
        gaps = jet.values - ConvexifiedIntegrand(g).values(points)
        worst = int(np.argmax(gaps))
        margin = -float(gaps[worst])
        convex = gaps[worst] < tolerances.convex
        method = "hull"
    curvatures = principal_curvatures(g, points, jet)[:, 0]
    tight = int(np.argmin(curvatures))
    strict = bool(convex and curvatures[tight] > tolerances.strict_curvature)
    logger.debug(
        "classified {}: convex={} (margin {:.3g}), strict={} (curvature {:.3g})",
        type(g).__name__,
        convex,
        margin,
        strict,
        curvatures[tight],
    )
    return ConvexityReport(
        bool(convex),
        strict,
        SpherePoint(points[worst]),
        margin,
        SpherePoint(points[tight]),
        float(curvatures[tight]),
        method,
    )


def dual_integrand(
    g: Integrand,
    method: str = "auto",
    tolerances: common.Tolerances = common.DEFAULT_TOLERANCES,
    report: Optional[ConvexityReport] = None,
) -> DualIntegrand:
    """
    The dual convex integrand of a convex integrand.
    """
    if report is None:
        report = classify(g, tolerances)
    if not report.is_convex_integrand:
        raise NotConvexIntegrandError(report.witness.coords, report.margin)
    if method == "auto":
        method = "andrews" if report.is_strictly_convex else "oracle"
    elif method == "andrews" and not report.is_strictly_convex:
        raise ValueError("the Andrews path needs a strictly convex integrand")
    logger.debug("dual of {} through the {} path", type(g).__name__, method)
    return DualIntegrand(g, method, tolerances)


@dataclass(frozen=True)
class WulffBody:
    """
    Sampled Wulff shape: boundary radius and support value on the grid.
    """

    generator: Integrand
    directions: np.ndarray = field(compare=False)
    radii: np.ndarray = field(compare=False)
    normals: np.ndarray = field(compare=False)
    support: np.ndarray = field(compare=False)
    convexified: "ConvexifiedIntegrand" = field(compare=False)
    tolerances: common.Tolerances = common.DEFAULT_TOLERANCES

    @property
    def boundary(self) -> np.ndarray:
        """
        Sampled boundary points.
        """
        return self.directions * self.radii[:, None]

    def convexity_residual(self) -> float:
        """
        Largest excess of a sampled boundary point over the support value, in
        any sampled direction.
        """
        boundary = self.boundary
        excess = 0.0
        for start in range(0, self.directions.shape[0], CHUNK):
            reach = np.max(self.directions[start : start + CHUNK] @ boundary.T, axis=1)
            excess = max(excess, float(np.max(reach - self.support[start : start + CHUNK])))
        return excess


def build_wulff(g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES) -> WulffBody:
    """
    Sample the Wulff shape of a positive integrand.
    """
    directions = g.grid_points()
    report = classify(g, tolerances)
    if report.is_strictly_convex:
        solution = andrews_radial(g, directions)
    else:
        solution = radial_minimum(g, directions, tolerances)
    convexified = ConvexifiedIntegrand(g)
    body = WulffBody(
        g,
        directions,
        solution.radii,
        solution.normals,
        convexified.values(directions),
        convexified,
        tolerances,
    )
    logger.debug("Wulff shape radii in [{:.6g}, {:.6g}]", np.min(body.radii), np.max(body.radii))
    return body


def radial_function(body: WulffBody, u: SpherePoint) -> float:
    """
    Radius of the Wulff boundary in direction u.
    """
    return float(radial_minimum(body.generator, u.coords[None, :], body.tolerances).radii[0])


def support_function(body: WulffBody, u: SpherePoint) -> float:
    """
    Support value max over the body of x . u.
    """
    return float(body.convexified.values(u.coords[None, :])[0])


def pedal_point(g: Integrand, theta: SpherePoint) -> PolarPoint:
    """
    Foot of the perpendicular from the origin to the tangent hyperplane of the
    Wulff boundary at the boundary point g(theta) theta + grad g(theta).
    """
    point = theta.coords[None, :]
    jet = g.jet(point)
    boundary = andrews_points(g, point, jet)[0]
    frame = sphere_geometry.tangent_frames(point)[0]
    linear = jet.hessians[0] + jet.values[0] * sphere_geometry.tangent_projectors(point)[0]
    tangents = linear @ frame.T
    normal_space = null_space(tangents.T)
    if normal_space.shape[1] != 1:
        raise GeometryError("the Wulff boundary has no tangent hyperplane here")
    normal = normal_space[:, 0]
    if normal @ boundary < 0.0:
        normal = -normal
    return PolarPoint(SpherePoint(normal), float(normal @ boundary))


def convexify(g: Integrand) -> ConvexifiedIntegrand:
    """
    The unique convex integrand with the same Wulff shape as g.
    """
    return ConvexifiedIntegrand(g)


@dataclass(frozen=True)
class SmoothnessReport:
    """
    Largest one-sided slope mismatch of the dual at several resolutions.
    """

    resolutions: Tuple[int, ...]
    discrepancies: Tuple[float, ...]
    ratios: Tuple[float, ...]
    trend: str
    method: str

    @property
    def max_gradient_jump(self) -> float:
        """
        Discrepancy at the finest resolution.
        """
        return self.discrepancies[-1]

    @property
    def smooth(self) -> bool:
        """
        The discrepancy vanishes with the grid step.
        """
        return self.trend in ("decreasing", "negligible")


def _slope_mismatch(values: np.ndarray, step: float) -> float:
    forward = (np.roll(values, -1) - values) / step
    backward = (values - np.roll(values, 1)) / step
    return float(np.max(np.abs(forward - backward)))


def dual_smoothness_probe(
    g: Integrand,
    resolutions: Tuple[int, ...] = PROBE_RESOLUTIONS,
    tolerances: common.Tolerances = common.DEFAULT_TOLERANCES,
) -> SmoothnessReport:
    """
    Sample the dual along closed curves at increasing resolution and measure
    the mismatch of forward and backward difference slopes.
    """
    dual = dual_integrand(g, tolerances=tolerances)
    discrepancies = []
    for samples in resolutions:
        step = 2.0 * np.pi / samples
        if g.dim == 1:
            curves = [sphere_geometry.angles_to_points(step * np.arange(samples))]
        else:
            curves = [sphere_geometry.great_circle(normal, samples)[0] for normal in PROBE_CIRCLES]
        discrepancies.append(max(_slope_mismatch(dual.values(curve), step) for curve in curves))
        logger.debug("dual slope mismatch at {} samples: {:.3e}", samples, discrepancies[-1])
    ratios = tuple(b / a if a > 0.0 else 0.0 for a, b in zip(discrepancies, discrepancies[1:]))
    if discrepancies[-1] < 1e-9:
        trend = "negligible"
    elif all(r < 0.75 for r in ratios):
        trend = "decreasing"
    elif all(0.8 <= r <= 1.25 for r in ratios) and discrepancies[-1] > 0.01:
        trend = "stable"
    else:
        trend = "inconclusive"
    return SmoothnessReport(tuple(resolutions), tuple(discrepancies), ratios, trend, dual.method)


def involution_residual(
    g: Integrand,
    tolerances: common.Tolerances = common.DEFAULT_TOLERANCES,
    points: Optional[np.ndarray] = None,
) -> float:
    """
    Sup-norm distance between the dual of the dual and g, on the grid unless
    other points are given.
    """
    dual = dual_integrand(g, tolerances=tolerances)
    double = dual_integrand(dual, tolerances=tolerances)
    if points is None:
        points = g.grid_points()
    return float(np.max(np.abs(double.values(points) - g.values(points))))


def dual_is_strictly_convex(g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES) -> bool:
    """
    Whether the dual of g is again strictly convex.
    """
    return classify(dual_integrand(g, tolerances=tolerances), tolerances).is_strictly_convex


def boundary_polylines(g: Integrand, body: Optional[WulffBody] = None) -> Dict[str, np.ndarray]:
    """
    The inverted graph, the Wulff boundary and the graph of a circle integrand.
    """
    if g.dim != 1:
        raise ValueError("boundary polylines are drawn for circle integrands")
    if body is None:
        body = build_wulff(g)
    points = g.grid_points()
    values = g.values(points)
    return {
        "inverted graph": -points / values[:, None],
        "Wulff boundary": body.boundary,
        "graph": points * values[:, None],
    }
