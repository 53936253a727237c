# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Critical points, Morse indices and stability of integrands, and the suites
checking how they transfer to the dual integrand.
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd  # type: ignore
from loguru import logger
from scipy.sparse import coo_matrix  # type: ignore
from scipy.sparse.csgraph import connected_components  # type: ignore

from wulffdual import common, sphere_geometry
from wulffdual.integrand_model import AntipodalReciprocal, Integrand
from wulffdual.sphere_geometry import SpherePoint
from wulffdual.wulff_duality import (
    andrews_points,
    chart_hessians,
    classify,
    dual_integrand,
    solve_batched,
)

NEWTON_ITERATIONS = 100
NEWTON_STEP = 1e-10
NEWTON_STEP_CAP = 0.2
NON_ISOLATED_FACTOR = 10
NON_ISOLATED_SHARE = 0.01
ANCHOR_CELLS = 1.5


@dataclass(frozen=True)
class CriticalPoint:
    """
    A refined zero of the gradient with its second-order data.
    """

    location: SpherePoint
    value: float
    eigenvalues: Tuple[float, ...]
    index: int
    degenerate: bool
    residual: float

    @property
    def angle(self) -> float:
        """
        Angle of the location on the circle.
        """
        return self.location.angle


@dataclass(frozen=True)
class NewtonFailure:
    """
    A seed whose refinement did not reach the gradient tolerance.
    """

    seed: SpherePoint
    residual: float


@dataclass(frozen=True)
class CriticalSet:
    """
    Merged critical points sorted by value, with the seeds that failed.
    """

    points: Tuple[CriticalPoint, ...]
    failures: Tuple[NewtonFailure, ...] = ()
    non_isolated: bool = False
    seeds: int = 0

    def __iter__(self) -> Iterator[CriticalPoint]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, item: int) -> CriticalPoint:
        return self.points[item]

    @property
    def locations(self) -> np.ndarray:
        """
        Locations as rows.
        """
        if not self.points:
            return np.zeros((0, 0))
        return np.array([p.location.coords for p in self.points])

    def near(self, target: np.ndarray, tolerance: float) -> List[CriticalPoint]:
        """
        Critical points within geodesic distance ``tolerance`` of a target.
        """
        if not self.points:
            return []
        distances = sphere_geometry.geodesic_distance_rows(self.locations, np.asarray(target)[None, :])
        return [p for p, d in zip(self.points, distances) if d <= tolerance]


def _seed_mask(g: Integrand, gradient_norms: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Grid local minima of the gradient norm, and the strict ones.
    """
    if g.dim == 1:
        before, after = np.roll(gradient_norms, 1), np.roll(gradient_norms, -1)
        minima = (gradient_norms <= before) & (gradient_norms <= after)
        strict = (gradient_norms < before) & (gradient_norms < after)
        return minima, strict
    mesh = sphere_geometry.icosphere(g.grid.icosphere_level)
    minima = mesh.ring_minima(gradient_norms)
    strict = minima & ~_ring_ties(mesh, gradient_norms)
    return minima, strict


def _ring_ties(mesh: sphere_geometry.Icosphere, values: np.ndarray) -> np.ndarray:
    first, second = mesh.edges[:, 0], mesh.edges[:, 1]
    tie = values[first] == values[second]
    marked = np.zeros(values.shape[0], dtype=bool)
    marked[first[tie]] = True
    marked[second[tie]] = True
    return marked


def _newton(g: Integrand, seeds: np.ndarray, tolerances: common.Tolerances) -> Tuple[np.ndarray, np.ndarray]:
    """
    Chart Newton iteration on the gradient from every seed at once.
    """
    points = np.array(seeds, dtype=float)
    active = np.ones(points.shape[0], dtype=bool)
    for _ in range(NEWTON_ITERATIONS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        jet = g.jet(points[idx])
        frames = sphere_geometry.tangent_frames(points[idx])
        grad = np.einsum("mnd,md->mn", frames, jet.gradients)
        hess = chart_hessians(frames, jet.hessians)
        step = -solve_batched(hess, grad)
        norm = np.linalg.norm(step, axis=1, keepdims=True)
        step *= np.minimum(1.0, NEWTON_STEP_CAP / np.maximum(norm, 1e-300))
        small = np.linalg.norm(grad, axis=1) < tolerances.newton_gradient
        done = small & (norm[:, 0] < NEWTON_STEP)
        moving = ~done
        points[idx[moving]] = sphere_geometry.exp_rows(
            points[idx[moving]], np.einsum("mn,mnd->md", step[moving], frames[moving])
        )
        active[idx[done]] = False
    residuals = np.linalg.norm(g.gradients(points), axis=1)
    return points, residuals


def _second_order(g: Integrand, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    jet = g.jet(points)
    frames = sphere_geometry.tangent_frames(points)
    return jet.values, np.linalg.eigvalsh(chart_hessians(frames, jet.hessians))


def find_critical_points(g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES) -> CriticalSet:
    """
    Seed Newton refinements at grid minima of the gradient norm, merge the
    converged points and sort them by value.
    """
    grid = g.grid_points()
    jet = g.jet(grid)
    norms = np.linalg.norm(jet.gradients, axis=1)
    spacing = g.grid.spacing(g.dim)
    curvature = float(np.max(np.abs(jet.hessians)))
    seed_tol = tolerances.seed_factor * spacing * curvature + 1e-9
    minima, strict = _seed_mask(g, norms)
    chosen = minima & (norms < seed_tol)
    seeds = grid[chosen]
    logger.debug("{} critical point seeds below {:.3g}", seeds.shape[0], seed_tol)
    if seeds.shape[0] == 0:
        return CriticalSet((), (), False, 0)

    refined, residuals = _newton(g, seeds, tolerances)
    converged = residuals < tolerances.newton_gradient
    failures = tuple(
        NewtonFailure(SpherePoint(seed), float(res)) for seed, res in zip(seeds[~converged], residuals[~converged])
    )
    for failure in failures:
        logger.warning("critical point seed did not converge: residual {:.3g}", failure.residual)

    kept: List[int] = []
    candidates = np.flatnonzero(converged)
    for i in candidates[np.argsort(residuals[candidates], kind="stable")]:
        if kept:
            distances = sphere_geometry.geodesic_distance_rows(refined[kept], refined[i][None, :])
            if np.min(distances) <= tolerances.merge:
                continue
        kept.append(int(i))
    locations = refined[kept]
    values, eigenvalues = _second_order(g, locations) if kept else (np.zeros(0), np.zeros((0, g.dim)))
    points = [
        CriticalPoint(
            SpherePoint(loc),
            float(val),
            tuple(float(e) for e in eig),
            int(np.sum(eig < -tolerances.degenerate)),
            bool(np.any(np.abs(eig) < tolerances.degenerate)),
            float(res),
        )
        for loc, val, eig, res in zip(locations, values, eigenvalues, residuals[kept])
    ]
    points.sort(key=lambda p: p.value)
    strict_count = int(np.sum(strict & chosen))
    non_isolated = len(points) > NON_ISOLATED_FACTOR * max(1, strict_count)
    non_isolated = non_isolated or len(points) > NON_ISOLATED_SHARE * grid.shape[0]
    if non_isolated:
        logger.debug("{} distinct critical points from {} strict seeds: not isolated", len(points), strict_count)
    return CriticalSet(tuple(points), failures, bool(non_isolated), int(seeds.shape[0]))


@dataclass(frozen=True)
class StabilityReport:
    """
    Stability verdict: all critical points non-degenerate and their values
    pairwise distinct.
    """

    critical: CriticalSet
    all_nondegenerate: bool
    values_distinct: bool
    min_value_gap: float
    reason: str

    @property
    def stable(self) -> bool:
        """
        Non-degenerate with distinct values.
        """
        return self.all_nondegenerate and self.values_distinct


def is_stable(g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES) -> StabilityReport:
    """
    Decide stability from the critical points of g.
    """
    critical = find_critical_points(g, tolerances)
    if critical.non_isolated:
        return StabilityReport(critical, False, False, 0.0, "non-isolated critical set (not Morse)")
    values = np.sort([p.value for p in critical])
    gap = float(np.min(np.diff(values))) if values.size > 1 else float("inf")
    if critical.failures:
        logger.debug("{} seeds did not converge and are left out", len(critical.failures))
    nondegenerate = not any(p.degenerate for p in critical)
    distinct = gap >= tolerances.value
    if not nondegenerate:
        reason = "degenerate critical point"
    elif not distinct:
        reason = f"repeated critical value (gap {gap:.3g})"
    else:
        reason = "stable"
    return StabilityReport(critical, nondegenerate, distinct, gap, reason)


def critical_table(points: CriticalSet) -> pd.DataFrame:
    """
    One row per critical point: location, value, eigenvalues, index, degenerate.
    """
    return pd.DataFrame(
        {
            "location": [" ".join(f"{c:.12g}" for c in p.location.coords) for p in points],
            "value": [p.value for p in points],
            "eigenvalues": [" ".join(f"{e:.6g}" for e in p.eigenvalues) for p in points],
            "index": [p.index for p in points],
            "degenerate": [p.degenerate for p in points],
        },
        columns=["location", "value", "eigenvalues", "index", "degenerate"],
    )


@dataclass(frozen=True)
class PointPairing:
    """
    A critical point of the integrand matched with one of its dual.
    """

    source: CriticalPoint
    partner: CriticalPoint
    product: float


@dataclass(frozen=True)
class IndexDualityReport:
    """
    Outcome of matching critical points across the duality.
    """

    passed: bool
    hypothesis: bool
    reason: str
    pairings: Tuple[PointPairing, ...] = ()
    unmatched: Tuple[CriticalPoint, ...] = ()
    dual_unmatched: Tuple[CriticalPoint, ...] = ()


def _pair_points(
    g: Integrand,
    dual: Integrand,
    source: CriticalSet,
    target: CriticalSet,
    tolerances: common.Tolerances,
    antipodal: bool = True,
    complement: bool = True,
) -> Tuple[List[PointPairing], List[CriticalPoint], List[CriticalPoint], List[str]]:
    problems = []
    pairings = []
    unmatched = []
    used = set()
    for point in source:
        where = -point.location.coords if antipodal else point.location.coords
        found = target.near(where, tolerances.match)
        if len(found) != 1:
            unmatched.append(point)
            problems.append(f"{len(found)} partners near {np.round(where, 6).tolist()}")
            continue
        partner = found[0]
        used.add(id(partner))
        expected = g.dim - point.index if complement else point.index
        if partner.index != expected:
            problems.append(f"index {partner.index} where {expected} was expected at {np.round(where, 6).tolist()}")
        product = point.value * float(dual.values(where[None, :])[0])
        pairings.append(PointPairing(point, partner, product))
    dual_unmatched = [p for p in target if id(p) not in used]
    if dual_unmatched:
        problems.append(f"{len(dual_unmatched)} dual critical points without a partner")
    return pairings, unmatched, dual_unmatched, problems


def verify_index_duality(g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES) -> IndexDualityReport:
    """
    Every critical point (p, i) of a stable strictly convex g has exactly one
    partner of the dual at -p with index n - i, and g(p) delta(-p) = 1.
    Merely Morse inputs are paired too but never pass.
    """
    convexity = classify(g, tolerances)
    if not convexity.is_strictly_convex:
        return IndexDualityReport(False, False, "hypothesis failed: not strictly convex")
    stability = is_stable(g, tolerances)
    if not stability.all_nondegenerate:
        return IndexDualityReport(False, False, f"hypothesis failed: not stable ({stability.reason})")
    dual = dual_integrand(g, tolerances=tolerances, report=convexity)
    dual_critical = find_critical_points(dual, tolerances)
    pairings, unmatched, dual_unmatched, problems = _pair_points(g, dual, stability.critical, dual_critical, tolerances)
    for pairing in pairings:
        if abs(pairing.product - 1.0) > tolerances.product:
            problems.append(f"value product {pairing.product:.12g} differs from 1")
    if not stability.stable:
        reason = f"hypothesis failed: not stable ({stability.reason}); pairing {'holds' if not problems else 'fails'}"
        return IndexDualityReport(False, False, reason, tuple(pairings), tuple(unmatched), tuple(dual_unmatched))
    passed = not problems
    reason = "all critical points paired" if passed else "; ".join(problems)
    return IndexDualityReport(passed, True, reason, tuple(pairings), tuple(unmatched), tuple(dual_unmatched))


@dataclass(frozen=True)
class SimultaneousStabilityReport:
    """
    Stability of an integrand compared with that of its dual.
    """

    passed: bool
    hypothesis: bool
    reason: str
    source: Optional[StabilityReport] = None
    dual: Optional[StabilityReport] = None
    tables: str = ""


def verify_simultaneous_stability(
    g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES
) -> SimultaneousStabilityReport:
    """
    g is stable exactly when its dual is.
    """
    convexity = classify(g, tolerances)
    if not convexity.is_strictly_convex:
        return SimultaneousStabilityReport(False, False, "hypothesis failed: not strictly convex")
    source = is_stable(g, tolerances)
    dual = is_stable(dual_integrand(g, tolerances=tolerances, report=convexity), tolerances)
    passed = source.stable == dual.stable
    verdict = "stable" if source.stable else "unstable"
    if passed:
        return SimultaneousStabilityReport(True, True, f"both {verdict}", source, dual)
    tables = "\n".join(
        [
            "integrand:",
            critical_table(source.critical).to_string(index=False),
            "dual:",
            critical_table(dual.critical).to_string(index=False),
        ]
    )
    reason = f"integrand {verdict} ({source.reason}) but dual {dual.reason}"
    return SimultaneousStabilityReport(False, True, reason, source, dual, tables)


@dataclass(frozen=True)
class NondegeneracyReport:
    """
    Transfer of non-degeneracy and of distinct critical values to the dual.
    """

    passed: bool
    hypothesis: bool
    reason: str
    source_nondegenerate: bool
    dual_nondegenerate: bool
    source_distinct: Optional[bool] = None
    dual_distinct: Optional[bool] = None


def verify_nondegeneracy_transfer(
    g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES
) -> NondegeneracyReport:
    """
    Only non-degenerate critical points for g implies the same for the dual,
    and then g separates its critical points exactly when the dual does.
    """
    convexity = classify(g, tolerances)
    if not convexity.is_strictly_convex:
        return NondegeneracyReport(False, False, "hypothesis failed: not strictly convex", False, False)
    source = is_stable(g, tolerances)
    dual = is_stable(dual_integrand(g, tolerances=tolerances, report=convexity), tolerances)
    if source.all_nondegenerate and not dual.all_nondegenerate:
        return NondegeneracyReport(False, True, f"dual lost non-degeneracy: {dual.reason}", True, False)
    if not source.all_nondegenerate:
        return NondegeneracyReport(
            True, True, "integrand has degenerate critical points", False, dual.all_nondegenerate
        )
    passed = source.values_distinct == dual.values_distinct
    reason = "critical values distinct on both sides" if source.values_distinct else "critical values repeat on both sides"
    if not passed:
        reason = "distinctness of critical values differs"
    return NondegeneracyReport(passed, True, reason, True, True, source.values_distinct, dual.values_distinct)


@dataclass(frozen=True)
class HatDualityReport:
    """
    Critical points of the antipodal reciprocals of an integrand and of its dual.
    """

    passed: bool
    hypothesis: bool
    reason: str
    hat_pairings: Tuple[PointPairing, ...] = ()
    dual_hat_pairings: Tuple[PointPairing, ...] = ()


def verify_hat_duality(g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES) -> HatDualityReport:
    """
    For stable g, theta -> 1 / g(-theta) and theta -> 1 / delta(-theta) are
    stable; a critical point (p, i) of g appears at -p with index n - i for
    the first and at p with index i for the second.
    """
    convexity = classify(g, tolerances)
    stability = is_stable(g, tolerances)
    if not convexity.is_strictly_convex or not stability.stable:
        return HatDualityReport(False, False, "hypothesis failed: needs a stable strictly convex integrand")
    dual = dual_integrand(g, tolerances=tolerances, report=convexity)
    hat = AntipodalReciprocal(g)
    dual_hat = AntipodalReciprocal(dual)
    hat_stability = is_stable(hat, tolerances)
    dual_hat_stability = is_stable(dual_hat, tolerances)
    problems = []
    if not hat_stability.stable:
        problems.append(f"reciprocal not stable: {hat_stability.reason}")
    if not dual_hat_stability.stable:
        problems.append(f"dual reciprocal not stable: {dual_hat_stability.reason}")
    hat_pairs, _, _, hat_problems = _pair_points(g, hat, stability.critical, hat_stability.critical, tolerances)
    dual_pairs, _, _, dual_problems = _pair_points(
        g, dual_hat, stability.critical, dual_hat_stability.critical, tolerances, antipodal=False, complement=False
    )
    problems.extend(hat_problems + dual_problems)
    passed = not problems
    return HatDualityReport(
        passed, True, "reciprocals paired" if passed else "; ".join(problems), tuple(hat_pairs), tuple(dual_pairs)
    )


def _grid_edges(g: Integrand) -> np.ndarray:
    if g.dim == 1:
        indices = np.arange(g.grid.circle_samples)
        return np.stack([indices, np.roll(indices, -1)], axis=1)
    return sphere_geometry.icosphere(g.grid.icosphere_level).edges


def stray_equalities(g: Integrand, equal: np.ndarray, critical: CriticalSet) -> int:
    """
    Count grid points in `equal` whose connected run of equality points never
    comes within ANCHOR_CELLS grid steps of a critical point.

    Near a critical point the gap closes quadratically, or faster when the
    point is degenerate, so the band of equality points around it can be
    wide; the band is still connected to the point, a stray run is not.
    """
    equal = np.asarray(equal, dtype=bool)
    if not np.any(equal):
        return 0
    if not len(critical):
        return int(np.sum(equal))
    points = g.grid_points()
    edges = _grid_edges(g)
    both = equal[edges[:, 0]] & equal[edges[:, 1]]
    size = points.shape[0]
    adjacency = coo_matrix(
        (np.ones(int(np.sum(both))), (edges[both, 0], edges[both, 1])),
        shape=(size, size),
    )
    _, labels = connected_components(adjacency, directed=False)
    distances = np.min(
        np.stack([sphere_geometry.geodesic_distance_rows(points, p.location.coords[None, :]) for p in critical]),
        axis=0,
    )
    near = distances <= ANCHOR_CELLS * g.grid.spacing(g.dim)
    anchored = np.unique(labels[equal & near])
    return int(np.sum(equal & ~np.isin(labels, anchored)))


@dataclass(frozen=True)
class InequalityReport:
    """
    Support-radial inequalities on the grid and where they become equalities.
    """

    passed: bool
    hypothesis: bool
    reason: str
    violations: Tuple[int, int, int]
    worst: Tuple[float, float, float]
    equality_points: int = 0
    stray_equalities: int = 0
    critical_gaps: Tuple[float, ...] = field(default=())


def verify_support_inequalities(
    g: Integrand, tolerances: common.Tolerances = common.DEFAULT_TOLERANCES
) -> InequalityReport:
    """
    g(p) >= 1 / delta(-p), delta(p) >= 1 / g(-p) and 1 / delta(-h(p)) >= g(p),
    with h(p) the direction of the boundary point g(p) p + grad g(p); the first
    is an equality exactly at critical points of g.
    """
    convexity = classify(g, tolerances)
    if not convexity.is_strictly_convex:
        return InequalityReport(False, False, "hypothesis failed: not strictly convex", (0, 0, 0), (0.0, 0.0, 0.0))
    dual = dual_integrand(g, tolerances=tolerances, report=convexity)
    points = g.grid_points()
    values = g.values(points)
    radial = 1.0 / dual.values(-points)
    dual_values = dual.values(points)
    reverse = 1.0 / g.values(-points)
    directions = sphere_geometry.normalize_rows(andrews_points(g, points))
    reach = 1.0 / dual.values(-directions)
    slack = tolerances.inequality_slack
    gaps = (values - radial, dual_values - reverse, reach - values)
    violations = tuple(int(np.sum(gap < -slack)) for gap in gaps)
    worst = tuple(float(np.min(gap)) for gap in gaps)

    critical = find_critical_points(g, tolerances)
    equal = np.abs(gaps[0]) < tolerances.equality
    stray = 0
    if critical.non_isolated:
        logger.debug("critical set not isolated; every grid point counts as critical")
    elif np.any(equal):
        stray = stray_equalities(g, equal, critical)
    critical_gaps: Tuple[float, ...] = ()
    if not critical.non_isolated and len(critical):
        locations = critical.locations
        critical_gaps = tuple(float(gap) for gap in g.values(locations) - 1.0 / dual.values(-locations))
    missed = sum(abs(gap) >= tolerances.equality for gap in critical_gaps)
    problems = []
    for name, count, low in zip(("radial", "dual radial", "boundary reach"), violations, worst):
        if count:
            problems.append(f"{name} inequality fails at {count} points (worst {low:.3g})")
    if stray:
        problems.append(f"{stray} equality points away from critical points")
    if missed:
        problems.append(f"{missed} critical points without equality")
    passed = not problems
    return InequalityReport(
        passed,
        True,
        "inequalities hold" if passed else "; ".join(problems),
        violations,
        worst,
        int(np.sum(equal)),
        stray,
        critical_gaps,
    )
