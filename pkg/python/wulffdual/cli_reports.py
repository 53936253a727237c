# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Command line entry point: checks, duals, verification suites, wave fronts,
caustics and polar sets, with CSV / SVG / OBJ artifacts.
"""

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd  # type: ignore
from loguru import logger

from wulffdual import (
    common,
    exporters,
    fixtures,
    fronts_caustics,
    integrand_model,
    morse_stability,
    sphere_geometry,
    spherical_convexity,
    wulff_duality,
)
from wulffdual.errors import (
    ConfigError,
    FrontError,
    NotConvexIntegrandError,
    NotHemisphericalError,
    PositivityError,
    SpecError,
    UnsupportedDimensionError,
)
from wulffdual.integrand_model import Integrand

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_HYPOTHESIS = 3

FORMATS = ("csv", "svg", "obj")
GRID_BOUNDS = (2**8, 2**14)
TOLERANCE_BOUNDS = (1e-12, 1e-2)
DEFAULT_FRONT_TIMES = tuple(float(t) for t in np.linspace(-0.4, 0.4, 9))
ORACLE_INVOLUTION_SAMPLES = 64
COLLAPSE_SPREAD = 1e-9


# pylint: disable=too-many-instance-attributes
@dataclass
class RunConfig(common.Config):
    """
    Store of config to run one command.
    """

    integrand: str = ""
    fixture: str = ""
    points: str = ""
    grid: int = 0
    tolerances: Dict[str, float] = field(default_factory=dict)
    t: List[float] = field(default_factory=list)
    formats: List[str] = field(default_factory=lambda: list(FORMATS))

    def __post_init__(self) -> None:
        if self.grid and not GRID_BOUNDS[0] <= self.grid <= GRID_BOUNDS[1]:
            raise ConfigError(f"--grid must lie in [{GRID_BOUNDS[0]}, {GRID_BOUNDS[1]}], got {self.grid}")
        for name, value in self.tolerances.items():
            if not TOLERANCE_BOUNDS[0] <= value <= TOLERANCE_BOUNDS[1]:
                raise ConfigError(f"{name} tolerance must lie in [1e-12, 1e-2], got {value:g}")
        for t in self.t:
            if not abs(t) < np.pi:
                raise ConfigError(f"wave-front parameters must satisfy |t| < pi, got {t:g}")
        unknown = [f for f in self.formats if f not in FORMATS]
        if unknown:
            raise ConfigError(f"unknown output formats {unknown}, choose from {', '.join(FORMATS)}")

    def sample_grid(self) -> common.Grid:
        """
        Validation grid with the requested circle resolution.
        """
        if self.grid:
            return common.Grid(circle_samples=self.grid)
        return common.DEFAULT_GRID

    def tolerance_set(self) -> common.Tolerances:
        """
        Default tolerances with the overrides applied.
        """
        return common.DEFAULT_TOLERANCES.with_overrides(**self.tolerances)

    def load_integrand(self) -> Integrand:
        """
        The fixture or definition file this run is about.
        """
        if self.fixture and self.integrand:
            raise ConfigError("give either --fixture or --integrand, not both")
        if self.fixture:
            return fixtures.fixture(self.fixture, self.sample_grid())
        if self.integrand:
            return integrand_model.load(self.integrand, self.sample_grid())
        raise ConfigError(f"{self.command} needs --integrand or --fixture")

    def wants(self, fmt: str) -> bool:
        """
        Whether an output format was requested.
        """
        return fmt in self.formats


class Report:
    """
    Lines of a command report, printed to stdout and kept as report.txt.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.out_dir = config.output_dir()
        self.lines: List[str] = [f"command: {config.command}"]
        self.files: List[str] = []

    def add(self, line: str) -> None:
        """
        Append a line.
        """
        self.lines.append(line)

    def path(self, name: str) -> str:
        """
        Path of an artifact in the output directory, recorded for the report.
        """
        path = os.path.join(self.out_dir, name)
        self.files.append(path)
        return path

    def emit(self, tolerances: Optional[common.Tolerances] = None) -> None:
        """
        Print the report and write it with the config into the output directory.
        """
        if tolerances is not None:
            self.add(f"tolerances: {tolerances.summary()}")
        for path in self.files:
            self.add(f"wrote {path}")
        text = "\n".join(self.lines)
        print(text)
        self.config.write(self.out_dir)
        with open(os.path.join(self.out_dir, "report.txt"), "w", encoding="utf-8") as report_file:
            report_file.write(text + "\n")


def yes_no(flag: bool) -> str:
    """
    Render a verdict.
    """
    return "yes" if flag else "no"


def describe_point(point: sphere_geometry.SpherePoint) -> str:
    """
    Angle for circle points, coordinates otherwise.
    """
    if point.dim == 1:
        return f"angle ≈ {point.angle:.6g}"
    return f"point ≈ {np.round(point.coords, 6).tolist()}"


def cmd_check(config: RunConfig) -> int:
    """
    Convexity, strict convexity and stability of one integrand.
    """
    tolerances = config.tolerance_set()
    g = config.load_integrand()
    report = Report(config)
    convexity = wulff_duality.classify(g, tolerances)
    if convexity.is_convex_integrand:
        report.add(f"convex: yes (margin {convexity.margin:.3g}, {convexity.method} test)")
    else:
        report.add(f"convex: no (witness {describe_point(convexity.witness)}, margin {convexity.margin:.3g})")
    strict = convexity.is_strictly_convex
    report.add(
        f"strictly convex: {yes_no(strict)} "
        f"(least curvature {convexity.curvature_margin:.3g} at {describe_point(convexity.curvature_witness)})"
    )
    stability = morse_stability.is_stable(g, tolerances)
    report.add(f"stable: {yes_no(stability.stable)} ({stability.reason})")
    table = morse_stability.critical_table(stability.critical)
    report.add(table.to_string(index=False) if len(table) else "no isolated critical points")
    if config.wants("csv"):
        exporters.write_csv(table, report.path("critical_points.csv"))
    report.emit(tolerances)
    if stability.critical.non_isolated:
        return EXIT_HYPOTHESIS
    return EXIT_OK if convexity.is_convex_integrand and strict and stability.stable else EXIT_FAILED


def _sample_frame(points: np.ndarray, **columns: np.ndarray) -> pd.DataFrame:
    frame = exporters.points_frame(points, **columns)
    if points.shape[1] == 2:
        frame.insert(0, "theta", sphere_geometry.points_to_angles(points))
    return frame


def _surface_faces(g: Integrand) -> np.ndarray:
    return sphere_geometry.icosphere(g.grid.icosphere_level).faces


def cmd_dual(config: RunConfig) -> int:
    """
    Sample the dual integrand and write both Wulff boundaries.
    """
    tolerances = config.tolerance_set()
    g = config.load_integrand()
    report = Report(config)
    convexity = wulff_duality.classify(g, tolerances)
    dual = wulff_duality.dual_integrand(g, tolerances=tolerances, report=convexity)
    if dual.method == "oracle":
        report.add(
            f"not strictly convex (least curvature {convexity.curvature_margin:.3g}): "
            "Andrews path refused, dual sampled by radial minimisation"
        )
    else:
        report.add("strictly convex: dual sampled by Andrews inversion")
    points = g.grid_points()
    values = g.values(points)
    dual_values = dual.values(points)
    wulff_boundary = -points / dual_values[:, None]
    dual_boundary = -points / values[:, None]
    report.add(f"dual values in [{np.min(dual_values):.12g}, {np.max(dual_values):.12g}]")

    if dual.method == "oracle":
        stride = max(1, points.shape[0] // ORACLE_INVOLUTION_SAMPLES)
        residual = wulff_duality.involution_residual(g, tolerances, points[::stride])
        report.add(f"involution residual: {residual:.3e} (on {points[::stride].shape[0]} directions)")
        smoothness = wulff_duality.dual_smoothness_probe(g, tolerances=tolerances)
        if not smoothness.smooth:
            report.add(f"dual gradient jump {smoothness.max_gradient_jump:.3g} ({smoothness.trend} under refinement)")
    else:
        residual = wulff_duality.involution_residual(g, tolerances)
        report.add(f"involution residual: {residual:.3e}")

    if config.wants("csv"):
        exporters.write_csv(_sample_frame(points, gamma=values, delta=dual_values), report.path("dual.csv"))
    if g.dim == 1:
        if config.wants("svg"):
            exporters.plot_scene(
                wulff_duality.boundary_polylines(g), report.path("wulff.svg"), "integrand and its Wulff shape"
            )
            dual_scene = {
                "inverted graph": wulff_boundary,
                "Wulff boundary": dual_boundary,
                "graph": points * dual_values[:, None],
            }
            exporters.plot_scene(dual_scene, report.path("dual_wulff.svg"), "dual and its Wulff shape")
        if config.wants("obj"):
            exporters.write_closed_curves(report.path("wulff.obj"), [wulff_boundary])
            exporters.write_closed_curves(report.path("dual_wulff.obj"), [dual_boundary])
    elif config.wants("obj"):
        faces = _surface_faces(g)
        exporters.write_obj(report.path("wulff.obj"), wulff_boundary, faces=faces)
        exporters.write_obj(report.path("dual_wulff.obj"), dual_boundary, faces=faces)
    report.emit(tolerances)
    return EXIT_OK


SuiteResult = Tuple[str, bool, bool, str]


def _smoothness_suite(g: Integrand, tolerances: common.Tolerances) -> SuiteResult:
    strict = wulff_duality.classify(g, tolerances).is_strictly_convex
    smoothness = wulff_duality.dual_smoothness_probe(g, tolerances=tolerances)
    jumps = ", ".join(f"{d:.3g}" for d in smoothness.discrepancies)
    corner = f"jump {smoothness.max_gradient_jump:.2g} (jumps {jumps})"
    if smoothness.trend not in ("decreasing", "negligible", "stable"):
        return "dual smoothness", False, True, f"inconclusive: jumps {jumps}"
    if smoothness.smooth == strict:
        if strict:
            return "dual smoothness", True, True, f"dual C¹: jumps {jumps} ({smoothness.trend})"
        return "dual smoothness", True, True, f"dual not C¹: {corner}, as g is not strictly convex"
    if strict:
        return "dual smoothness", False, True, f"dual not C¹: {corner}"
    return "dual smoothness", False, True, f"dual C¹ although g is not strictly convex: jumps {jumps}"


def _membership_suite(g: Integrand, tolerances: common.Tolerances) -> SuiteResult:
    membership = fronts_caustics.euclidean_origin_membership(g, tolerances)
    if not membership.hypothesis:
        return "origin membership", False, False, "hypothesis failed: not strictly convex"
    reason = (
        f"caustic {yes_no(membership.caustic)}/{yes_no(membership.spherical_caustic)}, "
        f"symmetry {yes_no(membership.symmetry)}/{yes_no(membership.spherical_symmetry)} (Euclidean/spherical)"
    )
    return "origin membership", membership.agree, True, reason


MORSE_SUITES: Tuple[Tuple[str, Callable[[Integrand, common.Tolerances], Any]], ...] = (
    ("simultaneous stability", morse_stability.verify_simultaneous_stability),
    ("index duality", morse_stability.verify_index_duality),
    ("support inequalities", morse_stability.verify_support_inequalities),
    ("non-degeneracy transfer", morse_stability.verify_nondegeneracy_transfer),
    ("reciprocal duality", morse_stability.verify_hat_duality),
)


def run_suites(g: Integrand, tolerances: common.Tolerances) -> List[SuiteResult]:
    """
    Run the verification suites in order: dual smoothness, the Morse suites
    and the origin memberships.
    """
    results = [_smoothness_suite(g, tolerances)]
    for name, check in MORSE_SUITES:
        outcome = check(g, tolerances)
        results.append((name, outcome.passed, outcome.hypothesis, outcome.reason))
        logger.debug("{}: {}", name, outcome.reason)
    results.append(_membership_suite(g, tolerances))
    return results


def cmd_verify(config: RunConfig) -> int:
    """
    Run every verification suite and name the failing ones.
    """
    tolerances = config.tolerance_set()
    g = config.load_integrand()
    report = Report(config)
    convexity = wulff_duality.classify(g, tolerances)
    if not convexity.is_convex_integrand:
        raise NotConvexIntegrandError(convexity.witness.coords, convexity.margin)
    results = run_suites(g, tolerances)
    for name, passed, hypothesis, reason in results:
        verdict = "pass" if passed else ("hypothesis failed" if not hypothesis else "FAIL")
        if reason.startswith(f"{verdict}: "):
            reason = reason[len(verdict) + 2 :]
        report.add(f"{name}: {verdict}: {reason}")
    failed = [name for name, passed, hypothesis, _ in results if not passed and hypothesis]
    unmet = [name for name, passed, hypothesis, _ in results if not passed and not hypothesis]
    if failed:
        report.add(f"failing suites: {', '.join(failed)}")
    if unmet:
        report.add(f"suites without their hypothesis: {', '.join(unmet)}")
    if config.wants("csv"):
        frame = pd.DataFrame(results, columns=["suite", "passed", "hypothesis", "reason"])
        exporters.write_csv(frame, report.path("suites.csv"))
    report.emit(tolerances)
    if failed:
        return EXIT_FAILED
    return EXIT_HYPOTHESIS if unmet else EXIT_OK


def _front_hypothesis(g: Integrand, tolerances: common.Tolerances) -> bool:
    if g.dim != 1:
        raise UnsupportedDimensionError("wave fronts, caustics and symmetry sets are available for curves (n = 1) only")
    if not wulff_duality.classify(g, tolerances).is_strictly_convex:
        logger.error("hypothesis failed: wave fronts need a strictly convex integrand")
        return False
    return True


def _front_frame(front: fronts_caustics.FrontSample, t: float) -> pd.DataFrame:
    theta = sphere_geometry.points_to_angles(front.params)
    return pd.concat(
        [pd.DataFrame({"t": t, "theta": theta}), exporters.points_frame(front.positions)],
        axis=1,
    )


def cmd_front(config: RunConfig) -> int:
    """
    Spherical wave fronts of the lifted integrand at the requested parameters.
    """
    tolerances = config.tolerance_set()
    g = config.load_integrand()
    if not _front_hypothesis(g, tolerances):
        return EXIT_HYPOTHESIS
    report = Report(config)
    front = fronts_caustics.lift_integrand(g)
    dual = fronts_caustics.spherical_dual_map(front)
    times = config.t or list(DEFAULT_FRONT_TIMES)
    moved = [fronts_caustics.wave_front(front, t) for t in times]
    for t, sample in zip(times, moved):
        spread = float(np.max(np.linalg.norm(sample.positions - sample.positions[0], axis=1)))
        if spread < COLLAPSE_SPREAD:
            where = np.round(sample.positions[0], 9).tolist()
            report.add(f"t = {t:.6g}: front collapses to the point {where}")
        else:
            report.add(f"t = {t:.6g}: front spread {spread:.6g}")
    if config.wants("csv"):
        frame = pd.concat([_front_frame(sample, t) for t, sample in zip(times, moved)], ignore_index=True)
        exporters.write_csv(frame, report.path("fronts.csv"))
    if config.wants("obj"):
        exporters.write_closed_curves(report.path("fronts.obj"), [sample.positions for sample in moved])
        exporters.write_closed_curves(report.path("lifted.obj"), [front.positions, dual.positions])
    if config.wants("svg"):
        scene = {"front": front.positions[:, :2], "spherical dual": dual.positions[:, :2]}
        scene.update({f"t={t:.3g}": sample.positions[:, :2] for t, sample in zip(times, moved)})
        exporters.plot_scene(scene, report.path("fronts.svg"), "wave fronts seen from the north pole")
    report.emit(tolerances)
    return EXIT_OK


def _locus_frame(locus: fronts_caustics.SingularLocus) -> pd.DataFrame:
    if not locus.points:
        return pd.DataFrame(columns=["t", "theta", "partner", "x", "y", "z", "multiplicity"])
    params = [sphere_geometry.points_to_angles(p.params) for p in locus.points]
    frame = pd.DataFrame(
        {
            "t": [p.t for p in locus.points],
            "theta": [a[0] for a in params],
            "partner": [a[1] if a.size == 2 else np.nan for a in params],
        }
    )
    frame = pd.concat([frame, exporters.points_frame(locus.positions)], axis=1)
    frame["multiplicity"] = [p.multiplicity for p in locus.points]
    return frame


def cmd_caustic(config: RunConfig) -> int:
    """
    Caustic and symmetry set of the lifted integrand, origin memberships and
    the comparison with the loci of the spherical dual.
    """
    tolerances = config.tolerance_set()
    g = config.load_integrand()
    if not _front_hypothesis(g, tolerances):
        return EXIT_HYPOTHESIS
    report = Report(config)
    front = fronts_caustics.lift_integrand(g)
    caustic = fronts_caustics.caustic_sample(front)
    symmetry = fronts_caustics.symmetry_sample(front)
    report.add(f"caustic: {len(caustic)} points over {caustic.t_grid.size} wave fronts")
    report.add(f"symmetry set: {len(symmetry)} points")
    in_caustic = fronts_caustics.origin_in_caustic(g, tolerances)
    in_symmetry = fronts_caustics.origin_in_symmetry_set(g, tolerances)
    report.add(f"north pole on caustic: {yes_no(in_caustic.member)} ({in_caustic.reason})")
    report.add(f"north pole on symmetry set: {yes_no(in_symmetry.member)} ({in_symmetry.reason})")
    comparison = fronts_caustics.dual_locus_comparison(front, "caustic")
    report.add(
        f"caustic vs dual caustic: Hausdorff {comparison.distance:.3g} "
        f"(tolerance {comparison.tolerance:.3g}, {'agree' if comparison.agree else 'differ'})"
    )
    if config.wants("csv"):
        exporters.write_csv(_locus_frame(caustic), report.path("caustic.csv"))
        exporters.write_csv(_locus_frame(symmetry), report.path("symmetry.csv"))
    if config.wants("obj"):
        exporters.write_point_cloud(report.path("caustic.obj"), caustic.positions)
        exporters.write_point_cloud(report.path("symmetry.obj"), symmetry.positions)
        exporters.write_closed_curves(report.path("lifted.obj"), [front.positions])
    report.emit(tolerances)
    return EXIT_OK


def cmd_polar(config: RunConfig) -> int:
    """
    Polar set and spherical convex hull of a point set on S^2.
    """
    if not config.points:
        raise ConfigError("polar needs --points")
    source = spherical_convexity.load_points(config.points)
    report = Report(config)
    polar = spherical_convexity.polar_set(source)
    hull = spherical_convexity.spherical_convex_hull(source)
    report.add(f"{source.points.shape[0]} points spanning dimension {source.rank}")
    report.add(f"polar covers {polar.fraction:.4f} of the grid, hull {hull.fraction:.4f}")
    maehara = spherical_convexity.maehara_check(source)
    report.add(
        f"polar of hull vs intersection of hemispheres: {'agree' if maehara.agree else 'differ'} "
        f"({maehara.mismatched} points beyond the band, worst {maehara.max_discrepancy:.3g})"
    )
    double = spherical_convexity.double_polar_check(source)
    report.add(f"double polar: {double.status}, inclusion {yes_no(double.inclusion)}")
    if config.wants("csv"):
        exporters.write_csv(polar.to_frame(), report.path("polar.csv"))
        exporters.write_csv(hull.to_frame(), report.path("hull.csv"))
    if config.wants("obj"):
        exporters.write_point_cloud(report.path("polar.obj"), polar.grid[polar.indicator])
        exporters.write_point_cloud(report.path("hull.obj"), hull.grid[hull.indicator])
    report.emit()
    return EXIT_OK if maehara.agree and double.status != "disagree" else EXIT_FAILED


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "check": cmd_check,
    "dual": cmd_dual,
    "verify": cmd_verify,
    "front": cmd_front,
    "caustic": cmd_caustic,
    "polar": cmd_polar,
}


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _name_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def get_argument_parser() -> argparse.ArgumentParser:
    """
    Argument parser for all commands.
    """
    parser = common.get_argument_parser()
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("--integrand", type=str, default="", help="integrand definition file")
    parser.add_argument("--fixture", type=str, default="", choices=[""] + list(fixtures.FIXTURES))
    parser.add_argument("--points", type=str, default="", help="CSV of unit vectors for polar")
    parser.add_argument("--grid", type=int, default=0, help="circle samples")
    parser.add_argument("--tol", type=float, help="degenerate and value tolerance")
    parser.add_argument("--degenerate-tol", type=float)
    parser.add_argument("--value-tol", type=float)
    parser.add_argument("--match-tol", type=float)
    parser.add_argument("--t", type=_float_list, default=[], help="wave-front parameters, comma separated")
    parser.add_argument("--format", type=_name_list, default=list(FORMATS), help="csv,svg,obj")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    """
    Build the run configuration from parsed arguments.
    """
    overrides = {"degenerate": args.tol, "value": args.tol}
    explicit = {"degenerate": args.degenerate_tol, "value": args.value_tol, "match": args.match_tol}
    overrides.update({k: v for k, v in explicit.items() if v is not None})
    return RunConfig(
        command=args.command,
        out=args.out,
        integrand=args.integrand,
        fixture=args.fixture,
        points=args.points,
        grid=args.grid,
        tolerances={k: v for k, v in overrides.items() if v is not None},
        t=args.t,
        formats=args.format,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run a command and return its exit code.
    """
    parser = get_argument_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    common.setup_logging(args.verbose)
    try:
        config = make_config(args)
        logger.debug("running {}", config.to_str())
        return COMMANDS[config.command](config)
    except (SpecError, PositivityError, ConfigError, FrontError, OSError) as exc:
        logger.error("{}", exc)
        return EXIT_USAGE
    except (NotConvexIntegrandError, NotHemisphericalError) as exc:
        logger.error("{}", exc)
        return EXIT_FAILED
    except UnsupportedDimensionError as exc:
        logger.error("{}", exc)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
