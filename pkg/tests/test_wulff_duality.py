# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Test Wulff shapes, dual integrands and convexity classification.
"""

import numpy as np
import pytest

# pylint: disable=unused-import
# pylint: disable=no-name-in-module
from test_common import (
    assert_close,
    fixture_ball,
    fixture_degenerate,
    fixture_disc,
    fixture_ellipse,
    fixture_flat_blend,
    fixture_harmonic,
    fixture_harmonic_coarse,
    fixture_nonconvex,
    random_sphere_points,
)

from wulffdual import fixtures
from wulffdual import sphere_geometry as sg
from wulffdual import wulff_duality as wd
from wulffdual.errors import NotConvexIntegrandError


# pylint: disable=redefined-outer-name
def test_disc_dual_closed_form(disc):
    """
    The dual of the translated disc matches its closed form.
    """
    dual = wd.dual_integrand(disc)
    assert dual.method == "andrews"
    points = disc.grid_points()
    assert_close(dual.values(points), fixtures.translated_disc_dual(points), 1e-7)


# pylint: disable=redefined-outer-name
def test_ellipse_dual_both_paths(ellipse):
    """
    Both evaluation paths give sqrt(cos^2 + 4 sin^2) / 2.
    """
    points = random_sphere_points(200, 1, seed=21)
    expected = fixtures.ellipse_dual(points)
    assert_close(wd.DualIntegrand(ellipse, "andrews").values(points), expected, 1e-7)
    assert_close(wd.DualIntegrand(ellipse, "oracle").values(points), expected, 1e-7)


# pylint: disable=redefined-outer-name
def test_dual_of_ball(ball):
    """
    The unit ball is self-dual.
    """
    points = ball.grid_points()
    assert_close(wd.dual_integrand(ball).values(points), 1.0, 1e-9)


# pylint: disable=redefined-outer-name
def test_dual_gradient_matches_closed_form(disc):
    """
    Dual gradients agree with differences of the closed form.
    """
    dual = wd.dual_integrand(disc)
    angles = np.linspace(0.1, 6.2, 25)
    step = 1e-5
    ahead = fixtures.translated_disc_dual(sg.angles_to_points(angles + step))
    behind = fixtures.translated_disc_dual(sg.angles_to_points(angles - step))
    points = sg.angles_to_points(angles)
    slope = np.sum(dual.gradients(points) * sg.circle_tangents(points), axis=1)
    assert_close(slope, (ahead - behind) / (2 * step), 1e-6)


@pytest.mark.parametrize("name", ["disc", "ellipse", "degenerate"])
def test_involution(name):
    """
    The dual of the dual is the integrand itself.
    """
    g = fixtures.fixture(name)
    points = random_sphere_points(64, 1, seed=22)
    assert wd.involution_residual(g, points=points) < 1e-7


# pylint: disable=redefined-outer-name
def test_involution_on_the_sphere(harmonic_coarse):
    """
    The dual of the dual of the harmonic integrand is itself.
    """
    points = random_sphere_points(16, 2, seed=23)
    assert wd.involution_residual(harmonic_coarse, points=points) < 1e-7


# pylint: disable=redefined-outer-name
def test_classify(disc, degenerate, nonconvex, flat_blend):
    """
    Convex, strictly convex and non-convex verdicts with witnesses.
    """
    report = wd.classify(disc)
    assert report.is_convex_integrand and report.is_strictly_convex
    assert report.method == "curvature"
    assert wd.classify(degenerate).is_strictly_convex
    blend = wd.classify(flat_blend)
    assert blend.is_convex_integrand
    assert not blend.is_strictly_convex
    assert abs(blend.curvature_witness.angle) < 0.3 or blend.curvature_witness.angle > 2 * np.pi - 0.3
    bad = wd.classify(nonconvex)
    assert not bad.is_convex_integrand
    assert not bad.is_strictly_convex
    assert bad.margin == pytest.approx(-0.5, abs=1e-6)
    assert min(abs(bad.witness.angle - np.pi), bad.witness.angle, 2 * np.pi - bad.witness.angle) < 1e-3


# pylint: disable=redefined-outer-name
def test_classify_harmonic(harmonic):
    """
    The harmonic fixture is strictly convex.
    """
    report = wd.classify(harmonic)
    assert report.is_convex_integrand and report.is_strictly_convex


def test_convexity_report_consistency():
    """
    A report cannot be strict without being convex.
    """
    point = sg.SpherePoint.from_angle(0.0)
    with pytest.raises(ValueError):
        wd.ConvexityReport(False, True, point, -1.0, point, 1.0, "curvature")


# pylint: disable=redefined-outer-name
def test_dual_integrand_refusals(nonconvex, flat_blend):
    """
    No dual for a non-convex integrand, no Andrews path without strictness.
    """
    with pytest.raises(NotConvexIntegrandError) as info:
        wd.dual_integrand(nonconvex)
    assert info.value.margin < 0.0
    with pytest.raises(ValueError):
        wd.dual_integrand(flat_blend, "andrews")
    assert wd.dual_integrand(flat_blend).method == "oracle"
    with pytest.raises(ValueError):
        wd.DualIntegrand(flat_blend, "guess")


# pylint: disable=redefined-outer-name
def test_build_wulff_radii(disc, ellipse):
    """
    Sampled Wulff radii match the closed forms.
    """
    body = wd.build_wulff(disc)
    assert_close(body.radii, fixtures.translated_disc_radial(body.directions), 1e-8)
    assert body.convexity_residual() < 1e-6
    ellipse_body = wd.build_wulff(ellipse)
    assert_close(ellipse_body.radii, fixtures.ellipse_radial(ellipse_body.directions), 1e-8)


# pylint: disable=redefined-outer-name
def test_radial_and_support_functions(disc):
    """
    Radius and support value in single directions.
    """
    body = wd.build_wulff(disc)
    east = sg.SpherePoint.from_angle(0.0)
    north = sg.SpherePoint.from_angle(np.pi / 2)
    assert wd.radial_function(body, east) == pytest.approx(1.2, abs=1e-9)
    assert wd.radial_function(body, north) == pytest.approx(np.sqrt(0.96), abs=1e-9)
    assert wd.support_function(body, east) == pytest.approx(1.2, abs=1e-9)
    assert wd.support_function(body, north) == pytest.approx(1.0, abs=1e-9)


# pylint: disable=redefined-outer-name
def test_radial_minimum_multiplicity(disc, nonconvex):
    """
    Symmetric non-convex integrands have two minimisers along the axis.
    """
    east = np.array([[1.0, 0.0]])
    assert not wd.radial_minimum(disc, east).multiple[0]
    solution = wd.radial_minimum(nonconvex, east)
    assert solution.multiple[0]
    assert solution.radii[0] < 1.5


# pylint: disable=redefined-outer-name
def test_andrews_boundary(disc):
    """
    The boundary point with outer normal 0 is (1.2, 0).
    """
    assert_close(wd.andrews_boundary(disc, sg.SpherePoint.from_angle(0.0)), np.array([1.2, 0.0]), 1e-15)


# pylint: disable=redefined-outer-name
def test_pedal_point(disc):
    """
    For a convex integrand the pedal point is g(theta) theta.
    """
    for angle in (0.0, 0.7, 2.0, 4.5):
        pedal = wd.pedal_point(disc, sg.SpherePoint.from_angle(angle))
        assert pedal.radius == pytest.approx(1.0 + 0.2 * np.cos(angle), abs=1e-12)
        assert pedal.direction.angle == pytest.approx(angle, abs=1e-9)


# pylint: disable=redefined-outer-name
def test_principal_curvatures(ball):
    """
    The inverted graph of the constant 1 is the unit circle.
    """
    points = ball.grid_points()[:10]
    assert_close(wd.principal_curvatures(ball, points), 1.0, 1e-12)


# pylint: disable=redefined-outer-name
def test_convexify(disc, nonconvex):
    """
    Convexification leaves convex integrands alone and lowers the others.
    """
    points = disc.grid_points()
    assert_close(wd.convexify(disc).values(points), disc.values(points), 1e-12)
    hull = wd.convexify(nonconvex)
    assert len(hull.bitangents) == 2
    lowered = hull.values(points)
    assert np.all(lowered <= nonconvex.values(points) + 1e-12)
    assert lowered[0] < 1.5 - 1e-3


# pylint: disable=redefined-outer-name
def test_dual_smoothness(disc, flat_blend):
    """
    The dual of a strictly convex integrand is smooth; the flat blend's is not.
    """
    smooth = wd.dual_smoothness_probe(disc)
    assert smooth.smooth
    assert smooth.method == "andrews"
    corner = wd.dual_smoothness_probe(flat_blend)
    assert corner.trend == "stable"
    assert not corner.smooth
    assert corner.max_gradient_jump > 0.01


# pylint: disable=redefined-outer-name
def test_dual_strict_convexity(disc):
    """
    Duals of strictly convex integrands are strictly convex.
    """
    assert wd.dual_is_strictly_convex(disc)


# pylint: disable=redefined-outer-name
def test_boundary_polylines(disc, harmonic):
    """
    Three closed curves for circle integrands only.
    """
    curves = wd.boundary_polylines(disc)
    assert set(curves) == {"inverted graph", "Wulff boundary", "graph"}
    assert all(curve.shape == (disc.grid.circle_samples, 2) for curve in curves.values())
    assert_close(curves["graph"][0], np.array([1.2, 0.0]), 1e-12)
    assert_close(curves["inverted graph"][0], np.array([-1.0 / 1.2, 0.0]), 1e-12)
    with pytest.raises(ValueError):
        wd.boundary_polylines(harmonic)
