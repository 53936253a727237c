# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Test lifted fronts, spherical duals and pedals, wave fronts and their loci.
"""

from dataclasses import replace

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
    fixture_harmonic_coarse,
    fixture_harmonic_mirror,
)

from wulffdual import fixtures
from wulffdual import fronts_caustics as fc
from wulffdual import sphere_geometry as sg
from wulffdual.errors import FrontError, UnsupportedDimensionError

NORTH = np.array([0.0, 0.0, 1.0])


# pylint: disable=redefined-outer-name
def test_lifted_front_is_on_the_sphere(disc):
    """
    Positions, velocities and normals of the lifted front are consistent.
    """
    front = fc.lift_integrand(disc)
    assert front.dim == 1
    assert_close(np.linalg.norm(front.positions, axis=1), 1.0, 1e-12)
    assert_close(np.linalg.norm(front.normals, axis=1), 1.0, 1e-12)
    assert_close(np.sum(front.normals * front.positions, axis=1), 0.0, 1e-12)
    assert_close(np.einsum("md,md->m", front.normals, front.velocities[:, 0, :]), 0.0, 1e-12)
    assert np.all(front.normals[:, -1] > 0.0)
    assert not front.ambiguous.any()


# pylint: disable=redefined-outer-name
def test_lifted_ball_front(ball):
    """
    The lift of the unit circle sits at height pi/4 with normals towards N.
    """
    front = fc.lift_integrand(ball)
    params = front.params
    assert_close(front.positions, np.hstack([params, np.ones((params.shape[0], 1))]) / np.sqrt(2), 1e-12)
    assert_close(front.normals, np.hstack([-params, np.ones((params.shape[0], 1))]) / np.sqrt(2), 1e-12)


# pylint: disable=redefined-outer-name
def test_wave_front_endpoints(disc):
    """
    t = 0 is the front itself and t = pi/2 its spherical dual.
    """
    front = fc.lift_integrand(disc)
    assert_close(fc.wave_front(front, 0.0).positions, front.positions, 1e-15)
    assert_close(fc.wave_front(front, np.pi / 2).positions, fc.spherical_dual_map(front).positions, 1e-12)
    moved = fc.wave_front(front, 0.7)
    assert_close(np.linalg.norm(moved.positions, axis=1), 1.0, 1e-12)


# pylint: disable=redefined-outer-name
def test_wave_front_parameter_range(disc):
    """
    Wave fronts need |t| < pi.
    """
    front = fc.lift_integrand(disc)
    for t in (np.pi, -np.pi, 4.0, float("nan")):
        with pytest.raises(FrontError):
            fc.wave_front(front, t)


# pylint: disable=redefined-outer-name
def test_ball_front_collapses(ball):
    """
    Every point of the lifted unit circle reaches N at t = pi/4.
    """
    front = fc.lift_integrand(ball)
    collapsed = fc.wave_front(front, np.pi / 4)
    assert_close(collapsed.positions, np.broadcast_to(NORTH, collapsed.positions.shape), 1e-12)


# pylint: disable=redefined-outer-name
def test_spherical_dual_is_orthogonal(disc):
    """
    The dual front is orthogonal to the front and on the N side.
    """
    front = fc.lift_integrand(disc)
    dual = fc.spherical_dual_map(front)
    assert_close(np.sum(dual.positions * front.positions, axis=1), 0.0, 1e-12)
    assert np.all(dual.positions[:, -1] > 0.0)
    assert dual.label == "dual of lifted graph"
    again = dual.at(front.params[:3])
    assert_close(again.positions, dual.positions[:3], 1e-12)


# pylint: disable=redefined-outer-name
def test_pedal_matches_direct_pedal(disc, ellipse):
    """
    The blow-up of the dual is the point of the tangent great circle nearest N.
    """
    for g in (disc, ellipse):
        front = fc.lift_integrand(g)
        pedal = fc.spherical_pedal(front)
        assert_close(pedal.positions, fc.spherical_pedal_direct(front), 1e-8)


# pylint: disable=redefined-outer-name
def test_ball_is_its_own_pedal(ball):
    """
    The lifted unit circle is the circle of colatitude pi/4, and its pedal is
    the same circle.
    """
    front = fc.lift_integrand(ball)
    assert_close(front.positions[:, -1], np.sqrt(0.5), 1e-12)
    assert_close(fc.spherical_pedal(front).positions, front.positions, 1e-9)


# pylint: disable=redefined-outer-name
def test_pedal_projects_to_support_graph(disc):
    """
    The projected pedal point in direction u sits at distance delta(u): the
    pedal curve of the dual Wulff boundary is the graph of its support function.
    """
    pedal = fc.spherical_pedal(fc.lift_integrand(disc))
    planar = sg.central_project_rows(pedal.positions)[:, :2]
    radius = np.linalg.norm(planar, axis=1)
    directions = planar / radius[:, None]
    assert_close(radius, fixtures.translated_disc_dual(directions), 1e-8)


# pylint: disable=redefined-outer-name
def test_re_evaluation_needs_a_source(disc):
    """
    Fronts without a source cannot be refined.
    """
    front = replace(fc.lift_integrand(disc), source=None)
    with pytest.raises(FrontError):
        front.at(front.params[:2])
    with pytest.raises(FrontError):
        fc.symmetry_sample(front, np.array([0.0]))


# pylint: disable=redefined-outer-name
def test_disc_caustic(disc):
    """
    The caustic of a strictly convex front is non-empty.
    """
    locus = fc.caustic_sample(fc.lift_integrand(disc))
    assert locus.kind == "caustic"
    assert len(locus) > 0
    assert locus.t_step == pytest.approx(np.pi / 256)


# pylint: disable=redefined-outer-name
def test_ball_caustic_is_north(ball):
    """
    All focal points of the lifted unit circle merge at N.
    """
    locus = fc.caustic_sample(fc.lift_integrand(ball))
    assert len(locus) == 1
    assert locus.points[0].multiplicity == ball.grid.circle_samples
    assert locus.points[0].t == pytest.approx(np.pi / 4, abs=1e-12)
    assert_close(locus.positions[0], NORTH, 1e-9)


# pylint: disable=redefined-outer-name
def test_ball_symmetry_set_is_north(ball):
    """
    The collapsed wave front is one point of the symmetry set.
    """
    locus = fc.symmetry_sample(fc.lift_integrand(ball), np.array([0.0, np.pi / 4]))
    assert locus.kind == "symmetry"
    assert len(locus) == 1
    assert locus.points[0].multiplicity == ball.grid.circle_samples
    assert_close(locus.positions[0], NORTH, 1e-9)


# pylint: disable=redefined-outer-name
def test_loci_need_curves(harmonic_coarse):
    """
    Caustics and symmetry sets are sampled for curves only.
    """
    front = fc.lift_integrand(harmonic_coarse)
    assert front.dim == 2
    with pytest.raises(UnsupportedDimensionError):
        fc.caustic_sample(front)
    with pytest.raises(UnsupportedDimensionError):
        fc.symmetry_sample(front)


# pylint: disable=redefined-outer-name
def test_dual_caustic_comparison(disc):
    """
    The caustic of the front is the caustic of its dual.
    """
    comparison = fc.dual_locus_comparison(fc.lift_integrand(disc), "caustic")
    assert comparison.agree, comparison.distance
    assert len(comparison.front) > 0


# pylint: disable=redefined-outer-name
def test_origin_in_caustic(disc, degenerate, ball):
    """
    N is on the caustic exactly for degenerate critical points.
    """
    assert not fc.origin_in_caustic(disc, cross_check=False).member
    flat = fc.origin_in_caustic(degenerate)
    assert flat.member
    assert flat.front_agrees
    constant = fc.origin_in_caustic(ball)
    assert constant.member
    assert constant.reason == "every point is critical"
    assert constant.front_agrees


# pylint: disable=redefined-outer-name
def test_origin_in_symmetry_set(disc, ellipse, harmonic_mirror):
    """
    N is on the symmetry set exactly for repeated critical values.
    """
    assert not fc.origin_in_symmetry_set(disc, cross_check=False).member
    assert fc.origin_in_symmetry_set(ellipse, cross_check=False).member
    mirror = fc.origin_in_symmetry_set(harmonic_mirror)
    assert mirror.member
    assert mirror.front_distance is None
    assert mirror.front_agrees is None


# pylint: disable=redefined-outer-name
def test_height_relation(disc):
    """
    The height of the lifted front over N encodes g(-theta), not g(theta).
    """
    check = fc.spherical_height_check(disc)
    assert check.antipodal_holds
    assert check.direct_residual > 0.1


# pylint: disable=redefined-outer-name
def test_euclidean_membership(disc, ellipse):
    """
    Origin membership in the Euclidean loci matches membership of N.
    """
    round_disc = fc.euclidean_origin_membership(disc)
    assert round_disc.agree
    assert not round_disc.caustic and not round_disc.symmetry
    oval = fc.euclidean_origin_membership(ellipse)
    assert oval.agree
    assert oval.symmetry


# pylint: disable=redefined-outer-name
def test_euclidean_membership_needs_strict_convexity(flat_blend):
    """
    The memberships are only compared for strictly convex integrands.
    """
    membership = fc.euclidean_origin_membership(flat_blend)
    assert not membership.hypothesis
    assert not membership.agree


def test_hausdorff_distance():
    """
    Symmetric distance, zero for two empty sets.
    """
    first = np.array([[0.0, 0.0, 1.0]])
    second = np.array([[0.0, 0.0, 1.0], [0.0, 0.6, 0.8]])
    assert fc.hausdorff_distance(first, second) == pytest.approx(np.linalg.norm(second[1] - first[0]))
    assert fc.hausdorff_distance(np.zeros((0, 3)), np.zeros((0, 3))) == 0.0
    assert fc.hausdorff_distance(first, np.zeros((0, 3))) == float("inf")


def test_default_t_grid():
    """
    Parameters run from -pi/2 to pi/2.
    """
    grid = fc.default_t_grid()
    assert grid[0] == pytest.approx(-np.pi / 2)
    assert grid[-1] == pytest.approx(np.pi / 2)
    assert grid.size == fc.T_SAMPLES
