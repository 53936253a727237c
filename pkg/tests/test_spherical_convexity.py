# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Test polar sets, spherical convex hulls and spherical Wulff shapes.
"""

import numpy as np
import pytest

# pylint: disable=unused-import
# pylint: disable=no-name-in-module
from test_common import (
    fixture_disc,
    fixture_harmonic,
    random_cap_points,
    write_text,
)

from wulffdual import fixtures
from wulffdual import sphere_geometry as sg
from wulffdual import spherical_convexity as sc
from wulffdual.errors import NotHemisphericalError, SampleFileError, UnsupportedDimensionError

LEVEL = 4
NORTH = np.array([[0.0, 0.0, 1.0]])


def _pentagon(polar_angle: float) -> sc.FinitePointSet:
    azimuths = 2 * np.pi * np.arange(5) / 5
    return sc.FinitePointSet(
        np.stack(
            [
                np.sin(polar_angle) * np.cos(azimuths),
                np.sin(polar_angle) * np.sin(azimuths),
                np.full(5, np.cos(polar_angle)),
            ],
            axis=1,
        )
    )


def test_hemisphere_contains():
    """
    Closed hemispheres include their boundary great circle.
    """
    centre = sg.SpherePoint(NORTH[0])
    assert sc.hemisphere_contains(centre, sg.SpherePoint(np.array([1.0, 0.0, 0.0])))
    assert sc.hemisphere_contains(centre, sg.SpherePoint(np.array([1.0, 0.0, 0.5])))
    assert not sc.hemisphere_contains(centre, sg.SpherePoint(np.array([1.0, 0.0, -0.5])))


def test_polar_of_a_point_is_a_hemisphere():
    """
    The polar of {N} is the closed upper hemisphere.
    """
    region = sc.polar_set(sc.FinitePointSet(NORTH), LEVEL)
    vertices = sg.icosphere(LEVEL).vertices
    assert np.array_equal(region.indicator, vertices[:, 2] >= 0.0)
    assert region.kind == "polar"
    assert region.fraction == pytest.approx(0.5, abs=0.02)


def test_polar_on_the_circle():
    """
    Point sets of S^1 get an exact predicate.
    """
    region = sc.polar_set(sc.FinitePointSet(np.array([[1.0, 0.0]])))
    inside = region.contains(np.array([[0.0, 1.0], [1.0, 0.0], [-1.0, 0.0], [0.6, -0.8]]))
    assert inside.tolist() == [True, True, False, True]


def test_not_hemispherical():
    """
    Antipodal pairs and sets surrounding the origin are refused.
    """
    with pytest.raises(NotHemisphericalError):
        sc.FinitePointSet(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))
    with pytest.raises(NotHemisphericalError):
        sc.FinitePointSet(np.array([[1.0, 0.0], [-0.5, 0.8], [-0.5, -0.8]]))
    with pytest.raises(NotHemisphericalError):
        sc.FinitePointSet(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, -1.0, 0.0]]))


def test_rank():
    """
    The rank of a point set is that of its span.
    """
    assert sc.FinitePointSet(NORTH).rank == 1
    assert sc.FinitePointSet(np.array([[0.0, 0.0, 1.0], [0.0, 0.6, 0.8]])).rank == 2
    assert _pentagon(0.4).rank == 3


def test_load_points(tmp_path):
    """
    Point files with and without a header, with comments.
    """
    plain = write_text(str(tmp_path), "plain.csv", "# cap\n0,0,1\n0,0.6,0.8\n")
    assert sc.load_points(plain).points.shape == (2, 3)
    headed = write_text(str(tmp_path), "headed.csv", "x,y,z\n0,0,2\n0.6,0,0.8\n")
    points = sc.load_points(headed).points
    assert points.shape == (2, 3)
    assert np.allclose(points[0], [0.0, 0.0, 1.0])


def test_load_points_errors(tmp_path):
    """
    Empty files, zero vectors and non-hemispherical sets.
    """
    with pytest.raises(SampleFileError):
        sc.load_points(write_text(str(tmp_path), "empty.csv", ""))
    with pytest.raises(SampleFileError):
        sc.load_points(write_text(str(tmp_path), "zero.csv", "0,0,1\n0,0,0\n"))
    with pytest.raises(SampleFileError):
        sc.load_points(write_text(str(tmp_path), "words.csv", "x,y,z\n0,0,one\n"))
    with pytest.raises(NotHemisphericalError):
        sc.load_points(write_text(str(tmp_path), "pair.csv", "0,0,1\n0,0,-1\n"))


def test_hull_membership():
    """
    Normalised nonnegative combinations belong to the hull.
    """
    source = _pentagon(0.5)
    inside = sg.normalize_rows(source.points[:2].sum(axis=0, keepdims=True))
    outside = np.array([[0.0, 0.0, -1.0], [1.0, 0.0, 0.0]])
    assert sc.hull_membership(source, np.vstack([NORTH, inside, source.points])).all()
    assert not sc.hull_membership(source, outside).any()


def test_convex_hull_indicator_matches_predicate():
    """
    The cone planes and the least-squares test agree on the grid.
    """
    hull = sc.spherical_convex_hull(_pentagon(0.6), LEVEL)
    vertices = sg.icosphere(LEVEL).vertices
    far = np.abs(vertices[:, 2] - np.cos(0.6)) > 0.2
    assert np.array_equal(hull.indicator[far], hull.contains(vertices[far]))
    with pytest.raises(UnsupportedDimensionError):
        sc.spherical_convex_hull(sc.FinitePointSet(np.array([[1.0, 0.0]])))


@pytest.mark.parametrize("seed", range(100))
def test_maehara_on_random_caps(seed):
    """
    The polar of the hull is the intersection of the hemispheres.
    """
    source = sc.FinitePointSet(random_cap_points(5, seed))
    comparison = sc.maehara_check(source, LEVEL)
    assert comparison.agree
    assert comparison.mismatched == 0


@pytest.mark.parametrize("seed", range(5))
def test_double_polar_contains_hull(seed):
    """
    The sampled double polar always contains the sampled hull.
    """
    report = sc.double_polar_check(sc.FinitePointSet(random_cap_points(5, seed)), LEVEL)
    assert report.inclusion
    assert report.status in ("agree", "disagree")


@pytest.mark.parametrize("polar_angle", [0.3, 0.6, 1.0])
def test_double_polar_of_pentagon(polar_angle):
    """
    A regular spherical pentagon equals its double polar.
    """
    report = sc.double_polar_check(_pentagon(polar_angle), LEVEL)
    assert report.status == "agree"
    assert report.passed


def test_double_polar_degenerate():
    """
    Hulls without interior are reported, not compared.
    """
    report = sc.double_polar_check(sc.FinitePointSet(np.array([[0.0, 0.0, 1.0], [0.0, 0.6, 0.8]])), LEVEL)
    assert report.status == "degenerate"
    assert report.agreement is None
    assert not report.passed


# pylint: disable=redefined-outer-name
def test_spherical_wulff_projects_to_wulff_shape(disc):
    """
    The spherical Wulff shape is the lift of the Wulff shape.
    """
    region = sc.spherical_wulff(disc, LEVEL)
    assert np.all(region.grid[region.indicator][:, 2] > 0.0)
    angles = 2 * np.pi * np.arange(4096) / 4096
    expected = sc.lifted_body(fixtures.translated_disc_radial(sg.angles_to_points(angles)), LEVEL)
    assert sc.region_agreement(region, expected).agree


# pylint: disable=redefined-outer-name
def test_spherical_dual_wulff(disc):
    """
    The polar of the spherical Wulff shape lifts the body with radial
    function 1 / g(-u).
    """
    dual = sc.spherical_dual_wulff(disc, LEVEL)
    assert np.all(dual.grid[dual.indicator][:, 2] > 0.0)
    angles = 2 * np.pi * np.arange(4096) / 4096
    radii = 1.0 / disc.values(-sg.angles_to_points(angles))
    assert sc.region_agreement(dual, sc.lifted_body(radii, LEVEL)).agree


# pylint: disable=redefined-outer-name
def test_lifted_graph_blowup(disc, harmonic):
    """
    Blown-up graph points are (-theta, g) / sqrt(1 + g^2).
    """
    blown = sc.lifted_graph_blowup(disc)
    points = disc.grid_points()
    values = disc.values(points)
    expected = np.hstack([-points, values[:, None]]) / np.sqrt(1 + values**2)[:, None]
    assert np.allclose(blown, expected, atol=1e-12)
    with pytest.raises(UnsupportedDimensionError):
        sc.lifted_graph_blowup(harmonic)


def test_is_spherical_convex():
    """
    Hulls pass the arc test; two separate caps fail it.
    """
    hull = sc.spherical_convex_hull(_pentagon(0.6), LEVEL)
    assert sc.is_spherical_convex(hull).convex
    vertices = sg.icosphere(LEVEL).vertices
    east = sg.normalize_rows(np.array([[1.0, 0.0, 1.0]]))[0]
    west = sg.normalize_rows(np.array([[-1.0, 0.0, 1.0]]))[0]
    caps = (vertices @ east > np.cos(0.3)) | (vertices @ west > np.cos(0.3))
    check = sc.is_spherical_convex(sc.SphericalRegion(caps, LEVEL))
    assert not check.convex
    assert check.violations > 0
    assert check.pairs == 200


def test_intersection_of_hemispheres_is_convex():
    """
    Intersections keep exact predicates and stay convex.
    """
    first = sc.polar_set(sc.FinitePointSet(NORTH), LEVEL)
    second = sc.polar_set(sc.FinitePointSet(np.array([[0.0, 0.6, 0.8]])), LEVEL)
    both = sc.intersect(first, second)
    assert np.array_equal(both.indicator, first.indicator & second.indicator)
    assert both.predicate is not None
    assert both.contains(np.array([[0.0, 0.0, 1.0]]))[0]
    assert sc.is_spherical_convex(both).convex


def test_region_agreement_needs_same_grid():
    """
    Regions on different grids cannot be compared.
    """
    first = sc.polar_set(sc.FinitePointSet(NORTH), 3)
    second = sc.polar_set(sc.FinitePointSet(NORTH), 4)
    with pytest.raises(ValueError):
        sc.region_agreement(first, second)


def test_region_to_frame():
    """
    Regions export as grid tables.
    """
    frame = sc.polar_set(sc.FinitePointSet(NORTH), 2).to_frame()
    assert list(frame.columns) == ["x", "y", "z", "inside"]
    assert len(frame) == 162
