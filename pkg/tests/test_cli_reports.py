# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Test the command line: exit codes, reports and artifacts.
"""

import json
import os

import numpy as np
import pytest

# pylint: disable=unused-import
# pylint: disable=no-name-in-module
from test_common import write_text

from wulffdual import cli_reports, common, fixtures
from wulffdual.errors import ConfigError

DISC_SPEC = "dim = 1\nkind = fourier\na0 = 1\ncos1 = 0.2\n"


def run(tmp_path, *args: str) -> int:
    """
    Run a command writing into a fresh output directory.
    """
    return cli_reports.main(list(args) + ["--out", os.path.join(str(tmp_path), "out")])


def test_check_disc(tmp_path, capsys):
    """
    The translated disc is convex, strictly convex and stable.
    """
    assert run(tmp_path, "check", "--fixture", "disc", "--format", "csv") == cli_reports.EXIT_OK
    out = capsys.readouterr().out
    assert "convex: yes" in out
    assert "stable: yes" in out
    out_dir = os.path.join(str(tmp_path), "out")
    assert os.path.exists(os.path.join(out_dir, "report.txt"))
    assert os.path.exists(os.path.join(out_dir, "critical_points.csv"))
    with open(os.path.join(out_dir, "config.json"), "r", encoding="utf-8") as config_file:
        config = json.load(config_file)
    assert config["command"] == "check"
    assert config["fixture"] == "disc"


def test_check_nonconvex(tmp_path, capsys):
    """
    A non-convex integrand fails the check with a witness.
    """
    assert run(tmp_path, "check", "--fixture", "nonconvex", "--format", "csv") == cli_reports.EXIT_FAILED
    assert "convex: no (witness" in capsys.readouterr().out


def test_check_definition_file(tmp_path):
    """
    Definition files are checked like fixtures.
    """
    path = write_text(str(tmp_path), "disc.ini", DISC_SPEC)
    assert run(tmp_path, "check", "--integrand", path, "--format", "csv") == cli_reports.EXIT_OK


@pytest.mark.parametrize(
    "args",
    [
        ["check", "--integrand", "missing.ini"],
        ["check"],
        ["check", "--fixture", "disc", "--grid", "10"],
        ["check", "--fixture", "disc", "--tol", "0.5"],
        ["front", "--fixture", "disc", "--t", "3.2"],
        ["check", "--fixture", "disc", "--format", "png"],
        ["polar"],
        ["unknown"],
    ],
)
def test_usage_errors(tmp_path, args):
    """
    Bad files and out-of-range options exit with the usage code.
    """
    assert run(tmp_path, *args) == cli_reports.EXIT_USAGE


def test_fixture_and_file_are_exclusive(tmp_path):
    """
    Only one integrand per run.
    """
    path = write_text(str(tmp_path), "disc.ini", DISC_SPEC)
    assert run(tmp_path, "check", "--fixture", "disc", "--integrand", path) == cli_reports.EXIT_USAGE


def test_bad_definition_file(tmp_path):
    """
    Parse errors exit with the usage code.
    """
    path = write_text(str(tmp_path), "bad.ini", "dim = 3\nkind = fourier\n")
    assert run(tmp_path, "check", "--integrand", path) == cli_reports.EXIT_USAGE


def test_dual(tmp_path, capsys):
    """
    The ball is dualised by inversion; non-convex integrands are refused.
    """
    assert run(tmp_path, "dual", "--fixture", "ball", "--format", "csv,obj") == cli_reports.EXIT_OK
    assert "Andrews inversion" in capsys.readouterr().out
    out_dir = os.path.join(str(tmp_path), "out")
    for name in ("dual.csv", "wulff.obj", "dual_wulff.obj"):
        assert os.path.exists(os.path.join(out_dir, name))
    assert run(tmp_path, "dual", "--fixture", "nonconvex") == cli_reports.EXIT_FAILED


def test_verify_disc(tmp_path, capsys):
    """
    Every suite passes for the translated disc.
    """
    assert run(tmp_path, "verify", "--fixture", "disc", "--format", "csv") == cli_reports.EXIT_OK
    out = capsys.readouterr().out
    assert "index duality: pass" in out
    assert "failing suites" not in out


def test_verify_ellipse(tmp_path, capsys):
    """
    Repeated critical values leave the index duality without its hypothesis.
    """
    assert run(tmp_path, "verify", "--fixture", "ellipse", "--format", "csv") == cli_reports.EXIT_HYPOTHESIS
    out = capsys.readouterr().out
    assert "index duality: hypothesis failed" in out
    assert "simultaneous stability: pass" in out
    assert "hypothesis failed: hypothesis failed" not in out


def test_verify_flat_blend(tmp_path, capsys):
    """
    Without strict convexity the dual has a corner and every other suite
    reports an unmet hypothesis instead of a failure.
    """
    assert run(tmp_path, "verify", "--fixture", "flat-blend", "--format", "csv") == cli_reports.EXIT_HYPOTHESIS
    out = capsys.readouterr().out
    assert "dual smoothness: pass: dual not C¹" in out
    for name in ("support inequalities", "non-degeneracy transfer", "origin membership", "index duality"):
        assert f"{name}: hypothesis failed: not strictly convex" in out
    assert "FAIL" not in out
    assert "failing suites" not in out
    assert "hypothesis failed: hypothesis failed" not in out


def test_run_suites_flat_blend():
    """
    No suite fails while holding its hypothesis for the flat blend.
    """
    results = cli_reports.run_suites(fixtures.flat_blend(), common.DEFAULT_TOLERANCES)
    assert results[0][:3] == ("dual smoothness", True, True)
    assert all(not hypothesis for _, _, hypothesis, _ in results[1:])
    assert not any(hypothesis and not passed for _, passed, hypothesis, _ in results)


def test_verify_nonconvex(tmp_path):
    """
    Verification needs a convex integrand.
    """
    assert run(tmp_path, "verify", "--fixture", "nonconvex") == cli_reports.EXIT_FAILED


def test_front_ball_collapses(tmp_path, capsys):
    """
    The lifted unit circle collapses to N at t = pi/4.
    """
    code = run(tmp_path, "front", "--fixture", "ball", "--t", f"0,{np.pi / 4!r}", "--format", "csv,obj")
    assert code == cli_reports.EXIT_OK
    out = capsys.readouterr().out
    assert "front collapses to the point" in out
    assert os.path.exists(os.path.join(str(tmp_path), "out", "fronts.csv"))


def test_fronts_need_curves(tmp_path):
    """
    Fronts and caustics on S^2 are reported as an unmet hypothesis.
    """
    assert run(tmp_path, "front", "--fixture", "harmonic") == cli_reports.EXIT_HYPOTHESIS
    assert run(tmp_path, "caustic", "--fixture", "harmonic") == cli_reports.EXIT_HYPOTHESIS
    assert run(tmp_path, "front", "--fixture", "flat-blend") == cli_reports.EXIT_HYPOTHESIS


def test_caustic_disc(tmp_path, capsys):
    """
    The caustic report names both origin memberships.
    """
    assert run(tmp_path, "caustic", "--fixture", "disc", "--format", "csv") == cli_reports.EXIT_OK
    out = capsys.readouterr().out
    assert "north pole on caustic: no" in out
    assert "north pole on symmetry set: no" in out
    assert os.path.exists(os.path.join(str(tmp_path), "out", "caustic.csv"))


def test_polar(tmp_path, capsys):
    """
    Polar of a single point; antipodal pairs are not hemispherical.
    """
    single = write_text(str(tmp_path), "north.csv", "x,y,z\n0,0,1\n")
    assert run(tmp_path, "polar", "--points", single, "--format", "csv") == cli_reports.EXIT_OK
    assert "double polar: degenerate" in capsys.readouterr().out
    pair = write_text(str(tmp_path), "pair.csv", "x,y,z\n0,0,1\n0,0,-1\n")
    assert run(tmp_path, "polar", "--points", pair) == cli_reports.EXIT_FAILED


def test_run_config_validation():
    """
    Options are checked when the config is built.
    """
    with pytest.raises(ConfigError):
        cli_reports.RunConfig(command="check", out="", grid=100)
    with pytest.raises(ConfigError):
        cli_reports.RunConfig(command="check", out="", tolerances={"value": 1.0})
    with pytest.raises(ConfigError):
        cli_reports.RunConfig(command="front", out="", t=[-np.pi])
    config = cli_reports.RunConfig(command="check", out="", grid=512, tolerances={"degenerate": 1e-8})
    assert config.sample_grid().circle_samples == 512
    assert config.tolerance_set().degenerate == 1e-8
    assert config.tolerance_set().value == 1e-6
    assert config.wants("svg")


def test_run_config_output_dir():
    """
    Without --out the directory is hashed from the config.
    """
    first = cli_reports.RunConfig(command="check", out="", fixture="disc")
    second = cli_reports.RunConfig(command="check", out="", fixture="ellipse")
    assert first.output_dir().startswith(os.path.join("out", "check"))
    assert first.output_dir() != second.output_dir()
    assert cli_reports.RunConfig(command="check", out="here").output_dir() == "here"
