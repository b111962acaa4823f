"""
Tests for the cfunc command line
"""

import json

import pytest
from click.testing import CliRunner

from cfunc import __version__, cli as cli_module
from cfunc.cli import cli
from cfunc.errors import OutOfRangeError
from cfunc.logging_setup import configure_logging
from cfunc.verify import CheckRegistry


@pytest.fixture
def runner():
    yield CliRunner()
    # the runner's stderr is closed once invoke returns
    configure_logging("WARNING")


def invoke(runner, *args):
    return runner.invoke(cli, list(args), env={"CFUNC_FORMAT": None, "CFUNC_SEED": None, "CFUNC_WORKERS": None})


def test_version(runner):
    """Test --version prints the package version"""
    result = invoke(runner, "--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_jacobi_exact(runner):
    """Test J(omega^3, omega^2) at p = 7 is 2 + i sqrt(3)"""
    result = invoke(runner, "jacobi", "--p", "7", "--j1", "3", "--j2", "2", "--exact")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["complex"] == pytest.approx([2.0, 3 ** 0.5])
    assert report["cycint"] is not None


def test_bad_input_exits_2(runner):
    """Test toolkit errors map to exit code 2"""
    assert invoke(runner, "setup", "--p", "7").exit_code == 2
    assert invoke(runner, "jacobi", "--p", "8", "--j1", "1", "--j2", "1").exit_code == 2
    assert invoke(runner, "solve", "--space", "equivariant", "--p", "13").exit_code == 2


def test_pair_representative(runner):
    """Test a single pair is classified with its witness"""
    result = invoke(runner, "lemma41-scan", "--d", "5", "--j", "3", "--k", "4")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["representative"] == [1, 2]
    assert (report["witness_x"], report["witness_sign"]) == (3, -1)


def test_scan_as_csv(runner):
    """Test the exceptional pairs mod 6 as CSV rows"""
    result = invoke(runner, "--format", "csv", "lemma41-scan", "--d", "6")
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0].startswith("d,j,k,representative")
    assert len(lines) == 1 + 8


def test_setup_as_table(runner):
    """Test the rich table output"""
    result = invoke(runner, "--format", "table", "setup", "--p", "13")
    assert result.exit_code == 0
    assert "odd_prime_factor" in result.output


def test_solve_p7(runner):
    """Test solving at p = 7 reports six solutions with multiplicity"""
    result = invoke(runner, "solve", "--d", "7")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert sum(entry["multiplicity"] for entry in report["solutions"]) == 6
    assert report["method"] == "lemma68"


def test_chebotarev_minor(runner):
    """Test a single minor at p = 5"""
    result = invoke(runner, "chebotarev", "--p", "5", "--rows", "0,1", "--cols", "1,2")
    assert result.exit_code == 0
    assert json.loads(result.output)["nonzero"] is True


def test_uncertainty_summary(runner):
    """Test the sweep summary has no violations"""
    result = invoke(runner, "uncertainty", "--p", "7", "--samples", "50")
    assert result.exit_code == 0
    assert json.loads(result.output)["violations"] == 0


def small_registry():
    registry = CheckRegistry()

    @registry.register("always", "demo")
    def always(config):
        """Passes"""
        return True, "fine"

    @registry.register("broken", "demo")
    def broken(config):
        """Raises a toolkit error"""
        raise OutOfRangeError("bad range")

    return registry


def test_verify_table(runner, monkeypatch):
    """Test verify prints a pass/fail table and exits 1 on a failing check"""
    monkeypatch.setattr(cli_module, "registry", small_registry())
    result = invoke(runner, "verify")
    assert result.exit_code == 1
    assert "PASS" in result.output and "FAIL" in result.output


def test_verify_csv(runner, monkeypatch):
    """Test verify rows as CSV"""
    monkeypatch.setattr(cli_module, "registry", small_registry())
    result = invoke(runner, "--format", "csv", "verify")
    assert result.exit_code == 1
    lines = result.output.strip().splitlines()
    assert lines[0] == "name,category,passed,seconds,detail"
    assert lines[1].startswith("always,demo,True")
