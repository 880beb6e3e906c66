"""Tests for the acceptance suite."""

import math

import numpy as np
import pytest
from rich.console import Console

from absorbing_walk.exceptions import ConvergenceError, InvalidArgumentError
from absorbing_walk.special_functions import BesselRow, bessel_j_row
from absorbing_walk.verify import (
    AcceptanceSuite,
    CheckResult,
    CheckStatus,
    VerificationReport,
    render_table,
)


@pytest.fixture
def suite():
    return AcceptanceSuite("quick")


@pytest.fixture
def mixed_report():
    return VerificationReport("quick", [
        CheckResult("duality", "max gap", CheckStatus.PASS, 1e-15, 1e-12),
        CheckResult("unitarity", "max |S - 1|", CheckStatus.FAIL, 1e-6, 1e-10, ["S drifted"]),
    ])


def perturbed_rows(mocker):
    """Patch the propagator's Bessel rows with a 1e-6 error at order 2."""

    def fake(x, n_max):
        row = bessel_j_row(x, n_max)
        values = row.values.copy()
        values[2] += 1e-6
        values.setflags(write=False)
        return BesselRow(row.x, values, row.n_max)

    return mocker.patch.object(__import__("sys").modules["absorbing_walk.propagator"], "bessel_j_row", side_effect=fake)


class TestReport:
    """Test cases for report bookkeeping."""

    def test_counts(self, mixed_report):
        assert mixed_report.checks_passed == 1
        assert mixed_report.checks_failed == 1
        assert not mixed_report.passed

    def test_to_dict(self, mixed_report):
        data = mixed_report.to_dict()
        assert data["summary"] == {"total_checks": 2, "checks_passed": 1, "checks_failed": 1}
        assert data["results"][1]["status"] == "fail"
        assert data["results"][1]["messages"] == ["S drifted"]

    def test_render_table(self, mixed_report):
        console = Console(record=True, width=120)
        render_table(mixed_report, console)
        text = console.export_text()
        assert "duality" in text
        assert "S drifted" in text
        assert "Passed: 1  Failed: 1" in text


class TestAcceptanceSuite:
    """Test cases for AcceptanceSuite."""

    def test_unknown_level(self):
        with pytest.raises(InvalidArgumentError):
            AcceptanceSuite("medium")

    def test_every_criterion_listed(self, suite):
        names = [check.__name__ for check in suite.checks()]
        assert len(names) == 11
        assert "check_wigner_invariants" in names

    def test_errors_become_results(self, suite, mocker):
        def check_explodes():
            raise ConvergenceError("series did not settle")

        mocker.patch.object(AcceptanceSuite, "checks", return_value=[check_explodes])
        report = suite.run()
        assert report.results[0].name == "explodes"
        assert report.results[0].status is CheckStatus.ERROR
        assert math.isnan(report.results[0].measured)
        assert report.to_dict()["results"][0]["measured"] is None
        assert not report.passed

    def test_duality(self, suite):
        assert suite.check_duality().status is CheckStatus.PASS

    def test_pole_structure(self, suite):
        assert suite.check_pole_structure().status is CheckStatus.PASS

    def test_special_functions(self, suite):
        assert suite.check_special_functions().status is CheckStatus.PASS

    def test_resolvent(self, suite):
        result = suite.check_resolvent()
        assert result.status is CheckStatus.PASS
        assert len(result.messages) == 2

    def test_crossover_asymptote(self, suite):
        assert suite.check_crossover_asymptote().status is CheckStatus.PASS

    def test_perturbed_bessel_rows_are_caught(self, suite, mocker):
        patched = perturbed_rows(mocker)
        result = suite.check_oracle_equivalence()
        assert patched.called
        assert result.status is CheckStatus.FAIL
        assert result.measured > 1e-8

    @pytest.mark.slow
    def test_quick_suite_passes(self, suite):
        report = suite.run()
        failures = [r.to_dict() for r in report.results if r.status is not CheckStatus.PASS]
        assert failures == []

    @pytest.mark.slow
    def test_wigner_invariants(self, suite):
        result = suite.check_wigner_invariants()
        assert result.status is CheckStatus.PASS, result.messages

    @pytest.mark.slow
    def test_first_passage(self, suite):
        assert suite.check_first_passage().status is CheckStatus.PASS

    def test_report_json_is_finite(self, suite, mocker):
        mocker.patch.object(AcceptanceSuite, "checks", return_value=[suite.check_pole_structure])
        data = suite.run().to_dict()
        assert np.isfinite(data["results"][0]["measured"])
