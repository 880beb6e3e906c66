"""Tests for survival, first-passage and absorption observables."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from absorbing_walk.exceptions import InvalidArgumentError
from absorbing_walk.observables import (
    CROSSOVER_LIMIT,
    QuadratureConfig,
    absorption_asymptote,
    absorption_fraction,
    absorption_probability,
    absorption_probability_timedomain,
    first_passage_density,
    incoming_weight,
    reflection_amplitude,
    scattering_mode,
    survival,
    survival_curve,
)
from absorbing_walk.oracle import oracle_column
from absorbing_walk.propagator import TimePoint
from absorbing_walk.resolvent import WalkParams


class TestScattering:
    """Test cases for R(k) and A(k)."""

    def test_perfect_absorption(self):
        assert abs(reflection_amplitude(math.pi / 2, 1.0)) < 1e-15
        assert absorption_fraction(math.pi / 2, 1.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("eta", [2.0, 0.5])
    def test_dual_pair_at_half_pi(self, eta):
        assert absorption_fraction(math.pi / 2, eta) == pytest.approx(8.0 / 9.0, abs=1e-15)

    def test_hard_wall_reflects(self):
        assert abs(reflection_amplitude(1.0, 0.0)) == pytest.approx(1.0)
        assert absorption_fraction(1.0, 0.0) == 0.0

    @pytest.mark.parametrize("k", [0.0, math.pi, -0.1])
    def test_momentum_range(self, k):
        with pytest.raises(InvalidArgumentError):
            reflection_amplitude(k, 1.0)

    def test_negative_eta(self):
        with pytest.raises(InvalidArgumentError):
            absorption_fraction(1.0, -0.5)

    def test_scattering_mode(self):
        mode = scattering_mode(math.pi / 3, 0.5, 4, omega=2.0)
        assert mode.energy == pytest.approx(1.0)
        assert mode.incoming_weight == pytest.approx(incoming_weight(math.pi / 3, 4))
        assert mode.absorbed_fraction == pytest.approx(1.0 - abs(mode.reflection) ** 2)

    @given(
        k=st.floats(min_value=1e-3, max_value=math.pi - 1e-3),
        eta=st.floats(min_value=0.0, max_value=50.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_flux_balance(self, k, eta):
        assert absorption_fraction(k, eta) == pytest.approx(1.0 - abs(reflection_amplitude(k, eta)) ** 2, abs=1e-12)


class TestAbsorptionProbability:
    """Test cases for the total absorption probability."""

    def test_no_absorption(self):
        assert absorption_probability(5, 0.0) == 0.0

    def test_crossover_limit(self):
        assert abs(absorption_probability(200, 1.0) - CROSSOVER_LIMIT) < 5e-3

    def test_weak_slope(self):
        """For small eta P_abs/eta tends to (4/pi)(1 + 1/255) at s0 = 8."""
        eta = 1e-4
        assert absorption_probability(8, eta) / eta == pytest.approx(4.0 / math.pi * (1.0 + 1.0 / 255.0), rel=1e-3)

    def test_strong_slope(self):
        eta = 1e4
        assert absorption_probability(8, eta) * eta == pytest.approx(4.0 / math.pi * (1.0 + 1.0 / 255.0), rel=1e-3)

    def test_bounded(self):
        for eta in (0.1, 1.0, 7.0):
            assert 0.0 < absorption_probability(3, eta) < 1.0

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            absorption_probability(0, 1.0)
        with pytest.raises(InvalidArgumentError):
            absorption_probability(1, float("inf"))

    def test_quadrature_config(self):
        with pytest.raises(InvalidArgumentError):
            QuadratureConfig(base_nodes=1)
        with pytest.raises(InvalidArgumentError):
            QuadratureConfig(abs_tol=0.0)
        with pytest.raises(InvalidArgumentError):
            QuadratureConfig(max_refinements=0)

    @given(
        eta=st.floats(min_value=0.05, max_value=20.0),
        s0=st.integers(min_value=1, max_value=20),
    )
    @settings(max_examples=50, deadline=None)
    def test_duality(self, eta, s0):
        assert abs(absorption_probability(s0, eta) - absorption_probability(s0, 1.0 / eta)) < 1e-12

    def test_asymptote(self):
        assert absorption_asymptote(8, 0.25) == pytest.approx(1.0 / math.pi)
        assert absorption_asymptote(8, 4.0) == pytest.approx(1.0 / math.pi)
        assert absorption_asymptote(8, 1.0) == CROSSOVER_LIMIT

    def test_asymptote_is_approached(self):
        assert absorption_probability(100, 0.01) == pytest.approx(absorption_asymptote(100, 0.01), rel=0.05)


class TestSurvival:
    """Test cases for S(t|s0) and F(t|s0)."""

    def test_initial_value(self):
        params = WalkParams(1.0, 2.0)
        assert survival(4, TimePoint.at(0.0, 1.0), params) == 1.0

    def test_no_absorption(self):
        params = WalkParams(1.0, 0.0)
        assert survival(2, TimePoint.at(12.0, 1.0), params) == pytest.approx(1.0, abs=1e-10)
        assert first_passage_density(2, TimePoint.at(12.0, 1.0), params) == 0.0

    def test_first_passage_at_time_zero(self):
        params = WalkParams(1.0, 0.7)
        tp = TimePoint.at(0.0, 1.0)
        assert first_passage_density(1, tp, params) == pytest.approx(0.7)
        assert first_passage_density(3, tp, params) == 0.0

    @pytest.mark.parametrize("eta", [0.5, 2.0])
    def test_density_is_loss_rate(self, eta):
        """F = -dS/dt by central differences."""
        params = WalkParams.from_eta(eta)
        t, h = 5.3, 1e-4
        derivative = (
            survival(3, TimePoint.at(t + h, 1.0), params) - survival(3, TimePoint.at(t - h, 1.0), params)
        ) / (2.0 * h)
        assert first_passage_density(3, TimePoint.at(t, 1.0), params) == pytest.approx(-derivative, abs=1e-6)

    def test_survival_decreases(self):
        params = WalkParams.from_eta(1.0)
        values = [survival(2, TimePoint.at(t, 1.0), params) for t in (1.0, 4.0, 9.0, 16.0)]
        assert values == sorted(values, reverse=True)
        assert values[-1] < 1.0

    def test_curve_matches_pointwise(self):
        params = WalkParams.from_eta(0.5)
        rows = survival_curve(3, [0.0, 1.5, 4.0], params)
        assert rows[0] == (0.0, 1.0, 0.0)
        for t, S, F in rows[1:]:
            tp = TimePoint.at(t, 1.0)
            assert S == pytest.approx(survival(3, tp, params), abs=1e-14)
            assert F == pytest.approx(first_passage_density(3, tp, params), abs=1e-14)

    def test_curve_site_override(self):
        params = WalkParams(1.0, 0.0)
        full = survival_curve(2, [3.0], params, sites=80)
        clipped = survival_curve(2, [3.0], params, sites=1)
        assert full[0][1] == pytest.approx(1.0, abs=1e-12)
        assert clipped[0][1] < 1.0

    def test_curve_start_at_edge(self):
        params = WalkParams(1.0, 0.4)
        assert survival_curve(1, [0.0], params) == [(0.0, 1.0, 0.4)]

    def test_timedomain_needs_long_run(self):
        with pytest.raises(InvalidArgumentError):
            absorption_probability_timedomain(3, WalkParams(1.0, 1.0), 0.5)

    @pytest.mark.slow
    def test_timedomain_matches_integral(self):
        params = WalkParams.from_eta(0.5)
        late = absorption_probability_timedomain(3, params, 200.0)
        assert abs(late - absorption_probability(3, 0.5)) < 1e-3

    @pytest.mark.slow
    def test_timedomain_stays_below_integral_for_weak_coupling(self):
        params = WalkParams.from_eta(0.5)
        exact = absorption_probability(8, 0.5)
        late = absorption_probability_timedomain(8, params, 200.0)
        assert late <= exact + 1e-8
        assert exact - late < 1e-3

    @pytest.mark.slow
    def test_timedomain_strong_coupling_agrees_with_oracle(self):
        """At eta = 2 the closed-form survival matches brute force, above the integral."""
        params = WalkParams.from_eta(2.0)
        tp = TimePoint.at(200.0, 1.0)
        reference = oracle_column(8, tp, params, method="expm_multiply")
        oracle_absorbed = 1.0 - float(np.sum(np.abs(reference) ** 2))
        late = absorption_probability_timedomain(8, params, 200.0)
        assert late == pytest.approx(oracle_absorbed, abs=1e-10)
        integral = absorption_probability(8, 2.0)
        assert late > integral
        assert late - integral < 1e-3
