"""Tests for the doubled-lattice Wigner function."""

import math

import numpy as np
import pytest

from absorbing_walk.exceptions import ConsistencyError, InvalidArgumentError, RegimeError
from absorbing_walk.propagator import AmplitudeVector, TimePoint, propagator_column, propagator_split
from absorbing_walk.resolvent import WalkParams
from absorbing_walk.wigner import (
    STRONG_CHANNELS,
    WEAK_CHANNELS,
    k_grid,
    localization_length,
    wigner_field,
    wigner_field_from_density,
    wigner_pole_closed_form,
    wigner_pole_cosine_form,
    wigner_strong_decomposition,
    wigner_weak_decomposition,
)

ORIGIN = TimePoint.at(0.0, 1.0)


@pytest.fixture
def two_site_state():
    """Equal-weight superposition of sites 1 and 2."""
    return AmplitudeVector.from_sites({1: 1 / math.sqrt(2), 2: 1 / math.sqrt(2)})


class TestGrid:
    """Test cases for the momentum grid."""

    def test_periodic_grid(self):
        k = k_grid(8)
        assert k[0] == -math.pi
        assert k.size == 8
        assert k[-1] < math.pi

    def test_too_small(self):
        with pytest.raises(InvalidArgumentError):
            k_grid(3)


class TestWignerField:
    """Test cases for the field of explicit states."""

    def test_localized_state(self):
        field = wigner_field(AmplitudeVector.localized(3), 10, 8, ORIGIN)
        expected = np.zeros_like(field.total)
        expected[6 - 2] = 1.0 / (2.0 * math.pi)
        assert np.max(np.abs(field.total - expected)) < 1e-15
        assert field.imag_residue < 1e-15

    def test_two_site_coherence(self, two_site_state):
        field = wigner_field(two_site_state, 6, 16, ORIGIN)
        assert np.allclose(field.total[0], 1.0 / (4.0 * math.pi), atol=1e-15)
        assert np.allclose(field.total[1], np.cos(field.k_values) / (2.0 * math.pi), atol=1e-15)
        assert np.allclose(field.total[2], 1.0 / (4.0 * math.pi), atol=1e-15)
        assert np.allclose(field.total[3:], 0.0, atol=1e-15)

    def test_mean_position(self, two_site_state):
        field = wigner_field(two_site_state, 6, 8, ORIGIN)
        assert list(field.x_c) == [1.0, 1.5, 2.0, 2.5, 3.0]

    def test_marginal_and_trace(self):
        params = WalkParams.from_eta(0.5)
        tp = TimePoint.at(4.0, 1.0)
        psi = propagator_column(2, tp, params, 40)
        field = wigner_field(AmplitudeVector(psi), 60, 128, tp)
        marginal = field.k_marginal()
        for row, m in enumerate(field.m_values):
            expected = abs(psi[m // 2 - 1]) ** 2 if m % 2 == 0 else 0.0
            assert marginal[row] == pytest.approx(expected, abs=1e-13)
        assert field.trace() == pytest.approx(float(np.sum(np.abs(psi[:30]) ** 2)), abs=1e-12)

    def test_density_matches_pure_state(self):
        params = WalkParams.from_eta(2.0)
        tp = TimePoint.at(3.0, 1.0)
        psi = propagator_column(3, tp, params, 20)
        pure = wigner_field(AmplitudeVector(psi), 30, 32, tp)
        mixed = wigner_field_from_density(np.outer(psi, psi.conj()), 30, 32, tp)
        assert np.max(np.abs(pure.total - mixed.total)) < 1e-15

    def test_non_hermitian_density(self):
        rho = np.array([[0.0, 1j], [0.0, 0.0]])
        with pytest.raises(ConsistencyError):
            wigner_field_from_density(rho, 4, 8, ORIGIN)

    def test_invalid_grid(self, two_site_state):
        with pytest.raises(InvalidArgumentError):
            wigner_field(two_site_state, 1, 8, ORIGIN)
        with pytest.raises(InvalidArgumentError):
            wigner_field(two_site_state, 6, 2, ORIGIN)


class TestDecompositions:
    """Test cases for the channel decompositions."""

    @pytest.mark.parametrize("eta,builder,names", [
        (0.5, wigner_weak_decomposition, WEAK_CHANNELS),
        (1.5, wigner_strong_decomposition, STRONG_CHANNELS),
    ])
    def test_channels_recombine(self, eta, builder, names):
        params = WalkParams.from_eta(eta)
        tp = TimePoint.at(6.0, 1.0)
        field = builder(3, 40, 64, tp, params)
        assert set(field.channels) == set(names)
        direct = wigner_field(AmplitudeVector(propagator_column(3, tp, params, 39)), 40, 64, tp)
        assert np.max(np.abs(field.total - direct.total)) < 1e-13
        assert np.max(np.abs(sum(field.channels.values()) - field.total)) < 1e-15

    def test_hard_wall_has_no_boundary_channels(self):
        params = WalkParams(1.0, 0.0)
        field = wigner_weak_decomposition(4, 30, 32, TimePoint.at(5.0, 1.0), params)
        assert np.max(np.abs(field.channels["BB"])) < 1e-15
        assert np.max(np.abs(field.channels["DB+BD"])) < 1e-15

    def test_pole_channel_matches_closed_form(self):
        params = WalkParams.from_eta(1.5)
        tp = TimePoint.at(2.0, 1.0)
        field = wigner_strong_decomposition(3, 20, 16, tp, params)
        pp = field.channels["pp"]
        for row, m in enumerate(field.m_values):
            for col, k in enumerate(field.k_values):
                closed = wigner_pole_closed_form(int(m), float(k), tp, 3, params)
                assert abs(pp[row, col] - closed) < 1e-12

    def test_strong_at_time_zero(self):
        params = WalkParams.from_eta(2.0)
        field = wigner_strong_decomposition(2, 8, 8, ORIGIN, params)
        expected = np.zeros_like(field.total)
        expected[4 - 2] = 1.0 / (2.0 * math.pi)
        assert np.max(np.abs(field.total - expected)) < 1e-14

    def test_split_regime(self):
        params = WalkParams.from_eta(0.5)
        assert propagator_split(2, TimePoint.at(1.0, 1.0), params, 5).regime == "weak"

    def test_wrong_regime(self):
        tp = TimePoint.at(1.0, 1.0)
        with pytest.raises(RegimeError):
            wigner_weak_decomposition(2, 10, 8, tp, WalkParams.from_eta(2.0))
        with pytest.raises(RegimeError):
            wigner_strong_decomposition(2, 10, 8, tp, WalkParams.from_eta(1.0))


class TestPoleDroplet:
    """Test cases for the closed-form pole contribution."""

    @pytest.mark.parametrize("m", [2, 3, 6, 11])
    @pytest.mark.parametrize("k", [-2.0, -math.pi / 2, 0.0, 0.3, math.pi / 2, 3.0])
    def test_closed_and_cosine_forms(self, m, k):
        params = WalkParams.from_eta(2.5)
        tp = TimePoint.at(1.2, 1.0)
        closed = wigner_pole_closed_form(m, k, tp, 4, params)
        cosine = wigner_pole_cosine_form(m, k, tp, 4, params)
        assert closed == pytest.approx(cosine, abs=1e-13)

    def test_decays_with_pole_rate(self):
        params = WalkParams(1.0, 2.0)
        early = wigner_pole_closed_form(4, 0.0, TimePoint.at(0.0, 1.0), 2, params)
        late = wigner_pole_closed_form(4, 0.0, TimePoint.at(2.0, 1.0), 2, params)
        assert late / early == pytest.approx(math.exp(-1.5 * 2.0), rel=1e-12)

    def test_needs_strong_regime(self):
        with pytest.raises(RegimeError):
            wigner_pole_closed_form(4, 0.0, ORIGIN, 2, WalkParams.from_eta(0.9))

    def test_invalid_m(self):
        with pytest.raises(InvalidArgumentError):
            wigner_pole_closed_form(1, 0.0, ORIGIN, 2, WalkParams.from_eta(2.0))
        with pytest.raises(InvalidArgumentError):
            wigner_pole_cosine_form(1, 0.0, ORIGIN, 2, WalkParams.from_eta(2.0))


class TestLocalizationLength:
    """Test cases for xi_loc."""

    def test_values(self):
        assert localization_length(math.e) == pytest.approx(1.0)
        assert localization_length(math.e ** 2) == pytest.approx(0.5)

    @pytest.mark.parametrize("eta", [0.5, 1.0])
    def test_no_mode(self, eta):
        with pytest.raises(RegimeError):
            localization_length(eta)
