import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmorra.core import (
    GameConfig,
    DimensionError,
    NormalizationError,
    coin_coefficient,
    coin_coefficients,
    coin_state,
    deformed_x,
    deformed_z,
    fourier,
    is_unitary,
    outcome_distribution,
)

PI = math.pi
PERMUTATION_X3 = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)


class TestConfig:
    def test_defaults(self):
        c = GameConfig(players=2, coins_per_player=1, theta=PI)
        assert c.total_coins == 2
        assert c.dim == 3

    def test_theta_reduced_mod_2pi(self):
        c = GameConfig(players=2, coins_per_player=1, theta=2 * PI + 0.5)
        assert c.theta == pytest.approx(0.5)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            GameConfig(players=1, coins_per_player=1, theta=0.0)
        with pytest.raises(ValueError):
            GameConfig(players=2, coins_per_player=0, theta=0.0)


class TestFourier:
    def test_d3_entries(self):
        f = fourier(3)
        w = np.exp(2j * PI / 3)
        assert f[1, 2] == pytest.approx(w ** 2 / math.sqrt(3))
        assert f[0, 0] == pytest.approx(1 / math.sqrt(3))

    @given(st.integers(min_value=2, max_value=8))
    def test_unitary(self, d):
        assert is_unitary(fourier(d))

    def test_rejects_bad_dim(self):
        with pytest.raises(DimensionError):
            fourier(1)


class TestDeformedOperators:
    def test_z_diagonal(self):
        z = deformed_z(3, PI / 3)
        assert np.allclose(np.diag(z), [1, np.exp(1j * PI / 3), np.exp(2j * PI / 3)])

    def test_classical_angle_is_permutation(self):
        assert np.allclose(deformed_x(3, 2 * PI / 3), PERMUTATION_X3, atol=1e-12)

    def test_x_is_circulant(self):
        x = deformed_x(3, 1.1)
        coeffs = coin_coefficients(3, 1.1)
        for j in range(3):
            for k in range(3):
                assert x[j, k] == pytest.approx(coeffs[(j - k) % 3])

    @given(st.floats(min_value=0.0, max_value=2 * PI),
           st.integers(min_value=2, max_value=6))
    @settings(max_examples=40)
    def test_x_unitary(self, theta, d):
        assert is_unitary(deformed_x(d, theta))

    @given(st.floats(min_value=0.0, max_value=PI))
    @settings(max_examples=25)
    def test_square_doubles_angle(self, theta):
        x = deformed_x(3, theta)
        assert np.allclose(x @ x, deformed_x(3, 2 * theta), atol=1e-10)

    @given(st.integers(min_value=2, max_value=6))
    def test_classical_angle_has_order_d(self, d):
        x = deformed_x(d, 2 * PI / d)
        assert np.allclose(np.linalg.matrix_power(x, d), np.eye(d), atol=1e-10)


class TestCoinCoefficients:
    def test_formula_matches_operator_column(self):
        theta = 0.77
        x = deformed_x(3, theta)
        assert np.allclose(coin_coefficients(3, theta), x[:, 0])

    def test_scalar_accessor(self):
        theta = 1.3
        for j in range(3):
            assert coin_coefficient(3, j, theta) == pytest.approx(
                coin_coefficients(3, theta)[j]
            )

    @given(st.floats(min_value=0.0, max_value=2 * PI),
           st.integers(min_value=2, max_value=6))
    @settings(max_examples=40)
    def test_normalized(self, theta, d):
        c = coin_coefficients(d, theta)
        assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, abs=1e-12)


class TestCoinState:
    CFG = GameConfig(players=2, coins_per_player=1, theta=2 * PI / 3)

    def test_zero_coins_is_ground(self):
        assert np.allclose(coin_state(self.CFG, 0), [1, 0, 0])

    def test_classical_single_coin(self):
        assert np.allclose(coin_state(self.CFG, 1), [0, 1, 0], atol=1e-12)

    def test_pi_over_3_two_coins_measures_one(self):
        cfg = GameConfig(players=2, coins_per_player=1, theta=PI / 3)
        probs = outcome_distribution(coin_state(cfg, 2))
        assert probs[1] == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            coin_state(self.CFG, 3)
        with pytest.raises(ValueError):
            coin_state(self.CFG, -1)


class TestOutcomeDistribution:
    def test_normalization_check(self):
        with pytest.raises(NormalizationError):
            outcome_distribution(np.array([1.0, 1.0, 0.0]))

    @given(st.floats(min_value=0.0, max_value=2 * PI),
           st.integers(min_value=0, max_value=2))
    @settings(max_examples=40)
    def test_probabilities_sum_to_one(self, theta, k):
        cfg = GameConfig(players=2, coins_per_player=1, theta=theta)
        probs = outcome_distribution(coin_state(cfg, k))
        assert np.all(probs >= 0)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
