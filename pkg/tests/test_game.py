import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmorra.game import (
    DRAW,
    Move,
    RuleError,
    alice_average_prob,
    make_rng,
    play_round,
    round_distribution,
    sample_totals,
    validate_moves,
)
from qmorra.core import GameConfig

PI = math.pi
CLASSICAL = GameConfig(players=2, coins_per_player=1, theta=2 * PI / 3)


class TestValidateMoves:
    def test_accepts_legal_round(self):
        validate_moves(CLASSICAL, [Move(0, 1, 2), Move(1, 0, 0)])

    def test_rejects_repeated_guess(self):
        with pytest.raises(RuleError, match="repeated the guess"):
            validate_moves(CLASSICAL, [Move(0, 1, 2), Move(1, 0, 2)])

    def test_rejects_coin_overdraw(self):
        with pytest.raises(RuleError, match="coins"):
            validate_moves(CLASSICAL, [Move(0, 2, 1), Move(1, 0, 0)])

    def test_rejects_out_of_range_guess(self):
        with pytest.raises(RuleError, match="guessed"):
            validate_moves(CLASSICAL, [Move(0, 1, 3), Move(1, 0, 0)])

    def test_rejects_wrong_player_count(self):
        with pytest.raises(RuleError):
            validate_moves(CLASSICAL, [Move(0, 1, 1)])


class TestRoundDistribution:
    def test_single_classical_coin(self):
        probs = round_distribution(CLASSICAL, (0, 1))
        assert np.allclose(probs, [0, 1, 0], atol=1e-12)

    def test_no_coins_any_theta(self):
        cfg = GameConfig(players=2, coins_per_player=1, theta=1.234)
        assert np.allclose(round_distribution(cfg, (0, 0)), [1, 0, 0], atol=1e-12)

    def test_pi_two_coins_back_to_start(self):
        cfg = GameConfig(players=2, coins_per_player=1, theta=PI)
        assert np.allclose(round_distribution(cfg, (1, 1)), [1, 0, 0], atol=1e-12)

    def test_depends_only_on_sum(self):
        cfg = GameConfig(players=2, coins_per_player=1, theta=0.9)
        assert np.allclose(
            round_distribution(cfg, (0, 1)), round_distribution(cfg, (1, 0))
        )


class TestPlayRound:
    MOVES = (Move(0, 0, 1), Move(1, 1, 2))

    def test_deterministic_for_seed(self):
        a = play_round(CLASSICAL, self.MOVES, seed=99)
        b = play_round(CLASSICAL, self.MOVES, seed=99)
        assert a == b

    def test_winner_matches_total(self):
        record = play_round(CLASSICAL, self.MOVES, seed=5)
        assert record.sampled_total == 1  # deterministic single-coin round
        assert record.winner == 0

    def test_draw_when_nobody_matches(self):
        record = play_round(CLASSICAL, (Move(0, 0, 0), Move(1, 1, 2)), seed=5)
        assert record.winner == DRAW

    def test_external_stream_continues(self):
        rng = make_rng(7)
        first = play_round(CLASSICAL, self.MOVES, seed=7, rng=rng)
        second = play_round(CLASSICAL, self.MOVES, seed=7, rng=rng)
        # Replay from the seed reproduces the pair in order.
        rng2 = make_rng(7)
        assert play_round(CLASSICAL, self.MOVES, seed=7, rng=rng2) == first
        assert play_round(CLASSICAL, self.MOVES, seed=7, rng=rng2) == second

    def test_json_seed_is_decimal_string(self):
        big_seed = 2 ** 63 + 12345
        record = play_round(CLASSICAL, self.MOVES, seed=big_seed)
        payload = json.loads(record.to_json())
        assert payload["rng_seed"] == str(big_seed)
        assert payload["coins"] == [0, 1]
        assert payload["guesses"] == [1, 2]

    def test_rule_error_propagates(self):
        with pytest.raises(RuleError):
            play_round(CLASSICAL, (Move(0, 0, 1), Move(1, 1, 1)), seed=0)


class TestSampleTotals:
    def test_matches_distribution(self):
        cfg = GameConfig(players=2, coins_per_player=1, theta=PI / 2)
        totals = sample_totals(cfg, 1, rounds=60_000, seed=3)
        freq = np.bincount(totals, minlength=3) / len(totals)
        exact = round_distribution(cfg, (1, 0))
        assert np.abs(freq - exact).sum() < 0.02

    def test_deterministic(self):
        cfg = GameConfig(players=2, coins_per_player=1, theta=1.0)
        assert np.array_equal(
            sample_totals(cfg, 2, 100, seed=11), sample_totals(cfg, 2, 100, seed=11)
        )


class TestAliceAverageProb:
    def test_classical_point(self):
        assert alice_average_prob(2 * PI / 3, 0, 0) == pytest.approx(0.5)
        assert alice_average_prob(2 * PI / 3, 1, 1) == pytest.approx(0.5)

    def test_theta_pi_flat(self):
        for a in (0, 1):
            assert alice_average_prob(PI, a, 0) == pytest.approx(5 / 9, abs=1e-12)

    def test_degenerate_theta(self):
        assert alice_average_prob(0.0, 0, 0) == pytest.approx(1.0)
        assert alice_average_prob(0.0, 1, 0) == pytest.approx(1.0)

    @given(st.floats(min_value=0.0, max_value=2 * PI),
           st.integers(min_value=0, max_value=1))
    @settings(max_examples=30)
    def test_sums_to_one_over_outcomes(self, theta, a):
        total = sum(alice_average_prob(theta, a, n) for n in range(3))
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_range_checks(self):
        with pytest.raises(ValueError):
            alice_average_prob(1.0, 2, 0)
        with pytest.raises(ValueError):
            alice_average_prob(1.0, 0, 3)
