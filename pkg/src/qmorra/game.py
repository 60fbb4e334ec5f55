"""Round mechanics: moves, guess constraints, sampling and averaged odds.

Rounds are resolved by measuring the shared deformed coin state.  The
sampled total depends on the per-player coin counts only through their sum,
so all the probability machinery reduces to :func:`qmorra.core.coin_state`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .core import GameConfig, coin_coefficients, coin_state, outcome_distribution

DRAW = "Draw"


class RuleError(ValueError):
    """A move violated the rules of the game."""


@dataclass(frozen=True)
class Move:
    """One player's hidden coin count plus their public guess."""

    player: int
    coins: int
    guess: int


@dataclass(frozen=True)
class RoundRecord:
    """Everything needed to replay one round deterministically."""

    config: GameConfig
    moves: tuple[Move, ...]
    sampled_total: int
    winner: object  # player id or DRAW
    rng_seed: int

    def to_json_dict(self) -> dict:
        """Flat JSON form; the seed is a decimal string so consumers with
        53-bit floats cannot truncate it."""
        return {
            "players": self.config.players,
            "coins_per_player": self.config.coins_per_player,
            "theta": self.config.theta,
            "coins": [m.coins for m in self.moves],
            "guesses": [m.guess for m in self.moves],
            "sampled_total": self.sampled_total,
            "winner": self.winner if self.winner == DRAW else int(self.winner),
            "rng_seed": str(self.rng_seed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def validate_moves(config: GameConfig, moves: Sequence[Move]) -> None:
    """Check coin ranges, guess ranges and the no-repeated-guess rule."""
    if len(moves) != config.players:
        raise RuleError(
            f"expected {config.players} moves, got {len(moves)}"
        )
    seen_guesses: dict[int, int] = {}
    for move in moves:
        if not 0 <= move.coins <= config.coins_per_player:
            raise RuleError(
                f"player {move.player} played {move.coins} coins, "
                f"allowed 0..{config.coins_per_player}"
            )
        if not 0 <= move.guess <= config.total_coins:
            raise RuleError(
                f"player {move.player} guessed {move.guess}, "
                f"allowed 0..{config.total_coins}"
            )
        if move.guess in seen_guesses:
            raise RuleError(
                f"player {move.player} repeated the guess {move.guess} "
                f"of player {seen_guesses[move.guess]}"
            )
        seen_guesses[move.guess] = move.player


def round_distribution(
    config: GameConfig, coins: Sequence[int]
) -> NDArray[np.float64]:
    """Distribution of the measured total for the given coin deposits."""
    for c in coins:
        if not 0 <= c <= config.coins_per_player:
            raise RuleError(
                f"coin count {c} out of range 0..{config.coins_per_player}"
            )
    return outcome_distribution(coin_state(config, int(sum(coins))))


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator so parallel streams never collide."""
    return np.random.Generator(np.random.Philox(key=seed))


def play_round(
    config: GameConfig,
    moves: Sequence[Move],
    seed: int,
    rng: Optional[np.random.Generator] = None,
) -> RoundRecord:
    """Resolve one round: sample the measured total, assign the winner.

    Deterministic for a fixed seed.  An explicit ``rng`` may be passed to
    continue an existing seed stream (sessions); the recorded seed is then
    the stream's origin seed.
    """
    validate_moves(config, moves)
    probs = round_distribution(config, [m.coins for m in moves])
    generator = rng if rng is not None else make_rng(seed)
    total = int(generator.choice(config.dim, p=probs))
    winner: object = DRAW
    for move in moves:
        if move.guess == total:
            winner = move.player
            break
    return RoundRecord(
        config=config,
        moves=tuple(moves),
        sampled_total=total,
        winner=winner,
        rng_seed=seed,
    )


def sample_totals(
    config: GameConfig, total_coins_played: int, rounds: int, seed: int
) -> NDArray[np.int64]:
    """Vectorized sampling of measured totals for many identical rounds."""
    probs = outcome_distribution(coin_state(config, total_coins_played))
    return make_rng(seed).choice(config.dim, size=rounds, p=probs)


def alice_average_prob(theta: float, a: int, n: int) -> float:
    """Alice's averaged winning probability P_a(n) for the 2-player, 1-coin
    game: the chance the total measures ``n`` when she plays ``a`` coins and
    Bob mixes uniformly.

    P_a(n) = (|x_n(a*theta)|^2 + |x_n((a+1)*theta)|^2) / 2.
    """
    if a not in (0, 1):
        raise ValueError(f"Alice's coin count must be 0 or 1, got {a}")
    if n not in (0, 1, 2):
        raise ValueError(f"outcome must be in 0..2, got {n}")

    def prob(k: int) -> float:
        if k == 0:
            return 1.0 if n == 0 else 0.0
        return float(abs(coin_coefficients(3, k * theta)[n]) ** 2)

    return 0.5 * (prob(a) + prob(a + 1))
