"""Strategy representation, exact winning odds and Nash-equilibrium search.

The search is exhaustive over a uniform probability grid for both players'
coin mixes, with guesses enumerated outright.  Because Bob's guess must
differ from Alice's, the two feasible sets are coupled: a profile counts as
an equilibrium when neither player can improve by any grid deviation that
keeps the joint profile legal (guesses on Bob's mix support distinct from
Alice's guess).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .core import GameConfig, coin_state, outcome_distribution

MIX_TOL = 1e-12
#: Two payoffs within this of each other count as tied during the search.
VALUE_TOL = 1e-12


class StrategyError(ValueError):
    """Malformed strategy (bad mix, out-of-range or colliding guess)."""


def _check_mix(mix: Sequence[float], m: int, who: str) -> tuple[float, ...]:
    mix = tuple(float(p) for p in mix)
    if len(mix) != m + 1:
        raise StrategyError(f"{who} mix must have {m + 1} entries, got {len(mix)}")
    if any(p < -MIX_TOL for p in mix):
        raise StrategyError(f"{who} mix has negative entries: {mix}")
    if abs(sum(mix) - 1.0) > 1e-9:
        raise StrategyError(f"{who} mix sums to {sum(mix)}, expected 1")
    return mix


@dataclass(frozen=True)
class AliceStrategy:
    """Mixing distribution over coin counts plus one coin-independent guess."""

    mix: tuple[float, ...]
    guess: int

    def validate(self, config: GameConfig) -> None:
        _check_mix(self.mix, config.coins_per_player, "Alice")
        if not 0 <= self.guess <= config.total_coins:
            raise StrategyError(f"Alice guess {self.guess} out of range")

    @property
    def is_pure(self) -> bool:
        return any(abs(p - 1.0) <= MIX_TOL for p in self.mix)


@dataclass(frozen=True)
class BobStrategy:
    """Mixing distribution plus a per-coin-count guess map."""

    mix: tuple[float, ...]
    guesses: tuple[int, ...]

    def validate(self, config: GameConfig, alice_guess: Optional[int] = None) -> None:
        m = config.coins_per_player
        _check_mix(self.mix, m, "Bob")
        if len(self.guesses) != m + 1:
            raise StrategyError(
                f"Bob guess map must have {m + 1} entries, got {len(self.guesses)}"
            )
        for b, g in enumerate(self.guesses):
            if not 0 <= g <= config.total_coins:
                raise StrategyError(f"Bob guess {g} for {b} coins out of range")
            if alice_guess is not None and self.mix[b] > MIX_TOL and g == alice_guess:
                raise StrategyError(
                    f"Bob repeats Alice's guess {alice_guess} when playing {b} coins"
                )

    @property
    def is_pure(self) -> bool:
        return any(abs(p - 1.0) <= MIX_TOL for p in self.mix)

    def support(self) -> tuple[int, ...]:
        return tuple(b for b, p in enumerate(self.mix) if p > MIX_TOL)


@dataclass(frozen=True)
class EquilibriumResult:
    theta: float
    alice: AliceStrategy
    bob: BobStrategy
    p_alice: float
    p_bob: float
    p_draw: float
    purity: str  # "pure" | "mixed"
    grid_step: float
    exact: bool = True
    #: Largest unilateral grid improvement either player has (0 when exact).
    epsilon: float = 0.0
    fixed_point_count: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "theta": self.theta,
            "alice": {"mix": list(self.alice.mix), "guess": self.alice.guess},
            "bob": {"mix": list(self.bob.mix), "guesses": list(self.bob.guesses)},
            "p_alice": self.p_alice,
            "p_bob": self.p_bob,
            "p_draw": self.p_draw,
            "purity": self.purity,
            "grid_step": self.grid_step,
            "exact": self.exact,
            "epsilon": self.epsilon,
            "fixed_point_count": self.fixed_point_count,
        }


def outcome_table(theta: float, m: int = 1) -> NDArray[np.float64]:
    """p[a, b, n]: distribution of the measured total when Alice deposits
    ``a`` coins and Bob ``b``.  Depends on (a, b) only through a + b."""
    config = GameConfig(players=2, coins_per_player=m, theta=theta)
    by_sum = np.stack(
        [outcome_distribution(coin_state(config, s)) for s in range(2 * m + 1)]
    )
    idx = np.add.outer(np.arange(m + 1), np.arange(m + 1))
    return by_sum[idx]


def alice_win_prob(
    theta: float, alice: AliceStrategy, bob: BobStrategy, m: int = 1
) -> float:
    """P_win^A = sum_{a,b} PA_a PB_b p_{a,b}(g_A)."""
    config = GameConfig(players=2, coins_per_player=m, theta=theta)
    alice.validate(config)
    bob.validate(config, alice_guess=alice.guess)
    p = outcome_table(theta, m)
    return float(np.array(alice.mix) @ p[:, :, alice.guess] @ np.array(bob.mix))


def bob_win_prob(
    theta: float, alice: AliceStrategy, bob: BobStrategy, m: int = 1
) -> float:
    """P_win^B = sum_{a,b} PA_a PB_b p_{a,b}(n_b)."""
    config = GameConfig(players=2, coins_per_player=m, theta=theta)
    alice.validate(config)
    bob.validate(config, alice_guess=alice.guess)
    p = outcome_table(theta, m)
    total = 0.0
    for b, pb in enumerate(bob.mix):
        total += pb * float(np.array(alice.mix) @ p[:, b, bob.guesses[b]])
    return float(total)


def draw_prob(
    theta: float, alice: AliceStrategy, bob: BobStrategy, m: int = 1
) -> float:
    """Probability neither guess matches the measured total."""
    return 1.0 - alice_win_prob(theta, alice, bob, m) - bob_win_prob(theta, alice, bob, m)


def grid_mixes(m: int, grid_step: float) -> NDArray[np.float64]:
    """All probability vectors over m+1 coin counts on the uniform grid,
    in ascending lexicographic order."""
    steps = round(1.0 / grid_step)
    if abs(steps * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid step {grid_step} does not divide 1")
    combos = []
    for parts in itertools.product(range(steps + 1), repeat=m):
        rest = steps - sum(parts)
        if rest >= 0:
            combos.append(parts + (rest,))
    combos.sort()
    return np.array(combos, dtype=np.float64) / steps


class _Search:
    """Shared tables for one (theta, m, grid_step) search problem."""

    def __init__(self, theta: float, grid_step: float, m: int = 1):
        self.theta = theta
        self.m = m
        self.r = 2 * m
        self.grid_step = grid_step
        self.config = GameConfig(players=2, coins_per_player=m, theta=theta)
        self.p = outcome_table(theta, m)  # (m+1, m+1, r+1)
        self.mixes = grid_mixes(m, grid_step)  # (nmix, m+1)
        # score[j, a, n] = sum_b mix_j[b] p[a, b, n]; by the a<->b symmetry of
        # p this serves both as Bob's per-coin score table (alice mix j) and
        # Alice's payoff table (bob mix j).
        self.score = np.einsum("jb,abn->jan", self.mixes, self.p)
        self.guesses = list(range(self.r + 1))

    def bob_best(self, alice_mix_idx: int, alice_guess: int):
        """Best-response value, coin-count set and per-coin guess sets for Bob
        against Alice (mix index, guess)."""
        legal = [n for n in self.guesses if n != alice_guess]
        s = self.score[alice_mix_idx][:, legal]  # (m+1, legal)
        per_coin_best = s.max(axis=1)
        best_sets = [
            [legal[k] for k in np.flatnonzero(s[b] >= per_coin_best[b] - VALUE_TOL)]
            for b in range(self.m + 1)
        ]
        value = float(per_coin_best.max())
        coin_set = set(np.flatnonzero(per_coin_best >= value - VALUE_TOL).tolist())
        return value, coin_set, best_sets, legal

    def alice_best_value(self, bob_mix_idx: int, forbidden: set[int]) -> float:
        """Alice's best grid payoff against Bob's mix, excluding guesses that
        would collide with Bob's committed map."""
        allowed = [n for n in self.guesses if n not in forbidden]
        if not allowed:
            return 0.0
        return float(self.score[bob_mix_idx][:, allowed].max())


def best_response_bob(
    theta: float, alice: AliceStrategy, grid_step: float = 0.01, m: int = 1
) -> BobStrategy:
    """Lexicographically-smallest grid maximizer of Bob's winning odds."""
    search = _Search(theta, grid_step, m)
    alice.validate(search.config)
    mix = np.asarray(alice.mix)
    # Score table for an off-grid Alice mix.
    score = np.einsum("b,abn->an", mix, search.p)
    legal = [n for n in search.guesses if n != alice.guess]
    s = score[:, legal]
    per_coin_best = s.max(axis=1)
    value = float(per_coin_best.max())
    coin_set = np.flatnonzero(per_coin_best >= value - VALUE_TOL)
    # Lex-smallest maximizer mix: all mass on the largest tied coin count.
    best_mix = np.zeros(m + 1)
    best_mix[coin_set.max()] = 1.0
    guesses = []
    for b in range(m + 1):
        if best_mix[b] > 0:
            ties = [legal[k] for k in np.flatnonzero(s[b] >= per_coin_best[b] - VALUE_TOL)]
            guesses.append(min(ties))
        else:
            guesses.append(min(legal))
    return BobStrategy(mix=tuple(best_mix), guesses=tuple(guesses))


def best_response_alice(
    theta: float, bob: BobStrategy, grid_step: float = 0.01, m: int = 1
) -> AliceStrategy:
    """Lexicographically-smallest grid maximizer of Alice's winning odds,
    restricted to guesses that keep Bob's committed map legal."""
    search = _Search(theta, grid_step, m)
    bob.validate(search.config)
    mix = np.asarray(bob.mix)
    score = np.einsum("b,abn->an", mix, search.p)
    forbidden = {bob.guesses[b] for b in bob.support()}
    allowed = [n for n in search.guesses if n not in forbidden]
    s = score[:, allowed]
    value = float(s.max())
    best_coins = np.flatnonzero(s.max(axis=1) >= value - VALUE_TOL)
    best_mix = np.zeros(m + 1)
    best_mix[best_coins.max()] = 1.0
    a = int(best_coins.max())
    guess = min(allowed[k] for k in np.flatnonzero(s[a] >= value - VALUE_TOL))
    return AliceStrategy(mix=tuple(best_mix), guess=guess)


def _supported_mix_indices(search: _Search, coin_set: set[int]) -> Iterable[int]:
    """Grid mixes whose support lies inside ``coin_set``, in lex order."""
    outside = [b for b in range(search.m + 1) if b not in coin_set]
    if not outside:
        return range(len(search.mixes))
    mask = np.all(search.mixes[:, outside] <= MIX_TOL, axis=1)
    return np.flatnonzero(mask)


def _result(search: _Search, alice: AliceStrategy, bob: BobStrategy, **kw):
    pa = float(
        np.einsum("a,ab,b->", np.asarray(alice.mix), search.p[:, :, alice.guess],
                  np.asarray(bob.mix))
    )
    pb = 0.0
    for b, pbm in enumerate(bob.mix):
        pb += pbm * float(np.asarray(alice.mix) @ search.p[:, b, bob.guesses[b]])
    purity = "pure" if alice.is_pure and bob.is_pure else "mixed"
    return EquilibriumResult(
        theta=search.theta, alice=alice, bob=bob,
        p_alice=pa, p_bob=float(pb), p_draw=1.0 - pa - float(pb),
        purity=purity, grid_step=search.grid_step, **kw,
    )


def find_equilibrium(
    theta: float,
    grid_step: float = 0.01,
    m: int = 1,
    count_fixed_points: bool = False,
) -> EquilibriumResult:
    """Exhaustive grid search for a Nash equilibrium.

    Alice candidates are enumerated deterministically (mix vectors in
    descending lexicographic order, so "always play 0 coins" comes first,
    then guess ascending); for each, Bob's best responses are examined and
    the first candidate that is itself a constrained best response to one of
    them is returned.  If no exact grid fixed point exists the best
    epsilon-equilibrium found is returned with ``exact=False``.
    """
    if not 0.0 < grid_step <= 0.5:
        raise ValueError(f"grid step must be in (0, 0.5], got {grid_step}")
    search = _Search(theta, grid_step, m)
    first: Optional[EquilibriumResult] = None
    count = 0
    for i in reversed(range(len(search.mixes))):
        for guess in search.guesses:
            bob, _, _ = _check_candidate_fast(search, i, guess)
            if bob is not None:
                count += 1
                if first is None:
                    alice = AliceStrategy(
                        mix=tuple(search.mixes[i]), guess=guess
                    )
                    first = _result(search, alice, bob, exact=True, epsilon=0.0)
                    if not count_fixed_points:
                        return first
    if first is not None:
        return EquilibriumResult(**{**first.__dict__, "fixed_point_count": count})
    # No exact grid fixed point: the true equilibrium mixes fall between grid
    # points.  Solve the interior mixed equilibrium by indifference per
    # (guess, guess-map) family, snap its mixes to the grid and report the
    # residual epsilon.  Selection by family order is resolution-independent,
    # so values stay stable when the grid is refined.
    snapped = _interior_equilibrium(search)
    if snapped is not None:
        alice, bob = snapped
        eps = _profile_epsilon(search, alice, bob)
        return _result(search, alice, bob, exact=False, epsilon=eps)
    alice, bob, eps = _best_epsilon_profile(search)
    return _result(search, alice, bob, exact=False, epsilon=eps)


def _interior_equilibrium(search: _Search, tol: float = 1e-9):
    """Continuum equilibrium with both players mixing interior coin counts,
    for the 1-coin-per-player game; None when no family admits one.

    Families are scanned in (Alice guess ascending, Bob map ascending)
    order; the first whose indifference solution survives all deviation
    checks wins.  Mixes are then snapped to the search grid.
    """
    if search.m != 1:
        return None
    p = search.p
    h = search.grid_step
    for g in search.guesses:
        legal = [n for n in search.guesses if n != g]
        for n0, n1 in itertools.product(legal, legal):
            # Bob indifferent between his coin counts fixes Alice's mix.
            dq = (p[0, 0, n0] - p[1, 0, n0]) - (p[0, 1, n1] - p[1, 1, n1])
            if abs(dq) < tol:
                continue
            q = (p[1, 1, n1] - p[1, 0, n0]) / dq
            # Alice indifferent between her coin counts fixes Bob's mix.
            ds = (p[0, 0, g] - p[0, 1, g]) - (p[1, 0, g] - p[1, 1, g])
            if abs(ds) < tol:
                continue
            s = (p[1, 1, g] - p[0, 1, g]) / ds
            if not (-tol < q < 1 + tol and -tol < s < 1 + tol):
                continue
            q, s = float(np.clip(q, 0, 1)), float(np.clip(s, 0, 1))
            # Bob cannot improve with any other coin/guess choice.
            c = q * p[0, 0, n0] + (1 - q) * p[1, 0, n0]
            ok = all(
                c >= q * p[0, b, n] + (1 - q) * p[1, b, n] - tol
                for b in (0, 1)
                for n in legal
            )
            if not ok:
                continue
            # Alice cannot improve with any legal guess or pure coin choice.
            v = s * p[0, 0, g] + (1 - s) * p[0, 1, g]
            ok = all(
                v >= s * p[a, 0, n] + (1 - s) * p[a, 1, n] - tol
                for a in (0, 1)
                for n in search.guesses
                if n not in (n0, n1)
            )
            if not ok:
                continue
            q_snap = round(q / h) * h
            s_snap = round(s / h) * h
            alice = AliceStrategy(mix=(q_snap, 1.0 - q_snap), guess=g)
            bob = BobStrategy(mix=(s_snap, 1.0 - s_snap), guesses=(n0, n1))
            return alice, bob
    return None


def _profile_epsilon(search: _Search, alice: AliceStrategy, bob: BobStrategy) -> float:
    """Largest unilateral grid improvement either player has at a profile."""
    p = search.p
    a_mix = np.asarray(alice.mix)
    b_mix = np.asarray(bob.mix)
    value_a = float(np.einsum("a,ab,b->", a_mix, p[:, :, alice.guess], b_mix))
    score_vs_bob = np.einsum("abn,b->an", p, b_mix)
    forbidden = {bob.guesses[b] for b in bob.support()}
    allowed = [n for n in search.guesses if n not in forbidden]
    gain_a = float(score_vs_bob[:, allowed].max()) - value_a
    value_b = sum(
        b_mix[b] * float(a_mix @ p[:, b, bob.guesses[b]])
        for b in range(search.m + 1)
    )
    score_vs_alice = np.einsum("abn,a->bn", p, a_mix)
    legal = [n for n in search.guesses if n != alice.guess]
    gain_b = float(score_vs_alice[:, legal].max()) - value_b
    return max(gain_a, gain_b, 0.0)


def _best_epsilon_profile(search: _Search):
    """Grid profile minimizing max(Alice's gain, Bob's gain).

    Used when the true equilibrium mixes fall between grid points, which is
    the generic situation inside the mixed-strategy region.
    """
    m, r = search.m, search.r
    mixes, p, score = search.mixes, search.p, search.score
    nmix = len(mixes)
    supports = [tuple(b for b in range(m + 1) if mx[b] > MIX_TOL) for mx in mixes]
    # colmax[j, n]: Alice's best pure-coin payoff for guess n against mix j.
    colmax = score.max(axis=1)
    # bob_best[i, g]: Bob's unconstrained best value against Alice mix i
    # when her guess is g.
    bob_best = np.empty((nmix, r + 1))
    for g in range(r + 1):
        legal = [n for n in range(r + 1) if n != g]
        bob_best[:, g] = score[:, :, legal].max(axis=(1, 2))
    best = (None, None, np.inf)
    for g in range(r + 1):
        w = np.einsum("ia,ab,jb->ij", mixes, p[:, :, g], mixes)
        for combo in itertools.product(range(r + 1), repeat=m + 1):
            # Bob's value for this guess map, per (alice mix, bob mix).
            smap = score[:, np.arange(m + 1), combo]  # (nmix, m+1)
            vb = smap @ mixes.T
            gain_b = bob_best[:, [g]] - vb
            # Legality and Alice's constrained best depend only on Bob's
            # support pattern.
            alice_best = np.empty(nmix)
            legal_j = np.empty(nmix, dtype=bool)
            cache: dict[tuple[int, ...], tuple[float, bool]] = {}
            for j, sup in enumerate(supports):
                if sup not in cache:
                    forbidden = {combo[b] for b in sup}
                    allowed = [n for n in range(r + 1) if n not in forbidden]
                    cache[sup] = (allowed, g not in forbidden)
                allowed, ok = cache[sup]
                legal_j[j] = ok
                alice_best[j] = colmax[j, allowed].max() if allowed else 0.0
            gain_a = alice_best[None, :] - w
            eps = np.maximum(gain_a, gain_b)
            eps[:, ~legal_j] = np.inf
            k = int(np.argmin(eps))
            if eps.flat[k] < best[2]:
                i, j = np.unravel_index(k, eps.shape)
                alice = AliceStrategy(mix=tuple(mixes[i]), guess=g)
                bob = BobStrategy(mix=tuple(mixes[j]), guesses=tuple(combo))
                best = (alice, bob, float(eps.flat[k]))
    return best


def _check_candidate_fast(search: _Search, i: int, guess: int):
    """Equilibrium test for one Alice candidate; see module docstring.

    Returns (supporting Bob strategy or None, smallest remaining Alice gain,
    the Bob strategy realizing that smallest gain).
    """
    value, coin_set, best_sets, legal = search.bob_best(i, guess)
    candidate_mix = search.mixes[i]
    best_gain = np.inf
    best_bob = None
    for j in _supported_mix_indices(search, coin_set):
        bob_mix = search.mixes[j]
        support = [b for b in range(search.m + 1) if bob_mix[b] > MIX_TOL]
        candidate_value = float(
            np.einsum("a,ab,b->", candidate_mix, search.p[:, :, guess], bob_mix)
        )
        for combo in itertools.product(*(best_sets[b] for b in support)):
            alice_best = search.alice_best_value(j, set(combo))
            gain = alice_best - candidate_value
            if gain < best_gain:
                best_gain = gain
                full = []
                it = iter(combo)
                for b in range(search.m + 1):
                    full.append(next(it) if b in support else min(legal))
                best_bob = BobStrategy(mix=tuple(bob_mix), guesses=tuple(full))
            if gain <= VALUE_TOL:
                return best_bob, 0.0, best_bob
    return None, best_gain, best_bob


def purity_region_scan(
    theta_grid: Sequence[float], grid_step: float = 0.01, m: int = 1
) -> list[EquilibriumResult]:
    """Equilibrium classification over a theta grid."""
    return [find_equilibrium(t, grid_step, m) for t in theta_grid]


def purity_boundaries(results: Sequence[EquilibriumResult]) -> list[float]:
    """Boundary estimates: midpoints between adjacent grid points whose
    purity class differs."""
    edges = []
    for prev, cur in zip(results, results[1:]):
        if prev.purity != cur.purity:
            edges.append(0.5 * (prev.theta + cur.theta))
    return edges
