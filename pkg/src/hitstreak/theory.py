"""Coin-flip model of hitting streaks.

Each game is treated as an independent Bernoulli trial whose success
probability comes from the player's batting average and at-bats per game.
Everything here computes the *independence null*; it is the model whose
predictions the permutation study puts to the test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gamelog import PlayerSeasonLog, season_stats


def _check_avg(avg: float) -> None:
    if not 0.0 <= avg <= 1.0 or math.isnan(avg):
        raise ValueError(f"avg must lie in [0, 1], got {avg}")


def per_game_hit_prob(avg: float, ab_per_game: float) -> float:
    """Probability of at least one hit in a game: ``1 - (1 - avg) ** ab_per_game``.

    ``ab_per_game`` may be fractional.
    """
    _check_avg(avg)
    if not ab_per_game > 0:
        raise ValueError(f"ab_per_game must be positive, got {ab_per_game}")
    return 1.0 - (1.0 - avg) ** ab_per_game


def expected_hit_games(avg: float, ab_per_game: float, games: int) -> float:
    if games < 1:
        raise ValueError("games must be >= 1")
    return games * per_game_hit_prob(avg, ab_per_game)


def longest_run_prob(probs: Sequence[float] | Iterable[float], streak_len: int) -> float:
    """P(a run of at least ``streak_len`` successes) over independent Bernoulli(p_i) games.

    Dynamic program over the length of the current run (states
    ``0 .. streak_len - 1``) plus an absorbing "streak reached" state.
    O(n * streak_len).
    """
    p = np.asarray(list(probs) if not isinstance(probs, np.ndarray) else probs, dtype=float)
    if streak_len < 1:
        raise ValueError("streak_len must be >= 1")
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise ValueError("probabilities must lie in [0, 1]")
    n = p.size
    if streak_len > n:
        return 0.0
    state = np.zeros(streak_len)
    state[0] = 1.0
    absorbed = 0.0
    for pi in p:
        reach = state[-1] * pi
        alive = state.sum()
        state[1:] = state[:-1] * pi
        state[0] = alive * (1.0 - pi)
        absorbed += reach
    return float(min(absorbed, 1.0))


def constant_run_prob(avg: float, ab_per_game: float, games: int, streak_len: int) -> float:
    p = per_game_hit_prob(avg, ab_per_game)
    return longest_run_prob(np.full(games, p), streak_len)


@dataclass(frozen=True)
class KHitComparison:
    k: int
    expected: float
    observed: int


def expected_k_hit_games(log: PlayerSeasonLog, k: int, avg: float | None = None) -> KHitComparison:
    """Expected vs observed number of games with exactly ``k`` hits.

    Uses each game's actual AB with a constant per-at-bat probability, the
    season average unless ``avg`` is given.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if avg is None:
        avg = season_stats(log).avg
    _check_avg(avg)
    expected = 0.0
    for line in log.lines:
        if k <= line.ab:
            expected += math.comb(line.ab, k) * avg**k * (1.0 - avg) ** (line.ab - k)
    observed = sum(1 for line in log.lines if line.hits == k)
    return KHitComparison(k, expected, observed)


@dataclass(frozen=True)
class ScenarioRow:
    length: int
    prob_base: float
    prob_boosted: float
    relative_increase: float | None


def scenario_compare(
    avg: float,
    games: int,
    abg_base: float,
    abg_boosted: float,
    streak_lens: Iterable[int],
) -> list[ScenarioRow]:
    """How much a season-long AB/G change moves the odds of long streaks."""
    p_base = np.full(games, per_game_hit_prob(avg, abg_base))
    p_boost = np.full(games, per_game_hit_prob(avg, abg_boosted))
    rows = []
    for length in streak_lens:
        base = longest_run_prob(p_base, length)
        boosted = longest_run_prob(p_boost, length)
        rows.append(ScenarioRow(length, base, boosted, boosted / base - 1.0 if base > 0 else None))
    return rows
