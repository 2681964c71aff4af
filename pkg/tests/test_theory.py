import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hitstreak.gamelog import BattingLine, PlayerSeasonLog
from hitstreak.theory import (
    expected_hit_games,
    expected_k_hit_games,
    longest_run_prob,
    per_game_hit_prob,
    scenario_compare,
)

from conftest import make_log


def brute_force(probs, L):
    """Sum the probability of every outcome sequence that contains a run >= L."""
    total = 0.0
    for outcome in itertools.product([0, 1], repeat=len(probs)):
        run = best = 0
        w = 1.0
        for o, p in zip(outcome, probs):
            w *= p if o else 1 - p
            run = run + 1 if o else 0
            best = max(best, run)
        if best >= L:
            total += w
    return total


def test_john_dice():
    assert per_game_hit_prob(0.300, 4.0) == pytest.approx(0.7599, abs=1e-4)
    assert expected_hit_games(0.300, 4.0, 100) == pytest.approx(75.99, abs=1e-2)


def test_prob_edges():
    assert per_game_hit_prob(0.0, 3.7) == 0.0
    assert per_game_hit_prob(1.0, 3.7) == 1.0
    assert expected_hit_games(0.5, 1.0, 10) == 5.0
    assert expected_hit_games(1.0, 4.0, 162) == 162.0
    for bad in [(-0.1, 4), (1.1, 4), (0.3, 0), (0.3, -1)]:
        with pytest.raises(ValueError):
            per_game_hit_prob(*bad)


def test_run_prob_small_cases():
    assert longest_run_prob([0.5, 0.5], 2) == pytest.approx(0.25)
    assert longest_run_prob([0.5] * 3, 2) == pytest.approx(0.375)
    assert longest_run_prob([0.5] * 3, 4) == 0.0


def test_run_prob_against_monte_carlo():
    # 10^6 simulated 150-game seasons at p = 1 - 0.65^4 gave 0.399768 (1.19 sigma from this value)
    p = per_game_hit_prob(0.350, 4.0)
    value = longest_run_prob(np.full(150, p), 20)
    assert value == pytest.approx(0.39918661404983, abs=1e-12)


@pytest.mark.slow
def test_run_prob_monte_carlo_live():
    p = per_game_hit_prob(0.350, 4.0)
    dp = longest_run_prob(np.full(150, p), 20)
    rng = np.random.default_rng(7)
    n, hits = 10**6, 0
    for _ in range(10):
        x = (rng.random((n // 10, 150)) < p).astype(np.int16)
        s = np.concatenate([np.zeros((x.shape[0], 1), np.int16), np.cumsum(x, axis=1, dtype=np.int16)], axis=1)
        hits += np.count_nonzero(((s[:, 20:] - s[:, :-20]) == 20).any(axis=1))
    assert abs(hits / n - dp) < 4 * math.sqrt(dp * (1 - dp) / n)


@pytest.mark.parametrize("n", range(1, 11))
def test_run_prob_heterogeneous_bruteforce(n):
    rng = np.random.default_rng(n)
    probs = rng.choice([0.0, 0.25, 0.5, 0.8, 1.0], size=n)
    for L in range(1, n + 1):
        assert longest_run_prob(probs, L) == pytest.approx(brute_force(probs, L), abs=1e-12)


@given(st.integers(1, 60), st.floats(0, 1))
def test_full_length_run(n, p):
    assert longest_run_prob([p] * n, n) == pytest.approx(p**n, rel=1e-9, abs=1e-300)


@settings(max_examples=50)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=40), st.data())
def test_monotonicity(probs, data):
    vals = [longest_run_prob(probs, L) for L in range(1, len(probs) + 2)]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    i = data.draw(st.integers(0, len(probs) - 1))
    bumped = list(probs)
    bumped[i] = min(1.0, bumped[i] + data.draw(st.floats(0, 1)))
    L = data.draw(st.integers(1, len(probs)))
    assert longest_run_prob(bumped, L) >= longest_run_prob(probs, L) - 1e-12


@given(st.floats(0.01, 0.99), st.floats(0.1, 8), st.floats(0.001, 0.2))
def test_hit_prob_increasing(avg, abg, step):
    base = per_game_hit_prob(avg, abg)
    assert per_game_hit_prob(min(avg + step, 0.999), abg) > base
    assert per_game_hit_prob(avg, abg + step) > base


def test_k_hit_examples():
    one = PlayerSeasonLog("p", 2000, [BattingLine(1, 4, 1)])
    assert expected_k_hit_games(one, 0, avg=0.300).expected == pytest.approx(0.7**4)
    assert expected_k_hit_games(one, 5, avg=0.300).expected == 0.0
    single = PlayerSeasonLog("p", 2000, [BattingLine(1, 1, 0)])
    assert expected_k_hit_games(single, 1, avg=0.300).expected == pytest.approx(0.300)
    with pytest.raises(ValueError):
        expected_k_hit_games(one, -1, avg=0.3)


def test_k_hit_observed_and_season_avg():
    log = make_log([0, 1, 2, 1], ab=[4, 4, 4, 4])
    cmp = expected_k_hit_games(log, 1)
    assert cmp.observed == 2
    avg = 4 / 16
    assert cmp.expected == pytest.approx(4 * 4 * avg * (1 - avg) ** 3)


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=30))
def test_k_hit_expectations_sum_to_games(games):
    lines = [BattingLine(i + 1, ab, min(h, ab), 1 if ab == 0 else 0) for i, (ab, h) in enumerate(games)]
    log = PlayerSeasonLog("p", 2000, lines)
    if sum(ab for ab, _ in games) == 0:
        return
    total = sum(expected_k_hit_games(log, k).expected for k in range(0, 7))
    assert total == pytest.approx(len(games))


def test_scenario_identity_and_certain_hitter():
    for row in scenario_compare(0.3, 100, 4.0, 4.0, [5, 20]):
        assert row.relative_increase == 0.0
    for row in scenario_compare(1.0, 50, 4.0, 4.28, [10, 50]):
        assert row.prob_base == row.prob_boosted == 1.0 and row.relative_increase == 0.0


def test_scenario_frozen_values():
    rows = scenario_compare(0.350, 150, 4.0, 4.28, [20, 30, 56])
    got = [r.relative_increase for r in rows]
    assert got == pytest.approx([0.340994136, 0.824956234, 2.498701454], abs=1e-8)
