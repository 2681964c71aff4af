import math

import numpy as np
import pytest

from hitstreak.errors import ConfigError
from hitstreak.gamelog import gamelog_csv_bytes
from hitstreak.streaks import corpus_census
from hitstreak.synth import HotHandParams, IIDParams, gen_hot_hand_corpus, gen_iid_corpus, hot_states
from hitstreak.theory import per_game_hit_prob

FOUR_AB = (0, 0, 0, 0, 1, 0, 0)


def lines(corpus):
    return [ln for log in corpus.logs() for ln in log.lines]


def test_certain_and_hopeless_hitters():
    sure = gen_iid_corpus(IIDParams(players=5, games_per_season=50, avg=1.0, seed=1, pinch_rate=0.3))
    assert all(ln.hits >= 1 for ln in lines(sure) if ln.ab >= 1)
    never = gen_iid_corpus(IIDParams(players=5, games_per_season=50, avg=0.0, seed=1))
    assert all(ln.hits == 0 for ln in lines(never))


def test_hit_game_rate_matches_formula():
    flags = []
    for seed in range(100, 110):
        corpus = gen_iid_corpus(IIDParams(players=400, games_per_season=150, avg=0.300, seed=seed,
                                          ab_distribution=FOUR_AB))
        flags.extend(ln.hits >= 1 for ln in lines(corpus))
    p = per_game_hit_prob(0.300, 4.0)
    n = len(flags)
    assert abs(sum(flags) / n - p) < 3 * math.sqrt(p * (1 - p) / n)


def test_pinch_games_marked_not_started():
    corpus = gen_iid_corpus(IIDParams(players=20, games_per_season=150, avg=0.3, seed=3, pinch_rate=0.25))
    ls = lines(corpus)
    non_starts = [ln for ln in ls if not ln.started]
    assert 0.15 < len(non_starts) / len(ls) < 0.35
    assert max(ln.ab for ln in non_starts) <= 2


def test_deterministic_bytes():
    p = HotHandParams(players=10, games_per_season=40, avg=0.3, p_hot=0.4, p_cold=0.2, stay_prob=0.9, seed=77)
    assert gamelog_csv_bytes(gen_hot_hand_corpus(p)) == gamelog_csv_bytes(gen_hot_hand_corpus(p))
    q = IIDParams(players=10, games_per_season=40, avg=0.3, seed=77)
    assert gamelog_csv_bytes(gen_iid_corpus(q)) == gamelog_csv_bytes(gen_iid_corpus(q))


def test_player_streams_independent_of_corpus_size():
    small = gen_iid_corpus(IIDParams(players=5, games_per_season=30, avg=0.3, seed=9))
    big = gen_iid_corpus(IIDParams(players=12, games_per_season=30, avg=0.3, seed=9))
    for key, log in small.items():
        assert big[key] == log


def test_hot_hand_season_average():
    p = HotHandParams(players=2000, games_per_season=150, avg=0.300, p_hot=0.400, p_cold=0.200,
                      stay_prob=0.95, seed=4)
    corpus = gen_hot_hand_corpus(p)
    per_player = np.array([sum(ln.hits for ln in log.lines) / max(1, sum(ln.ab for ln in log.lines))
                           for log in corpus.logs()])
    se = per_player.std(ddof=1) / math.sqrt(per_player.size)
    assert abs(per_player.mean() - 0.300) < 4 * se


def test_hot_states_stationary_and_sticky():
    gen = np.random.default_rng(0)
    paths = np.array([hot_states(200, 0.95, gen) for _ in range(500)])
    assert abs(paths.mean() - 0.5) < 0.03
    switches = np.mean(paths[:, 1:] != paths[:, :-1])
    assert abs(switches - 0.05) < 0.005


def test_degenerate_hot_hand_looks_iid():
    # p_hot == p_cold is rejected, so use a vanishing gap with a memoryless chain
    common = dict(players=600, games_per_season=150, seed=12, pinch_rate=0.1)
    hot = gen_hot_hand_corpus(HotHandParams(avg=0.28, p_hot=0.2805, p_cold=0.2795, stay_prob=0.5, **common))
    iid = gen_iid_corpus(IIDParams(avg=0.28, **{**common, "seed": 13}))
    for a, b in [(corpus_census(hot, 1), corpus_census(iid, 1))]:
        for n in (1, 5, 10):
            x, y = a.cumulative(n), b.cumulative(n)
            assert abs(x - y) < 4 * math.sqrt(x + y), (n, x, y)
    fa = np.mean([ln.hits >= 1 for ln in lines(hot)])
    fb = np.mean([ln.hits >= 1 for ln in lines(iid)])
    assert abs(fa - fb) < 0.01


@pytest.mark.parametrize("kw", [
    dict(ab_distribution=(0.5, 0.5)),
    dict(ab_distribution=(0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2)),
    dict(ab_distribution=(-0.1, 0.1, 0, 0, 1, 0, 0)),
    dict(avg=1.2),
    dict(pinch_rate=2.0),
    dict(players=0),
])
def test_iid_config_errors(kw):
    base = dict(players=3, games_per_season=10, avg=0.3, seed=1)
    with pytest.raises(ConfigError):
        gen_iid_corpus(IIDParams(**{**base, **kw}))


@pytest.mark.parametrize("kw", [
    dict(p_hot=0.3, p_cold=0.3, avg=0.3),
    dict(p_hot=0.2, p_cold=0.4, avg=0.3),
    dict(stay_prob=1.0),
    dict(stay_prob=0.4),
    dict(avg=0.25),
])
def test_hot_hand_config_errors(kw):
    base = dict(players=3, games_per_season=10, avg=0.3, seed=1, p_hot=0.4, p_cold=0.2, stay_prob=0.9)
    with pytest.raises(ConfigError):
        gen_hot_hand_corpus(HotHandParams(**{**base, **kw}))
