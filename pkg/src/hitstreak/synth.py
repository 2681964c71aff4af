"""Synthetic game logs under the independence null and a hot-hand alternative.

Each player-season draws from its own numpy generator spawned from the
master seed by player-season index, so a corpus is reproducible regardless
of how generation is split up.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .gamelog import BattingLine, Corpus, PlayerSeasonLog

TEAMS = ("ATL", "BOS", "CHC", "CIN", "CLE", "DET", "HOU", "LAD", "NYY", "PHI", "SEA", "SFG", "STL", "TOR")

# weights over AB = 0..6
DEFAULT_AB_WEIGHTS = (0.0, 0.0, 0.02, 0.18, 0.50, 0.27, 0.03)
DEFAULT_PINCH_WEIGHTS = (0.45, 0.50, 0.05, 0.0, 0.0, 0.0, 0.0)
MAX_AB = 6


def _check_weights(name: str, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (MAX_AB + 1,):
        raise ConfigError(f"{name} needs {MAX_AB + 1} weights (AB 0..{MAX_AB})")
    if np.any(w < 0) or not np.isclose(w.sum(), 1.0, atol=1e-9):
        raise ConfigError(f"{name} must be non-negative and sum to 1")
    return w


@dataclass(frozen=True, kw_only=True)
class IIDParams:
    players: int
    games_per_season: int
    avg: float
    seed: int
    ab_distribution: tuple[float, ...] = DEFAULT_AB_WEIGHTS
    pinch_rate: float = 0.0
    pinch_distribution: tuple[float, ...] = DEFAULT_PINCH_WEIGHTS
    season: int = 2000

    def validate(self) -> None:
        if self.players < 1 or self.games_per_season < 1:
            raise ConfigError("players and games_per_season must be positive")
        if not 0.0 <= self.avg <= 1.0:
            raise ConfigError("avg must lie in [0, 1]")
        if not 0.0 <= self.pinch_rate <= 1.0:
            raise ConfigError("pinch_rate must lie in [0, 1]")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        _check_weights("ab_distribution", self.ab_distribution)
        _check_weights("pinch_distribution", self.pinch_distribution)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in self.__dict__.items()}


@dataclass(frozen=True, kw_only=True)
class HotHandParams(IIDParams):
    """Two-state (hot/cold) hidden Markov chain per player-season.

    The chain is symmetric, so each state holds half the games in the long
    run and the mean per-at-bat probability is ``(p_hot + p_cold) / 2``,
    which must equal ``avg``.
    """

    p_hot: float
    p_cold: float
    stay_prob: float

    def validate(self) -> None:
        super().validate()
        if not 0.0 <= self.p_cold < self.p_hot <= 1.0:
            raise ConfigError("need 0 <= p_cold < p_hot <= 1")
        if not 0.5 <= self.stay_prob < 1.0:
            raise ConfigError("stay_prob must lie in [0.5, 1)")
        if abs((self.p_hot + self.p_cold) / 2 - self.avg) > 1e-9:
            raise ConfigError("(p_hot + p_cold) / 2 must equal avg")


def _rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _at_bats(params: IIDParams, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n = params.games_per_season
    support = np.arange(MAX_AB + 1)
    pinch = gen.random(n) < params.pinch_rate
    regular = gen.choice(support, size=n, p=np.asarray(params.ab_distribution))
    reduced = gen.choice(support, size=n, p=np.asarray(params.pinch_distribution))
    return np.where(pinch, reduced, regular), ~pinch


def _build_log(params: IIDParams, index: int, ab, hits, started, gen) -> PlayerSeasonLog:
    n = params.games_per_season
    home = gen.random(n) < 0.5
    opp = gen.integers(len(TEAMS), size=n)
    opening = dt.date(params.season, 4, 1)
    lines = tuple(
        BattingLine(
            game_seq=g + 1,
            ab=int(ab[g]),
            hits=int(hits[g]),
            sac_flies=0,
            started=bool(started[g]),
            home=bool(home[g]),
            date=opening + dt.timedelta(days=g * 180 // n),
            opponent=TEAMS[opp[g]],
        )
        for g in range(n)
    )
    return PlayerSeasonLog(f"p{index:06d}", params.season, lines)


def gen_iid_corpus(params: IIDParams) -> Corpus:
    """Every at-bat an independent Bernoulli(avg) trial."""
    params.validate()
    logs = []
    for i, gen in enumerate(_rngs(params.seed, params.players)):
        ab, started = _at_bats(params, gen)
        hits = gen.binomial(ab, params.avg)
        logs.append(_build_log(params, i, ab, hits, started, gen))
    return Corpus(logs)


def hot_states(n: int, stay_prob: float, gen: np.random.Generator) -> np.ndarray:
    """Boolean hot/cold path of a symmetric two-state chain started at stationarity."""
    first = gen.random() < 0.5
    switches = gen.random(n) >= stay_prob
    switches[0] = False
    return np.logical_xor(first, np.cumsum(switches) % 2 == 1)


def gen_hot_hand_corpus(params: HotHandParams) -> Corpus:
    params.validate()
    logs = []
    for i, gen in enumerate(_rngs(params.seed, params.players)):
        ab, started = _at_bats(params, gen)
        hot = hot_states(params.games_per_season, params.stay_prob, gen)
        hits = gen.binomial(ab, np.where(hot, params.p_hot, params.p_cold))
        logs.append(_build_log(params, i, ab, hits, started, gen))
    return Corpus(logs)
