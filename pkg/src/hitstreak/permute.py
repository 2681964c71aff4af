"""Monte Carlo permutation study.

Each trial shuffles every player-season log independently (lines never move
between players or seasons), counts the maximal hitting streaks and sums the
counts corpus-wide. The per-trial totals are kept so that means, standard
deviations, the convergence diagnostic and empirical tails can all be
computed from the same table.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import ConfigError, CoverageError, EmptyCorpusError
from .gamelog import Corpus, PlayerSeasonLog, filter_corpus

log = logging.getLogger(__name__)

CONVERGENCE_THRESHOLD = 0.1


@dataclass(frozen=True)
class StudyConfig:
    trials: int
    master_seed: int
    starts_only: bool = False
    min_length: int = 1
    thread_hint: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.master_seed <= rng.MASK64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if self.min_length < 1:
            raise ConfigError("min_length must be >= 1")
        if self.thread_hint is not None and self.thread_hint < 1:
            raise ConfigError("thread_hint must be positive")

    def to_dict(self) -> dict:
        # thread_hint is an execution detail; results do not depend on it
        return {
            "trials": self.trials,
            "seed": self.master_seed,
            "starts_only": self.starts_only,
            "min_length": self.min_length,
        }


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    sd: float
    min: float | None = None
    max: float | None = None

    @classmethod
    def of(cls, values: np.ndarray) -> SummaryStats:
        sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
        return cls(float(values.mean()), sd, float(values.min()), float(values.max()))


ZERO_STATS = SummaryStats(0.0, 0.0, 0.0, 0.0)


@dataclass
class TrialAggregate:
    """Null distribution of streak counts across the permutation trials.

    ``per_trial[t, i]`` is the corpus-wide number of streaks of exact length
    ``min_length + i`` in trial ``t``. Lengths beyond the table have zero
    count in every trial. ``per_trial`` may be ``None`` for an aggregate read
    back from a summary-only report.
    """

    trials: int
    min_length: int
    exact: dict[int, SummaryStats]
    cumulative: dict[int, SummaryStats]
    per_trial: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_counts(cls, counts: np.ndarray, min_length: int) -> TrialAggregate:
        """Build from a ``(trials, max_len + 1)`` table indexed by exact length."""
        counts = np.asarray(counts, dtype=np.int64)
        nonzero = np.flatnonzero(counts.any(axis=0))
        top = max(min_length, int(nonzero[-1]) if nonzero.size else 0)
        table = np.zeros((counts.shape[0], top - min_length + 1), dtype=np.int64)
        avail = counts[:, min_length:top + 1]
        table[:, :avail.shape[1]] = avail
        return cls.from_table(table, min_length)

    @classmethod
    def from_table(cls, table: np.ndarray, min_length: int) -> TrialAggregate:
        cum = np.cumsum(table[:, ::-1], axis=1)[:, ::-1]
        lengths = range(min_length, min_length + table.shape[1])
        return cls(
            trials=table.shape[0],
            min_length=min_length,
            exact={n: SummaryStats.of(table[:, i]) for i, n in enumerate(lengths)},
            cumulative={n: SummaryStats.of(cum[:, i]) for i, n in enumerate(lengths)},
            per_trial=table,
        )

    @property
    def max_length(self) -> int:
        return max(self.exact, default=self.min_length)

    @property
    def lengths(self) -> list[int]:
        return sorted(self.exact)

    def _check(self, length: int) -> None:
        if length < self.min_length:
            raise CoverageError(f"length {length} below study min_length {self.min_length}")

    def exact_stats(self, length: int) -> SummaryStats:
        self._check(length)
        return self.exact.get(length, ZERO_STATS)

    def tail_stats(self, length: int) -> SummaryStats:
        self._check(length)
        return self.cumulative.get(length, ZERO_STATS)

    def _require_table(self) -> np.ndarray:
        if self.per_trial is None:
            raise CoverageError("per-trial totals not available for this study")
        return self.per_trial

    def per_trial_exact(self, length: int) -> np.ndarray:
        self._check(length)
        table = self._require_table()
        i = length - self.min_length
        return table[:, i] if i < table.shape[1] else np.zeros(table.shape[0], dtype=np.int64)

    def per_trial_cumulative(self, length: int) -> np.ndarray:
        self._check(length)
        table = self._require_table()
        return table[:, length - self.min_length:].sum(axis=1)

    def to_dict(self, *, per_trial: bool = False) -> dict:
        def rows(stats: dict[int, SummaryStats]) -> list[dict]:
            return [{"L": n, "mean": s.mean, "sd": s.sd, "min": s.min, "max": s.max}
                    for n, s in sorted(stats.items())]

        out = {"trials": self.trials, "min_length": self.min_length,
               "lengths": rows(self.exact), "cumulative": rows(self.cumulative)}
        if per_trial:
            table = self._require_table()
            out["per_trial"] = {"lengths": self.lengths, "counts": table.tolist()}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> TrialAggregate:
        if "per_trial" in data:
            table = np.asarray(data["per_trial"]["counts"], dtype=np.int64)
            return cls.from_table(table.reshape(len(table), -1), data["min_length"])

        def parse(rows: list[dict]) -> dict[int, SummaryStats]:
            return {int(r["L"]): SummaryStats(r["mean"], r["sd"], r.get("min"), r.get("max")) for r in rows}

        return cls(data["trials"], data["min_length"], parse(data["lengths"]), parse(data["cumulative"]))


# ---------------------------------------------------------------------------
# Shuffling
# ---------------------------------------------------------------------------

derive_trial_seed = rng.derive_trial_seed


def shuffle_log(log: PlayerSeasonLog, seed: int) -> PlayerSeasonLog:
    """Uniformly random reordering of a log's lines (Fisher-Yates, seeded)."""
    if log.empty:
        raise ValueError("cannot shuffle an empty log")
    order = rng.permutation(len(log), np.uint64(seed))
    lines = log.lines
    return log.replace_lines((lines[i] for i in order), check_order=False)


@dataclass(frozen=True)
class _Packed:
    flags: np.ndarray
    offsets: np.ndarray
    keys: np.ndarray
    longest: int


def _pack(corpus: Corpus, master_seed: int) -> _Packed:
    flags: list[int] = []
    offsets = [0]
    keys = []
    for lg in corpus.logs():
        flags.extend(1 if ln.hits else 0 for ln in lg.lines)
        offsets.append(len(flags))
        keys.append(rng.log_key(master_seed, lg.player_id, lg.season))
    off = np.asarray(offsets, dtype=np.int64)
    return _Packed(
        flags=np.asarray(flags, dtype=np.uint8),
        offsets=off,
        keys=np.asarray(keys, dtype=np.uint64),
        longest=int(np.diff(off).max()),
    )


def _partition(trials: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, trials))
    bounds = [trials * i // parts for i in range(parts + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(parts)]


def run_study(corpus: Corpus, config: StudyConfig) -> TrialAggregate:
    """Run ``config.trials`` permutation trials over the filtered corpus.

    The trial range is split into ``thread_hint`` contiguous blocks that run
    on a thread pool no larger than the machine's CPU count. Each trial's
    shuffles depend only on (master_seed, player-season, trial index), and
    each block writes disjoint rows of the count table, so the result is the
    same for every thread count.
    """
    kept = filter_corpus(corpus, starts_only=config.starts_only).kept
    if len(kept) == 0:
        raise EmptyCorpusError("no eligible games left after filtering")
    packed = _pack(kept, config.master_seed)
    counts = np.zeros((config.trials, packed.longest + 1), dtype=np.int64)
    blocks = _partition(config.trials, config.thread_hint or 1)
    workers = min(len(blocks), os.cpu_count() or 1)
    log.debug("study: %d logs, %d lines, %d trials, %d blocks on %d threads",
              len(kept), packed.flags.size, config.trials, len(blocks), workers)

    def work(block: tuple[int, int]) -> None:
        rng.count_trials(packed.flags, packed.offsets, packed.keys, block[0], block[1], counts)

    if workers == 1:
        for b in blocks:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, blocks))
    return TrialAggregate.from_counts(counts, config.min_length)


# ---------------------------------------------------------------------------
# Convergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    kind: str  # "exact" or "cumulative"
    length: int
    mean_first: float
    mean_second: float
    sd_first: float
    sd_second: float
    abs_diff: float
    norm_diff: float | None
    converged: bool


@dataclass(frozen=True)
class ConvergenceReport:
    split: int
    threshold: float
    rows: tuple[ConvergenceRow, ...]

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.rows)

    @property
    def non_converged(self) -> list[ConvergenceRow]:
        return [r for r in self.rows if not r.converged]

    def to_dict(self) -> dict:
        return {
            "split": self.split,
            "threshold": self.threshold,
            "converged": self.converged,
            "rows": [r.__dict__ for r in self.rows],
        }


def convergence_split(aggregate: TrialAggregate, threshold: float = CONVERGENCE_THRESHOLD) -> ConvergenceReport:
    """Compare first-half and second-half trial means and SDs.

    A length is flagged when ``|mean_1 - mean_2| > threshold * sd_full``.
    """
    if aggregate.trials < 2:
        raise ConfigError("convergence split needs at least 2 trials")
    table = aggregate._require_table()
    half = aggregate.trials // 2
    cum = np.cumsum(table[:, ::-1], axis=1)[:, ::-1]
    rows = []
    for kind, tab, full in (("exact", table, aggregate.exact), ("cumulative", cum, aggregate.cumulative)):
        for i, n in enumerate(aggregate.lengths):
            a, b = SummaryStats.of(tab[:half, i]), SummaryStats.of(tab[half:, i])
            diff = abs(a.mean - b.mean)
            sd_full = full[n].sd
            norm = diff / sd_full if sd_full > 0 else None
            ok = diff <= threshold * sd_full or math.isclose(diff, 0.0, abs_tol=1e-12)
            rows.append(ConvergenceRow(kind, n, a.mean, b.mean, a.sd, b.sd, diff, norm, ok))
    return ConvergenceReport(half, threshold, tuple(rows))
