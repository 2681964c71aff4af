"""Hitting-streak detection and streak-derived analytics.

A hitting streak is a maximal run of consecutive (eligible) games with at
least one hit, within a single season.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import MissingFieldError
from .gamelog import Corpus, PlayerSeasonLog, eligibility_filter, filter_corpus


def run_bounds(flags: Sequence[bool]) -> list[tuple[int, int]]:
    """Inclusive (start, end) index pairs of the maximal runs of truthy flags."""
    runs = []
    start = None
    for i, f in enumerate(flags):
        if f:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(flags) - 1))
    return runs


@dataclass(frozen=True)
class StreakWindow:
    player_id: str
    season: int
    start_index: int
    end_index: int
    ab_per_game_in: float
    start_month: int | None = None
    home_fraction: float | None = None

    @property
    def length(self) -> int:
        return self.end_index - self.start_index + 1


@dataclass(frozen=True)
class StreakCensus:
    """Counts of maximal streaks by exact length, for lengths >= ``min_length``."""

    exact: Mapping[int, int] = field(default_factory=dict)
    min_length: int = 1

    def __post_init__(self):
        if self.min_length < 1:
            raise ValueError("min_length must be >= 1")
        clean = {}
        for length, count in sorted(self.exact.items()):
            if count < 0:
                raise ValueError("streak counts must be non-negative")
            if length < self.min_length:
                raise ValueError(f"length {length} below min_length {self.min_length}")
            if count:
                clean[int(length)] = int(count)
        object.__setattr__(self, "exact", clean)

    @classmethod
    def from_lengths(cls, lengths: Iterable[int], min_length: int = 1) -> StreakCensus:
        return cls(Counter(n for n in lengths if n >= min_length), min_length)

    def count(self, length: int) -> int:
        return self.exact.get(length, 0)

    def cumulative(self, length: int) -> int:
        return sum(c for n, c in self.exact.items() if n >= length)

    @property
    def max_length(self) -> int:
        return max(self.exact, default=0)

    @property
    def total(self) -> int:
        return sum(self.exact.values())

    def __add__(self, other: StreakCensus) -> StreakCensus:
        if not isinstance(other, StreakCensus):
            return NotImplemented
        if other.min_length != self.min_length:
            raise ValueError("cannot add censuses with different min_length")
        merged = Counter(self.exact)
        merged.update(other.exact)
        return StreakCensus(merged, self.min_length)

    def rows(self, upto: int | None = None) -> list[tuple[int, int, int]]:
        """``(length, count, cumulative)`` for every length from min_length to ``upto``."""
        top = max(self.max_length, self.min_length) if upto is None else upto
        return [(n, self.count(n), self.cumulative(n)) for n in range(self.min_length, top + 1)]

    def to_dict(self) -> dict:
        return {
            "min_length": self.min_length,
            "exact": [{"length": n, "count": c} for n, c in self.exact.items()],
        }


@dataclass(frozen=True)
class AttritionRow:
    n: int
    reached: int
    survived: int
    rate: float | None  # None when no streak reached n


@dataclass(frozen=True)
class AttritionTable:
    rows: tuple[AttritionRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def row(self, n: int) -> AttritionRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


# ---------------------------------------------------------------------------
# Streak detection
# ---------------------------------------------------------------------------

def maximal_streaks(log: PlayerSeasonLog) -> list[StreakWindow]:
    """All maximal hitting streaks in an (already filtered) player-season log.

    Every line counts: a hit game extends the current streak and a hitless
    game ends it. A streak still alive at the end of the log counts at its
    achieved length.
    """
    windows = []
    lines = log.lines
    for start, end in run_bounds([ln.hits >= 1 for ln in lines]):
        chunk = lines[start:end + 1]
        first = chunk[0]
        month = first.date.month if first.date is not None else None
        home_fraction = None
        if all(ln.home is not None for ln in chunk):
            home_fraction = sum(1 for ln in chunk if ln.home) / len(chunk)
        windows.append(StreakWindow(
            player_id=log.player_id,
            season=log.season,
            start_index=start,
            end_index=end,
            ab_per_game_in=sum(ln.ab for ln in chunk) / len(chunk),
            start_month=month,
            home_fraction=home_fraction,
        ))
    return windows


def census(windows: Iterable[StreakWindow], min_length: int = 1) -> StreakCensus:
    return StreakCensus.from_lengths((w.length for w in windows), min_length)


def log_census(log: PlayerSeasonLog, min_length: int = 1) -> StreakCensus:
    lengths = (e - s + 1 for s, e in run_bounds(log.hit_flags()))
    return StreakCensus.from_lengths(lengths, min_length)


def corpus_census(corpus: Corpus, min_length: int = 1, *, starts_only: bool = False) -> StreakCensus:
    """Observed (real-order) census over a corpus after the standard filters."""
    kept = filter_corpus(corpus, starts_only=starts_only).kept
    lengths = []
    for log in kept.logs():
        lengths.extend(e - s + 1 for s, e in run_bounds(log.hit_flags()))
    return StreakCensus.from_lengths(lengths, min_length)


def attrition(census: StreakCensus, n_min: int, n_max: int) -> AttritionTable:
    """Survival rate of streaks from length n to n+1 for each n in [n_min, n_max]."""
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    if n_min < census.min_length:
        raise ValueError(f"census only covers lengths >= {census.min_length}")
    rows = []
    for n in range(n_min, n_max + 1):
        reached = census.cumulative(n)
        survived = census.cumulative(n + 1)
        rows.append(AttritionRow(n, reached, survived, survived / reached if reached else None))
    return AttritionTable(tuple(rows))


# ---------------------------------------------------------------------------
# Window analytics
# ---------------------------------------------------------------------------

@dataclass
class WindowSummary:
    windows: int
    fraction_abg_up: float | None
    mean_relative_abg_change: float | None
    start_months: dict[int, int]
    home_fraction: float | None
    missing_dates: int
    missing_home: int

    def to_dict(self) -> dict:
        return {
            "windows": self.windows,
            "fraction_abg_up": self.fraction_abg_up,
            "mean_relative_abg_change": self.mean_relative_abg_change,
            "start_months": {str(m): c for m, c in sorted(self.start_months.items())},
            "home_fraction": self.home_fraction,
            "missing_dates": self.missing_dates,
            "missing_home": self.missing_home,
        }


def relative_change(inside: float, season: float) -> float:
    return (inside - season) / season


def window_analytics(corpus: Corpus, min_length: int) -> tuple[list[StreakWindow], WindowSummary]:
    """In-streak AB/G, start month and home share for streaks of at least ``min_length``.

    Windows are indexed into the eligibility-filtered log. A window without a
    date on its first game is left out of the month histogram, and one with
    any missing home flag is left out of the home share; both omissions are
    counted rather than treated as errors.
    """
    if min_length < 1:
        raise ValueError("min_length must be >= 1")
    kept: list[StreakWindow] = []
    rel_changes = []
    months: Counter[int] = Counter()
    home_games = home_total = 0
    missing_dates = missing_home = 0
    for log in corpus.logs():
        log = eligibility_filter(log)
        if log.empty:
            continue
        long_ones = [w for w in maximal_streaks(log) if w.length >= min_length]
        if not long_ones:
            continue
        season_abg = sum(ln.ab for ln in log.lines) / len(log)
        for w in long_ones:
            kept.append(w)
            if season_abg > 0:
                rel_changes.append(relative_change(w.ab_per_game_in, season_abg))
            if w.start_month is None:
                missing_dates += 1
            else:
                months[w.start_month] += 1
            if w.home_fraction is None:
                missing_home += 1
            else:
                home_games += sum(1 for ln in log.lines[w.start_index:w.end_index + 1] if ln.home)
                home_total += w.length
    summary = WindowSummary(
        windows=len(kept),
        fraction_abg_up=sum(1 for r in rel_changes if r > 0) / len(rel_changes) if rel_changes else None,
        mean_relative_abg_change=sum(rel_changes) / len(rel_changes) if rel_changes else None,
        start_months=dict(months),
        home_fraction=home_games / home_total if home_total else None,
        missing_dates=missing_dates,
        missing_home=missing_home,
    )
    return kept, summary


def opponent_streaks(corpus: Corpus, opponent: str, min_length: int = 1) -> StreakCensus:
    """Career-level streaks restricted to games against one opponent.

    For each player, the eligible lines against ``opponent`` from all seasons
    are strung together in (season, game_seq) order and scanned for streaks.
    """
    for log in corpus.logs():
        if any(ln.opponent is None for ln in log.lines):
            raise MissingFieldError(f"opponent codes required ({log.player_id}/{log.season})")
    by_player: dict[str, list[bool]] = {}
    for log in corpus.logs():  # sorted by (player_id, season)
        flags = by_player.setdefault(log.player_id, [])
        flags.extend(ln.hits >= 1 for ln in eligibility_filter(log).lines if ln.opponent == opponent)
    lengths = []
    for flags in by_player.values():
        lengths.extend(e - s + 1 for s, e in run_bounds(flags))
    return StreakCensus.from_lengths(lengths, min_length)
