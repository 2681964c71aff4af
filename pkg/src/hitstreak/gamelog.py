"""Game-log data model, CSV ingestion and the eligibility / starts-only filters.

One CSV row is one player's batting line for one game::

    player_id,season,game_seq,ab,hits,sac_fly,started,home,date,opponent

``started``, ``home``, ``date`` and ``opponent`` may be empty. Trailing
optional columns may also be left off entirely (a row needs at least the
first seven fields).
"""

from __future__ import annotations

import datetime as dt
import io
from dataclasses import dataclass
from types import MappingProxyType
from typing import IO, Iterable, Iterator, Mapping

from .errors import EmptyCorpusError, GamelogParseError, MissingFieldError, UndefinedAverageError

HEADER = ("player_id", "season", "game_seq", "ab", "hits", "sac_fly", "started", "home", "date", "opponent")
_REQUIRED_FIELDS = 7


@dataclass(frozen=True, slots=True)
class BattingLine:
    game_seq: int
    ab: int
    hits: int
    sac_flies: int = 0
    started: bool | None = None
    home: bool | None = None
    date: dt.date | None = None
    opponent: str | None = None

    def __post_init__(self):
        if self.game_seq < 1:
            raise ValueError(f"game_seq must be >= 1, got {self.game_seq}")
        if self.ab < 0 or self.hits < 0 or self.sac_flies < 0:
            raise ValueError("ab, hits and sac_flies must be non-negative")
        if self.hits > self.ab:
            raise ValueError("hits exceed at-bats")

    @property
    def is_hit_game(self) -> bool:
        return self.hits >= 1


@dataclass(frozen=True)
class PlayerSeasonLog:
    """Ordered batting lines for one player-season.

    Logs built by the parser are never empty. The filters below may return an
    empty log; check :attr:`empty` before handing one to a study.
    """

    player_id: str
    season: int
    lines: tuple[BattingLine, ...]

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        prev = 0
        for line in self.lines:
            if line.game_seq <= prev:
                raise ValueError(
                    f"{self.player_id}/{self.season}: game_seq must be strictly increasing "
                    f"({line.game_seq} after {prev})"
                )
            prev = line.game_seq

    @property
    def key(self) -> tuple[str, int]:
        return (self.player_id, self.season)

    @property
    def empty(self) -> bool:
        return not self.lines

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self) -> Iterator[BattingLine]:
        return iter(self.lines)

    def hit_flags(self) -> list[bool]:
        return [line.hits >= 1 for line in self.lines]

    def replace_lines(self, lines: Iterable[BattingLine], *, check_order: bool = True) -> PlayerSeasonLog:
        """Same player-season with different lines.

        ``check_order=False`` skips the increasing-game_seq check; it is used
        for shuffled logs, whose line order is deliberately not chronological.
        """
        if check_order:
            return PlayerSeasonLog(self.player_id, self.season, tuple(lines))
        log = object.__new__(PlayerSeasonLog)
        object.__setattr__(log, "player_id", self.player_id)
        object.__setattr__(log, "season", self.season)
        object.__setattr__(log, "lines", tuple(lines))
        return log


@dataclass(frozen=True)
class SeasonStats:
    games: int
    at_bats: int
    hits: int

    @property
    def avg(self) -> float:
        if self.at_bats == 0:
            raise UndefinedAverageError("batting average undefined with zero at-bats")
        return self.hits / self.at_bats

    @property
    def ab_per_game(self) -> float:
        return self.at_bats / self.games


class Corpus(Mapping[tuple[str, int], PlayerSeasonLog]):
    """Immutable collection of player-season logs keyed by ``(player_id, season)``.

    Iteration order is sorted by key so every downstream computation sees the
    same order regardless of input row order.
    """

    def __init__(self, logs: Iterable[PlayerSeasonLog]):
        table: dict[tuple[str, int], PlayerSeasonLog] = {}
        for log in logs:
            if log.key in table:
                raise ValueError(f"duplicate player-season {log.key}")
            table[log.key] = log
        self._logs = MappingProxyType(dict(sorted(table.items())))

    def __getitem__(self, key: tuple[str, int]) -> PlayerSeasonLog:
        return self._logs[key]

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self._logs)

    def __len__(self) -> int:
        return len(self._logs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return dict(self._logs) == dict(other._logs)

    def __repr__(self) -> str:
        return f"Corpus({len(self)} logs, {self.n_lines} lines)"

    @property
    def n_lines(self) -> int:
        return sum(len(log) for log in self._logs.values())

    def logs(self) -> Iterator[PlayerSeasonLog]:
        return iter(self._logs.values())


@dataclass(frozen=True)
class FilterSummary:
    kept: Corpus
    input_logs: int
    input_lines: int
    dropped_lines: int
    empty_logs: tuple[tuple[str, int], ...]


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

def _parse_int(token: str, name: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GamelogParseError(lineno, f"non-numeric {name} {token!r}") from None
    return value


def _parse_bool(token: str, name: str, lineno: int) -> bool | None:
    if token == "":
        return None
    if token == "true":
        return True
    if token == "false":
        return False
    raise GamelogParseError(lineno, f"{name} must be 'true', 'false' or empty, got {token!r}")


def _parse_row(fields: list[str], lineno: int) -> tuple[str, int, BattingLine]:
    if not _REQUIRED_FIELDS <= len(fields) <= len(HEADER):
        raise GamelogParseError(lineno, f"expected {len(HEADER)} columns, got {len(fields)}")
    fields = fields + [""] * (len(HEADER) - len(fields))
    player_id = fields[0]
    if not player_id:
        raise GamelogParseError(lineno, "empty player_id")
    season = _parse_int(fields[1], "season", lineno)
    game_seq = _parse_int(fields[2], "game_seq", lineno)
    ab = _parse_int(fields[3], "AB", lineno)
    hits = _parse_int(fields[4], "H", lineno)
    sf = _parse_int(fields[5], "SF", lineno)
    if game_seq < 1:
        raise GamelogParseError(lineno, f"game_seq must be >= 1, got {game_seq}")
    if min(ab, hits, sf) < 0:
        raise GamelogParseError(lineno, "negative AB/H/SF")
    if hits > ab:
        raise GamelogParseError(lineno, "hits exceed at-bats")
    started = _parse_bool(fields[6], "started", lineno)
    home = _parse_bool(fields[7], "home", lineno)
    date = None
    if fields[8]:
        try:
            date = dt.date.fromisoformat(fields[8])
        except ValueError:
            raise GamelogParseError(lineno, f"bad date {fields[8]!r}") from None
    opponent = fields[9] or None
    line = BattingLine(game_seq, ab, hits, sf, started, home, date, opponent)
    return player_id, season, line


def parse_gamelog_csv(stream: IO[bytes] | bytes) -> Corpus:
    """Parse a UTF-8 game-log CSV into a :class:`Corpus`.

    Raises :class:`GamelogParseError` (with the 1-based line number) on a bad
    row and :class:`EmptyCorpusError` when there are no data rows.
    """
    raw = stream if isinstance(stream, bytes) else stream.read()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise GamelogParseError(1, f"input is not UTF-8 ({exc.reason})") from None
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EmptyCorpusError("empty input")
    header = tuple(h.strip() for h in lines[0].split(","))
    if header != HEADER:
        raise GamelogParseError(1, f"header must be {','.join(HEADER)}")

    groups: dict[tuple[str, int], dict[int, BattingLine]] = {}
    for lineno, row in enumerate(lines[1:], start=2):
        if not row.strip():
            continue
        player_id, season, line = _parse_row(row.split(","), lineno)
        seen = groups.setdefault((player_id, season), {})
        if line.game_seq in seen:
            raise GamelogParseError(
                lineno, f"duplicate game_seq {line.game_seq} for {player_id}/{season}"
            )
        seen[line.game_seq] = line
    if not groups:
        raise EmptyCorpusError("no data rows")
    return Corpus(
        PlayerSeasonLog(pid, season, tuple(by_seq[k] for k in sorted(by_seq)))
        for (pid, season), by_seq in groups.items()
    )


def _fmt_bool(value: bool | None) -> str:
    return "" if value is None else ("true" if value else "false")


def write_gamelog_csv(corpus: Corpus, stream: IO[str]) -> None:
    stream.write(",".join(HEADER) + "\n")
    for log in corpus.logs():
        for ln in log.lines:
            stream.write(
                f"{log.player_id},{log.season},{ln.game_seq},{ln.ab},{ln.hits},{ln.sac_flies},"
                f"{_fmt_bool(ln.started)},{_fmt_bool(ln.home)},"
                f"{ln.date.isoformat() if ln.date else ''},{ln.opponent or ''}\n"
            )


def gamelog_csv_bytes(corpus: Corpus) -> bytes:
    buf = io.StringIO()
    write_gamelog_csv(corpus, buf)
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# Filters
# ---------------------------------------------------------------------------

def is_eligible(line: BattingLine) -> bool:
    # 0-for-0 lines neither extend nor break a streak, unless a sac fly made it an official hitless game
    return line.ab >= 1 or line.sac_flies >= 1


def eligibility_filter(log: PlayerSeasonLog) -> PlayerSeasonLog:
    return log.replace_lines(line for line in log.lines if is_eligible(line))


def starts_filter(log: PlayerSeasonLog) -> PlayerSeasonLog:
    if any(line.started is None for line in log.lines):
        raise MissingFieldError(
            f"starts flag required for starts-only mode ({log.player_id}/{log.season})"
        )
    return log.replace_lines(line for line in log.lines if line.started)


def filter_corpus(corpus: Corpus, *, starts_only: bool = False) -> FilterSummary:
    """Apply the eligibility filter (and optionally the starts filter) to every log.

    Logs that come out empty are excluded from ``kept`` and listed in
    ``empty_logs`` so callers can report them.
    """
    kept: list[PlayerSeasonLog] = []
    empty: list[tuple[str, int]] = []
    n_in = dropped = 0
    for log in corpus.logs():
        n_in += len(log)
        out = eligibility_filter(log)
        if starts_only:
            out = starts_filter(out)
        dropped += len(log) - len(out)
        if out.empty:
            empty.append(log.key)
        else:
            kept.append(out)
    return FilterSummary(Corpus(kept), len(corpus), n_in, dropped, tuple(empty))


def season_stats(log: PlayerSeasonLog) -> SeasonStats:
    at_bats = sum(line.ab for line in log.lines)
    if at_bats == 0:
        raise UndefinedAverageError(
            f"batting average undefined for {log.player_id}/{log.season}: zero at-bats"
        )
    return SeasonStats(len(log.lines), at_bats, sum(line.hits for line in log.lines))
