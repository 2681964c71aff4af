from __future__ import annotations

import csv
from pathlib import Path

import pytest

from hitstreak.gamelog import BattingLine, Corpus, PlayerSeasonLog

FIXTURES = Path(__file__).parent / "fixtures"


def make_log(hits, ab=4, player_id="p1", season=1999, **kw) -> PlayerSeasonLog:
    """Log from a per-game hit sequence (ints or 0/1 flags); ``ab`` may be a list."""
    abs_ = ab if isinstance(ab, (list, tuple)) else [ab] * len(hits)
    lines = [BattingLine(i + 1, a, h, **kw) for i, (h, a) in enumerate(zip(hits, abs_))]
    return PlayerSeasonLog(player_id, season, lines)


def read_fixture(name: str) -> list[dict]:
    with open(FIXTURES / name, newline="") as f:
        return list(csv.DictReader(f))


@pytest.fixture
def toy_corpus() -> Corpus:
    return Corpus([make_log([1, 1, 0])])


ACCEPTANCE: list[tuple[str, bool, str]] = []


def record_criterion(name: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.append((name, ok, detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
