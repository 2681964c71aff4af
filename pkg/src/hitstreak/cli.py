"""``hitstreak`` command-line entry point.

Exit codes: 0 success, 1 operational failure (I/O, parse, coverage), 2 usage
error. Data goes to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import HitStreakError
from .gamelog import filter_corpus, parse_gamelog_csv, season_stats, write_gamelog_csv
from .permute import StudyConfig, TrialAggregate, convergence_split, run_study
from .stats import comparison_table
from .streaks import StreakCensus, attrition, corpus_census, opponent_streaks, window_analytics
from .synth import (
    DEFAULT_AB_WEIGHTS,
    DEFAULT_PINCH_WEIGHTS,
    HotHandParams,
    IIDParams,
    gen_hot_hand_corpus,
    gen_iid_corpus,
)
from .theory import (
    constant_run_prob,
    expected_hit_games,
    expected_k_hit_games,
    per_game_hit_prob,
    scenario_compare,
)

log = logging.getLogger("hitstreak")


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------

def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _load(path: str):
    return parse_gamelog_csv(_read_bytes(path))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", out)


def _emit_csv(header: Sequence[str], rows, out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit(buf.getvalue(), out)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def read_census_csv(path: str, min_length: int | None = None) -> StreakCensus:
    """Read a ``length,count[,...]`` census file (as written by ``count``)."""
    rows = list(csv.DictReader(io.StringIO(_read_bytes(path).decode("utf-8-sig"))))
    if not rows or "length" not in rows[0] or "count" not in rows[0]:
        raise HitStreakError(f"{path}: census CSV needs 'length' and 'count' columns")
    exact = {int(r["length"]): int(r["count"]) for r in rows}
    low = min(exact) if min_length is None else min_length
    return StreakCensus({n: c for n, c in exact.items() if n >= low}, low)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    corpus = _load(args.input)
    summary = filter_corpus(corpus)
    zero_ab = []
    for lg in summary.kept.logs():
        if sum(ln.ab for ln in lg.lines) == 0:
            zero_ab.append(f"{lg.player_id}/{lg.season}")
    lines = [ln for lg in corpus.logs() for ln in lg.lines]
    report = {
        "config": {"input": args.input},
        "logs": len(corpus),
        "lines": corpus.n_lines,
        "eligible_lines": summary.input_lines - summary.dropped_lines,
        "excluded_zero_for_zero": summary.dropped_lines,
        "empty_after_filter": [f"{p}/{s}" for p, s in summary.empty_logs],
        "zero_at_bat_logs": zero_ab,
        "coverage": {
            "started": sum(ln.started is not None for ln in lines),
            "home": sum(ln.home is not None for ln in lines),
            "date": sum(ln.date is not None for ln in lines),
            "opponent": sum(ln.opponent is not None for ln in lines),
        },
    }
    _emit_json(report, args.out)
    return 0


def cmd_count(args) -> int:
    corpus = _load(args.input)
    cen = corpus_census(corpus, args.min_length, starts_only=args.starts_only)
    if args.json:
        _emit_json({"config": {"input": args.input, "min_length": args.min_length,
                               "starts_only": args.starts_only},
                    "census": cen.to_dict(),
                    "cumulative": [{"length": n, "count": c} for n, _, c in cen.rows()]}, args.out)
    elif args.cumulative:
        _emit_csv(["length", "count", "cumulative"], cen.rows(), args.out)
    else:
        _emit_csv(["length", "count"], [(n, c) for n, c, _ in cen.rows()], args.out)
    return 0


def cmd_permute(args) -> int:
    corpus = _load(args.input)
    config = StudyConfig(trials=args.trials, master_seed=args.seed, starts_only=args.starts_only,
                         min_length=args.min_length, thread_hint=args.threads)
    agg = run_study(corpus, config)
    body = agg.to_dict(per_trial=args.per_trial)
    out = {"config": {"input": args.input, **config.to_dict()},
           "lengths": body["lengths"], "cumulative": body["cumulative"]}
    if agg.trials >= 2:
        out["convergence"] = convergence_split(agg).to_dict()
    else:
        out["convergence"] = None
    if args.per_trial:
        out["per_trial"] = body["per_trial"]
    _emit_json(out, args.out)
    return 0


def _load_study(path: str) -> TrialAggregate:
    data = json.loads(_read_bytes(path))
    cfg = data.get("config", {})
    return TrialAggregate.from_dict({
        "trials": cfg["trials"],
        "min_length": cfg["min_length"],
        "lengths": data["lengths"],
        "cumulative": data["cumulative"],
        **({"per_trial": data["per_trial"]} if data.get("per_trial") else {}),
    })


def cmd_report(args) -> int:
    null = _load_study(args.study)
    observed = read_census_csv(args.census, null.min_length)
    rows = comparison_table(observed, null, args.tails, max_exact=args.max_exact)
    if args.json:
        _emit_json({"config": {"census": args.census, "study": args.study, "tails": args.tails,
                               "max_exact": args.max_exact},
                    "rows": [r.to_dict() for r in rows]}, args.out)
        return 0
    header = ["length", "observed", "null_mean", "null_sd", "z", "p_upper", "excess_ratio",
              "empirical_p", "degenerate"]
    _emit_csv(header, [[r.label, r.observed, _fmt(r.null_mean), _fmt(r.null_sd), _fmt(r.z),
                        _fmt(r.p_upper), _fmt(r.excess_ratio), _fmt(r.empirical_p),
                        str(r.degenerate).lower()] for r in rows], args.out)
    return 0


def cmd_attrition(args) -> int:
    if args.census:
        cen = read_census_csv(args.input)
    else:
        cen = corpus_census(_load(args.input), 1)
    n_max = args.n_max if args.n_max is not None else max(cen.max_length, args.n_min)
    table = attrition(cen, args.n_min, n_max)
    if args.json:
        _emit_json({"config": {"input": args.input, "n_min": args.n_min, "n_max": n_max},
                    "rows": [r.__dict__ for r in table]}, args.out)
    else:
        _emit_csv(["n", "reached", "survived", "rate"],
                  [(r.n, r.reached, r.survived, "" if r.rate is None else f"{r.rate:.4f}") for r in table],
                  args.out)
    return 0


def cmd_windows(args) -> int:
    windows, summary = window_analytics(_load(args.input), args.min_length)
    if args.json:
        _emit_json({"config": {"input": args.input, "min_length": args.min_length},
                    "summary": summary.to_dict(),
                    "windows": [dict(w.__dict__, length=w.length) for w in windows]}, args.out)
    else:
        _emit_csv(["player_id", "season", "start_index", "end_index", "length", "ab_per_game_in",
                   "start_month", "home_fraction"],
                  [(w.player_id, w.season, w.start_index, w.end_index, w.length, _fmt(w.ab_per_game_in),
                    _fmt(w.start_month), _fmt(w.home_fraction)) for w in windows], args.out)
        for key, value in summary.to_dict().items():
            print(f"{key}: {value}", file=sys.stderr)
    return 0


def cmd_opponent(args) -> int:
    cen = opponent_streaks(_load(args.input), args.team, args.min_length)
    if args.json:
        _emit_json({"config": {"input": args.input, "team": args.team, "min_length": args.min_length},
                    "census": cen.to_dict()}, args.out)
    else:
        _emit_csv(["length", "count", "cumulative"], cen.rows(), args.out)
    return 0


def cmd_theory(args) -> int:
    kind = args.theory_cmd
    if kind == "prob":
        p = per_game_hit_prob(args.avg, args.abg)
        result = {"p": p}
        text = f"{p:.4f}\n"
    elif kind == "expected":
        e = expected_hit_games(args.avg, args.abg, args.games)
        result = {"expected_hit_games": e}
        text = f"{e:.4f}\n"
    elif kind == "run":
        prob = constant_run_prob(args.avg, args.abg, args.games, args.length)
        result = {"probability": prob}
        text = f"{prob:.6g}\n"
    elif kind == "scenario":
        rows = scenario_compare(args.avg, args.games, args.abg_base, args.abg_boosted, args.lengths)
        result = {"rows": [r.__dict__ for r in rows]}
        text = "length,prob_base,prob_boosted,relative_increase\n" + "".join(
            f"{r.length},{r.prob_base:.6g},{r.prob_boosted:.6g},{_fmt(r.relative_increase)}\n" for r in rows)
    else:  # khits
        corpus = filter_corpus(_load(args.input)).kept
        totals = {k: [0.0, 0] for k in args.k}
        skipped = 0
        for lg in corpus.logs():
            if season_stats_or_none(lg) is None:
                skipped += 1
                continue
            for k in args.k:
                cmp = expected_k_hit_games(lg, k)
                totals[k][0] += cmp.expected
                totals[k][1] += cmp.observed
        if skipped:
            log.warning("skipped %d player-seasons with zero at-bats", skipped)
        result = {"rows": [{"k": k, "expected": e, "observed": o,
                            "excess_ratio": o / e - 1.0 if e > 0 else None}
                           for k, (e, o) in totals.items()]}
        text = "k,expected,observed,excess_ratio\n" + "".join(
            f"{r['k']},{r['expected']:.4f},{r['observed']},{_fmt(r['excess_ratio'])}\n" for r in result["rows"])
    if args.json:
        config = {k: v for k, v in vars(args).items() if k not in ("func", "json", "out")}
        _emit_json({"config": config, **result}, args.out)
    else:
        _emit(text, args.out)
    return 0


def season_stats_or_none(lg):
    try:
        return season_stats(lg)
    except HitStreakError:
        return None


def _weights(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated weights, got {text!r}") from None


def cmd_synth(args) -> int:
    common = dict(players=args.players, games_per_season=args.games, seed=args.seed,
                  ab_distribution=args.ab_weights, pinch_rate=args.pinch_rate,
                  pinch_distribution=args.pinch_weights, season=args.season)
    if args.model == "iid":
        corpus = gen_iid_corpus(IIDParams(avg=args.avg, **common))
    else:
        avg = (args.p_hot + args.p_cold) / 2
        corpus = gen_hot_hand_corpus(HotHandParams(avg=avg, p_hot=args.p_hot, p_cold=args.p_cold,
                                                   stay_prob=args.stay, **common))
    buf = io.StringIO()
    write_gamelog_csv(corpus, buf)
    _emit(buf.getvalue(), args.out)
    log.info("wrote %d lines for %d player-seasons", corpus.n_lines, len(corpus))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hitstreak", description="Hitting-streak permutation analytics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func, help: str, data: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, description=help)
        if data:
            p.add_argument("input", help="game-log CSV ('-' for stdin)")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "parse and summarize a game-log CSV")

    p = add("count", cmd_count, "census of observed hitting streaks")
    p.add_argument("--min-length", type=_positive, default=1)
    p.add_argument("--cumulative", action="store_true", help="add a cumulative (length+) column")
    p.add_argument("--starts-only", action="store_true")

    p = add("permute", cmd_permute, "run the permutation study (JSON output)")
    p.add_argument("--trials", type=_positive, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--starts-only", action="store_true")
    p.add_argument("--min-length", type=_positive, default=1)
    p.add_argument("--threads", type=_positive, default=1, help="thread hint; results do not depend on it")
    p.add_argument("--per-trial", action="store_true", help="include the per-trial count table")

    p = add("report", cmd_report, "compare an observed census with a permutation study", data=False)
    p.add_argument("--census", required=True, help="census CSV from 'count'")
    p.add_argument("--study", required=True, help="study JSON from 'permute'")
    p.add_argument("--tails", type=_positive, nargs="*", default=[5, 10, 15, 20, 25, 30, 35])
    p.add_argument("--max-exact", type=_positive)

    p = add("attrition", cmd_attrition, "streak survival from length n to n+1")
    p.add_argument("--census", action="store_true", help="input is a census CSV, not a game log")
    p.add_argument("--n-min", type=_positive, default=1)
    p.add_argument("--n-max", type=_positive)

    p = add("windows", cmd_windows, "in-streak AB/G, start month and home share")
    p.add_argument("--min-length", type=_positive, default=20)

    p = add("opponent", cmd_opponent, "career streaks against one opponent")
    p.add_argument("--team", required=True)
    p.add_argument("--min-length", type=_positive, default=1)

    theory = sub.add_parser("theory", help="coin-flip model calculations")
    tsub = theory.add_subparsers(dest="theory_cmd", required=True, metavar="CALC")

    def tadd(name: str, help: str, data: bool = False) -> argparse.ArgumentParser:
        p = tsub.add_parser(name, help=help, description=help)
        if data:
            p.add_argument("input", help="game-log CSV")
        p.add_argument("--out")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=cmd_theory)
        return p

    p = tadd("prob", "per-game probability of at least one hit")
    p.add_argument("--avg", type=float, required=True)
    p.add_argument("--abg", type=float, required=True)
    p = tadd("expected", "expected number of games with a hit")
    p.add_argument("--avg", type=float, required=True)
    p.add_argument("--abg", type=float, required=True)
    p.add_argument("--games", type=_positive, required=True)
    p = tadd("run", "probability of a streak of at least --length games")
    p.add_argument("--avg", type=float, required=True)
    p.add_argument("--abg", type=float, required=True)
    p.add_argument("--games", type=_positive, required=True)
    p.add_argument("--length", type=_positive, required=True)
    p = tadd("scenario", "effect of a season-long AB/G change on streak odds")
    p.add_argument("--avg", type=float, required=True)
    p.add_argument("--games", type=_positive, required=True)
    p.add_argument("--abg-base", type=float, required=True)
    p.add_argument("--abg-boosted", type=float, required=True)
    p.add_argument("--lengths", type=_positive, nargs="+", required=True)
    p = tadd("khits", "expected vs observed games with exactly k hits", data=True)
    p.add_argument("--k", type=int, nargs="+", default=[0, 1, 2, 3, 4])

    p = add("synth", cmd_synth, "generate a synthetic game-log CSV", data=False)
    p.add_argument("model", choices=["iid", "hothand"])
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--players", type=_positive, default=200)
    p.add_argument("--games", type=_positive, default=150)
    p.add_argument("--season", type=int, default=2000)
    p.add_argument("--avg", type=float, default=0.280, help="iid model only")
    p.add_argument("--p-hot", type=float, default=0.400)
    p.add_argument("--p-cold", type=float, default=0.200)
    p.add_argument("--stay", type=float, default=0.95)
    p.add_argument("--pinch-rate", type=float, default=0.0)
    p.add_argument("--ab-weights", type=_weights, default=DEFAULT_AB_WEIGHTS, help="7 weights for AB 0..6")
    p.add_argument("--pinch-weights", type=_weights, default=DEFAULT_PINCH_WEIGHTS)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (HitStreakError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"hitstreak {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
