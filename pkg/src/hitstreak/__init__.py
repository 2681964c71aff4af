"""Hitting-streak analytics: observed streak counts against a within-season permutation null."""

from .errors import HitStreakError
from .gamelog import (
    BattingLine,
    Corpus,
    PlayerSeasonLog,
    SeasonStats,
    eligibility_filter,
    parse_gamelog_csv,
    season_stats,
    starts_filter,
)
from .permute import StudyConfig, TrialAggregate, convergence_split, derive_trial_seed, run_study, shuffle_log
from .stats import comparison_table, empirical_tail, upper_tail, zscore
from .streaks import StreakCensus, StreakWindow, attrition, census, maximal_streaks
from .theory import longest_run_prob, per_game_hit_prob

__version__ = "0.1.0"

__all__ = [
    "BattingLine", "Corpus", "HitStreakError", "PlayerSeasonLog", "SeasonStats", "StreakCensus",
    "StreakWindow", "StudyConfig", "TrialAggregate", "attrition", "census", "comparison_table",
    "convergence_split", "derive_trial_seed", "eligibility_filter", "empirical_tail",
    "longest_run_prob", "maximal_streaks", "parse_gamelog_csv", "per_game_hit_prob",
    "run_study", "season_stats", "shuffle_log", "starts_filter", "upper_tail", "zscore",
]
