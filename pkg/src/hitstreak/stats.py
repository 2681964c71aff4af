"""Observed-vs-null comparison: z-scores, normal tails and empirical tails."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .errors import CoverageError, DegenerateNullError
from .permute import TrialAggregate
from .streaks import StreakCensus

_LOG10E = math.log10(math.e)


def zscore(observed: float, null_mean: float, null_sd: float) -> float:
    if null_sd < 0:
        raise ValueError("null_sd must be non-negative")
    if null_sd == 0:
        if observed == null_mean:
            return 0.0
        raise DegenerateNullError(
            f"null has zero spread at {null_mean}; observed {observed} cannot be scored"
        )
    return (observed - null_mean) / null_sd


def upper_tail(z: float) -> float:
    """P(Z >= z) for a standard normal.

    Evaluated directly in the tail (no ``1 - cdf`` cancellation). Results
    below ~1e-308 underflow to 0.0; use :func:`log10_upper_tail` there.
    """
    return float(special.ndtr(-z))


def log10_upper_tail(z: float) -> float:
    """log10 P(Z >= z), finite for any finite z."""
    return float(special.log_ndtr(-z)) * _LOG10E


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    observed: int
    null_mean: float
    null_sd: float
    z: float | None
    p_upper: float | None
    log10_p_upper: float | None
    excess_ratio: float | None
    degenerate: bool = False
    empirical_p: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def excess_ratio(observed: float, null_mean: float) -> float | None:
    return observed / null_mean - 1.0 if null_mean > 0 else None


def compare(label: str, observed: int, null_mean: float, null_sd: float,
            per_trial: np.ndarray | None = None) -> ComparisonRow:
    try:
        z = zscore(observed, null_mean, null_sd)
    except DegenerateNullError:
        z = None
    emp = empirical_tail(per_trial, observed).p if per_trial is not None else None
    return ComparisonRow(
        label=label,
        observed=observed,
        null_mean=null_mean,
        null_sd=null_sd,
        z=z,
        p_upper=upper_tail(z) if z is not None else None,
        log10_p_upper=log10_upper_tail(z) if z is not None else None,
        excess_ratio=excess_ratio(observed, null_mean),
        degenerate=null_sd == 0,
        empirical_p=emp,
    )


def comparison_table(
    observed: StreakCensus,
    null: TrialAggregate,
    tails: Iterable[int] = (),
    *,
    max_exact: int | None = None,
) -> list[ComparisonRow]:
    """One row per exact length (from the study's min_length) and per tail.

    Exact rows run up to ``max_exact`` (default: the longest length seen in
    either the observed census or the null). Rows whose null SD is zero are
    flagged ``degenerate`` and carry no z or normal tail.
    """
    if observed.min_length > null.min_length:
        raise CoverageError(
            f"observed census starts at {observed.min_length}, study at {null.min_length}"
        )
    tails = list(tails)
    for t in tails:
        if t < null.min_length:
            raise CoverageError(f"tail {t}+ below study min_length {null.min_length}")
    top = max_exact if max_exact is not None else max(observed.max_length, null.max_length)
    has_table = null.per_trial is not None
    rows = []
    for n in range(null.min_length, top + 1):
        s = null.exact_stats(n)
        rows.append(compare(str(n), observed.count(n), s.mean, s.sd,
                            null.per_trial_exact(n) if has_table else None))
    for t in tails:
        s = null.tail_stats(t)
        rows.append(compare(f"{t}+", observed.cumulative(t), s.mean, s.sd,
                            null.per_trial_cumulative(t) if has_table else None))
    return rows


@dataclass(frozen=True)
class EmpiricalTail:
    p: float
    exceed: int
    trials: int

    @property
    def saturated(self) -> bool:
        return self.exceed == 0

    def __str__(self) -> str:
        if self.saturated:
            return f"< {1.0 / (self.trials + 1):.4g}"
        return f"{self.p:.4g}"


def empirical_tail(per_trial_totals: Sequence[float] | np.ndarray, observed: float) -> EmpiricalTail:
    """``(k + 1) / (T + 1)`` where k counts trials at or above ``observed``."""
    totals = np.asarray(per_trial_totals)
    k = int(np.count_nonzero(totals >= observed))
    return EmpiricalTail((k + 1) / (totals.size + 1), k, int(totals.size))
