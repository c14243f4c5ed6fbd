"""
Sensitivity / Specificity Scoring
=================================

Binary per-series protocol: each series part is one scored unit. A part
is positive when it carries at least one ground-truth annotation. A
detection on a positive part counts as a true positive only if some
flagged interval overlaps some annotation; a detection that misses every
annotation scores a false negative and no false positive is charged.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import EvaluationException
from .signal import AnnotatedSeries

logger = logging.getLogger(__name__)

PROTOCOL_NOTE = (
    "Scoring unit: one series part (binary per-series protocol); "
    "a positive part counts as detected only when a flagged interval overlaps an annotation."
)


class Detection(Protocol):
    flagged: Sequence[Tuple[int, int]]
    change_detected: bool


class SeriesScore(NamedTuple):
    """Per-series outcome: name, prediction, ground truth."""
    name: str
    detected: bool
    truth: bool


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def sensitivity(self) -> Optional[float]:
        positives = self.tp + self.fn
        return self.tp / positives if positives else None

    @property
    def specificity(self) -> Optional[float]:
        negatives = self.tn + self.fp
        return self.tn / negatives if negatives else None

    @classmethod
    def from_scores(cls, scores: Sequence[SeriesScore]) -> 'ConfusionCounts':
        return cls(
            tp=sum(1 for s in scores if s.detected and s.truth),
            fp=sum(1 for s in scores if s.detected and not s.truth),
            tn=sum(1 for s in scores if not s.detected and not s.truth),
            fn=sum(1 for s in scores if not s.detected and s.truth),
        )


@dataclass(frozen=True)
class EvalReport:
    """
    Pooled rates and counts. Undefined rates (no positives or no
    negatives) are None. With several runs the per-run rates are also
    summarised as mean and standard deviation.
    """
    sensitivity: Optional[float]
    specificity: Optional[float]
    counts: ConfusionCounts
    per_series: List[SeriesScore] = field(default_factory=list)
    runs: int = 1
    sensitivity_mean: Optional[float] = None
    sensitivity_sd: Optional[float] = None
    specificity_mean: Optional[float] = None
    specificity_sd: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'protocol': PROTOCOL_NOTE,
            'sensitivity': self.sensitivity,
            'specificity': self.specificity,
            'counts': {
                'tp': self.counts.tp,
                'fp': self.counts.fp,
                'tn': self.counts.tn,
                'fn': self.counts.fn,
            },
            'runs': self.runs,
            'sensitivity_mean': self.sensitivity_mean,
            'sensitivity_sd': self.sensitivity_sd,
            'specificity_mean': self.specificity_mean,
            'specificity_sd': self.specificity_sd,
            'per_series': [
                {'name': s.name, 'detected': s.detected, 'truth': s.truth}
                for s in self.per_series
            ],
        }


def _overlaps(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def score_series(result: Detection, truth: AnnotatedSeries) -> Tuple[bool, bool]:
    """
    Returns:
        (detected, truth_positive) under the per-series protocol
    """
    truth_positive = len(truth.annotations) > 0
    detected = bool(result.change_detected)
    if detected and truth_positive:
        detected = any(
            _overlaps(tuple(flag), (ann.start, ann.end))
            for flag in result.flagged
            for ann in truth.annotations
        )
    return detected, truth_positive


def _mean_sd(values: List[Optional[float]]) -> Tuple[Optional[float], Optional[float]]:
    defined = [v for v in values if v is not None]
    if not defined:
        return None, None
    sd = float(np.std(defined, ddof=1)) if len(defined) > 1 else 0.0
    return float(np.mean(defined)), sd


def _is_row(item: Any) -> bool:
    """A single ``(name, detected, truth)`` row rather than a run of rows."""
    return isinstance(item, SeriesScore) or (
        isinstance(item, (tuple, list)) and len(item) == 3 and isinstance(item[0], str)
    )


def aggregate(
    scores: Union[Sequence[SeriesScore], Sequence[Sequence[SeriesScore]]]
) -> EvalReport:
    """
    Pool scores into an ``EvalReport``.

    ``scores`` is either one run (a list of ``SeriesScore``) or several
    seeded runs (a list of such lists); counts are pooled over runs and
    per-run rates are summarised as mean +- sd.

    Raises:
        EvaluationException: no scores
    """
    if not scores:
        raise EvaluationException("Nothing to aggregate")

    if _is_row(scores[0]):
        runs = [[SeriesScore(*s) for s in scores]]
    else:
        runs = [[SeriesScore(*s) for s in run] for run in scores]
    if any(not run for run in runs):
        raise EvaluationException("Empty run in score list")

    pooled = [s for run in runs for s in run]
    counts = ConfusionCounts.from_scores(pooled)
    per_run = [ConfusionCounts.from_scores(run) for run in runs]
    sens_mean, sens_sd = _mean_sd([c.sensitivity for c in per_run])
    spec_mean, spec_sd = _mean_sd([c.specificity for c in per_run])

    report = EvalReport(
        sensitivity=counts.sensitivity,
        specificity=counts.specificity,
        counts=counts,
        per_series=pooled,
        runs=len(runs),
        sensitivity_mean=sens_mean,
        sensitivity_sd=sens_sd,
        specificity_mean=spec_mean,
        specificity_sd=spec_sd,
    )
    logger.info(
        f"Evaluated {counts.total} series: sensitivity={report.sensitivity}, "
        f"specificity={report.specificity}",
        extra={'extra_fields': report.to_dict()['counts']}
    )
    return report


def _percent(value: Optional[float], sd: Optional[float] = None) -> str:
    if value is None:
        return 'n/a'
    if sd is None:
        return f"{100 * value:.1f}"
    return f"{100 * value:.1f} +- {100 * sd:.1f}"


def format_table(report: EvalReport) -> str:
    """Aligned plain-text summary plus the per-series outcomes."""
    summary = pd.DataFrame(
        [
            ('Sens %', _percent(report.sensitivity)),
            ('Spec %', _percent(report.specificity)),
            ('TP', report.counts.tp),
            ('FP', report.counts.fp),
            ('TN', report.counts.tn),
            ('FN', report.counts.fn),
            ('Runs', report.runs),
        ],
        columns=['metric', 'value'],
    )
    if report.runs > 1:
        extra = pd.DataFrame(
            [
                ('Sens % (mean +- sd)', _percent(report.sensitivity_mean, report.sensitivity_sd)),
                ('Spec % (mean +- sd)', _percent(report.specificity_mean, report.specificity_sd)),
            ],
            columns=['metric', 'value'],
        )
        summary = pd.concat([summary, extra], ignore_index=True)

    outcomes = pd.DataFrame(
        [(s.name, s.detected, s.truth, _outcome(s)) for s in report.per_series],
        columns=['series', 'detected', 'truth', 'outcome'],
    )
    parts = [PROTOCOL_NOTE, '', summary.to_string(index=False)]
    if not outcomes.empty:
        parts += ['', outcomes.to_string(index=False)]
    return '\n'.join(parts) + '\n'


def _outcome(score: SeriesScore) -> str:
    if score.truth:
        return 'TP' if score.detected else 'FN'
    return 'FP' if score.detected else 'TN'
