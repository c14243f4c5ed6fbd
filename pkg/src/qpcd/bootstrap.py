"""
Weighted Moving-Block Bootstrap of the Change Statistic
=======================================================

Each half of a ``2h`` window is cut into consecutive blocks of
``block_len`` points. Block ``j`` of the left half and block ``j`` of the
right half sit exactly ``h`` points apart; with ``h`` a whole number of
curve loops they cover the same phases of the curve. For every window a
replicate

- draws one unit-mean weight per block pair, shared by both halves, and
- with ``shuffle_blocks`` on, sends each block pair to the two halves in
  random order.

Under no change the two blocks of a pair are exchangeable, so the
replicate distribution of the window distance contains the observed one.
A change is spread over both halves and averages out. The replicate
statistic is ``T^b = max_tau W_p^p(mu_l^b(tau), mu_r^b(tau))`` and the
detection threshold is the empirical ``(1 - alpha)``-quantile of the
``B`` replicate statistics.

Replicate ``b`` draws from ``default_rng([seed, b])``, window after
window in ``tau`` order, so the sample does not depend on how replicates
are scheduled across workers.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .detector import (
    ChangeStatistic,
    DetectorConfig,
    WassersteinSeries,
    change_statistic,
    wasserstein_series,
    window_centers,
)
from .embedding import PointCloud
from .exceptions import BootstrapException
from .parallel import ordered_map
from .transport import EmpiricalMeasure, wasserstein

logger = logging.getLogger(__name__)

SEED_MASK = 0xFFFFFFFFFFFFFFFF
MIN_REPLICATIONS = 100
BLOCKS_PER_LOOP = 16

Interval = Tuple[int, int]


class WeightScheme(str, Enum):
    """Distribution of the per-block weights."""
    MULTINOMIAL = 'multinomial'
    EXPONENTIAL = 'exponential'


@dataclass(frozen=True)
class BootstrapConfig:
    """
    Bootstrap settings.

    ``shuffle_blocks=False`` keeps every block pair on its own side and only
    reweights it; a change present in the data then survives into every
    replicate.
    """
    replications: int = 500
    block_len: int = 1
    alpha: float = 0.05
    seed: int = 0
    weight_scheme: WeightScheme = WeightScheme.EXPONENTIAL
    shuffle_blocks: bool = True
    max_redraws: int = 100

    def __post_init__(self):
        object.__setattr__(self, 'weight_scheme', WeightScheme(self.weight_scheme))

    def validate(self, n_points: Optional[int] = None) -> None:
        if self.replications < MIN_REPLICATIONS:
            raise BootstrapException(
                f"replications must be >= {MIN_REPLICATIONS}",
                {'replications': self.replications}
            )
        if self.block_len < 1:
            raise BootstrapException("block_len must be >= 1", {'block_len': self.block_len})
        if n_points is not None and self.block_len > n_points:
            raise BootstrapException(
                "block_len exceeds the number of cloud points",
                {'block_len': self.block_len, 'points': n_points}
            )
        if not 0 < self.alpha < 1:
            raise BootstrapException("alpha must lie in (0, 1)", {'alpha': self.alpha})
        if self.max_redraws < 0:
            raise BootstrapException("max_redraws must be >= 0", {'max_redraws': self.max_redraws})


@dataclass(frozen=True)
class BootstrapDiagnostics:
    """Empty-half redraws and non-converged Sinkhorn solves over all replicates."""
    redraws: int = 0
    non_converged: int = 0


@dataclass(frozen=True, eq=False)
class BootstrapSample:
    """Replicate statistics in replicate order and the ``(1 - alpha)`` threshold."""
    statistics: np.ndarray
    threshold: float
    redraws: int = 0
    non_converged: int = 0

    @property
    def diagnostics(self) -> BootstrapDiagnostics:
        return BootstrapDiagnostics(redraws=self.redraws, non_converged=self.non_converged)


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Outcome of one detection run; ``change_detected == (statistic.value > threshold)``."""
    threshold: float
    flagged: List[Interval]
    series: WassersteinSeries
    statistic: ChangeStatistic
    change_detected: bool
    bootstrap: Optional[BootstrapSample] = None


def default_block_len(loop_points: int) -> int:
    """About ``1/BLOCKS_PER_LOOP`` of a curve loop, at least one point."""
    return max(1, round(loop_points / BLOCKS_PER_LOOP))


def mbb_blocks(n_points: int, block_len: int) -> List[Interval]:
    """Consecutive half-open blocks covering ``[0, n_points)``; the last may be short."""
    if block_len < 1:
        raise BootstrapException("block_len must be >= 1", {'block_len': block_len})
    return [(start, min(start + block_len, n_points)) for start in range(0, n_points, block_len)]


def mbb_weights(n_blocks: int, scheme: WeightScheme, rng: np.random.Generator) -> np.ndarray:
    """
    One unit-mean weight per block.

    ``MULTINOMIAL``: block multiplicities of classic block resampling,
    ``Multinomial(n_blocks, uniform)``, summing to ``n_blocks``.
    ``EXPONENTIAL``: i.i.d. ``Exp(1)`` multipliers.
    """
    if n_blocks < 1:
        raise BootstrapException("n_blocks must be >= 1", {'n_blocks': n_blocks})
    scheme = WeightScheme(scheme)
    if scheme is WeightScheme.MULTINOMIAL:
        return rng.multinomial(n_blocks, np.full(n_blocks, 1.0 / n_blocks)).astype(float)
    return rng.exponential(1.0, n_blocks)


def bootstrap_quantile(statistics: np.ndarray, alpha: float) -> float:
    """Order statistic ``ceil((1 - alpha) * B) - 1`` (0-based) of the sorted sample."""
    ordered = np.sort(np.asarray(statistics, dtype=float))
    b = ordered.size
    if b == 0:
        raise BootstrapException("Empty bootstrap sample")
    index = math.ceil(round((1.0 - alpha) * b, 9)) - 1
    return float(ordered[min(max(index, 0), b - 1)])


@dataclass(frozen=True, eq=False)
class WindowLayout:
    """
    One replicate's view of a ``2h`` window.

    ``left`` and ``right`` are offsets into the window (``0 .. 2h-1``)
    forming each bootstrap half; ``weights[k]`` is the weight of the
    ``k``-th point of either half.
    """
    left: np.ndarray
    right: np.ndarray
    weights: np.ndarray
    redraws: int = 0


def window_layout(h: int, bcfg: BootstrapConfig, rng: np.random.Generator) -> WindowLayout:
    """
    Draw block weights and, with ``shuffle_blocks``, the side of every block pair.

    A draw that leaves the halves without mass is redrawn, at most
    ``bcfg.max_redraws`` times.

    Raises:
        BootstrapException: redraw budget exhausted
    """
    blocks = mbb_blocks(h, bcfg.block_len)
    lengths = np.array([end - start for start, end in blocks])
    offsets = np.arange(h)

    for attempt in range(bcfg.max_redraws + 1):
        if bcfg.shuffle_blocks:
            swapped = np.repeat(rng.integers(0, 2, size=len(blocks)).astype(bool), lengths)
        else:
            swapped = np.zeros(h, dtype=bool)
        weights = np.repeat(mbb_weights(len(blocks), bcfg.weight_scheme, rng), lengths)

        if weights.sum() > 0:
            return WindowLayout(
                left=np.where(swapped, offsets + h, offsets),
                right=np.where(swapped, offsets, offsets + h),
                weights=weights,
                redraws=attempt,
            )

    raise BootstrapException(
        "Every draw left a half-window without mass",
        {'max_redraws': bcfg.max_redraws, 'scheme': bcfg.weight_scheme.value}
    )


def replicate_statistic(
    cloud: PointCloud,
    dcfg: DetectorConfig,
    bcfg: BootstrapConfig,
    replicate: int
) -> Tuple[float, int, int]:
    """
    ``T^b`` of one replicate.

    Returns:
        (statistic, redraws, non-converged Sinkhorn solves)
    """
    h = dcfg.h
    exact = dcfg.exact
    rng = np.random.default_rng([bcfg.seed & SEED_MASK, replicate])

    best, redraws, non_converged = 0.0, 0, 0
    for tau in window_centers(len(cloud), h, dcfg.stride):
        layout = window_layout(h, bcfg, rng)
        window = cloud.points[tau - h:tau + h]
        mass = layout.weights / layout.weights.sum()
        result = wasserstein(
            EmpiricalMeasure(window[layout.left], mass),
            EmpiricalMeasure(window[layout.right], mass),
            dcfg.ot,
            exact,
        )
        best = max(best, result.cost)
        redraws += layout.redraws
        non_converged += not result.converged
    return best, redraws, non_converged


def bootstrap_statistic(
    cloud: PointCloud,
    dcfg: DetectorConfig,
    bcfg: BootstrapConfig,
    n_jobs: int = 1
) -> BootstrapSample:
    """
    ``B`` replicate statistics ``T^b`` and their ``(1 - alpha)``-quantile.

    Deterministic given ``(cloud, dcfg, bcfg)``.
    """
    dcfg.validate(len(cloud))
    bcfg.validate(len(cloud))

    outcomes = ordered_map(
        lambda b: replicate_statistic(cloud, dcfg, bcfg, b),
        range(bcfg.replications),
        n_jobs,
    )
    statistics = np.array([o[0] for o in outcomes])
    redraws = sum(o[1] for o in outcomes)
    non_converged = sum(o[2] for o in outcomes)

    if redraws:
        logger.warning(
            f"{redraws} bootstrap draws left a half-window without mass and were redrawn",
            extra={'extra_fields': {'scheme': bcfg.weight_scheme.value}}
        )
    if non_converged:
        logger.warning(
            f"Sinkhorn did not converge in {non_converged} bootstrap windows",
            extra={'extra_fields': {'max_iter': dcfg.ot.max_iter, 'tol': dcfg.ot.tol}}
        )

    threshold = bootstrap_quantile(statistics, bcfg.alpha)
    logger.info(
        f"Bootstrap threshold {threshold:.6g} from {bcfg.replications} replicates",
        extra={'extra_fields': {'alpha': bcfg.alpha, 'shuffle_blocks': bcfg.shuffle_blocks}}
    )
    return BootstrapSample(
        statistics=statistics,
        threshold=threshold,
        redraws=redraws,
        non_converged=non_converged,
    )


def merge_intervals(intervals: List[Interval]) -> List[Interval]:
    """Sort and coalesce overlapping or touching half-open intervals."""
    merged: List[Interval] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def label_intervals(series: WassersteinSeries, threshold: float) -> Tuple[List[Interval], bool]:
    """
    Source-signal intervals of every window whose value exceeds ``threshold``.

    Each exceeding window maps to ``[src_start, src_end + window_span + 1)``
    so that every raw sample feeding its points is covered.

    Returns:
        (merged flagged intervals, change_detected)
    """
    if threshold < 0:
        raise BootstrapException("threshold must be >= 0", {'threshold': threshold})
    exceed = series.values > threshold
    spans = series.source_spans[exceed]
    flagged = merge_intervals([
        (int(start), int(end) + series.window_span + 1) for start, end in spans
    ])
    return flagged, bool(exceed.any())


def detect(
    cloud: PointCloud,
    dcfg: DetectorConfig,
    bcfg: BootstrapConfig,
    n_jobs: int = 1
) -> DetectionResult:
    """Series, statistic, bootstrap threshold and flagged intervals for one cloud."""
    series = wasserstein_series(cloud, dcfg, n_jobs=n_jobs)
    statistic = change_statistic(series)
    sample = bootstrap_statistic(cloud, dcfg, bcfg, n_jobs=n_jobs)
    flagged, detected = label_intervals(series, sample.threshold)
    return DetectionResult(
        threshold=sample.threshold,
        flagged=flagged,
        series=series,
        statistic=statistic,
        change_detected=detected,
        bootstrap=sample,
    )
