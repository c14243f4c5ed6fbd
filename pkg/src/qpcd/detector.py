"""
Second Sliding Window: Wasserstein Series and Change Statistic
==============================================================

A window of ``2h`` consecutive cloud points centred at ``tau`` is split
into a left half ``[tau-h, tau-1]`` and a right half ``[tau, tau+h-1]``;
the series holds ``W_p^p`` between the two uniform halves for every
``tau`` in ``h, h+stride, ..., len-h``. The change statistic ``T(2h)`` is
the maximum of the series.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .embedding import PointCloud
from .exceptions import DetectorException
from .parallel import ordered_map
from .transport import EmpiricalMeasure, OtConfig, wasserstein

logger = logging.getLogger(__name__)

EXACT_MAX_HALF_WINDOW = 32


def points_per_loop(period_samples: int, dt: int) -> int:
    """Cloud points spanned by one signal period."""
    return max(int(round(period_samples / dt)), 1)


def default_half_window(period_samples: int, dt: int, loops_per_half: int = 2) -> int:
    """Half-window ``h`` covering ``loops_per_half`` curve loops."""
    return max(loops_per_half * points_per_loop(period_samples, dt), 2)


@dataclass(frozen=True)
class DetectorConfig:
    """
    Half-window ``h`` and centre step ``stride`` in cloud points.

    ``use_exact=None`` selects the exact solver when ``h <= 32`` and
    Sinkhorn otherwise.
    """
    h: int
    stride: int = 1
    ot: OtConfig = field(default_factory=OtConfig)
    use_exact: Optional[bool] = None

    @property
    def exact(self) -> bool:
        if self.use_exact is None:
            return self.h <= EXACT_MAX_HALF_WINDOW
        return bool(self.use_exact)

    def validate(self, n_points: Optional[int] = None) -> None:
        if self.h < 2:
            raise DetectorException("h must be >= 2", {'h': self.h})
        if self.stride < 1:
            raise DetectorException("stride must be >= 1", {'stride': self.stride})
        if n_points is not None and 2 * self.h > n_points:
            raise DetectorException(
                "Cloud too small for the second window",
                {'points': n_points, 'window': 2 * self.h}
            )
        self.ot.validate()


@dataclass(frozen=True, eq=False)
class WassersteinSeries:
    """
    ``values[k] = W_p^p(mu_l(taus[k]), mu_r(taus[k]))``.

    ``source_spans[k]`` holds the source indices of the first and last cloud
    point of the window; ``window_span`` is the embedding tail ``M*s`` that
    labeling adds on the right.
    """
    taus: np.ndarray
    values: np.ndarray
    source_spans: np.ndarray
    window_span: int = 0
    non_converged: int = 0

    def __post_init__(self):
        taus = np.array(self.taus, dtype=np.int64).reshape(-1)
        values = np.array(self.values, dtype=float).reshape(-1)
        spans = np.array(self.source_spans, dtype=np.int64).reshape(-1, 2)
        if not taus.size == values.size == spans.shape[0]:
            raise DetectorException(
                "taus, values and source_spans differ in length",
                {'taus': taus.size, 'values': values.size, 'spans': spans.shape[0]}
            )
        if taus.size > 1 and np.any(np.diff(taus) <= 0):
            raise DetectorException("taus must be strictly increasing")
        if np.any(values < 0):
            raise DetectorException("Wasserstein values must be non-negative")
        for arr in (taus, values, spans):
            arr.setflags(write=False)
        object.__setattr__(self, 'taus', taus)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'source_spans', spans)

    def __len__(self) -> int:
        return int(self.taus.size)


@dataclass(frozen=True)
class ChangeStatistic:
    """``value = max(series.values)``; ``argmax_tau`` is the first centre attaining it."""
    value: float
    argmax_tau: int


def window_centers(n_points: int, h: int, stride: int) -> np.ndarray:
    """``h, h+stride, ..., <= n_points-h``."""
    return np.arange(h, n_points - h + 1, stride)


def split_window(cloud: PointCloud, tau: int, h: int) -> Tuple[EmpiricalMeasure, EmpiricalMeasure]:
    """
    Uniform measures on points ``[tau-h, tau-1]`` and ``[tau, tau+h-1]``.

    Raises:
        DetectorException: ``tau`` outside ``[h, len(cloud) - h]``
    """
    if not h <= tau <= len(cloud) - h:
        raise DetectorException(
            "Window centre out of range",
            {'tau': tau, 'h': h, 'points': len(cloud)}
        )
    left = EmpiricalMeasure.uniform(cloud.points[tau - h:tau])
    right = EmpiricalMeasure.uniform(cloud.points[tau:tau + h])
    return left, right


def window_distances(
    points: np.ndarray,
    centers: Sequence[int],
    h: int,
    cfg: DetectorConfig,
    n_jobs: int = 1
) -> Tuple[np.ndarray, int]:
    """
    ``W_p^p`` between the uniform halves of every window.

    Returns:
        (distances per centre, number of non-converged Sinkhorn solves)
    """
    exact = cfg.exact

    def solve(tau: int):
        tau = int(tau)
        left = EmpiricalMeasure.uniform(points[tau - h:tau])
        right = EmpiricalMeasure.uniform(points[tau:tau + h])
        return wasserstein(left, right, cfg.ot, exact)

    results = ordered_map(solve, centers, n_jobs)
    values = np.array([r.cost for r in results], dtype=float)
    non_converged = sum(1 for r in results if not r.converged)
    return values, non_converged


def wasserstein_series(cloud: PointCloud, cfg: DetectorConfig, n_jobs: int = 1) -> WassersteinSeries:
    """
    Slide the second window over the cloud.

    Raises:
        DetectorException: fewer than ``2h`` points or invalid config
    """
    cfg.validate(len(cloud))
    h = cfg.h
    taus = window_centers(len(cloud), h, cfg.stride)

    values, non_converged = window_distances(cloud.points, taus, h, cfg, n_jobs=n_jobs)
    if non_converged:
        logger.warning(
            f"Sinkhorn did not converge in {non_converged} of {len(taus)} windows",
            extra={'extra_fields': {'max_iter': cfg.ot.max_iter, 'tol': cfg.ot.tol}}
        )

    spans = np.column_stack([cloud.source_index[taus - h], cloud.source_index[taus + h - 1]])
    logger.debug(
        f"Wasserstein series over {len(taus)} windows (h={h}, exact={cfg.exact})",
        extra={'extra_fields': {'max_value': float(values.max())}}
    )
    return WassersteinSeries(
        taus=taus,
        values=np.clip(values, 0.0, None),
        source_spans=spans,
        window_span=cloud.window_span,
        non_converged=non_converged,
    )


def change_statistic(series: WassersteinSeries) -> ChangeStatistic:
    """
    ``T(2h) = max_tau W_p^p(mu_l(tau), mu_r(tau))``.

    Raises:
        DetectorException: empty series
    """
    if len(series) == 0:
        raise DetectorException("Empty Wasserstein series")
    k = int(np.argmax(series.values))
    return ChangeStatistic(value=float(series.values[k]), argmax_tau=int(series.taus[k]))


def save_series_csv(series: WassersteinSeries, path: Union[str, Path]) -> Path:
    """Dump the series as ``tau,value,src_start,src_end``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({
        'tau': series.taus,
        'value': [repr(float(v)) for v in series.values],
        'src_start': series.source_spans[:, 0],
        'src_end': series.source_spans[:, 1],
    })
    frame.to_csv(path, index=False, lineterminator='\n')
    return path


def load_series_csv(path: Union[str, Path], window_span: int = 0) -> WassersteinSeries:
    """Read back a series written by ``save_series_csv``."""
    frame = pd.read_csv(path, float_precision='round_trip')
    return WassersteinSeries(
        taus=frame['tau'].to_numpy(),
        values=frame['value'].to_numpy(dtype=float),
        source_spans=frame[['src_start', 'src_end']].to_numpy(),
        window_span=window_span,
    )
