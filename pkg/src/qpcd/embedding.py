"""
Sliding-Window Embedding and PCA
================================

Maps a series into the point cloud ``SW(t) = [X_t, X_{t+s}, ..., X_{t+Ms}]``
for ``t = 0, dt, 2*dt, ...`` and reduces it with PCA fitted once on the
whole cloud. A noiseless signal of period P embedded with ``M*s = P - s``
traces a closed curve: ``SW(t) == SW(t + P)``.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import EmbeddingException
from .signal import AnnotatedSeries

logger = logging.getLogger(__name__)

SIGN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EmbedParams:
    """``M`` window elements minus one, intra-window stride ``s``, inter-point step ``dt``."""
    M: int = 450
    s: int = 1
    dt: int = 2

    def validate(self) -> None:
        for name in ('M', 's', 'dt'):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise EmbeddingException(f"{name} must be an integer >= 1", {name: value})

    @property
    def window_span(self) -> int:
        """Samples between the first and last coordinate of a point (``M * s``)."""
        return self.M * self.s


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    Ordered embedding vectors with the source-time index of each point.

    ``window_span`` records how many samples past ``source_index`` a point
    depends on, so detections can be mapped back to raw samples.
    """
    points: np.ndarray
    source_index: np.ndarray
    window_span: int = 0

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 2:
            raise EmbeddingException("points must be a 2-D array", {'shape': points.shape})
        source_index = np.array(self.source_index, dtype=np.int64).reshape(-1)
        if source_index.size != points.shape[0]:
            raise EmbeddingException(
                "points and source_index differ in length",
                {'points': points.shape[0], 'source_index': source_index.size}
            )
        if source_index.size > 1:
            steps = np.diff(source_index)
            if steps[0] <= 0 or np.any(steps != steps[0]):
                raise EmbeddingException("source_index must increase with a constant step")
        points.setflags(write=False)
        source_index.setflags(write=False)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'source_index', source_index)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])


def sliding_window_embed(series: AnnotatedSeries, p: EmbedParams) -> PointCloud:
    """
    Delay-embed ``series`` into ``R^(M+1)``.

    Point k is ``[X_t, X_{t+s}, ..., X_{t+Ms}]`` with ``t = k*dt``, for
    every t with ``t + M*s < len(series)``.

    Raises:
        EmbeddingException: invalid parameters or series shorter than ``M*s + 1``
    """
    p.validate()
    n = len(series)
    if n < p.window_span + 1:
        raise EmbeddingException(
            "Series too short for the embedding window",
            {'samples': n, 'required': p.window_span + 1}
        )

    windows = sliding_window_view(series.samples, p.window_span + 1)
    points = windows[::p.dt, ::p.s]
    source_index = np.arange(0, n - p.window_span, p.dt)

    logger.debug(
        f"Embedded {series.name}: {points.shape[0]} points in R^{points.shape[1]}",
        extra={'extra_fields': {'M': p.M, 's': p.s, 'dt': p.dt}}
    )
    return PointCloud(points=points, source_index=source_index, window_span=p.window_span)


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Mean, ``d`` orthonormal components (rows) and their variances, largest first."""
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.components.shape[0])


def _normalize_signs(components: np.ndarray) -> np.ndarray:
    """Flip each row so that its first non-zero coordinate is positive."""
    components = components.copy()
    for row in components:
        nonzero = np.flatnonzero(np.abs(row) > SIGN_TOLERANCE)
        if nonzero.size and row[nonzero[0]] < 0:
            row *= -1.0
    return components


def pca_fit(cloud: PointCloud, d: int = 3) -> PcaModel:
    """
    Top-``d`` eigenvectors of the sample covariance (``ddof=1``) of the cloud.

    Uses a dense symmetric eigensolver; zero-variance directions keep
    eigenvalue 0 and the solver's orthonormal completion.

    Raises:
        EmbeddingException: ``d`` outside ``[1, dim]`` or fewer than 2 points
    """
    if not 1 <= d <= cloud.dim:
        raise EmbeddingException("PCA dimension must lie in [1, dim]", {'d': d, 'dim': cloud.dim})
    if len(cloud) < 2:
        raise EmbeddingException("PCA needs at least 2 points", {'points': len(cloud)})

    mean = cloud.points.mean(axis=0)
    centered = cloud.points - mean
    covariance = centered.T @ centered / (len(cloud) - 1)

    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1][:d]
    explained = np.clip(eigenvalues[order], 0.0, None)
    components = _normalize_signs(eigenvectors[:, order].T)

    return PcaModel(mean=mean, components=components, explained_variance=explained)


def pca_project(model: PcaModel, cloud: PointCloud) -> PointCloud:
    """
    Coordinates of every point in the PCA basis; ``source_index`` is kept.

    Raises:
        EmbeddingException: cloud dimension differs from the model's
    """
    if cloud.dim != model.mean.size:
        raise EmbeddingException(
            "Cloud dimension does not match the PCA model",
            {'cloud_dim': cloud.dim, 'model_dim': model.mean.size}
        )
    projected = (cloud.points - model.mean) @ model.components.T
    return PointCloud(
        points=projected,
        source_index=cloud.source_index,
        window_span=cloud.window_span,
    )


def save_cloud_csv(cloud: PointCloud, path: Union[str, Path]) -> Path:
    """Dump the cloud as ``source_index,c1,...,cd`` for plotting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(cloud.points, columns=[f"c{i + 1}" for i in range(cloud.dim)])
    frame.insert(0, 'source_index', cloud.source_index)
    frame.to_csv(path, index=False, lineterminator='\n')
    return path
