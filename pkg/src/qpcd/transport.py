"""
Wasserstein Distances Between Empirical Measures
================================================

``W_p^p(a, b) = min_gamma sum_ij gamma_ij * ||x_i - y_j||^p`` computed two ways:

- ``wasserstein_exact``: optimal assignment (``scipy.optimize.linear_sum_assignment``)
  for uniform measures of equal size, network simplex (``ot.emd2``) otherwise.
- ``wasserstein_sinkhorn``: log-domain Sinkhorn (``ot.sinkhorn``,
  ``method='sinkhorn_log'``) returning the unregularized cost of the
  entropic plan together with convergence diagnostics.

All pipeline code works with ``W_p^p``; take the ``1/p`` root only where
the metric ``W_p`` itself is needed.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import ot
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .exceptions import TransportException

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-12
UNIFORM_TOLERANCE = 1e-12
EMD_MAX_ITER = 1_000_000


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Discrete probability measure: ``weights[i]`` mass at ``support[i]``."""
    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        support = np.array(self.support, dtype=float)
        if support.ndim == 1:
            support = support.reshape(-1, 1)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if support.shape[0] == 0:
            raise TransportException("Empty support")
        if weights.size != support.shape[0]:
            raise TransportException(
                "weights and support differ in length",
                {'weights': weights.size, 'support': support.shape[0]}
            )
        if np.any(weights < 0):
            raise TransportException("Negative weights")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise TransportException("Weights are not normalized", {'sum': total})
        support.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, 'support', support)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def uniform(cls, points: np.ndarray) -> 'EmpiricalMeasure':
        """Mass ``1/h`` on each of the ``h`` points."""
        points = np.asarray(points, dtype=float)
        h = points.shape[0]
        if h == 0:
            raise TransportException("Empty support")
        return cls(support=points, weights=np.full(h, 1.0 / h))

    def __len__(self) -> int:
        return int(self.support.shape[0])

    @property
    def dim(self) -> int:
        return int(self.support.shape[1])

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(np.abs(self.weights - 1.0 / len(self)) <= UNIFORM_TOLERANCE))

    def compact(self) -> Tuple[np.ndarray, np.ndarray]:
        """Support and weights restricted to atoms with positive mass."""
        keep = self.weights > 0
        return self.support[keep], self.weights[keep]


@dataclass(frozen=True)
class OtConfig:
    """
    Ground-cost exponent and Sinkhorn settings.

    ``epsilon`` is an absolute regularization in cost units; when it is
    None the solver uses ``epsilon_scale * mean(C)`` of each instance.
    """
    p: float = 2.0
    epsilon: Optional[float] = None
    epsilon_scale: float = 0.01
    max_iter: int = 10_000
    tol: float = 1e-6

    def validate(self) -> None:
        if self.p < 1:
            raise TransportException("p must be >= 1", {'p': self.p})
        if self.epsilon is not None and not self.epsilon > 0:
            raise TransportException("epsilon must be positive", {'epsilon': self.epsilon})
        if not self.epsilon_scale > 0:
            raise TransportException("epsilon_scale must be positive", {'epsilon_scale': self.epsilon_scale})
        if not self.tol > 0:
            raise TransportException("tol must be positive", {'tol': self.tol})
        if self.max_iter < 1:
            raise TransportException("max_iter must be >= 1", {'max_iter': self.max_iter})

    def resolve_epsilon(self, cost: np.ndarray) -> float:
        if self.epsilon is not None:
            return float(self.epsilon)
        return float(self.epsilon_scale * cost.mean())


@dataclass(frozen=True)
class TransportResult:
    """``cost`` is ``W_p^p`` of the returned plan; ``converged`` is False when max_iter ran out."""
    cost: float
    converged: bool = True
    iterations: int = 0
    marginal_error: float = 0.0
    epsilon: float = 0.0


def _ground_cost(x: np.ndarray, y: np.ndarray, p: float) -> np.ndarray:
    if x.shape[1] != y.shape[1]:
        raise TransportException(
            "Point dimensions differ",
            {'a_dim': x.shape[1], 'b_dim': y.shape[1]}
        )
    if p == 2:
        return cdist(x, y, metric='sqeuclidean')
    return cdist(x, y, metric='euclidean') ** p


def cost_matrix(a: EmpiricalMeasure, b: EmpiricalMeasure, p: float) -> np.ndarray:
    """``C[i, j] = ||a.support[i] - b.support[j]||_2 ** p``."""
    return _ground_cost(a.support, b.support, p)


def wasserstein_exact(a: EmpiricalMeasure, b: EmpiricalMeasure, p: float = 2.0) -> float:
    """
    Exact ``W_p^p(a, b)``.

    Uniform measures of equal size reduce to an assignment problem
    (Birkhoff), solved with ``linear_sum_assignment``; any other weights
    go through the network simplex of ``ot.emd2``.
    """
    if a.is_uniform and b.is_uniform and len(a) == len(b):
        cost = cost_matrix(a, b, p)
        rows, cols = linear_sum_assignment(cost)
        return float(cost[rows, cols].sum() / len(a))

    xa, wa = a.compact()
    xb, wb = b.compact()
    cost = _ground_cost(xa, xb, p)
    return float(ot.emd2(wa, wb, cost, numItermax=EMD_MAX_ITER))


def wasserstein_sinkhorn(a: EmpiricalMeasure, b: EmpiricalMeasure, cfg: OtConfig) -> TransportResult:
    """
    Entropic approximation of ``W_p^p(a, b)``.

    Runs log-domain Sinkhorn until the largest marginal violation drops
    below ``cfg.tol`` or ``cfg.max_iter`` is reached, then returns the
    transport cost of the regularized plan (no entropy term). When either
    side is a single atom the plan is forced and the value is exact.
    """
    cfg.validate()
    xa, wa = a.compact()
    xb, wb = b.compact()
    cost = _ground_cost(xa, xb, cfg.p)

    if xa.shape[0] == 1 or xb.shape[0] == 1 or not cost.max() > 0:
        return TransportResult(cost=float(wa @ cost @ wb))

    epsilon = cfg.resolve_epsilon(cost)
    plan, log = ot.sinkhorn(
        wa, wb, cost, epsilon,
        method='sinkhorn_log',
        numItermax=cfg.max_iter,
        stopThr=cfg.tol,
        log=True,
        warn=False,
    )
    plan = np.asarray(plan)
    marginal_error = float(max(
        np.abs(plan.sum(axis=1) - wa).max(),
        np.abs(plan.sum(axis=0) - wb).max(),
    ))
    converged = marginal_error < cfg.tol
    if not converged:
        logger.debug(
            f"Sinkhorn stopped at max_iter with marginal error {marginal_error:.2e}",
            extra={'extra_fields': {'epsilon': epsilon, 'max_iter': cfg.max_iter}}
        )

    return TransportResult(
        cost=float(np.sum(plan * cost)),
        converged=converged,
        iterations=int(log.get('niter', cfg.max_iter)),
        marginal_error=marginal_error,
        epsilon=epsilon,
    )


def wasserstein(
    a: EmpiricalMeasure,
    b: EmpiricalMeasure,
    cfg: OtConfig,
    exact: bool
) -> TransportResult:
    """Dispatch to the exact solver or to Sinkhorn."""
    if exact:
        return TransportResult(cost=wasserstein_exact(a, b, cfg.p))
    return wasserstein_sinkhorn(a, b, cfg)
