"""
Ordered parallel map used by the detector, the bootstrap and the CLI.

Results come back in input order whatever the worker count, so every
aggregate built from them is independent of scheduling.
"""

import logging
import os
from typing import Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

THREADS_ENV_VAR = 'QPCD_THREADS'


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Worker count: explicit value, else ``QPCD_THREADS``, else 1.

    Non-positive values mean "all cores" in joblib's convention (-1).
    """
    if threads is None:
        raw = os.getenv(THREADS_ENV_VAR)
        try:
            threads = int(raw) if raw else 1
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENV_VAR}={raw!r}")
            threads = 1
    return threads if threads >= 1 else -1


def ordered_map(func: Callable[[T], R], items: Iterable[T], n_jobs: int = 1) -> List[R]:
    """``[func(item) for item in items]``, optionally spread over threads."""
    items = list(items)
    if n_jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    return Parallel(n_jobs=n_jobs, prefer='threads')(delayed(func)(item) for item in items)
