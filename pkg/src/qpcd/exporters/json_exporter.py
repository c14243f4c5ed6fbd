"""
Canonical JSON writer for detection reports, evaluation reports and
manifests, plus the reader used by ``eval`` and ``plot``.

Keys are sorted and floats are written with ``repr`` precision, so equal
payloads give byte-identical files.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from ..exceptions import EvaluationException
from .base import ExportConverter

logger = logging.getLogger(__name__)


class JSONExporter(ExportConverter):
    """Canonical JSON (sorted keys, two-space indent, trailing newline)."""

    format_name = "json"
    file_extension = ".json"

    def render(self, payload: Dict[str, Any]) -> str:
        return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + '\n'


@dataclass(frozen=True)
class DetectionRecord:
    """Fields of a saved detection report needed for scoring and plotting."""
    name: str
    threshold: float
    statistic: float
    change_detected: bool
    flagged: List[Tuple[int, int]]
    window_span: int = 0

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> 'DetectionRecord':
        """
        Raises:
            EvaluationException: file missing, unreadable or incomplete
        """
        path = Path(path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError:
            raise EvaluationException("Missing detection result", {'path': str(path)})
        except (OSError, json.JSONDecodeError) as e:
            raise EvaluationException("Unreadable detection result", {'path': str(path), 'error': str(e)})

        try:
            return cls(
                name=data['name'],
                threshold=float(data['threshold']),
                statistic=float(data['statistic']['value']),
                change_detected=bool(data['change_detected']),
                flagged=[(int(a), int(b)) for a, b in data['flagged']],
                window_span=int(data.get('window_span', 0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise EvaluationException("Incomplete detection result", {'path': str(path), 'error': str(e)})
