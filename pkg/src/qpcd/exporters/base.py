"""Base classes and interfaces for report exporters."""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

logger = logging.getLogger(__name__)


@dataclass
class ExportResult:
    """Result of an export operation."""
    format: str
    output_path: Optional[Path] = None
    size_bytes: int = 0
    duration: float = 0.0
    success: bool = False
    error: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


class ExportConverter(ABC):
    """
    Base class for report exporters.

    Subclasses render a payload to text; ``export`` writes it, times it
    and reports the outcome as an ``ExportResult`` instead of raising.
    """

    format_name: str = ""
    file_extension: str = ""

    @abstractmethod
    def render(self, payload: Any) -> str:
        """Render ``payload`` to the exporter's text format."""

    def export(self, payload: Any, output_path: Union[str, Path]) -> ExportResult:
        """
        Render and write ``payload``.

        Returns:
            ExportResult; ``success`` is False and ``error`` set on failure
        """
        start_time = time.perf_counter()
        output_path = Path(output_path)
        try:
            text = self.render(payload)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            output_path.write_text(text, encoding='utf-8')
        except (OSError, ValueError, TypeError) as e:
            logger.error(
                f"{self.format_name} export failed: {e}",
                extra={'extra_fields': {'path': str(output_path)}}
            )
            return ExportResult(
                format=self.format_name,
                output_path=output_path,
                duration=time.perf_counter() - start_time,
                error=str(e),
            )

        result = ExportResult(
            format=self.format_name,
            output_path=output_path,
            size_bytes=output_path.stat().st_size,
            duration=time.perf_counter() - start_time,
            success=True,
        )
        logger.debug(f"Wrote {self.format_name} to {output_path} ({result.size_bytes} bytes)")
        return result
