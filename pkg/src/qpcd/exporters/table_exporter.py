"""Plain-text evaluation table."""

from ..evaluation import EvalReport, format_table
from .base import ExportConverter


class TextTableExporter(ExportConverter):
    format_name = "text"
    file_extension = ".txt"

    def render(self, payload: EvalReport) -> str:
        return format_table(payload)
