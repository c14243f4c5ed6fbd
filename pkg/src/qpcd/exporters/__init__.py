"""Report writers: canonical JSON, SVG plots and plain-text tables."""

from .base import ExportConverter, ExportResult
from .json_exporter import DetectionRecord, JSONExporter
from .svg_exporter import SeriesPlot, SVGPlotExporter
from .table_exporter import TextTableExporter

__all__ = [
    'ExportConverter',
    'ExportResult',
    'DetectionRecord',
    'JSONExporter',
    'SeriesPlot',
    'SVGPlotExporter',
    'TextTableExporter',
]
