"""
SVG plot of a Wasserstein series with its bootstrap threshold and the
flagged source intervals. The horizontal axis is the source sample index
(window midpoints), so flagged spans and the curve share one scale.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import jinja2
import numpy as np

from ..detector import WassersteinSeries
from .base import ExportConverter

logger = logging.getLogger(__name__)

SVG_TEMPLATE = """<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{{ width }}" height="{{ height }}" viewBox="0 0 {{ width }} {{ height }}">
  <title>{{ title }}</title>
  <rect x="0" y="0" width="{{ width }}" height="{{ height }}" fill="#ffffff"/>
{%- for span in spans %}
  <rect class="flagged" x="{{ span.x }}" y="{{ top }}" width="{{ span.width }}" height="{{ plot_height }}" fill="#f4a6a6" fill-opacity="0.5"/>
{%- endfor %}
  <line class="axis" x1="{{ left }}" y1="{{ bottom }}" x2="{{ right }}" y2="{{ bottom }}" stroke="#333333"/>
  <line class="axis" x1="{{ left }}" y1="{{ top }}" x2="{{ left }}" y2="{{ bottom }}" stroke="#333333"/>
  <polyline class="series" fill="none" stroke="#1f5fa8" stroke-width="1.2" points="{{ points }}"/>
  <line class="threshold" x1="{{ left }}" y1="{{ '%.2f' % threshold_y }}" x2="{{ right }}" y2="{{ '%.2f' % threshold_y }}" stroke="#c0392b" stroke-dasharray="6 4"/>
  <text x="{{ left }}" y="{{ top - 8 }}" font-family="sans-serif" font-size="13">{{ title }}</text>
  <text x="{{ right }}" y="{{ '%.2f' % (threshold_y - 4) }}" font-family="sans-serif" font-size="11" text-anchor="end" fill="#c0392b">threshold {{ '%.4g' % threshold }}</text>
  <text x="{{ left }}" y="{{ bottom + 16 }}" font-family="sans-serif" font-size="11">{{ x_min }}</text>
  <text x="{{ right }}" y="{{ bottom + 16 }}" font-family="sans-serif" font-size="11" text-anchor="end">{{ x_max }} (sample)</text>
  <text x="{{ left - 6 }}" y="{{ top + 4 }}" font-family="sans-serif" font-size="11" text-anchor="end">{{ '%.3g' % y_max }}</text>
  <text x="{{ left - 6 }}" y="{{ bottom }}" font-family="sans-serif" font-size="11" text-anchor="end">0</text>
</svg>
"""


@dataclass(frozen=True, eq=False)
class SeriesPlot:
    """What gets drawn."""
    title: str
    series: WassersteinSeries
    threshold: float
    flagged: Sequence[Tuple[int, int]]


class SVGPlotExporter(ExportConverter):
    """Static SVG rendered from a Jinja2 template."""

    format_name = "svg"
    file_extension = ".svg"

    def __init__(self, width: int = 960, height: int = 320, margin: int = 48,
                 template: Optional[str] = None):
        self.width = width
        self.height = height
        self.margin = margin
        self.template_env = jinja2.Environment(
            loader=jinja2.DictLoader({'series.svg': template or SVG_TEMPLATE}),
            autoescape=True,
        )

    def render(self, payload: SeriesPlot) -> str:
        series = payload.series
        left, right = self.margin, self.width - self.margin / 2
        top, bottom = self.margin, self.height - self.margin

        centers = (series.source_spans[:, 0] + series.source_spans[:, 1]) / 2.0
        ends: List[float] = [float(series.source_spans[:, 1].max() + series.window_span + 1)] if len(series) else [1.0]
        ends += [float(end) for _, end in payload.flagged]
        x_min, x_max = 0.0, max(ends)
        y_max = max(float(series.values.max()) if len(series) else 0.0, payload.threshold)
        y_max = y_max * 1.05 if y_max > 0 else 1.0

        def sx(x):
            return left + (np.asarray(x, dtype=float) - x_min) / (x_max - x_min) * (right - left)

        def sy(y):
            return bottom - np.asarray(y, dtype=float) / y_max * (bottom - top)

        points = ' '.join(f"{x:.2f},{y:.2f}" for x, y in zip(sx(centers), sy(series.values)))
        spans = [
            {'x': f"{float(sx(start)):.2f}", 'width': f"{float(sx(end) - sx(start)):.2f}"}
            for start, end in payload.flagged
        ]

        template = self.template_env.get_template('series.svg')
        return template.render(
            title=payload.title,
            width=self.width,
            height=self.height,
            left=left,
            right=right,
            top=top,
            bottom=bottom,
            plot_height=bottom - top,
            points=points,
            spans=spans,
            threshold=payload.threshold,
            threshold_y=float(sy(payload.threshold)),
            x_min=int(x_min),
            x_max=int(x_max),
            y_max=y_max,
        )
