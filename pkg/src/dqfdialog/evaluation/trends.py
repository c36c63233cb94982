"""Windowed success-rate and dialog-length series, as CSV and an SVG chart."""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import svgwrite

from ..agent.metrics_log import PRETRAIN, EpisodeStats
from .checkpoints import MOVING_AVERAGE_WINDOW, moving_average

logger = logging.getLogger(__name__)

TRENDS_HEADER = ("frame", "phase", "success_rate", "avg_turns")


@dataclass
class TrendSeries:
    """Per-episode trend points on the frame axis."""
    frames: np.ndarray
    phases: List[str]
    success_rate: np.ndarray  # percent, windowed
    avg_turns: np.ndarray  # windowed

    def __len__(self) -> int:
        return int(self.frames.size)

    @property
    def pretrain_end(self) -> Optional[int]:
        """Frame of the last pre-training episode, if any."""
        ends = [int(f) for f, p in zip(self.frames, self.phases) if p == PRETRAIN]
        return ends[-1] if ends else None

    def value_at(self, frame: int) -> float:
        """Windowed success rate of the last episode finished by ``frame``."""
        idx = int(np.searchsorted(self.frames, frame, side="right")) - 1
        if idx < 0:
            raise ValueError(f"No episode finished by frame {frame}")
        return float(self.success_rate[idx])


def trend_series(episodes: Sequence[EpisodeStats], window: int = MOVING_AVERAGE_WINDOW) -> TrendSeries:
    """Trailing-window success rate and dialog length over the whole log."""
    return TrendSeries(
        frames=np.array([e.frame for e in episodes], dtype=np.int64),
        phases=[e.phase for e in episodes],
        success_rate=100.0 * moving_average([float(e.success) for e in episodes], window),
        avg_turns=moving_average([e.turns for e in episodes], window),
    )


def write_trends_csv(series: TrendSeries, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream)
        writer.writerow(TRENDS_HEADER)
        for i in range(len(series)):
            writer.writerow([
                int(series.frames[i]),
                series.phases[i],
                repr(float(series.success_rate[i])),
                repr(float(series.avg_turns[i])),
            ])
    return path


class TrendChart:
    """
    Two stacked line plots against frames: success rate and dialog length.

    The pre-training phase is shaded so the post-pretraining dip is visible.
    """

    def __init__(self, width: int = 800, panel_height: int = 220, padding: int = 50):
        self.width = width
        self.panel_height = panel_height
        self.padding = padding

    def export(self, series: TrendSeries, output_path: Union[str, Path], max_turns: Optional[float] = None) -> None:
        """
        Render ``series`` to an SVG file.

        Args:
            series: Trend points to plot
            output_path: Path to output SVG file
            max_turns: Upper bound of the dialog-length axis; data maximum when None
        """
        height = 2 * self.panel_height + 3 * self.padding

        dwg = svgwrite.Drawing(
            str(output_path),
            size=(f"{self.width}px", f"{height}px"),
            viewBox=f"0 0 {self.width} {height}"
        )
        dwg.add(dwg.rect(insert=(0, 0), size=(self.width, height), fill="white"))

        g = dwg.g(font_family="sans-serif", font_size=12)
        top = self.padding
        bottom = 2 * self.padding + self.panel_height
        turns_max = max_turns or (float(series.avg_turns.max()) if len(series) else 1.0)

        self._draw_panel(dwg, g, series, series.success_rate, top, 100.0, "success rate (%)", "#1971c2")
        self._draw_panel(dwg, g, series, series.avg_turns, bottom, max(turns_max, 1.0), "dialog turns", "#e8590c")

        dwg.add(g)
        dwg.save()

    def _x_scale(self, series: TrendSeries) -> Tuple[float, float]:
        last = float(series.frames[-1]) if len(series) else 1.0
        span = self.width - 2 * self.padding
        return span / max(last, 1.0), float(self.padding)

    def _draw_panel(
        self,
        dwg: svgwrite.Drawing,
        group: svgwrite.container.Group,
        series: TrendSeries,
        values: np.ndarray,
        top: float,
        y_max: float,
        label: str,
        color: str,
    ) -> None:
        left = self.padding
        right = self.width - self.padding
        bottom = top + self.panel_height
        scale_x, offset_x = self._x_scale(series)

        pretrain_end = series.pretrain_end
        if pretrain_end is not None:
            group.add(dwg.rect(
                insert=(left, top),
                size=(pretrain_end * scale_x, self.panel_height),
                fill="#f1f3f5",
            ))

        group.add(dwg.line(start=(left, bottom), end=(right, bottom), stroke="black"))
        group.add(dwg.line(start=(left, top), end=(left, bottom), stroke="black"))
        group.add(dwg.text(label, insert=(left, top - 8)))
        group.add(dwg.text(f"{y_max:g}", insert=(4, top + 4)))
        group.add(dwg.text("0", insert=(4, bottom + 4)))
        if len(series):
            group.add(dwg.text(f"{int(series.frames[-1])} frames", insert=(right - 80, bottom + 16)))

        if not len(series):
            return
        points = [
            (offset_x + float(f) * scale_x, bottom - min(float(v), y_max) / y_max * self.panel_height)
            for f, v in zip(series.frames, values)
        ]
        group.add(dwg.polyline(points=points, stroke=color, fill="none", stroke_width=1.5))


def emit_trends(
    episodes: Sequence[EpisodeStats],
    out_dir: Union[str, Path],
    window: int = MOVING_AVERAGE_WINDOW,
    max_turns: Optional[float] = None,
) -> Tuple[Path, Path]:
    """
    Write ``trends.csv`` and ``trends.svg`` for a run's episode log.

    An empty log yields a CSV with only the header row and an empty chart.

    Returns:
        Paths of the CSV and SVG files
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = trend_series(episodes, window)
    csv_path = write_trends_csv(series, out_dir / "trends.csv")
    svg_path = out_dir / "trends.svg"
    TrendChart().export(series, svg_path, max_turns)
    logger.info(f"Wrote {len(series)} trend points to {csv_path} and {svg_path}")
    return csv_path, svg_path
