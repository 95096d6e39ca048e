"""Diagnostic plot of guided projections as a static SVG document.

Each observation is drawn as one polyline of its OSD values across the
projection index. Observations drop to zero while they belong to the current
window, so groups show up as bands whose level changes along the sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import InvalidConfigError, InvalidDataError
from .sequencer import GPMatrix

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
           "#9467bd", "#8c564b", "#e377c2", "#17becf")
UNIFORM_COLOR = "#4d4d4d"
HIGHLIGHT_COLOR = "#000000"
MAX_POINTS = 5_000_000
ZERO_TOL = 1e-8


@dataclass(frozen=True)
class PlotSpec:
    """Layout and styling of the diagnostic plot.

    Attributes:
        width: Image width in pixels.
        height: Image height in pixels.
        color_by: Name of the label column used for colouring, for the caption only.
        line_alpha: Stroke opacity of regular lines.
        highlight: Row indices drawn last, in a distinct colour.
        x_label: Horizontal axis title.
        y_label: Vertical axis title.
        max_points: Decimation threshold on ``rows * columns``.
    """

    width: int = 900
    height: int = 500
    color_by: str | None = None
    line_alpha: float = 0.6
    highlight: tuple[int, ...] = ()
    x_label: str = "projection"
    y_label: str = "OSD"
    max_points: int = MAX_POINTS

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidConfigError("plot dimensions must be positive")
        if not 0.0 <= self.line_alpha <= 1.0:
            raise InvalidConfigError("line_alpha must lie in [0, 1]")
        if self.max_points < 1:
            raise InvalidConfigError("max_points must be positive")
        object.__setattr__(self, "highlight", tuple(dict.fromkeys(int(i) for i in self.highlight)))


def _fmt(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def nice_ticks(hi: float, count: int = 5) -> list[float]:
    """Round tick positions covering ``[0, hi]``."""
    if hi <= 0:
        return [0.0]
    raw = hi / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    return [i * step for i in range(int(math.floor(hi / step + 1e-9)) + 1)]


def kept_columns(values: np.ndarray, max_points: int) -> tuple[np.ndarray, int]:
    """Columns to draw and the decimation stride (1 if nothing is dropped).

    Every ``k``-th column is kept together with every column in which some
    observation touches zero, so window membership stays visible.
    """
    n, m = values.shape
    if n * m <= max_points:
        return np.arange(m), 1
    k = math.ceil(n * m / max_points)
    keep = np.zeros(m, dtype=bool)
    keep[::k] = True
    keep[-1] = True
    keep |= (values <= ZERO_TOL).any(axis=0)
    return np.flatnonzero(keep), k


def diagnostic_svg(gp, labels: Sequence | None = None, spec: PlotSpec = PlotSpec()) -> str:
    """Render OSD trajectories as an SVG 1.1 document.

    Args:
        gp: :class:`GPMatrix` or an ``n x m`` array of OSD values.
        labels: Optional group label per row; lines are coloured by label
            using a fixed 8-colour palette (in order of first appearance).
        spec: Layout options.

    Returns:
        The SVG text. Identical inputs give identical text.

    Raises:
        InvalidDataError: Empty or non-finite input, or ``labels`` of the
            wrong length.
    """
    values = np.asarray(gp.values if isinstance(gp, GPMatrix) else gp, dtype=float)
    if values.ndim != 2 or values.size == 0:
        raise InvalidDataError("diagnostic plot needs a nonempty 2-D matrix")
    if not np.all(np.isfinite(values)):
        raise InvalidDataError("diagnostic plot input contains NaN or inf")
    n, m = values.shape
    if labels is not None and len(labels) != n:
        raise InvalidDataError(f"{len(labels)} labels for {n} rows")
    bad = [i for i in spec.highlight if not 0 <= i < n]
    if bad:
        raise InvalidDataError(f"highlight indices out of range: {bad}")

    cols, stride = kept_columns(values, spec.max_points)
    y_max = float(values.max()) * 1.05
    if y_max <= 0:
        y_max = 1.0
    left, right, top, bottom = 70, 20, 20, 55
    pw = spec.width - left - right
    ph = spec.height - top - bottom

    def sx(j: float) -> float:
        return left + (pw * (j - 1) / (m - 1) if m > 1 else pw / 2)

    def sy(v: float) -> float:
        return top + ph * (1 - v / y_max)

    if labels is None:
        colors = [UNIFORM_COLOR] * n
        legend = []
    else:
        levels = list(dict.fromkeys(str(v) for v in labels))
        cmap = {lv: PALETTE[i % len(PALETTE)] for i, lv in enumerate(levels)}
        colors = [cmap[str(v)] for v in labels]
        legend = [(lv, cmap[lv]) for lv in levels]

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{spec.width}" height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f"<!-- guided projections: {n} observations, {m} projections -->",
    ]
    if stride > 1:
        out.append(f"<!-- downsampled: every {stride}-th projection plus zero-touching "
                   f"projections, {cols.size} of {m} drawn -->")
    out.append(f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="#ffffff"/>')

    # axes
    x0, y0 = left, top + ph
    out.append(f'<g stroke="#000000" stroke-width="1" fill="none">'
               f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}"/>'
               f'<line x1="{x0}" y1="{top}" x2="{x0}" y2="{y0}"/></g>')
    text = ['<g font-family="sans-serif" font-size="11" fill="#000000">']
    for t in nice_ticks(y_max):
        y = sy(t)
        out.append(f'<line x1="{x0 - 4}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="#000000"/>')
        text.append(f'<text x="{x0 - 7}" y="{_fmt(y + 4)}" text-anchor="end">{_fmt(t)}</text>')
    for t in nice_ticks(m):
        j = max(t, 1)
        if j != int(j):
            continue
        x = sx(j)
        out.append(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 4}" stroke="#000000"/>')
        text.append(f'<text x="{_fmt(x)}" y="{y0 + 17}" text-anchor="middle">{int(j)}</text>')
    text.append(f'<text x="{left + pw / 2:g}" y="{spec.height - 12}" text-anchor="middle">'
                f"{escape(spec.x_label)}</text>")
    text.append(f'<text x="16" y="{top + ph / 2:g}" text-anchor="middle" '
                f'transform="rotate(-90 16 {top + ph / 2:g})">{escape(spec.y_label)}</text>')
    for i, (lv, color) in enumerate(legend):
        y = top + 14 * (i + 1)
        caption = f"{spec.color_by}={lv}" if spec.color_by else lv
        text.append(f'<text x="{left + pw - 4}" y="{y}" text-anchor="end" fill="{color}">'
                    f"{escape(caption)}</text>")
    text.append("</g>")

    xs = [_fmt(sx(j + 1)) for j in cols]
    highlighted = set(spec.highlight)
    order = [i for i in range(n) if i not in highlighted] + list(spec.highlight)
    out.append(f'<g fill="none" stroke-width="1" stroke-opacity="{_fmt(spec.line_alpha)}">')
    for i in order:
        pts = " ".join(f"{x},{_fmt(sy(v))}" for x, v in zip(xs, values[i, cols]))
        if i in highlighted:
            out.append(f'<polyline id="obs{i}" stroke="{HIGHLIGHT_COLOR}" stroke-opacity="1" '
                       f'stroke-width="2" points="{pts}"/>')
        else:
            out.append(f'<polyline id="obs{i}" stroke="{colors[i]}" points="{pts}"/>')
    out.append("</g>")
    out.extend(text)
    out.append("</svg>")
    return "\n".join(out) + "\n"
