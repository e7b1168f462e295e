"""Charts: range-backed series, a 1-2-5 axis scale, lint rules, SVG output.

A chart is a declarative spec over ranges. Building it resolves the ranges
against the workbook at that moment: numbers become points, text and blanks
become gaps (line charts break, bars are skipped), and a series with no
numeric point at all is an error — a chart of nothing is a bug, not art.

The value axis always lands on "nice" bounds: tick step 1, 2, or 5 times a
power of ten, at most 11 intervals, endpoints aligned to the step. Bars get
a zero floor when the data is non-negative, because bar length encodes the
value and a truncated axis lies about ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .addresses import CellRange, parse_range, render_range
from .formats import DisplayFormat, FormatKind, machine_text
from .values import is_number

CHART_KINDS = ("bar", "line", "pie", "scatter")
MAX_INTERVALS = 11
PIE_SLICE_LIMIT = 8
MAGNITUDE_RATIO_LIMIT = 100.0

_PALETTE = ("#4472c4", "#ed7d31", "#70ad47", "#ffc000",
            "#5b9bd5", "#a5a5a5", "#264478", "#9e480e")

WIDTH, HEIGHT = 640, 400
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 20, 36, 44


class ChartError(ValueError):
    """Invalid chart spec or unusable data."""


class EmptySeries(ChartError):
    """A series resolved to zero numeric points."""


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    range: CellRange


@dataclass(frozen=True)
class ChartSpec:
    kind: str
    series: tuple
    categories: Optional[CellRange] = None
    title: str = ""
    y_start_at_zero: bool = True

    def __post_init__(self):
        if self.kind not in CHART_KINDS:
            raise ChartError(f"unknown chart kind {self.kind!r}")
        if not self.series:
            raise ChartError("chart needs at least one series")
        if self.kind == "pie" and len(self.series) != 1:
            raise ChartError("pie charts take exactly one series")
        lengths = set()
        for s in self.series:
            if s.range.rows != 1 and s.range.cols != 1:
                raise ChartError(
                    f"series {s.name!r}: range {render_range(s.range)} "
                    f"is not a single row or column")
            lengths.add(s.range.area)
        if len(lengths) != 1:
            raise ChartError("all series must have the same length")
        if self.categories is not None:
            if self.categories.rows != 1 and self.categories.cols != 1:
                raise ChartError("categories must be a single row or column")
            if self.categories.area != next(iter(lengths)):
                raise ChartError("categories length must match the series")


def spec_from_json(data: dict, *, sheet: int = 0) -> ChartSpec:
    if not isinstance(data, dict):
        raise ChartError("chart spec must be an object")
    try:
        kind = data["kind"]
        raw_series = data["series"]
    except (KeyError, TypeError) as exc:
        raise ChartError(f"chart spec missing field: {exc}") from exc
    if not isinstance(raw_series, list):
        raise ChartError("series must be a list")
    series = []
    for item in raw_series:
        if not isinstance(item, dict) or "range" not in item:
            raise ChartError("every series needs a range")
        series.append(SeriesSpec(name=str(item.get("name", "")),
                                 range=parse_range(item["range"], sheet=sheet)))
    categories = None
    if data.get("categories"):
        categories = parse_range(data["categories"], sheet=sheet)
    return ChartSpec(kind=kind, series=tuple(series), categories=categories,
                     title=str(data.get("title", "")),
                     y_start_at_zero=bool(data.get("yStartAtZero", True)))


def spec_to_json(spec: ChartSpec) -> dict:
    doc = {
        "kind": spec.kind,
        "series": [{"name": s.name, "range": render_range(s.range)}
                   for s in spec.series],
        "title": spec.title,
        "yStartAtZero": spec.y_start_at_zero,
    }
    if spec.categories is not None:
        doc["categories"] = render_range(spec.categories)
    return doc


@dataclass(frozen=True)
class ResolvedSeries:
    name: str
    points: tuple  # float | None per position; None is a gap


@dataclass(frozen=True)
class ChartData:
    kind: str
    series: tuple
    categories: tuple  # display strings
    title: str
    y_start_at_zero: bool
    percent_axis: bool

    @property
    def n_points(self) -> int:
        return len(self.series[0].points) if self.series else 0

    def numeric_values(self):
        return [p for s in self.series for p in s.points if p is not None]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "title": self.title,
            "categories": list(self.categories),
            "percentAxis": self.percent_axis,
            "series": [{"name": s.name, "points": list(s.points)}
                       for s in self.series],
        }


def build_chart(wb, spec: ChartSpec) -> ChartData:
    series = []
    percent_cells = 0
    numeric_cells = 0
    for s in spec.series:
        points = []
        for addr in s.range:
            value = wb.value_at(addr)
            if is_number(value):
                points.append(float(value))
                numeric_cells += 1
                cell = wb.sheets[addr.sheet].cells.get(addr)
                if cell is not None and cell.format.kind is FormatKind.PERCENT:
                    percent_cells += 1
            else:
                points.append(None)
        if not any(p is not None for p in points):
            raise EmptySeries(
                f"series {s.name!r} ({render_range(s.range)}) has no "
                f"numeric data")
        series.append(ResolvedSeries(name=s.name, points=tuple(points)))
    if spec.categories is not None:
        categories = tuple(wb.get_display(a) for a in spec.categories)
    else:
        categories = tuple(str(i + 1) for i in range(series[0].points.__len__()))
    percent_axis = numeric_cells > 0 and percent_cells * 2 > numeric_cells
    return ChartData(kind=spec.kind, series=tuple(series),
                     categories=categories, title=spec.title,
                     y_start_at_zero=spec.y_start_at_zero,
                     percent_axis=percent_axis)


# ---------------------------------------------------------------- axis scale

@dataclass(frozen=True)
class AxisScale:
    min: float
    max: float
    tick: float

    @property
    def intervals(self) -> int:
        return int(round((self.max - self.min) / self.tick))


def _tick_candidates(start: float):
    """Yield 1-2-5 steps ascending, starting at or below `start`."""
    k = math.floor(math.log10(start)) if start > 0 else 0
    k -= 1  # one decade of slack for floor/ceil alignment
    while True:
        for m in (1.0, 2.0, 5.0):
            yield m * (10.0 ** k)
        k += 1


def nice_scale(lo: float, hi: float, *, bar_nonneg: bool = False) -> AxisScale:
    """Smallest 1-2-5 step whose aligned bounds cover [lo, hi] in <= 11
    intervals. Degenerate input is widened by one unit; non-negative bar
    data is pinned to a zero floor."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ChartError("axis bounds must be finite")
    if lo > hi:
        lo, hi = hi, lo
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    if bar_nonneg and lo >= 0.0:
        lo = 0.0
    span = hi - lo
    for step in _tick_candidates(span / MAX_INTERVALS):
        nice_min = math.floor(lo / step) * step
        nice_max = math.ceil(hi / step) * step
        # float-safety: floor/ceil of a ratio can land a hair inside the data
        while nice_min > lo:
            nice_min -= step
        while nice_max < hi:
            nice_max += step
        n = int(round((nice_max - nice_min) / step))
        if n <= MAX_INTERVALS:
            return AxisScale(min=nice_min, max=nice_max, tick=step)
    raise ChartError("no axis scale found")  # pragma: no cover


# ----------------------------------------------------------------------- lint

RULE_PIE_TOO_MANY_SLICES = "PIE_TOO_MANY_SLICES"
RULE_BAR_AXIS_NOT_ZERO = "BAR_AXIS_NOT_ZERO"
RULE_REDUNDANT_LEGEND = "REDUNDANT_LEGEND"
RULE_MIXED_MAGNITUDES = "MIXED_MAGNITUDES"


@dataclass(frozen=True)
class LintFinding:
    rule: str
    message: str

    def to_json(self) -> dict:
        return {"rule": self.rule, "message": self.message}


@dataclass(frozen=True)
class ChartLintReport:
    findings: tuple = field(default=())

    @property
    def clean(self) -> bool:
        return not self.findings

    def rules(self):
        return [f.rule for f in self.findings]

    def to_json(self) -> list:
        return [f.to_json() for f in self.findings]


def lint_chart(data: ChartData) -> ChartLintReport:
    findings = []
    if data.kind == "pie":
        slices = sum(1 for p in data.series[0].points if p is not None)
        if slices > PIE_SLICE_LIMIT:
            findings.append(LintFinding(
                RULE_PIE_TOO_MANY_SLICES,
                f"pie has {slices} slices; more than {PIE_SLICE_LIMIT} is "
                f"unreadable — consider a bar chart"))
    values = data.numeric_values()
    if (data.kind == "bar" and not data.y_start_at_zero
            and values and min(values) >= 0.0):
        findings.append(LintFinding(
            RULE_BAR_AXIS_NOT_ZERO,
            "bar lengths encode values, but the axis does not start at "
            "zero; ratios will look wrong"))
    if len(data.series) == 1 and data.title and \
            data.title == data.series[0].name:
        findings.append(LintFinding(
            RULE_REDUNDANT_LEGEND,
            f"single series named exactly like the title "
            f"({data.title!r}); the legend repeats the title"))
    if data.kind in ("bar", "line", "scatter"):
        magnitudes = sorted(abs(v) for v in values if v != 0.0)
        if len(magnitudes) >= 2 and \
                magnitudes[-1] / magnitudes[0] > MAGNITUDE_RATIO_LIMIT:
            findings.append(LintFinding(
                RULE_MIXED_MAGNITUDES,
                f"values span a {magnitudes[-1] / magnitudes[0]:.0f}x range "
                f"on one linear axis; small values become invisible"))
    return ChartLintReport(findings=tuple(findings))


# ------------------------------------------------------------------ rendering

def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _tick_label(v: float, percent: bool) -> str:
    if percent:
        scaled = v * 100.0
        text = machine_text(round(scaled, 10))
        return text + "%"
    return machine_text(round(v, 10))


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def render_svg(data: ChartData, scale: Optional[AxisScale] = None) -> str:
    """Deterministic 640x400 SVG. Same data, same bytes."""
    if scale is None and data.kind != "pie":
        values = data.numeric_values()
        scale = nice_scale(min(values), max(values),
                           bar_nonneg=(data.kind == "bar"
                                       and data.y_start_at_zero))
    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
               f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" '
               f'font-family="sans-serif">')
    if data.title:
        out.append(f'<text x="{WIDTH // 2}" y="22" text-anchor="middle" '
                   f'font-size="16">{_esc(data.title)}</text>')
    if data.kind == "pie":
        _render_pie(out, data)
    else:
        _render_axes(out, data, scale)
        if data.kind == "bar":
            _render_bars(out, data, scale)
        elif data.kind == "line":
            _render_lines(out, data, scale)
        else:
            _render_scatter(out, data, scale)
    if len(data.series) > 1:
        _render_legend(out, data)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _plot_box():
    x0, y0 = _MARGIN_L, _MARGIN_T
    x1, y1 = WIDTH - _MARGIN_R, HEIGHT - _MARGIN_B
    return x0, y0, x1, y1


def _y_of(v: float, scale: AxisScale, y0: float, y1: float) -> float:
    frac = (v - scale.min) / (scale.max - scale.min)
    return y1 - frac * (y1 - y0)


def _slot(i: int, n: int, x0: float, x1: float) -> float:
    return x0 + (i + 0.5) * (x1 - x0) / n


def _render_axes(out, data: ChartData, scale: AxisScale):
    x0, y0, x1, y1 = _plot_box()
    out.append(f'<g stroke="#444" fill="none">')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>')
    out.append(f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}"/>')
    out.append('</g>')
    out.append('<g font-size="11" fill="#222">')
    for i in range(scale.intervals + 1):
        v = scale.min + i * scale.tick
        y = _y_of(v, scale, y0, y1)
        out.append(f'<line x1="{x0 - 4}" y1="{_fmt(y)}" x2="{x0}" '
                   f'y2="{_fmt(y)}" stroke="#444"/>')
        out.append(f'<text x="{x0 - 8}" y="{_fmt(y + 4)}" '
                   f'text-anchor="end">'
                   f'{_esc(_tick_label(v, data.percent_axis))}</text>')
    n = data.n_points
    for i, label in enumerate(data.categories):
        x = _slot(i, n, x0, x1)
        out.append(f'<text x="{_fmt(x)}" y="{y1 + 16}" '
                   f'text-anchor="middle">{_esc(label)}</text>')
    out.append('</g>')


def _render_bars(out, data: ChartData, scale: AxisScale):
    x0, y0, x1, y1 = _plot_box()
    n = data.n_points
    m = len(data.series)
    slot_w = (x1 - x0) / n
    bar_w = slot_w * 0.7 / m
    base = _y_of(max(scale.min, 0.0), scale, y0, y1)
    for si, series in enumerate(data.series):
        color = _PALETTE[si % len(_PALETTE)]
        out.append(f'<g fill="{color}">')
        for i, p in enumerate(series.points):
            if p is None:
                continue
            cx = _slot(i, n, x0, x1)
            left = cx - slot_w * 0.35 + si * bar_w
            y = _y_of(p, scale, y0, y1)
            top, bottom = min(y, base), max(y, base)
            out.append(f'<rect x="{_fmt(left)}" y="{_fmt(top)}" '
                       f'width="{_fmt(bar_w)}" '
                       f'height="{_fmt(bottom - top)}"/>')
        out.append('</g>')


def _render_lines(out, data: ChartData, scale: AxisScale):
    x0, y0, x1, y1 = _plot_box()
    n = data.n_points
    for si, series in enumerate(data.series):
        color = _PALETTE[si % len(_PALETTE)]
        out.append(f'<g stroke="{color}" fill="none" stroke-width="2">')
        run = []
        runs = []
        for i, p in enumerate(series.points):
            if p is None:
                if run:
                    runs.append(run)
                run = []
            else:
                run.append((_slot(i, n, x0, x1),
                            _y_of(p, scale, y0, y1)))
        if run:
            runs.append(run)
        for run in runs:
            if len(run) == 1:
                x, y = run[0]
                out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" '
                           f'fill="{color}" stroke="none"/>')
            else:
                pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in run)
                out.append(f'<polyline points="{pts}"/>')
        out.append('</g>')


def _render_scatter(out, data: ChartData, scale: AxisScale):
    x0, y0, x1, y1 = _plot_box()
    n = data.n_points
    for si, series in enumerate(data.series):
        color = _PALETTE[si % len(_PALETTE)]
        out.append(f'<g fill="{color}">')
        for i, p in enumerate(series.points):
            if p is None:
                continue
            out.append(f'<circle cx="{_fmt(_slot(i, n, x0, x1))}" '
                       f'cy="{_fmt(_y_of(p, scale, y0, y1))}" r="4"/>')
        out.append('</g>')


def _render_pie(out, data: ChartData):
    cx, cy, r = WIDTH / 2.0, (HEIGHT + _MARGIN_T) / 2.0 - 10, 130.0
    points = [(i, p) for i, p in enumerate(data.series[0].points)
              if p is not None and p > 0.0]
    total = sum(p for _, p in points)
    out.append('<g stroke="#fff" stroke-width="1">')
    if total <= 0.0:
        out.append('</g>')
        return
    if len(points) == 1:
        i, _ = points[0]
        out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
                   f'fill="{_PALETTE[i % len(_PALETTE)]}"/>')
        out.append('</g>')
        return
    angle = -math.pi / 2.0
    for i, p in points:
        frac = p / total
        end = angle + frac * 2.0 * math.pi
        x1p, y1p = cx + r * math.cos(angle), cy + r * math.sin(angle)
        x2p, y2p = cx + r * math.cos(end), cy + r * math.sin(end)
        large = 1 if frac > 0.5 else 0
        out.append(
            f'<path d="M {_fmt(cx)} {_fmt(cy)} L {_fmt(x1p)} {_fmt(y1p)} '
            f'A {_fmt(r)} {_fmt(r)} 0 {large} 1 {_fmt(x2p)} {_fmt(y2p)} Z" '
            f'fill="{_PALETTE[i % len(_PALETTE)]}"/>')
        angle = end
    out.append('</g>')


def _render_legend(out, data: ChartData):
    x = WIDTH - _MARGIN_R - 140
    y = _MARGIN_T + 4
    out.append('<g font-size="11">')
    for si, series in enumerate(data.series):
        color = _PALETTE[si % len(_PALETTE)]
        yy = y + si * 16
        # swatch is a path, not a rect: <rect> is reserved for bar data so
        # shape counts stay meaningful
        out.append(f'<path d="M {x} {yy} h 10 v 10 h -10 Z" '
                   f'fill="{color}"/>')
        out.append(f'<text x="{x + 14}" y="{yy + 9}" fill="#222">'
                   f'{_esc(series.name)}</text>')
    out.append('</g>')
