"""Human-facing explanation artifacts: sentences, tables, and SVG charts.

All output is deterministic down to the byte for fixed inputs: numbers are
formatted with explicit rules (round-half-even, as Python's formatter does),
and the SVG is assembled by hand rather than through a plotting library.

Surface forms follow two conventions: confidence appears as a percentage
with one decimal inside tables and as a two-decimal fraction inside
sentences; continuous feature values are printed with up to four
significant digits, categorical values verbatim.
"""

from __future__ import annotations

import html
import math
from dataclasses import dataclass

from .cfsearch import LOWER, Counterfactual, CounterfactualQuery
from .ice import IceCurve
from .model import Prediction
from .tabular import FeatureSchema, Instance

UNCHANGED_CELL = "-"


def format_value(value) -> str:
    """Categorical values verbatim; numbers to at most 4 significant digits."""
    if isinstance(value, str):
        return value
    v = float(value)
    if v == 0.0:
        return "0"
    rounded = round(v, 3 - int(math.floor(math.log10(abs(v)))))
    return f"{rounded:g}"


def format_percent(p: float) -> str:
    return f"{p * 100.0:.1f}%"


def render_sentence(query: CounterfactualQuery, cf: Counterfactual) -> str:
    """One-sentence counterfactual explanation of the confidence score."""
    relation = "less than" if query.direction == LOWER else "more than"
    changes = " and ".join(
        f"{change.feature} had taken value {format_value(change.new)}"
        for change in cf.changed_features
    )
    originals = " and ".join(
        format_value(change.old) for change in cf.changed_features
    )
    return (
        f"One way you could have got a confidence score of {relation} "
        f"{query.threshold:g} ({cf.confidence:.2f}) instead is if {changes} "
        f"rather than {originals}."
    )


@dataclass(frozen=True)
class TableDocument:
    text: str
    html: str


def render_table(
    schema: FeatureSchema,
    original: Instance,
    original_prediction: Prediction,
    alternatives: list[Counterfactual],
    decision_boundary: float = 0.5,
) -> TableDocument:
    """Side-by-side comparison of alternatives against the original instance.

    One row per feature in schema order, then a confidence row, then a
    prediction footer spanning every column.  Cells equal to the original
    value render as "-" so only actual changes stand out.  All alternatives
    must share the original's predicted class, i.e. sit on the original's
    side of ``decision_boundary``.
    """
    if not alternatives:
        raise ValueError("table rendering needs at least one alternative")
    shared_class = original_prediction.predicted_class
    original_side = original_prediction.probability >= decision_boundary
    for k, alt in enumerate(alternatives, start=1):
        if (alt.probability >= decision_boundary) != original_side:
            raise ValueError(
                f"alternative {k} crosses the decision boundary; a comparison "
                f"table needs one shared prediction ({shared_class!r})"
            )

    headers = ["Attribute"] + [
        f"Alternative {k}" for k in range(1, len(alternatives) + 1)
    ] + ["Original Value"]
    rows: list[list[str]] = []
    for i, spec in enumerate(schema.features):
        row = [spec.name]
        for alt in alternatives:
            new = alt.instance.values[i]
            row.append(UNCHANGED_CELL if new == original.values[i] else format_value(new))
        row.append(format_value(original.values[i]))
        rows.append(row)
    confidence_row = ["Confidence score"] + [
        format_percent(alt.confidence) for alt in alternatives
    ] + [format_percent(original_prediction.confidence)]

    return TableDocument(
        text=_table_text(headers, rows, confidence_row, shared_class),
        html=_table_html(headers, rows, confidence_row, shared_class),
    )


def _table_text(headers, rows, confidence_row, shared_class) -> str:
    all_rows = [headers] + rows + [confidence_row]
    widths = [
        max(len(r[c]) for r in all_rows) for c in range(len(headers))
    ]

    def line(cells):
        return " | ".join(cell.ljust(w) for cell, w in zip(cells, widths)).rstrip()

    separator = "-+-".join("-" * w for w in widths)
    out = [line(headers), separator]
    out.extend(line(r) for r in rows)
    out.append(separator)
    out.append(line(confidence_row))
    out.append(separator)
    out.append(f"{'AI prediction'.ljust(widths[0])} | {shared_class}")
    return "\n".join(out) + "\n"


def _table_html(headers, rows, confidence_row, shared_class) -> str:
    span = len(headers) - 1

    def cells(tag, values):
        return "".join(f"<{tag}>{html.escape(v)}</{tag}>" for v in values)

    parts = ['<table class="cf-table">']
    parts.append(f"<thead><tr>{cells('th', headers)}</tr></thead>")
    parts.append("<tbody>")
    for row in rows:
        parts.append(f"<tr>{cells('td', row)}</tr>")
    parts.append(f'<tr class="confidence">{cells("td", confidence_row)}</tr>')
    parts.append(
        f'<tr class="prediction"><td>AI prediction</td>'
        f'<td colspan="{span}">{html.escape(shared_class)}</td></tr>'
    )
    parts.append("</tbody></table>")
    return "".join(parts)


@dataclass(frozen=True)
class PlotStyle:
    width: int = 640
    height: int = 400
    margin_left: int = 60
    margin_right: int = 20
    margin_top: int = 48
    margin_bottom: int = 64
    series_color: str = "#4878a8"
    highlight_color: str = "#d9632f"
    axis_color: str = "#444444"
    grid_color: str = "#dddddd"
    font_family: str = "sans-serif"


def render_plot(curve: IceCurve, style: PlotStyle | None = None) -> str:
    """Self-contained SVG: bars per level for categorical sweeps, a polyline
    for continuous ones.  Confidence is plotted on a fixed [0, 1] axis and
    the original value, when known, is highlighted."""
    if not curve.points:
        raise ValueError("cannot plot an empty curve")
    style = style or PlotStyle()
    categorical = isinstance(curve.points[0].value, str)

    x0, y0 = style.margin_left, style.margin_top
    plot_w = style.width - style.margin_left - style.margin_right
    plot_h = style.height - style.margin_top - style.margin_bottom

    def sy(u: float) -> float:
        return y0 + (1.0 - u) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">',
        f'<rect width="{style.width}" height="{style.height}" fill="white"/>',
        f'<text x="{style.width / 2:.2f}" y="24" text-anchor="middle" '
        f'font-family="{style.font_family}" font-size="16" fill="#111111">'
        f"{html.escape(curve.prediction_class)} — {html.escape(curve.feature)}</text>",
    ]
    # horizontal gridlines and y labels at fixed confidence ticks
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(tick)
        parts.append(
            f'<line x1="{x0}" y1="{y:.2f}" x2="{x0 + plot_w}" y2="{y:.2f}" '
            f'stroke="{style.grid_color}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="{style.font_family}" font-size="11" '
            f'fill="{style.axis_color}">{tick:g}</text>'
        )
    parts.append(
        f'<text x="16" y="{y0 + plot_h / 2:.2f}" text-anchor="middle" '
        f'font-family="{style.font_family}" font-size="12" fill="{style.axis_color}" '
        f'transform="rotate(-90 16 {y0 + plot_h / 2:.2f})">confidence score</text>'
    )

    if categorical:
        n = len(curve.points)
        slot = plot_w / n
        bar_w = slot * 0.6
        for k, pt in enumerate(curve.points):
            cx = x0 + slot * (k + 0.5)
            bx = cx - bar_w / 2
            top = sy(pt.confidence)
            color = (
                style.highlight_color if k == curve.origin_index else style.series_color
            )
            parts.append(
                f'<rect x="{bx:.2f}" y="{top:.2f}" width="{bar_w:.2f}" '
                f'height="{y0 + plot_h - top:.2f}" fill="{color}"/>'
            )
            parts.append(
                f'<text x="{cx:.2f}" y="{y0 + plot_h + 16}" text-anchor="middle" '
                f'font-family="{style.font_family}" font-size="11" '
                f'fill="{style.axis_color}">{html.escape(str(pt.value))}</text>'
            )
    else:
        lo = float(curve.points[0].value)
        hi = float(curve.points[-1].value)
        span = hi - lo if hi > lo else 1.0

        def sx(v: float) -> float:
            return x0 + (v - lo) / span * plot_w

        coords = " ".join(
            f"{sx(float(pt.value)):.2f},{sy(pt.confidence):.2f}" for pt in curve.points
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" '
            f'stroke="{style.series_color}" stroke-width="2"/>'
        )
        if curve.origin_index is not None:
            pt = curve.points[curve.origin_index]
            parts.append(
                f'<circle cx="{sx(float(pt.value)):.2f}" cy="{sy(pt.confidence):.2f}" '
                f'r="5" fill="{style.highlight_color}"/>'
            )
        for v in (lo, lo + span / 2, hi):
            parts.append(
                f'<text x="{sx(v):.2f}" y="{y0 + plot_h + 16}" text-anchor="middle" '
                f'font-family="{style.font_family}" font-size="11" '
                f'fill="{style.axis_color}">{format_value(v)}</text>'
            )

    parts.append(
        f'<line x1="{x0}" y1="{y0 + plot_h}" x2="{x0 + plot_w}" y2="{y0 + plot_h}" '
        f'stroke="{style.axis_color}" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y0 + plot_h}" '
        f'stroke="{style.axis_color}" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{x0 + plot_w / 2:.2f}" y="{style.height - 16}" text-anchor="middle" '
        f'font-family="{style.font_family}" font-size="12" '
        f'fill="{style.axis_color}">{html.escape(curve.feature)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
