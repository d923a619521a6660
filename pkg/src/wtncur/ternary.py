"""Deterministic SVG rendering of the three-currency score triangle.

Barycentric layout: first currency at the top vertex, second at the bottom
left, third at the bottom right, so lines of constant first-currency score
run horizontally. Colors: blue, gold, red in currency order.
"""

from __future__ import annotations

import math

from .ensemble import ScoreTable
from .errors import ParameterError

PALETTE3 = ("#1f77b4", "#d4a017", "#d62728")

_WIDTH = 640.0
_HEIGHT = 600.0
_SIDE = 500.0
_BASE_Y = 520.0
_LEFT_X = (_WIDTH - _SIDE) / 2.0

# (top, bottom-left, bottom-right) in SVG user units
TERNARY_VERTICES = (
    (_WIDTH / 2.0, _BASE_Y - _SIDE * math.sqrt(3.0) / 2.0),
    (_LEFT_X, _BASE_Y),
    (_LEFT_X + _SIDE, _BASE_Y),
)


def ternary_point(
    z: tuple[float, float, float],
    vertices: tuple[tuple[float, float], ...] = TERNARY_VERTICES,
) -> tuple[float, float]:
    """Map barycentric scores (z0, z1, z2) to plane coordinates."""
    x = z[0] * vertices[0][0] + z[1] * vertices[1][0] + z[2] * vertices[2][0]
    y = z[0] * vertices[0][1] + z[1] * vertices[1][1] + z[2] * vertices[2][1]
    return x, y


def _f(v: float) -> str:
    return f"{v:.2f}"


def render_ternary(table: ScoreTable, radius: float = 6.0) -> str:
    """SVG document with one circle per country with defined scores.

    Raises ParameterError unless the table has exactly three currencies.
    """
    if len(table.currencies) != 3:
        raise ParameterError(
            f"ternary rendering needs exactly 3 currencies, got {len(table.currencies)}"
        )
    top, bl, br = TERNARY_VERTICES
    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">'
    )
    parts.append(f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="#ffffff"/>')

    # light guide lines at 0.2 score steps, one family per currency axis
    for step in (0.2, 0.4, 0.6, 0.8):
        rem = 1.0 - step
        segments = (
            ((step, rem, 0.0), (step, 0.0, rem)),
            ((rem, step, 0.0), (0.0, step, rem)),
            ((rem, 0.0, step), (0.0, rem, step)),
        )
        for a, b in segments:
            x1, y1 = ternary_point(a)
            x2, y2 = ternary_point(b)
            parts.append(
                f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                f'stroke="#dddddd" stroke-width="0.8" stroke-dasharray="4 3"/>'
            )

    parts.append(
        f'<path d="M {_f(top[0])} {_f(top[1])} L {_f(bl[0])} {_f(bl[1])} '
        f'L {_f(br[0])} {_f(br[1])} Z" fill="none" stroke="#444444" stroke-width="1.5"/>'
    )

    labels = (
        (table.currencies[0], top[0], top[1] - 12.0, "middle"),
        (table.currencies[1], bl[0] - 8.0, bl[1] + 22.0, "end"),
        (table.currencies[2], br[0] + 8.0, br[1] + 22.0, "start"),
    )
    for text, x, y, anchor in labels:
        parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" text-anchor="{anchor}" '
            f'font-family="Helvetica, Arial, sans-serif" font-size="18" '
            f'fill="#222222">{text}</text>'
        )

    n_undefined = 0
    z = table.scores.z
    for pos, code in enumerate(table.index.codes):
        if not table.scores.defined[pos]:
            n_undefined += 1
            continue
        zr = (float(z[pos, 0]), float(z[pos, 1]), float(z[pos, 2]))
        x, y = ternary_point(zr)
        color = PALETTE3[int(table.prefs[pos])]
        parts.append(
            f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(radius)}" fill="{color}" '
            f'fill-opacity="0.85" stroke="#333333" stroke-width="0.6">'
            f"<title>{code} ({zr[0]:.3f}, {zr[1]:.3f}, {zr[2]:.3f})</title></circle>"
        )
    if n_undefined:
        parts.append(f"<!-- {n_undefined} countries without defined scores omitted -->")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
