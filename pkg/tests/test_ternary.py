"""Barycentric geometry and SVG rendering of the score triangle."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wtncur import (
    ParameterError,
    TcpState,
    TradeCoupling,
    flow_statistics,
    render_ternary,
    ternary_coordinates,
    ternary_point,
    weight_vectors,
)
from wtncur.ternary import PALETTE3, TERNARY_VERTICES

from .conftest import make_matrix


def table_for(m, prefs, currencies=("USD", "EUR", "BRI")):
    st = flow_statistics(m)
    coup = TradeCoupling.from_statistics(st, weight_vectors(st, "direct"))
    state = TcpState(
        prefs=np.asarray(prefs, dtype=np.int8),
        frozen=np.zeros(len(prefs), dtype=bool),
        n_currencies=len(currencies),
    )
    return ternary_coordinates(coup, state, currencies)


class TestGeometry:
    def test_pure_scores_hit_vertices(self):
        assert ternary_point((1.0, 0.0, 0.0)) == TERNARY_VERTICES[0]
        assert ternary_point((0.0, 1.0, 0.0)) == TERNARY_VERTICES[1]
        assert ternary_point((0.0, 0.0, 1.0)) == TERNARY_VERTICES[2]

    def test_centroid(self):
        x, y = ternary_point((1 / 3, 1 / 3, 1 / 3))
        cx = sum(v[0] for v in TERNARY_VERTICES) / 3.0
        cy = sum(v[1] for v in TERNARY_VERTICES) / 3.0
        assert abs(x - cx) <= 1e-9 and abs(y - cy) <= 1e-9

    def test_triangle_is_equilateral(self):
        def dist(a, b):
            return math.hypot(a[0] - b[0], a[1] - b[1])

        top, bl, br = TERNARY_VERTICES
        assert abs(dist(top, bl) - dist(top, br)) <= 1e-9
        assert abs(dist(top, bl) - dist(bl, br)) <= 1e-9

    def test_edge_midpoint(self):
        x, y = ternary_point((0.5, 0.5, 0.0))
        top, bl, _ = TERNARY_VERTICES
        assert abs(x - (top[0] + bl[0]) / 2.0) <= 1e-9
        assert abs(y - (top[1] + bl[1]) / 2.0) <= 1e-9


class TestRenderTernary:
    def test_requires_three_currencies(self, three_country):
        table = table_for(three_country, [0, 1, 0], currencies=("USD", "EUR"))
        with pytest.raises(ParameterError, match="3"):
            render_ternary(table)

    def test_golden_determinism(self, three_country):
        table = table_for(three_country, [1, 0, 2])
        a = render_ternary(table)
        b = render_ternary(table_for(three_country, [1, 0, 2]))
        assert a == b

    def test_document_structure(self, three_country):
        svg = render_ternary(table_for(three_country, [1, 0, 2]))
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")
        assert svg.count("<circle ") == 3
        assert "USD" in svg and "EUR" in svg and "BRI" in svg
        for color in PALETTE3:
            assert color in svg  # all three preferences are present
        assert "<title>AR " in svg

    def test_unanimous_state_single_color(self, three_country):
        svg = render_ternary(table_for(three_country, [0, 0, 0]))
        assert PALETTE3[0] in svg
        assert PALETTE3[1] not in svg and PALETTE3[2] not in svg

    def test_undefined_countries_omitted_with_comment(self):
        flows = np.array([[0.0, 5.0, 0.0], [7.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        m = make_matrix(("AR", "BR", "CL"), flows)
        svg = render_ternary(table_for(m, [0, 1, 2]))
        assert svg.count("<circle ") == 2
        assert "1 countries without defined scores omitted" in svg
        assert "<title>CL" not in svg

    def test_radius_parameter(self, three_country):
        svg = render_ternary(table_for(three_country, [0, 1, 2]), radius=9.5)
        assert 'r="9.50"' in svg
