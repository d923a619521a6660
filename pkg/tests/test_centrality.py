"""Google matrix construction and power-iteration rankings."""

from __future__ import annotations

import numpy as np
import pytest

from wtncur import (
    CountryIndex,
    ParameterError,
    PowerIterationError,
    cheirank,
    flow_statistics,
    google_matrix,
    pagerank,
    power_iteration,
)

from .conftest import make_matrix, random_trade_matrix
from .oracles import oracle_pagerank_dense

IDX2 = CountryIndex(("AR", "BR"))
IDX3 = CountryIndex(("AR", "BR", "CL"))


class TestGoogleMatrix:
    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5])
    def test_damping_range(self, bad):
        with pytest.raises(ParameterError, match="damping"):
            google_matrix(np.eye(2), IDX2, damping=bad)

    def test_shape_mismatch(self):
        with pytest.raises(ParameterError, match="shape"):
            google_matrix(np.eye(3), IDX2)

    def test_columns_sum_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = random_trade_matrix(rng, int(rng.integers(2, 12)))
            st = flow_statistics(m)
            g = google_matrix(st.import_share, st.index)
            assert np.allclose(g.matrix.sum(axis=0), 1.0, atol=1e-12)
            assert np.all(g.matrix > 0)

    def test_all_zero_matrix_becomes_uniform(self):
        for damping in (0.85, 0.5, 0.01):
            g = google_matrix(np.zeros((3, 3)), IDX3, damping=damping)
            assert np.allclose(g.matrix, 1.0 / 3.0, atol=1e-15)

    def test_uniform_stochastic_matrix_is_fixed(self):
        # damped mixing with the uniform vector leaves the flat matrix alone
        share = np.full((4, 4), 0.25)
        idx = CountryIndex(("AR", "BR", "CL", "CN"))
        for damping in (0.85, 0.3):
            g = google_matrix(share, idx, damping=damping)
            assert np.allclose(g.matrix, share, atol=1e-15)

    def test_dangling_column_becomes_uniform(self):
        share = np.array([[0.0, 0.0], [1.0, 0.0]])  # BR column dangling
        g = google_matrix(share, IDX2, damping=0.85)
        assert np.allclose(g.matrix[:, 1], 0.5, atol=1e-15)
        assert np.allclose(g.matrix[:, 0], [0.075, 0.925], atol=1e-15)


class TestPowerIteration:
    def test_two_node_cycle(self):
        # each country is the other's only trade partner
        share = np.array([[0.0, 1.0], [1.0, 0.0]])
        r = power_iteration(google_matrix(share, IDX2))
        assert np.allclose(r.values, 0.5, atol=1e-12)

    def test_residual_contract(self):
        rng = np.random.default_rng(7)
        m = random_trade_matrix(rng, 8)
        st = flow_statistics(m)
        r = pagerank(st, tol=1e-10)
        assert r.residual <= 1e-10
        assert r.iterations >= 1
        assert abs(r.values.sum() - 1.0) <= 1e-12

    def test_non_convergence_raises_with_context(self):
        # needs a stationary vector far from the uniform start, so the share
        # matrix must not be doubly stochastic
        share3 = np.array([[0.0, 0.2, 1.0], [0.9, 0.0, 0.0], [0.1, 0.8, 0.0]])
        g = google_matrix(share3, IDX3, damping=0.99)
        with pytest.raises(PowerIterationError) as exc_info:
            power_iteration(g, tol=1e-15, max_iter=2)
        err = exc_info.value
        assert err.iterations == 2
        assert err.residual > 1e-15

    @pytest.mark.parametrize("bad_kw", [{"tol": 0.0}, {"tol": -1e-3}, {"max_iter": 0}])
    def test_parameter_validation(self, bad_kw):
        g = google_matrix(np.zeros((2, 2)), IDX2)
        with pytest.raises(ParameterError):
            power_iteration(g, **bad_kw)

    def test_small_damping_near_uniform(self):
        rng = np.random.default_rng(13)
        m = random_trade_matrix(rng, 10)
        st = flow_statistics(m)
        alpha = 1e-3
        r = pagerank(st, damping=alpha)
        assert np.max(np.abs(r.values - 0.1)) <= 2.0 * alpha


class TestRankings:
    def test_uniform_complete_network_flat(self):
        n = 6
        codes = ("AR", "BR", "CL", "CN", "DE", "US")
        flows = np.full((n, n), 2.0)
        np.fill_diagonal(flows, 0.0)
        st = flow_statistics(make_matrix(codes, flows))
        assert np.allclose(pagerank(st).values, 1.0 / n, atol=1e-12)
        assert np.allclose(cheirank(st).values, 1.0 / n, atol=1e-12)

    def test_in_hub_ranks_highest(self):
        # AR absorbs the bulk of everyone's exports
        codes = ("AR", "BR", "CL", "CN")
        flows = np.array(
            [
                [0.0, 50.0, 50.0, 50.0],
                [5.0, 0.0, 1.0, 1.0],
                [5.0, 1.0, 0.0, 1.0],
                [5.0, 1.0, 1.0, 0.0],
            ]
        )
        st = flow_statistics(make_matrix(codes, flows))
        r = pagerank(st)
        assert int(np.argmax(r.values)) == 0
        assert r.by_rank()[0][0] == "AR"
        oracle = oracle_pagerank_dense(st.import_share, 0.85)
        assert np.abs(r.values - oracle).sum() <= 1e-8

    def test_symmetric_flows_same_rankings(self):
        flows = np.array([[0.0, 4.0, 9.0], [4.0, 0.0, 6.0], [9.0, 6.0, 0.0]])
        st = flow_statistics(make_matrix(("AR", "BR", "CL"), flows))
        pr, cr = pagerank(st), cheirank(st)
        assert np.allclose(pr.values, cr.values, atol=1e-9)

    def test_two_country_rankings_tie(self, two_country):
        # both share matrices are the 2-cycle permutation whatever the flow
        # values, so forward and reverse rankings are exactly flat; the flow
        # asymmetry (30 vs 10) cannot separate the countries here
        st = flow_statistics(two_country)
        cr = cheirank(st)
        pr = pagerank(st)
        oracle = oracle_pagerank_dense(st.export_share, 0.85)
        assert np.allclose(oracle, 0.5, atol=1e-12)
        assert np.allclose(cr.values, 0.5, atol=1e-9)
        assert np.allclose(pr.values, 0.5, atol=1e-9)

    def test_three_country_rankings_match_oracle(self, three_country):
        st = flow_statistics(three_country)
        cr = cheirank(st)
        pr = pagerank(st)
        cr_oracle = oracle_pagerank_dense(st.export_share, 0.85)
        pr_oracle = oracle_pagerank_dense(st.import_share, 0.85)
        assert np.abs(cr.values - cr_oracle).sum() <= 1e-8
        assert np.abs(pr.values - pr_oracle).sum() <= 1e-8
        # orderings are non-degenerate and need not follow raw volume
        assert np.argsort(-cr.values).tolist() == np.argsort(-cr_oracle).tolist()
        assert len(set(np.round(cr.values, 6))) == 3

    def test_dense_oracle_equivalence_small_networks(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            n = int(rng.integers(2, 11))
            m = random_trade_matrix(rng, n)
            st = flow_statistics(m)
            for share in (st.import_share, st.export_share):
                engine = power_iteration(google_matrix(share, st.index, 0.85))
                oracle = oracle_pagerank_dense(share, 0.85)
                assert np.abs(engine.values - oracle).sum() <= 1e-8

    def test_by_rank_ties_break_by_code(self):
        share = np.array([[0.0, 1.0], [1.0, 0.0]])
        r = power_iteration(google_matrix(share, IDX2))
        assert [code for code, _ in r.by_rank()] == ["AR", "BR"]
