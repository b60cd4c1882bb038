"""
Unit tests for the Katz index
"""
import numpy as np
import pytest

from core.config import IndexConfig, IndexKind, KatzMethod
from core.errors import BetaTooLarge, ConfigError
from core.graph import Interaction, build_graph, spectral_radius, to_unified_adjacency
from core.indices import score_all
from core.katz import beta_limit, katz_scores, series_tail_bound
from core.ranking import rank


def _random_graph(rng: np.random.Generator, max_side: int):
    n_drugs = int(rng.integers(1, max_side + 1))
    n_proteins = int(rng.integers(1, max_side + 1))
    mask = rng.random((n_drugs, n_proteins)) < rng.uniform(0.05, 0.5)
    mask[0, 0] = True
    items = [Interaction(f"d{i}", f"p{j}") for i, j in zip(*np.nonzero(mask))]
    return build_graph(
        items,
        drug_ids=[f"d{i}" for i in range(n_drugs)],
        protein_ids=[f"p{j}" for j in range(n_proteins)],
    )


class TestKatzScores:
    """Test direct solve and truncated series"""

    def test_toy_leading_term(self, toy_graph):
        """beta=0.005: the only length-3 walk dominates, score ~ beta^3"""
        table = katz_scores(toy_graph, 0.005)
        score = table.get(0, 1)
        assert score == pytest.approx(0.005 ** 3, rel=0.01)

    def test_direct_and_series_agree(self):
        """Both methods agree within 1e-9 on random graphs"""
        rng = np.random.default_rng(31)
        for _ in range(50):
            graph = _random_graph(rng, max_side=25)
            limit = beta_limit(to_unified_adjacency(graph))
            beta = 0.5 * limit if np.isfinite(limit) else 0.1
            direct = katz_scores(graph, beta, KatzMethod.DIRECT_SOLVE)
            series = katz_scores(graph, beta, KatzMethod.TRUNCATED_SERIES, series_tol=1e-12, series_max_terms=200)
            np.testing.assert_allclose(direct.scores, series.scores, rtol=0, atol=1e-9)

    def test_beta_too_large(self):
        """beta at or above 0.95/lambda_max is rejected"""
        items = [Interaction(d, p) for d in ("d1", "d2") for p in ("p1", "p2")]
        graph = build_graph(items, drug_ids=["d0", "d1", "d2"])
        # lambda_max of K2,2 is 2, so the limit is 0.475
        with pytest.raises(BetaTooLarge) as info:
            katz_scores(graph, 0.48)
        assert info.value.limit == pytest.approx(0.475, rel=1e-6)
        katz_scores(graph, 0.47)

    def test_zero_beta_rejected(self, toy_graph):
        """beta must be positive"""
        with pytest.raises(ConfigError):
            katz_scores(toy_graph, 0.0)

    def test_disconnected_pairs_score_zero(self):
        """Pairs in different components get an exact 0"""
        graph = build_graph([Interaction("a", "x"), Interaction("b", "y")])
        for method in KatzMethod:
            table = katz_scores(graph, 0.1, method)
            assert table.get(0, 1) == 0.0
            assert table.positive_count() == 0

    def test_series_tail_bound(self):
        """The bound shrinks geometrically with the number of terms"""
        assert series_tail_bound(0.1, 2.0, 3) == pytest.approx(0.2 ** 4 / 0.8)
        assert series_tail_bound(0.1, 2.0, 10) < series_tail_bound(0.1, 2.0, 3)

    def test_beta_limit(self, k33_minus_edge):
        """beta_limit is 0.95 / lambda_max"""
        A = to_unified_adjacency(k33_minus_edge)
        assert beta_limit(A) == pytest.approx(0.95 / spectral_radius(A))

    def test_weighted_uses_weights(self):
        """Weighted Katz differs from unweighted on a weighted graph"""
        graph = build_graph(
            [Interaction("d1", "p1", 2.0), Interaction("d2", "p1", 1.0), Interaction("d2", "p2", 1.0)],
            weighted=True,
        )
        plain = katz_scores(graph, 0.05).get(0, 1)
        weighted = katz_scores(graph, 0.05, weighted=True).get(0, 1)
        assert weighted > plain > 0

    def test_score_all_delegates(self, toy_graph):
        """score_all routes the Katz index to katz_scores"""
        config = IndexConfig(IndexKind.KATZ, beta=0.01)
        a = score_all(toy_graph, config)
        b = katz_scores(toy_graph, 0.01, config=config)
        assert a.scores.tobytes() == b.scores.tobytes()
        assert a.config == config

    def test_small_beta_ranks_like_cn(self, oracle_pair):
        """With small beta Katz orders candidates like path-count CN when CN values are distinct"""
        rng = np.random.default_rng(41)
        checked = 0
        for _ in range(200):
            _, graph = oracle_pair(rng, max_side=6)
            cn = score_all(graph, IndexConfig(IndexKind.CN))
            positive = cn.scores[cn.scores > 0]
            if positive.size < 2 or np.unique(positive).size != positive.size:
                continue
            katz = katz_scores(graph, 1e-4)
            top = int(positive.size)
            cn_order = rank(cn, top_n=top).pairs()
            katz_order = rank(katz, top_n=top).pairs()
            assert cn_order == katz_order
            checked += 1
        assert checked > 0
