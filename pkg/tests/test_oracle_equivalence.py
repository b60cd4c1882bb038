"""
Equivalence tests against the brute-force reference oracle on random small graphs
"""
import numpy as np
import pytest

from core.config import CnVariant, IndexConfig, IndexKind, KatzMethod
from core.evaluation import UNREACHABLE, path_length_analysis, precision_recall_at_ranks
from core.graph import Interaction, build_graph, spectral_radius, to_unified_adjacency
from core.indices import score_all
from core.katz import beta_limit, katz_scores, series_tail_bound
from core.ranking import rank
from tests.reference_oracle import (
    OracleGraph,
    oracle_cn,
    oracle_distance,
    oracle_jaccard,
    oracle_katz,
    oracle_pa,
    oracle_pr,
    oracle_spectral_radius,
)

INDEX_ORACLES = [
    (IndexConfig(IndexKind.CN), lambda g, d, p: oracle_cn(g, d, p, "path")),
    (IndexConfig(IndexKind.CN, cn_variant=CnVariant.SET_CARDINALITY), lambda g, d, p: oracle_cn(g, d, p, "set")),
    (IndexConfig(IndexKind.JACCARD), lambda g, d, p: oracle_jaccard(g, d, p)),
    (IndexConfig(IndexKind.PA), lambda g, d, p: oracle_pa(g, d, p)),
]

WEIGHTED_ORACLES = [
    (IndexConfig(IndexKind.CN, weighted=True), lambda g, d, p: oracle_cn(g, d, p, "path", weighted=True)),
    (IndexConfig(IndexKind.JACCARD, weighted=True), lambda g, d, p: oracle_jaccard(g, d, p, weighted=True)),
    (IndexConfig(IndexKind.PA, weighted=True), lambda g, d, p: oracle_pa(g, d, p, weighted=True)),
]


def _assert_matches(oracle, graph, config, reference):
    table = score_all(graph, config).as_dict()
    expected = {(d, p): reference(oracle, d, p) for d, p in oracle.candidates()}
    assert set(table) == set(expected)
    for pair, value in expected.items():
        assert table[pair] == pytest.approx(value, rel=1e-12, abs=1e-12), (config.label, pair)


class TestIndexEquivalence:
    """Vectorised indices agree with literal set and path enumeration"""

    @pytest.mark.parametrize("config,reference", INDEX_ORACLES, ids=[c.label for c, _ in INDEX_ORACLES])
    def test_unweighted(self, oracle_pair, config, reference):
        """500 random graphs per index"""
        rng = np.random.default_rng(1000)
        for _ in range(500):
            oracle, graph = oracle_pair(rng, max_side=12)
            _assert_matches(oracle, graph, config, reference)

    @pytest.mark.parametrize("config,reference", WEIGHTED_ORACLES, ids=[c.label for c, _ in WEIGHTED_ORACLES])
    def test_weighted(self, oracle_pair, config, reference):
        """200 random weighted graphs per index"""
        rng = np.random.default_rng(2000)
        for _ in range(200):
            oracle, graph = oracle_pair(rng, weighted=True, max_side=12)
            _assert_matches(oracle, graph, config, reference)

    def test_unit_weights_triple_path_count(self, oracle_pair):
        """With every weight 1 the weighted path sum is three times the path count"""
        rng = np.random.default_rng(3000)
        for _ in range(100):
            oracle, _ = oracle_pair(rng)
            graph = build_graph(oracle.interactions(), weighted=True,
                                drug_ids=oracle.drug_names(), protein_ids=oracle.protein_names())
            plain = score_all(graph, IndexConfig(IndexKind.CN))
            weighted = score_all(graph, IndexConfig(IndexKind.CN, weighted=True))
            np.testing.assert_allclose(weighted.scores, 3 * plain.scores)


class TestKatzEquivalence:
    """Katz agrees with explicit matrix powers"""

    def test_spectral_radius(self, oracle_pair):
        """Power iteration matches the dense eigenvalues"""
        rng = np.random.default_rng(4000)
        for _ in range(100):
            oracle, graph = oracle_pair(rng)
            expected = oracle_spectral_radius(oracle)
            assert spectral_radius(to_unified_adjacency(graph)) == pytest.approx(expected, rel=1e-5)

    @pytest.mark.parametrize("method", list(KatzMethod), ids=lambda m: m.value)
    def test_truncated_powers(self, oracle_pair, method):
        """Scores lie within the tail bound of an 8-term power sum"""
        rng = np.random.default_rng(5000)
        terms = 8
        for _ in range(200):
            oracle, graph = oracle_pair(rng)
            limit = beta_limit(to_unified_adjacency(graph))
            beta = 0.5 * limit if np.isfinite(limit) else 0.1
            lam = oracle_spectral_radius(oracle)
            bound = series_tail_bound(beta, lam, terms) + 1e-9

            powers = oracle_katz(oracle, beta, terms)
            table = katz_scores(graph, beta, method, series_max_terms=200).as_dict()
            for d, p in oracle.candidates():
                assert abs(table[(d, p)] - powers[d, oracle.n_drugs + p]) <= bound

    def test_converged_powers(self, oracle_pair):
        """With enough terms the direct solve matches to 1e-9"""
        rng = np.random.default_rng(6000)
        for _ in range(100):
            oracle, graph = oracle_pair(rng, weighted=True)
            limit = beta_limit(to_unified_adjacency(graph))
            beta = 0.5 * limit if np.isfinite(limit) else 0.1
            powers = oracle_katz(oracle, beta, 80, weighted=True)
            table = katz_scores(graph, beta, weighted=True).as_dict()
            for d, p in oracle.candidates():
                assert table[(d, p)] == pytest.approx(powers[d, oracle.n_drugs + p], abs=1e-9)


class TestCurveEquivalence:
    """Vectorised PR counting agrees with set arithmetic"""

    def test_precision_recall(self, oracle_pair):
        """100 random rankings and validation sets"""
        rng = np.random.default_rng(7000)
        checked = 0
        for _ in range(100):
            oracle, graph = oracle_pair(rng)
            table = score_all(graph, IndexConfig(IndexKind.PA))
            if len(table) == 0:
                continue
            candidates = oracle.candidates()
            size = int(rng.integers(1, len(candidates) + 1))
            chosen = rng.choice(len(candidates), size=size, replace=False)
            validation = {candidates[i] for i in chosen}
            max_n = int(rng.integers(1, len(candidates) + 1))

            ranked = rank(table, top_n=len(table))
            curve = precision_recall_at_ranks(ranked, validation, max_n)
            precision, recall = oracle_pr(ranked.pairs(), validation, max_n)
            np.testing.assert_allclose(curve.precision, precision, rtol=0, atol=1e-12)
            np.testing.assert_allclose(curve.recall, recall, rtol=0, atol=1e-12)
            assert np.all(np.diff(curve.recall) >= 0)
            hits = curve.n * curve.precision
            np.testing.assert_allclose(hits, np.round(hits), atol=1e-9)
            assert np.all(np.diff(np.round(hits)) >= 0)
            checked += 1
        assert checked > 50


class TestPathEquivalence:
    """Shortest paths agree with breadth-first search"""

    def test_held_out_distances(self, oracle_pair):
        """200 graphs with a random tenth of the edges held out"""
        rng = np.random.default_rng(8000)
        for _ in range(200):
            oracle, graph = oracle_pair(rng)
            edges = sorted(oracle.edges)
            held = [edges[i] for i in range(len(edges)) if rng.random() < 0.1]
            if not held:
                continue
            held_set = set(held)
            kept = {e: w for e, w in oracle.edges.items() if e not in held_set}
            train_oracle = OracleGraph(oracle.n_drugs, oracle.n_proteins, kept)

            train = graph.without_edges(held)
            validation = [Interaction(f"d{d}", f"p{p}") for d, p in held]
            histogram = path_length_analysis(train, validation)

            expected = {}
            for d, p in held:
                distance = oracle_distance(train_oracle, d, p)
                key = UNREACHABLE if distance is None else distance
                expected[key] = expected.get(key, 0) + 1
                if oracle_cn(train_oracle, d, p, "path") > 0:
                    assert distance == 3
            assert histogram.counts == expected
            assert all(k % 2 == 1 for k in histogram.counts if k != UNREACHABLE)


class TestOracleSanity:
    """Hand-checked values of the oracle itself"""

    def test_toy_cn(self):
        """d1-p1-d2-p2 is the only length-3 path"""
        toy = OracleGraph(2, 2, {(0, 0): 1.0, (1, 0): 1.0, (1, 1): 1.0})
        assert oracle_cn(toy, 0, 1, "path") == 1
        assert oracle_cn(toy, 0, 1, "set") == 1

    def test_k33_minus_edge(self):
        """Four length-3 paths close the missing edge"""
        edges = {(d, p): 1.0 for d in range(3) for p in range(3) if (d, p) != (0, 0)}
        assert oracle_cn(OracleGraph(3, 3, edges), 0, 0, "path") == 4

    def test_toy_katz(self):
        """beta=0.1 over three terms leaves one walk of length 3"""
        toy = OracleGraph(2, 2, {(0, 0): 1.0, (1, 0): 1.0, (1, 1): 1.0})
        powers = oracle_katz(toy, 0.1, 3)
        assert powers[0, 2 + 1] == pytest.approx(0.001)
        np.testing.assert_allclose(powers, powers.T)
        assert oracle_katz(toy, 0.1, 1)[0, 3] == 0

    def test_single_hit(self):
        """One correct prediction gives precision = recall = 1"""
        assert oracle_pr([(0, 0)], {(0, 0)}) == ([1.0], [1.0])
