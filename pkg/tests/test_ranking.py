"""
Unit tests for ranking and tie handling
"""
import numpy as np
import pytest

from core.config import IndexConfig, IndexKind
from core.errors import EmptyScores
from core.indices import ScoreTable, score_all
from core.ranking import TiePolicy, count_positive_predictions, rank, tie_groups


def _table(scores, drug_ids=("a", "b"), protein_ids=("x", "y", "z")):
    """All drug x protein pairs in row-major order with the given scores"""
    n_proteins = len(protein_ids)
    scores = np.asarray(scores, dtype=np.float64)
    index = np.arange(scores.size)
    return ScoreTable(
        config=IndexConfig(IndexKind.CN),
        drug_index=index // n_proteins,
        protein_index=index % n_proteins,
        scores=scores,
        fingerprint="test",
        drug_ids=tuple(drug_ids),
        protein_ids=tuple(protein_ids),
    )


class TestRank:
    """Test ordering by descending score"""

    def test_strict_order(self):
        """Distinct scores come out in descending order"""
        ranked = rank(_table([0.1, 0.5, 0.3, 0.9, 0.2, 0.7]))
        assert ranked.scores.tolist() == [0.9, 0.7, 0.5, 0.3, 0.2, 0.1]
        assert [e.rank for e in ranked] == [1, 2, 3, 4, 5, 6]

    def test_entries_carry_external_ids(self):
        """Entries map dense indices back to the original ids"""
        top = rank(_table([0, 0, 0, 4, 0, 0])).entries[0]
        assert (top.drug, top.protein, top.score) == ("b", "x", 4.0)

    def test_lexicographic_ties(self):
        """Equal scores are ordered by drug id, then protein id"""
        table = _table([1, 1, 1, 1, 1, 1], drug_ids=("zeta", "alpha"), protein_ids=("p2", "p10", "p1"))
        ranked = rank(table)
        names = [(e.drug, e.protein) for e in ranked]
        assert names == [
            ("alpha", "p1"), ("alpha", "p10"), ("alpha", "p2"),
            ("zeta", "p1"), ("zeta", "p10"), ("zeta", "p2"),
        ]
        assert ranked.seed is None

    def test_seeded_shuffle_is_deterministic(self):
        """The same seed gives the same tie order"""
        table = _table(np.ones(20), drug_ids=[f"d{i}" for i in range(4)], protein_ids=[f"p{j}" for j in range(5)])
        a = rank(table, TiePolicy.SEEDED_SHUFFLE, seed=3)
        b = rank(table, TiePolicy.SEEDED_SHUFFLE, seed=3)
        c = rank(table, TiePolicy.SEEDED_SHUFFLE, seed=4)
        assert a.pairs() == b.pairs()
        assert a.pairs() != c.pairs()
        assert a.seed == 3

    def test_shuffle_keeps_score_order(self):
        """Shuffling only permutes within equal-score runs"""
        ranked = rank(_table([2, 1, 2, 1, 3, 1]), TiePolicy.SEEDED_SHUFFLE, seed=11)
        assert ranked.scores.tolist() == [3, 2, 2, 1, 1, 1]

    def test_default_excludes_zero_scores(self):
        """Without top_n only positive scores are ranked"""
        ranked = rank(_table([0, 2, 0, 1, 0, 0]))
        assert len(ranked) == 2

    def test_top_n_fills_with_zeros(self):
        """With top_n the tail may contain zero-score candidates"""
        ranked = rank(_table([0, 2, 0, 1, 0, 0]), top_n=4)
        assert ranked.scores.tolist() == [2, 1, 0, 0]

    def test_top_n_capped_by_candidates(self):
        """top_n larger than the table returns every candidate"""
        assert len(rank(_table([1, 2, 3, 4, 5, 6]), top_n=100)) == 6

    def test_empty_table(self):
        """No candidates raises EmptyScores"""
        with pytest.raises(EmptyScores):
            rank(_table([], drug_ids=(), protein_ids=("x",)))

    def test_scale_invariance(self, oracle_pair):
        """Multiplying every score by a constant keeps the order"""
        rng = np.random.default_rng(19)
        for _ in range(10):
            _, graph = oracle_pair(rng, weighted=True)
            table = score_all(graph, IndexConfig(IndexKind.PA, weighted=True))
            if len(table) == 0:
                continue
            scaled = ScoreTable(
                config=table.config,
                drug_index=table.drug_index,
                protein_index=table.protein_index,
                scores=table.scores * 3.0,
                fingerprint=table.fingerprint,
                drug_ids=table.drug_ids,
                protein_ids=table.protein_ids,
            )
            assert rank(table).pairs() == rank(scaled).pairs()


class TestRankingHelpers:
    """Test counting helpers"""

    def test_count_positive(self):
        """Only strictly positive scores count"""
        assert count_positive_predictions(_table([0, 0.5, 0, 2, 0, 0])) == 2

    def test_tie_groups(self):
        """Run lengths of equal scores in rank order"""
        ranked = rank(_table([3, 1, 3, 2, 2, 2]))
        assert tie_groups(ranked) == [2, 3, 1]

    def test_tie_groups_empty(self):
        """No entries gives no groups"""
        ranked = rank(_table([0, 0, 0, 0, 0, 0]))
        assert tie_groups(ranked) == []
