"""
Ranking - Ordered prediction lists with explicit tie handling
All candidate pairs are ranked together, not per target
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np

from core.errors import EmptyScores
from core.indices import ScoreTable


class TiePolicy(Enum):
    LEXICOGRAPHIC = "lex"
    SEEDED_SHUFFLE = "shuffle"


@dataclass(frozen=True)
class RankedEntry:
    rank: int
    drug: str
    protein: str
    score: float


@dataclass
class RankedPredictions:
    """Top of the ranking as parallel arrays; `entries` gives the readable view"""
    drug_index: np.ndarray
    protein_index: np.ndarray
    scores: np.ndarray
    tie_policy: TiePolicy
    seed: Optional[int]
    drug_ids: Tuple[str, ...] = field(repr=False)
    protein_ids: Tuple[str, ...] = field(repr=False)

    def __len__(self) -> int:
        return int(self.scores.size)

    def __iter__(self) -> Iterator[RankedEntry]:
        for position, (i, j, s) in enumerate(zip(self.drug_index, self.protein_index, self.scores)):
            yield RankedEntry(position + 1, self.drug_ids[i], self.protein_ids[j], float(s))

    @property
    def entries(self) -> List[RankedEntry]:
        return list(self)

    def pairs(self) -> List[Tuple[int, int]]:
        return list(zip(self.drug_index.tolist(), self.protein_index.tolist()))


def _lexicographic_position(ids: Tuple[str, ...]) -> np.ndarray:
    """Position of every id in sorted external-id order"""
    order = sorted(range(len(ids)), key=ids.__getitem__)
    position = np.empty(len(ids), dtype=np.int64)
    position[order] = np.arange(len(ids), dtype=np.int64)
    return position


def rank(
    table: ScoreTable,
    tie_policy: TiePolicy = TiePolicy.LEXICOGRAPHIC,
    seed: Optional[int] = None,
    top_n: Optional[int] = None
) -> RankedPredictions:
    """
    Sort candidates by descending score.

    Ties are ordered by external drug id then protein id, or by a seeded
    permutation. Without `top_n` only positive-score candidates are
    returned; with it, min(top_n, candidates) entries and zero scores may
    fill the tail.
    """
    if len(table) == 0:
        raise EmptyScores()

    if tie_policy == TiePolicy.SEEDED_SHUFFLE:
        rng = np.random.default_rng(seed)
        ties = rng.permutation(len(table))
        order = np.lexsort((ties, -table.scores))
    else:
        drug_pos = _lexicographic_position(table.drug_ids)[table.drug_index]
        protein_pos = _lexicographic_position(table.protein_ids)[table.protein_index]
        order = np.lexsort((protein_pos, drug_pos, -table.scores))

    if top_n is None:
        order = order[:table.positive_count()]
    else:
        order = order[:max(top_n, 0)]

    return RankedPredictions(
        drug_index=table.drug_index[order],
        protein_index=table.protein_index[order],
        scores=table.scores[order],
        tie_policy=tie_policy,
        seed=seed if tie_policy == TiePolicy.SEEDED_SHUFFLE else None,
        drug_ids=table.drug_ids,
        protein_ids=table.protein_ids,
    )


def count_positive_predictions(table: ScoreTable) -> int:
    """Candidates the index actually reaches (score > 0)"""
    return table.positive_count()


def tie_groups(ranked: RankedPredictions) -> List[int]:
    """Lengths of the equal-score runs, in rank order"""
    if len(ranked) == 0:
        return []
    boundaries = np.flatnonzero(np.diff(ranked.scores) != 0) + 1
    edges = np.concatenate(([0], boundaries, [len(ranked)]))
    return np.diff(edges).tolist()
