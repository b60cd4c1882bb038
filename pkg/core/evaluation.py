"""
Evaluation - Cross-validation protocol and precision-recall machinery
Fold split, per-rank precision/recall, fold averaging, AUPR, path lengths
"""
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy.sparse import csgraph
from sklearn.metrics import auc
from sklearn.model_selection import KFold

from core.config import IndexConfig
from core.errors import ConfigError, EmptyCurve, LeakageDetected, NoCurves, TooManyFolds
from core.graph import BipartiteGraph, Interaction, Side, to_unified_adjacency
from core.indices import score_all
from core.ranking import RankedPredictions, TiePolicy, rank
from utils.logger import get_logger

DEFAULT_MAX_N = 10000
UNREACHABLE = "unreachable"


# ------------------------------------------------------------------ folds

@dataclass(frozen=True)
class FoldAssignment:
    """Seeded partition of interactions into k disjoint folds"""
    k: int
    seed: int
    interactions: Tuple[Interaction, ...]
    fold_of: Dict[Tuple[str, str], int] = field(repr=False)

    def fold(self, index: int) -> List[Interaction]:
        if not 0 <= index < self.k:
            raise ConfigError(f"fold index {index} out of range 0..{self.k - 1}")
        return [item for item in self.interactions if self.fold_of[item.key] == index]

    def training(self, index: int) -> List[Interaction]:
        return [item for item in self.interactions if self.fold_of[item.key] != index]

    def sizes(self) -> List[int]:
        counts = np.bincount(list(self.fold_of.values()), minlength=self.k)
        return counts.tolist()


def split_folds(interactions: Sequence[Interaction], k: int = 10, seed: int = 0) -> FoldAssignment:
    """Shuffle with the seed and cut into k blocks whose sizes differ by at most one"""
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got {k}")
    if k > len(interactions):
        raise TooManyFolds(k, len(interactions))

    splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
    fold_of: Dict[Tuple[str, str], int] = {}
    positions = np.arange(len(interactions))
    for fold, (_, held_out) in enumerate(splitter.split(positions)):
        for position in held_out:
            fold_of[interactions[position].key] = fold

    return FoldAssignment(k=k, seed=seed, interactions=tuple(interactions), fold_of=fold_of)


# -------------------------------------------------------------- PR curves

class Provenance(Enum):
    SINGLE_FOLD = "single-fold"
    FOLD_AVERAGED = "fold-averaged"
    EXTERNAL = "external"


@dataclass
class PrCurve:
    """Precision and recall at rank cutoffs n = 1..len"""
    precision: np.ndarray
    recall: np.ndarray
    max_n: int = DEFAULT_MAX_N
    provenance: Provenance = Provenance.SINGLE_FOLD
    true_positives: Optional[np.ndarray] = None
    validation_size: Optional[int] = None

    def __len__(self) -> int:
        return int(self.precision.size)

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def points(self) -> List[Tuple[int, float, float]]:
        return [
            (int(n), float(p), float(r))
            for n, p, r in zip(self.n, self.precision, self.recall)
        ]


def _pair_keys(pairs: np.ndarray, n_proteins: int) -> np.ndarray:
    return pairs[:, 0] * n_proteins + pairs[:, 1]


def precision_recall_at_ranks(
    ranked: RankedPredictions,
    validation_pairs: Iterable[Tuple[int, int]],
    max_n: int = DEFAULT_MAX_N
) -> PrCurve:
    """TP(n) = |top-n ∩ validation|; precision = TP/n; recall = TP/|validation|"""
    validation = np.array(sorted(set(validation_pairs)), dtype=np.int64).reshape(-1, 2)
    n_proteins = len(ranked.protein_ids)
    length = min(max_n, len(ranked))

    predicted = np.stack([ranked.drug_index[:length], ranked.protein_index[:length]], axis=1)
    hits = np.isin(_pair_keys(predicted, n_proteins), _pair_keys(validation, n_proteins))
    tp = np.cumsum(hits, dtype=np.int64)
    n = np.arange(1, length + 1)

    size = len(validation)
    recall = tp / size if size else np.zeros(length)
    return PrCurve(
        precision=tp / n,
        recall=recall,
        max_n=max_n,
        provenance=Provenance.SINGLE_FOLD,
        true_positives=tp,
        validation_size=size,
    )


def validation_pairs(graph: BipartiteGraph, validation: Iterable[Interaction]) -> List[Tuple[int, int]]:
    """Map validation interactions to dense indices of the training universe"""
    return [(graph.drug_index[v.drug], graph.protein_index[v.protein]) for v in validation]


def check_leakage(train: BipartiteGraph, pairs: Sequence[Tuple[int, int]]):
    if not pairs:
        return
    rows, cols = zip(*pairs)
    present = np.asarray(train.biadjacency[list(rows), list(cols)]).ravel() > 0
    leaked = int(np.count_nonzero(present))
    if leaked:
        raise LeakageDetected(leaked)


@dataclass
class FoldOutcome:
    """Curve plus the side facts run_experiment reports"""
    curve: PrCurve
    positives: int
    timings: Dict[str, float]


def run_fold(
    train: BipartiteGraph,
    validation: Sequence[Interaction],
    config: IndexConfig,
    max_n: int = DEFAULT_MAX_N,
    tie_policy: TiePolicy = TiePolicy.LEXICOGRAPHIC,
    seed: Optional[int] = None
) -> FoldOutcome:
    """Score, rank and evaluate one training graph against its held-out links"""
    pairs = validation_pairs(train, validation)
    check_leakage(train, pairs)

    timings = {}
    started = time.perf_counter()
    table = score_all(train, config)
    timings["score"] = time.perf_counter() - started

    started = time.perf_counter()
    ranked = rank(table, tie_policy, seed, top_n=max_n)
    positives = table.positive_count()
    # the sweep stops at the last positive-score prediction
    ranked = _truncate(ranked, min(max_n, positives))
    timings["rank"] = time.perf_counter() - started

    started = time.perf_counter()
    curve = precision_recall_at_ranks(ranked, pairs, max_n)
    timings["evaluate"] = time.perf_counter() - started

    return FoldOutcome(curve=curve, positives=positives, timings=timings)


def _truncate(ranked: RankedPredictions, length: int) -> RankedPredictions:
    return RankedPredictions(
        drug_index=ranked.drug_index[:length],
        protein_index=ranked.protein_index[:length],
        scores=ranked.scores[:length],
        tie_policy=ranked.tie_policy,
        seed=ranked.seed,
        drug_ids=ranked.drug_ids,
        protein_ids=ranked.protein_ids,
    )


def evaluate_fold(
    train: BipartiteGraph,
    validation: Sequence[Interaction],
    config: IndexConfig,
    max_n: int = DEFAULT_MAX_N,
    tie_policy: TiePolicy = TiePolicy.LEXICOGRAPHIC,
    seed: Optional[int] = None
) -> PrCurve:
    return run_fold(train, validation, config, max_n, tie_policy, seed).curve


def average_curves(curves: Sequence[PrCurve]) -> PrCurve:
    """
    Rank-aligned mean of precision and recall.

    A curve shorter than the longest carries its last point forward; an
    empty curve counts as precision = recall = 0. Values are sorted across
    curves before the mean so the result does not depend on fold order.
    """
    if not curves:
        raise NoCurves()

    length = max(len(c) for c in curves)
    max_n = max(c.max_n for c in curves)
    if length == 0:
        return PrCurve(np.zeros(0), np.zeros(0), max_n, Provenance.FOLD_AVERAGED)

    def _padded(values: np.ndarray) -> np.ndarray:
        if values.size == 0:
            return np.zeros(length)
        if values.size < length:
            return np.concatenate([values, np.full(length - values.size, values[-1])])
        return values

    precision = np.sort(np.stack([_padded(c.precision) for c in curves]), axis=0).mean(axis=0)
    recall = np.sort(np.stack([_padded(c.recall) for c in curves]), axis=0).mean(axis=0)

    short = [len(c) for c in curves if len(c) < length]
    if short:
        get_logger().info(
            "Carried short curves forward for averaging",
            effective_lengths=short,
            length=length,
            event="curve_padding"
        )
    return PrCurve(precision, recall, max_n, Provenance.FOLD_AVERAGED)


def aupr(curve: PrCurve) -> float:
    """
    Trapezoidal area under precision over recall.

    Points are sorted by recall and duplicate recalls collapsed to their
    mean precision. For ranked curves whose lowest recall is above zero
    the first precision is extended back to recall 0; external curves
    are integrated over the supplied points only.
    """
    if len(curve) == 0:
        raise EmptyCurve()

    recall, inverse = np.unique(curve.recall, return_inverse=True)
    precision = np.bincount(inverse, weights=curve.precision) / np.bincount(inverse)

    if recall.size == 1:
        get_logger().warning("AUPR of a single-recall curve is degenerate; reporting 0")
        return 0.0

    if recall[0] > 0 and curve.provenance is not Provenance.EXTERNAL:
        recall = np.concatenate(([0.0], recall))
        precision = np.concatenate(([precision[0]], precision))

    return float(min(max(auc(recall, precision), 0.0), 1.0))


# ----------------------------------------------------------- path lengths

@dataclass
class PathLengthHistogram:
    """Shortest training-graph path length to each validation link"""
    counts: Dict[Union[int, str], int]
    cold_start: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def fraction_at(self, length: int) -> float:
        total = self.total
        return self.counts.get(length, 0) / total if total else 0.0

    def ordered(self) -> List[Tuple[Union[int, str], int]]:
        lengths = sorted(k for k in self.counts if k != UNREACHABLE)
        items = [(k, self.counts[k]) for k in lengths]
        if UNREACHABLE in self.counts:
            items.append((UNREACHABLE, self.counts[UNREACHABLE]))
        return items


def path_length_analysis(train: BipartiteGraph, validation: Sequence[Interaction]) -> PathLengthHistogram:
    """Breadth-first distance from each validation drug to its protein"""
    pairs = validation_pairs(train, validation)
    check_leakage(train, pairs)
    if not pairs:
        return PathLengthHistogram(counts={})

    adjacency = to_unified_adjacency(train.as_unweighted())
    sources = sorted({drug for drug, _ in pairs})
    row_of = {drug: row for row, drug in enumerate(sources)}
    distances = csgraph.shortest_path(
        adjacency.matrix, method="D", directed=False, unweighted=True, indices=sources
    )

    drug_degree = train.degrees(Side.DRUG)
    protein_degree = train.degrees(Side.PROTEIN)
    counts: Dict[Union[int, str], int] = {}
    cold_start = 0
    for drug, protein in pairs:
        distance = distances[row_of[drug], train.n_drugs + protein]
        key: Union[int, str] = UNREACHABLE if np.isinf(distance) else int(distance)
        counts[key] = counts.get(key, 0) + 1
        if drug_degree[drug] == 0 or protein_degree[protein] == 0:
            cold_start += 1

    return PathLengthHistogram(counts=counts, cold_start=cold_start)


# -------------------------------------------------------- tie sensitivity

@dataclass(frozen=True)
class TieSensitivity:
    seeds: Tuple[int, ...]
    auprs: Tuple[float, ...]

    @property
    def spread(self) -> float:
        return max(self.auprs) - min(self.auprs)


def tie_sensitivity(
    train: BipartiteGraph,
    validation: Sequence[Interaction],
    config: IndexConfig,
    max_n: int,
    seeds: Sequence[int]
) -> TieSensitivity:
    """AUPR of one fold under several tie shuffles"""
    values = [
        aupr(evaluate_fold(train, validation, config, max_n, TiePolicy.SEEDED_SHUFFLE, seed))
        for seed in seeds
    ]
    return TieSensitivity(seeds=tuple(seeds), auprs=tuple(values))
