"""
Indices - Topology-only similarity indices for bipartite graphs
Common Neighbours (set and path-count forms), Jaccard, Preferential Attachment
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from core.config import CnVariant, IndexConfig, IndexKind
from core.errors import ObservedPair
from core.graph import BipartiteGraph, Side

# Drug rows per scoring chunk; fixed so results do not depend on worker count
ROW_CHUNK = 256


@dataclass
class ScoreTable:
    """Scores for every non-observed (drug, protein) pair, in row-major order"""
    config: IndexConfig
    drug_index: np.ndarray
    protein_index: np.ndarray
    scores: np.ndarray
    fingerprint: str
    drug_ids: Tuple[str, ...] = field(repr=False)
    protein_ids: Tuple[str, ...] = field(repr=False)

    def __len__(self) -> int:
        return int(self.scores.size)

    def get(self, drug: int, protein: int) -> float:
        n_proteins = len(self.protein_ids)
        keys = self.drug_index * n_proteins + self.protein_index
        pos = np.searchsorted(keys, drug * n_proteins + protein)
        if pos < keys.size and keys[pos] == drug * n_proteins + protein:
            return float(self.scores[pos])
        raise KeyError((drug, protein))

    def as_dict(self) -> Dict[Tuple[int, int], float]:
        return {
            (int(i), int(j)): float(s)
            for i, j, s in zip(self.drug_index, self.protein_index, self.scores)
        }

    def positive_count(self) -> int:
        return int(np.count_nonzero(self.scores > 0))


class IndexKernel:
    """
    Precomputed right-hand factors for one (graph, config).

    `rows(r)` returns the dense score block for drug rows `r` against all
    proteins. An output row depends only on its own input row, so any
    partition of rows gives bit-identical results.
    """

    def __init__(self, graph: BipartiteGraph, config: IndexConfig):
        if config.kind == IndexKind.KATZ:
            raise ValueError("the Katz index is computed by core.katz")
        self.graph = graph
        self.config = config

        self.Bb = graph.binary()
        self.W = graph.biadjacency
        kind = config.kind
        weighted = config.weighted

        self._path_factors = None
        self._hat = None

        needs_paths = (
            (kind == IndexKind.CN and config.cn_variant == CnVariant.PATH_COUNT)
            or (kind == IndexKind.JACCARD and weighted)
        )
        needs_hat = (
            (kind == IndexKind.CN and config.cn_variant == CnVariant.SET_CARDINALITY)
            or kind == IndexKind.JACCARD
        )

        if needs_paths or needs_hat:
            # protein x protein: proteins sharing a drug
            M = (self.Bb.T @ self.Bb).tocsr()
        if needs_paths:
            if weighted:
                self._path_factors = (
                    M.astype(np.float64),
                    (self.W.T @ self.Bb).tocsr().astype(np.float64),
                    (self.Bb.T @ self.W).tocsr(),
                )
            else:
                self._path_factors = (M,)
        if needs_hat:
            hat = M.copy()
            hat.data = (hat.data > 0).astype(np.int64)
            hat.eliminate_zeros()
            self._hat = hat
            # |second neighbourhood| of every protein
            self._hat_size = np.diff(hat.tocsc().indptr).astype(np.int64)

        if kind == IndexKind.PA:
            if weighted:
                self._pa = (graph.weighted_degrees(Side.DRUG), graph.weighted_degrees(Side.PROTEIN))
            else:
                self._pa = (
                    graph.degrees(Side.DRUG).astype(np.float64),
                    graph.degrees(Side.PROTEIN).astype(np.float64),
                )

    # ------------------------------------------------------------ blocks

    def _paths(self, rows: np.ndarray) -> np.ndarray:
        if len(self._path_factors) == 1:
            (M,) = self._path_factors
            return (self.Bb[rows] @ M).toarray().astype(np.float64)
        M, WtB, BtW = self._path_factors
        first = (self.W[rows] @ M).toarray()
        second = (self.Bb[rows].astype(np.float64) @ WtB).toarray()
        third = (self.Bb[rows].astype(np.float64) @ BtW).toarray()
        return (first + second) + third

    def _intersection(self, rows: np.ndarray) -> np.ndarray:
        return (self.Bb[rows] @ self._hat).toarray()

    def rows(self, rows: Sequence[int]) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        kind = self.config.kind

        if kind == IndexKind.PA:
            drug_side, protein_side = self._pa
            return np.outer(drug_side[rows], protein_side)

        if kind == IndexKind.CN:
            if self.config.cn_variant == CnVariant.PATH_COUNT:
                return self._paths(rows)
            return self._intersection(rows).astype(np.float64)

        # Jaccard
        inter = self._intersection(rows)
        degree = self.graph.degrees(Side.DRUG)[rows]
        union = degree[:, None] + self._hat_size[None, :] - inter
        numerator = self._paths(rows) if self.config.weighted else inter.astype(np.float64)
        out = np.zeros(union.shape, dtype=np.float64)
        np.divide(numerator, union, out=out, where=union > 0)
        return out


def build_kernel(graph: BipartiteGraph, config: IndexConfig) -> IndexKernel:
    return IndexKernel(graph, config)


def _pair_score(
    graph: BipartiteGraph,
    drug: int,
    protein: int,
    config: IndexConfig,
    allow_observed: bool
) -> float:
    graph.degree(Side.DRUG, drug)
    graph.degree(Side.PROTEIN, protein)
    if not allow_observed and graph.has_edge(drug, protein):
        raise ObservedPair(drug, protein)
    kernel = build_kernel(graph, config)
    return float(kernel.rows([drug])[0, protein])


def cn_score(
    graph: BipartiteGraph,
    drug: int,
    protein: int,
    variant: CnVariant = CnVariant.PATH_COUNT,
    weighted: bool = False
) -> float:
    """Common Neighbours score of one candidate pair"""
    config = IndexConfig(IndexKind.CN, cn_variant=variant, weighted=weighted)
    return _pair_score(graph, drug, protein, config, allow_observed=False)


def jaccard_score(graph: BipartiteGraph, drug: int, protein: int, weighted: bool = False) -> float:
    """Jaccard score; the weighted form divides the weighted path sum by the unweighted union"""
    config = IndexConfig(IndexKind.JACCARD, weighted=weighted)
    return _pair_score(graph, drug, protein, config, allow_observed=False)


def pa_score(graph: BipartiteGraph, drug: int, protein: int, weighted: bool = False) -> float:
    """Preferential attachment; defined for observed pairs too"""
    config = IndexConfig(IndexKind.PA, weighted=weighted)
    return _pair_score(graph, drug, protein, config, allow_observed=True)


def candidate_table(
    graph: BipartiteGraph,
    config: IndexConfig,
    blocks: Sequence[Tuple[np.ndarray, np.ndarray]]
) -> ScoreTable:
    """Assemble a ScoreTable from (rows, dense block) pairs given in row order"""
    drug_parts, protein_parts, score_parts = [], [], []
    B = graph.biadjacency
    for rows, block in blocks:
        observed = B[rows].toarray() > 0
        local_row, protein = np.nonzero(~observed)
        drug_parts.append(rows[local_row])
        protein_parts.append(protein)
        score_parts.append(np.maximum(block[local_row, protein], 0.0))

    def _cat(parts, dtype):
        return np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype=dtype)

    return ScoreTable(
        config=config,
        drug_index=_cat(drug_parts, np.int64),
        protein_index=_cat(protein_parts, np.int64),
        scores=_cat(score_parts, np.float64),
        fingerprint=graph.fingerprint(),
        drug_ids=graph.drug_ids,
        protein_ids=graph.protein_ids,
    )


def score_all(graph: BipartiteGraph, config: IndexConfig, threads: int = 1) -> ScoreTable:
    """Score every non-observed pair of the graph under one config"""
    if config.kind == IndexKind.KATZ:
        from core.katz import katz_scores
        return katz_scores(
            graph,
            config.beta,
            method=config.resolve_katz_method(graph.n_nodes),
            series_tol=config.series_tol,
            series_max_terms=config.series_max_terms,
            weighted=config.weighted,
            config=config,
        )

    kernel = build_kernel(graph, config)
    chunks = [
        np.arange(start, min(start + ROW_CHUNK, graph.n_drugs), dtype=np.int64)
        for start in range(0, graph.n_drugs, ROW_CHUNK)
    ]

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            blocks = list(executor.map(kernel.rows, chunks))
    else:
        blocks = [kernel.rows(rows) for rows in chunks]

    return candidate_table(graph, config, list(zip(chunks, blocks)))
