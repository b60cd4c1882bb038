"""
Graph - Immutable bipartite drug-target network
Biadjacency matrix, neighbourhoods and the unified square adjacency
"""
import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from core.config import DedupRule
from core.errors import (
    AdjacencyTooLarge,
    EmptyDataset,
    InvalidNode,
    InvalidWeight,
    SpectralEstimateFailed,
)
from utils.logger import get_logger


class Side(Enum):
    DRUG = "drug"
    PROTEIN = "protein"

    @property
    def opposite(self) -> "Side":
        return Side.PROTEIN if self is Side.DRUG else Side.DRUG


@dataclass(frozen=True)
class Interaction:
    """One drug-target interaction with its confidence weight"""
    drug: str
    protein: str
    weight: float = 1.0

    @property
    def key(self) -> Tuple[str, str]:
        return (self.drug, self.protein)


class BipartiteGraph:
    """
    Weighted bipartite graph over interned drug and protein ids.

    The biadjacency matrix is held twice, row-compressed for drug
    neighbourhoods and column-compressed for protein neighbourhoods.
    Neither is ever mutated after construction.
    """

    def __init__(
        self,
        drug_ids: Sequence[str],
        protein_ids: Sequence[str],
        biadjacency: sp.spmatrix,
        weighted: bool
    ):
        self.drug_ids: Tuple[str, ...] = tuple(drug_ids)
        self.protein_ids: Tuple[str, ...] = tuple(protein_ids)
        self.weighted = weighted

        csr = sp.csr_matrix(biadjacency, dtype=np.float64, copy=True)
        csr.eliminate_zeros()
        csr.sort_indices()
        csc = csr.tocsc()
        csc.sort_indices()
        self._csr = csr
        self._csc = csc

        self.drug_index: Dict[str, int] = {d: i for i, d in enumerate(self.drug_ids)}
        self.protein_index: Dict[str, int] = {p: j for j, p in enumerate(self.protein_ids)}

        self._degrees = {
            Side.DRUG: np.diff(csr.indptr).astype(np.int64),
            Side.PROTEIN: np.diff(csc.indptr).astype(np.int64),
        }
        self._weighted_degrees = {
            Side.DRUG: np.asarray(csr.sum(axis=1)).ravel(),
            Side.PROTEIN: np.asarray(csc.sum(axis=0)).ravel(),
        }
        self._fingerprint: Optional[str] = None

    # ------------------------------------------------------------ shape

    @property
    def n_drugs(self) -> int:
        return len(self.drug_ids)

    @property
    def n_proteins(self) -> int:
        return len(self.protein_ids)

    @property
    def n_nodes(self) -> int:
        return self.n_drugs + self.n_proteins

    @property
    def n_edges(self) -> int:
        return int(self._csr.nnz)

    @property
    def biadjacency(self) -> sp.csr_matrix:
        """Read-only CSR biadjacency (n_drugs x n_proteins)"""
        return self._csr

    def binary(self) -> sp.csr_matrix:
        """Integer 0/1 copy of the biadjacency"""
        return sp.csr_matrix(
            (np.ones(self._csr.nnz, dtype=np.int64), self._csr.indices.copy(), self._csr.indptr.copy()),
            shape=self._csr.shape
        )

    def size(self, side: Side) -> int:
        return self.n_drugs if side is Side.DRUG else self.n_proteins

    def _check(self, side: Side, index: int):
        size = self.size(side)
        if not 0 <= index < size:
            raise InvalidNode(side.value, index, size)

    # ---------------------------------------------------- neighbourhoods

    def adjacency_list(self, side: Side, index: int) -> List[Tuple[int, float]]:
        """Sorted (neighbour, weight) list of a node"""
        self._check(side, index)
        matrix = self._csr if side is Side.DRUG else self._csc
        start, end = matrix.indptr[index], matrix.indptr[index + 1]
        return list(zip(matrix.indices[start:end].tolist(), matrix.data[start:end].tolist()))

    def neighbors(self, side: Side, index: int) -> List[int]:
        """Opposite-side nodes joined to this node, ascending"""
        self._check(side, index)
        matrix = self._csr if side is Side.DRUG else self._csc
        return matrix.indices[matrix.indptr[index]:matrix.indptr[index + 1]].tolist()

    def second_neighborhood(self, side: Side, index: int) -> List[int]:
        """Union of the neighbour sets of every neighbour (same side as the node)"""
        reached = set()
        for neighbour in self.neighbors(side, index):
            reached.update(self.neighbors(side.opposite, neighbour))
        return sorted(reached)

    def degree(self, side: Side, index: int) -> int:
        self._check(side, index)
        return int(self._degrees[side][index])

    def weighted_degree(self, side: Side, index: int) -> float:
        self._check(side, index)
        return float(self._weighted_degrees[side][index])

    def degrees(self, side: Side) -> np.ndarray:
        return self._degrees[side]

    def weighted_degrees(self, side: Side) -> np.ndarray:
        return self._weighted_degrees[side]

    def has_edge(self, drug: int, protein: int) -> bool:
        self._check(Side.DRUG, drug)
        self._check(Side.PROTEIN, protein)
        return self._csr[drug, protein] > 0

    # ------------------------------------------------------ derivations

    def interactions(self) -> List[Interaction]:
        """Stored edges in (drug index, protein index) order"""
        coo = self._csr.tocoo()
        return [
            Interaction(self.drug_ids[i], self.protein_ids[j], float(w))
            for i, j, w in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())
        ]

    def as_unweighted(self) -> "BipartiteGraph":
        if not self.weighted:
            return self
        return BipartiteGraph(self.drug_ids, self.protein_ids, self.binary(), weighted=False)

    def without_edges(self, pairs: Iterable[Tuple[int, int]]) -> "BipartiteGraph":
        """Copy over the same node universe with the given pairs removed"""
        rows, cols = [], []
        for drug, protein in pairs:
            self._check(Side.DRUG, drug)
            self._check(Side.PROTEIN, protein)
            rows.append(drug)
            cols.append(protein)
        mask = sp.csr_matrix(
            (np.ones(len(rows)), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=self._csr.shape
        )
        mask.data[:] = 1.0
        kept = self._csr - self._csr.multiply(mask)
        result = BipartiteGraph(self.drug_ids, self.protein_ids, kept, self.weighted)
        missing = len(set(zip(rows, cols))) - (self.n_edges - result.n_edges)
        if missing:
            get_logger().debug("Pairs to remove were not edges", missing=missing)
        return result

    def fingerprint(self) -> str:
        """sha256 over ids and CSR arrays"""
        if self._fingerprint is None:
            digest = hashlib.sha256()
            for ids in (self.drug_ids, self.protein_ids):
                digest.update("\x1f".join(ids).encode("utf-8"))
                digest.update(b"\x1e")
            for array in (self._csr.indptr, self._csr.indices, self._csr.data):
                digest.update(np.ascontiguousarray(array, dtype=np.float64).tobytes())
            self._fingerprint = digest.hexdigest()
        return self._fingerprint

    def __repr__(self):
        return (
            f"BipartiteGraph(drugs={self.n_drugs}, proteins={self.n_proteins}, "
            f"edges={self.n_edges}, weighted={self.weighted})"
        )


def build_graph(
    interactions: Sequence[Interaction],
    weighted: bool = False,
    dedup: DedupRule = DedupRule.SUM,
    drug_ids: Optional[Sequence[str]] = None,
    protein_ids: Optional[Sequence[str]] = None
) -> BipartiteGraph:
    """
    Build a graph from interactions.

    Dense indices follow first appearance; `drug_ids` / `protein_ids`
    fix (and may extend) the node universe, new ids are appended.
    Unweighted graphs keep presence only; weighted graphs merge
    duplicates with the dedup rule.
    """
    if not interactions:
        raise EmptyDataset()

    drug_index: Dict[str, int] = {d: i for i, d in enumerate(drug_ids or [])}
    protein_index: Dict[str, int] = {p: j for j, p in enumerate(protein_ids or [])}
    merged: Dict[Tuple[int, int], float] = {}

    for row, item in enumerate(interactions):
        if not (math.isfinite(item.weight) and item.weight > 0):
            raise InvalidWeight(row, item.weight)
        i = drug_index.setdefault(item.drug, len(drug_index))
        j = protein_index.setdefault(item.protein, len(protein_index))
        weight = float(item.weight) if weighted else 1.0
        key = (i, j)
        if key not in merged:
            merged[key] = weight
        elif weighted:
            if dedup is DedupRule.SUM:
                merged[key] += weight
            elif dedup is DedupRule.MAX:
                merged[key] = max(merged[key], weight)

    rows = np.fromiter((k[0] for k in merged), dtype=np.int64, count=len(merged))
    cols = np.fromiter((k[1] for k in merged), dtype=np.int64, count=len(merged))
    data = np.fromiter(merged.values(), dtype=np.float64, count=len(merged))
    matrix = sp.csr_matrix((data, (rows, cols)), shape=(len(drug_index), len(protein_index)))

    return BipartiteGraph(list(drug_index), list(protein_index), matrix, weighted)


@dataclass(frozen=True)
class UnifiedAdjacency:
    """Square symmetric adjacency [[0, B], [B^T, 0]]; drugs first, then proteins"""
    n_drugs: int
    n_proteins: int
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.n_drugs + self.n_proteins

    def dense(self) -> np.ndarray:
        try:
            return self.matrix.toarray()
        except MemoryError as exc:
            raise AdjacencyTooLarge(
                f"dense {self.dimension}x{self.dimension} adjacency does not fit in memory"
            ) from exc

    def upper_block(self) -> sp.csr_matrix:
        """The drug x protein block, i.e. B"""
        return self.matrix[:self.n_drugs, self.n_drugs:].tocsr()


def to_unified_adjacency(graph: BipartiteGraph) -> UnifiedAdjacency:
    B = graph.biadjacency
    matrix = sp.bmat([[None, B], [B.T, None]], format="csr")
    # bmat drops the shape of empty blocks on degenerate graphs
    matrix = sp.csr_matrix(matrix, shape=(graph.n_nodes, graph.n_nodes))
    matrix.sort_indices()
    return UnifiedAdjacency(graph.n_drugs, graph.n_proteins, matrix)


def spectral_radius(
    adjacency: UnifiedAdjacency,
    tol: float = 1e-9,
    max_iter: int = 10000
) -> float:
    """
    Largest eigenvalue of the unified adjacency by power iteration.

    A bipartite A has eigenvalues in +/- pairs, so iterating A itself
    oscillates; we iterate A^2 (dominant eigenvalue lambda_max^2) and
    stop when the residual ||A^2 x - mu x|| or the change of the Rayleigh
    quotient mu falls below tol * mu.
    """
    A = adjacency.matrix
    n = adjacency.dimension
    if n == 0 or A.nnz == 0:
        return 0.0

    x = np.ones(n) / np.sqrt(n)
    mu = 0.0
    for _ in range(max_iter):
        y = A @ (A @ x)
        y_norm = np.linalg.norm(y)
        if y_norm == 0:
            return 0.0
        previous, mu = mu, float(x @ y)
        residual = np.linalg.norm(y - mu * x)
        x = y / y_norm
        if residual <= tol * mu or abs(mu - previous) <= tol * mu:
            return float(np.sqrt(mu))

    raise SpectralEstimateFailed(float(np.sqrt(max(mu, 0.0))), max_iter)


@dataclass(frozen=True)
class ComponentSummary:
    count: int
    sizes: Tuple[int, ...]
    isolated_drugs: int
    isolated_proteins: int


def connected_components(graph: BipartiteGraph) -> ComponentSummary:
    """Split of the network into disjoint sub-networks"""
    adjacency = to_unified_adjacency(graph)
    count, labels = csgraph.connected_components(adjacency.matrix, directed=False)
    sizes = np.bincount(labels, minlength=count)
    return ComponentSummary(
        count=int(count),
        sizes=tuple(sorted(sizes.tolist(), reverse=True)),
        isolated_drugs=int(np.count_nonzero(graph.degrees(Side.DRUG) == 0)),
        isolated_proteins=int(np.count_nonzero(graph.degrees(Side.PROTEIN) == 0)),
    )
