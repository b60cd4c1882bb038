"""
Katz - Damped sum over all walks between a drug and a protein
Direct solve of (I - beta*A) X = beta*A, or the truncated power series
"""
from typing import Optional

import numpy as np
import scipy.linalg

from core.config import BETA_MARGIN, IndexConfig, IndexKind, KatzMethod
from core.errors import BetaTooLarge, SolveFailed
from core.graph import BipartiteGraph, UnifiedAdjacency, spectral_radius, to_unified_adjacency
from core.indices import ScoreTable, candidate_table
from utils.logger import get_logger


def beta_limit(adjacency: UnifiedAdjacency) -> float:
    """Largest accepted beta (exclusive); inf for an edgeless graph"""
    lam = spectral_radius(adjacency)
    return float("inf") if lam == 0 else BETA_MARGIN / lam


def series_tail_bound(beta: float, lam: float, terms: int) -> float:
    """Element-wise bound on the Katz terms beyond `terms`"""
    ratio = beta * lam
    return ratio ** (terms + 1) / (1.0 - ratio)


def _direct_block(adjacency: UnifiedAdjacency, beta: float) -> np.ndarray:
    n_drugs = adjacency.n_drugs
    A = adjacency.dense()
    system = np.eye(adjacency.dimension) - beta * A
    # only the protein columns of S = (I - beta*A)^-1 beta*A are needed
    rhs = beta * A[:, n_drugs:]
    try:
        solution = scipy.linalg.solve(system, rhs, assume_a="pos")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolveFailed(f"Katz direct solve failed: {exc}") from exc
    return solution[:n_drugs]


def _series_block(
    adjacency: UnifiedAdjacency,
    beta: float,
    tol: float,
    max_terms: int
) -> np.ndarray:
    n_drugs = adjacency.n_drugs
    A = adjacency.matrix
    term = beta * A[:, n_drugs:].toarray()
    total = term[:n_drugs].copy()
    used = 1
    while used < max_terms and np.abs(term).max(initial=0.0) >= tol:
        term = beta * (A @ term)
        total += term[:n_drugs]
        used += 1
    if np.abs(term).max(initial=0.0) >= tol:
        get_logger().warning("Katz series stopped before convergence", terms=used, beta=beta)
    else:
        get_logger().debug("Katz series finished", terms=used, beta=beta)
    return total


def katz_scores(
    graph: BipartiteGraph,
    beta: float,
    method: KatzMethod = KatzMethod.DIRECT_SOLVE,
    series_tol: float = 1e-12,
    series_max_terms: int = 50,
    weighted: bool = False,
    config: Optional[IndexConfig] = None
) -> ScoreTable:
    """Katz scores of all non-observed pairs"""
    if config is None:
        config = IndexConfig(
            IndexKind.KATZ,
            weighted=weighted,
            beta=beta,
            katz_method=method,
            series_tol=series_tol,
            series_max_terms=series_max_terms,
        )
    source = graph if weighted else graph.as_unweighted()
    adjacency = to_unified_adjacency(source)

    limit = beta_limit(adjacency)
    if not 0 < beta < limit:
        raise BetaTooLarge(beta, limit)

    if method == KatzMethod.DIRECT_SOLVE:
        block = _direct_block(adjacency, beta)
    else:
        block = _series_block(adjacency, beta, series_tol, series_max_terms)

    rows = np.arange(graph.n_drugs, dtype=np.int64)
    return candidate_table(graph, config, [(rows, block)])
