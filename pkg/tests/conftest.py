"""
Pytest configuration and shared fixtures
"""
import pytest
import tempfile
import shutil
from pathlib import Path

import numpy as np

from core.graph import Interaction, build_graph
from tests.reference_oracle import OracleGraph, random_oracle_graph


@pytest.fixture
def temp_dir():
    """Create a temporary directory for output files"""
    temp = tempfile.mkdtemp(prefix="dtilink_test_")
    yield Path(temp)
    # Cleanup
    shutil.rmtree(temp, ignore_errors=True)


@pytest.fixture(autouse=True)
def reset_singletons(tmp_path_factory, monkeypatch):
    """Reset the logger singleton and keep log files out of the working tree"""
    from utils.logger import reset_logger
    monkeypatch.setenv("DTILINK_LOG_DIR", str(tmp_path_factory.mktemp("logs")))
    reset_logger()
    yield
    reset_logger()


@pytest.fixture
def toy_interactions():
    """The three-edge graph d1-p1, d2-p1, d2-p2"""
    return [Interaction("d1", "p1"), Interaction("d2", "p1"), Interaction("d2", "p2")]


@pytest.fixture
def toy_graph(toy_interactions):
    return build_graph(toy_interactions)


@pytest.fixture
def k33_minus_edge():
    """Complete bipartite K3,3 without (d1, p1)"""
    items = [
        Interaction(f"d{i}", f"p{j}")
        for i in range(1, 4)
        for j in range(1, 4)
        if (i, j) != (1, 1)
    ]
    return build_graph(items, drug_ids=["d1", "d2", "d3"], protein_ids=["p1", "p2", "p3"])


@pytest.fixture
def oracle_pair():
    """Factory: random oracle graph plus the matching BipartiteGraph"""

    def make(rng: np.random.Generator, weighted: bool = False, max_side: int = 12):
        oracle = random_oracle_graph(rng, weighted=weighted, max_side=max_side)
        graph = build_graph(
            oracle.interactions(),
            weighted=weighted,
            drug_ids=oracle.drug_names(),
            protein_ids=oracle.protein_names(),
        )
        return oracle, graph

    return make


@pytest.fixture
def small_dataset():
    """Two dense communities joined by a bridge; enough edges for 5 folds"""
    rng = np.random.default_rng(7)
    items = []
    for block in range(2):
        for d in range(6):
            for p in range(5):
                if rng.random() < 0.6:
                    items.append(Interaction(f"D{block}{d}", f"P{block}{p}", float(rng.integers(1, 4))))
    items.append(Interaction("D00", "P10", 1.0))
    return items
