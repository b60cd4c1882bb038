"""
Config - Index configuration and seed derivation
Describes which similarity index to run and how
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from core.errors import ConfigError


class IndexKind(Enum):
    """Available similarity indices"""
    CN = "cn"
    JACCARD = "jaccard"
    PA = "pa"
    KATZ = "katz"


class CnVariant(Enum):
    SET_CARDINALITY = "set"
    PATH_COUNT = "path"


class KatzMethod(Enum):
    DIRECT_SOLVE = "direct"
    TRUNCATED_SERIES = "series"


class DedupRule(Enum):
    """How duplicate (drug, protein) rows are merged in weighted mode"""
    SUM = "sum"
    MAX = "max"
    FIRST = "first"


# Above this many nodes the Katz index uses the truncated series by default
DIRECT_SOLVE_NODE_LIMIT = 5000

# Fraction of 1/lambda_max that beta may not reach
BETA_MARGIN = 0.95


@dataclass(frozen=True)
class IndexConfig:
    """Which index to compute and with which parameters"""
    kind: IndexKind
    cn_variant: CnVariant = CnVariant.PATH_COUNT
    weighted: bool = False
    beta: Optional[float] = None
    katz_method: Optional[KatzMethod] = None  # None = choose by graph size
    series_tol: float = 1e-12
    series_max_terms: int = 50

    def __post_init__(self):
        self.validate()

    def validate(self):
        """Reject invalid combinations before any computation"""
        if self.kind == IndexKind.KATZ:
            if self.beta is None:
                raise ConfigError("the Katz index requires --beta")
            if not self.beta > 0:
                raise ConfigError(f"beta must be positive, got {self.beta}")
        elif self.beta is not None:
            raise ConfigError(f"--beta only applies to the Katz index, not {self.kind.value}")
        if not self.series_tol > 0:
            raise ConfigError("series tolerance must be positive")
        if self.series_max_terms < 3:
            raise ConfigError("the Katz series needs at least 3 terms")

    @property
    def label(self) -> str:
        """Short stable name used in file names and reports"""
        if self.kind == IndexKind.CN:
            name = f"cn-{self.cn_variant.value}"
        elif self.kind == IndexKind.KATZ:
            name = f"katz-{self.beta:g}"
        else:
            name = self.kind.value
        return f"{name}-w" if self.weighted else name

    def resolve_katz_method(self, n_nodes: int) -> KatzMethod:
        if self.katz_method is not None:
            return self.katz_method
        if n_nodes <= DIRECT_SOLVE_NODE_LIMIT:
            return KatzMethod.DIRECT_SOLVE
        return KatzMethod.TRUNCATED_SERIES

    def with_beta(self, beta: float) -> "IndexConfig":
        return replace(self, beta=beta)

    def summary(self) -> dict:
        data = {"index": self.kind.value, "weighted": self.weighted}
        if self.kind == IndexKind.CN:
            data["cn_variant"] = self.cn_variant.value
        if self.kind == IndexKind.KATZ:
            data["beta"] = self.beta
            if self.katz_method is not None:
                data["katz_method"] = self.katz_method.value
        return data


# Seed streams
FOLD_STREAM = 0
TIE_STREAM = 1


def derive_seed(master: int, stream: int, *keys: int) -> int:
    """Derive a 32-bit sub-seed from the master seed.

    The derivation is SeedSequence(master, spawn_key=(stream, *keys)), first
    word of generate_state. Stream 0 seeds the fold split, stream 1 seeds the
    tie shuffle of (fold, repeat).
    """
    sequence = np.random.SeedSequence(master, spawn_key=(stream, *keys))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
