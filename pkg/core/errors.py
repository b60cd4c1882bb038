"""
Errors - Exception hierarchy for dtilink
Every library error carries the exit code the CLI reports for it
"""
from typing import List, Optional


class DtiLinkError(Exception):
    """Base class for all dtilink errors"""

    exit_code = 3


# ---------------------------------------------------------------- usage (1)

class UsageError(DtiLinkError):
    """Invalid flags or flag combinations"""

    exit_code = 1


class ConfigError(UsageError):
    """Invalid index or experiment configuration"""


# ----------------------------------------------------------------- data (2)

class DataError(DtiLinkError):
    """Problems with the input dataset"""

    exit_code = 2


class EmptyDataset(DataError):
    def __init__(self, message: str = "dataset contains no interactions"):
        super().__init__(message)


class InvalidWeight(DataError):
    def __init__(self, row: int, weight: float):
        self.row = row
        self.weight = weight
        super().__init__(f"row {row}: interaction weight must be finite and positive, got {weight!r}")


class SchemaError(DataError):
    """A mapped column is missing from the header"""


class ParseError(DataError):
    def __init__(self, summary: str, skipped: Optional[List] = None):
        self.skipped = skipped or []
        super().__init__(summary)


class TooManyFolds(DataError):
    def __init__(self, k: int, n: int):
        self.k = k
        self.n = n
        super().__init__(f"cannot split {n} interactions into {k} folds")


# ---------------------------------------------------------- computation (3)

class ComputationError(DtiLinkError):
    """Failures while scoring, ranking or evaluating"""

    exit_code = 3


class InvalidNode(ComputationError):
    def __init__(self, side: str, index: int, size: int):
        self.side = side
        self.index = index
        super().__init__(f"{side} index {index} out of range 0..{size - 1}")


class ObservedPair(ComputationError):
    def __init__(self, drug: int, protein: int):
        self.drug = drug
        self.protein = protein
        super().__init__(f"pair (drug {drug}, protein {protein}) is already an observed interaction")


class SpectralEstimateFailed(ComputationError):
    def __init__(self, estimate: float, iterations: int):
        self.estimate = estimate
        self.iterations = iterations
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(best estimate {estimate:.6g})"
        )


class BetaTooLarge(ComputationError):
    def __init__(self, beta: float, limit: float):
        self.beta = beta
        self.limit = limit
        super().__init__(f"beta={beta:g} is not below the convergence limit {limit:.6g}")


class SolveFailed(ComputationError):
    """The Katz linear system could not be solved"""


class AdjacencyTooLarge(ComputationError):
    """Dense unified adjacency does not fit in memory"""


class LeakageDetected(ComputationError):
    def __init__(self, pairs: int):
        self.pairs = pairs
        super().__init__(f"{pairs} validation pair(s) are present in the training graph")


class EmptyScores(ComputationError):
    def __init__(self, message: str = "score table has no candidate pairs"):
        super().__init__(message)


class NoCurves(ComputationError):
    def __init__(self):
        super().__init__("no precision-recall curves to average")


class EmptyCurve(ComputationError):
    def __init__(self):
        super().__init__("precision-recall curve has no points")
