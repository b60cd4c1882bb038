"""
Experiment - Cross-validated comparison of similarity indices
Coordinates split -> score -> rank -> evaluate -> average -> AUPR for every config
"""
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn

from core.config import FOLD_STREAM, TIE_STREAM, DedupRule, IndexConfig, derive_seed
from core.errors import DtiLinkError
from core.evaluation import (
    DEFAULT_MAX_N,
    FoldAssignment,
    FoldOutcome,
    PrCurve,
    aupr,
    average_curves,
    run_fold,
    split_folds,
    validation_pairs,
)
from core.graph import BipartiteGraph, Interaction, build_graph
from core.ranking import TiePolicy
from utils.logger import get_logger

console = Console()

STAGES = ("build", "split", "score", "rank", "evaluate", "average")


@dataclass
class ConfigResult:
    """Outcome of one index configuration across all folds"""
    config: IndexConfig
    curve: Optional[PrCurve] = None
    aupr: Optional[float] = None
    fold_auprs: List[Optional[float]] = field(default_factory=list)
    positives: List[Optional[int]] = field(default_factory=list)
    effective_lengths: List[Optional[int]] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    tie_auprs: Optional[List[float]] = None

    @property
    def label(self) -> str:
        return self.config.label

    @property
    def succeeded(self) -> bool:
        return self.aupr is not None and not self.failures


@dataclass
class BaselineResult:
    curve: PrCurve
    aupr: float
    name: str = "baseline"


@dataclass
class ExperimentReport:
    seed: int
    k: int
    max_n: int
    tie_policy: TiePolicy
    fold_seed: int
    fold_sizes: List[int]
    n_drugs: int
    n_proteins: int
    n_interactions: int
    results: List[ConfigResult]
    baseline: Optional[BaselineResult] = None
    timings: Dict[str, float] = field(default_factory=dict)
    total_seconds: float = 0.0
    folds: Optional[FoldAssignment] = field(default=None, repr=False)

    @property
    def success(self) -> bool:
        return all(r.succeeded for r in self.results)

    def result(self, label: str) -> ConfigResult:
        for item in self.results:
            if item.label == label:
                return item
        raise KeyError(label)


@dataclass
class _FoldTask:
    fold: int
    train: BipartiteGraph
    validation: List[Interaction]


def fold_graphs(full: BipartiteGraph, folds: FoldAssignment, fold: int) -> _FoldTask:
    """Training graph (full node universe) and held-out links of one fold"""
    validation = folds.fold(fold)
    train = full.without_edges(validation_pairs(full, validation))
    return _FoldTask(fold=fold, train=train, validation=validation)


class ExperimentRunner:
    """Runs every (fold, config, repeat) cell and assembles the report"""

    def __init__(
        self,
        configs: Sequence[IndexConfig],
        k: int = 10,
        seed: int = 0,
        max_n: int = DEFAULT_MAX_N,
        tie_policy: TiePolicy = TiePolicy.LEXICOGRAPHIC,
        dedup: DedupRule = DedupRule.SUM,
        tie_repeats: int = 1,
        threads: int = 1,
        show_progress: bool = False
    ):
        self.configs = list(configs)
        self.k = k
        self.seed = seed
        self.max_n = max_n
        self.tie_policy = tie_policy
        self.dedup = dedup
        self.tie_repeats = max(1, tie_repeats) if tie_policy == TiePolicy.SEEDED_SHUFFLE else 1
        self.threads = max(1, threads)
        self.show_progress = show_progress
        self.logger = get_logger()
        self.timings: Dict[str, float] = {stage: 0.0 for stage in STAGES}

    def _tie_seed(self, fold: int, repeat: int) -> Optional[int]:
        if self.tie_policy != TiePolicy.SEEDED_SHUFFLE:
            return None
        return derive_seed(self.seed, TIE_STREAM, fold, repeat)

    def _run_cells(self, task: _FoldTask) -> Dict[tuple, object]:
        """All (config, repeat) cells of one fold; failures are returned, not raised"""
        cells: Dict[tuple, object] = {}
        for c, config in enumerate(self.configs):
            for repeat in range(self.tie_repeats):
                started = time.perf_counter()
                try:
                    outcome = run_fold(
                        task.train, task.validation, config,
                        self.max_n, self.tie_policy, self._tie_seed(task.fold, repeat)
                    )
                    cells[(c, repeat)] = outcome
                    self.logger.fold_complete(
                        task.fold, config.label, positives=outcome.positives,
                        duration=time.perf_counter() - started
                    )
                except DtiLinkError as exc:
                    cells[(c, repeat)] = exc
                    self.logger.error(
                        f"Fold {task.fold} failed for {config.label}: {exc}",
                        fold=task.fold, config=config.label
                    )
        return cells

    def _stage(self, name: str, started: float):
        duration = time.perf_counter() - started
        self.timings[name] += duration
        self.logger.stage_complete(name, duration)

    def run(self, dataset: Sequence[Interaction], baseline_curve: Optional[PrCurve] = None) -> ExperimentReport:
        run_started = time.perf_counter()
        self.logger.experiment_start([c.label for c in self.configs], self.k, self.seed)

        started = time.perf_counter()
        full = build_graph(dataset, weighted=True, dedup=self.dedup)
        self._stage("build", started)

        started = time.perf_counter()
        fold_seed = derive_seed(self.seed, FOLD_STREAM)
        folds = split_folds(full.interactions(), self.k, fold_seed)
        self._stage("split", started)

        cells: Dict[int, Dict[tuple, object]] = {}

        def _work(fold: int):
            return fold, self._run_cells(fold_graphs(full, folds, fold))

        progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=console,
            disable=not self.show_progress,
        )
        with progress:
            bar = progress.add_task("Evaluating folds", total=self.k)
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                futures = [executor.submit(_work, fold) for fold in range(self.k)]
                for future in as_completed(futures):
                    fold, fold_cells = future.result()
                    cells[fold] = fold_cells
                    progress.advance(bar)

        for fold in range(self.k):
            for outcome in cells[fold].values():
                if isinstance(outcome, FoldOutcome):
                    for stage, seconds in outcome.timings.items():
                        self.timings[stage] += seconds

        started = time.perf_counter()
        results = [self._assemble(c, config, cells) for c, config in enumerate(self.configs)]
        self._stage("average", started)

        baseline = None
        if baseline_curve is not None:
            baseline = BaselineResult(curve=baseline_curve, aupr=aupr(baseline_curve))

        report = ExperimentReport(
            seed=self.seed,
            k=self.k,
            max_n=self.max_n,
            tie_policy=self.tie_policy,
            fold_seed=fold_seed,
            fold_sizes=folds.sizes(),
            n_drugs=full.n_drugs,
            n_proteins=full.n_proteins,
            n_interactions=full.n_edges,
            results=results,
            baseline=baseline,
            timings=dict(self.timings),
            total_seconds=time.perf_counter() - run_started,
            folds=folds,
        )
        self.logger.experiment_complete(report.success, report.total_seconds)
        return report

    def _assemble(self, c: int, config: IndexConfig, cells: Dict[int, Dict[tuple, object]]) -> ConfigResult:
        result = ConfigResult(config=config)
        curves: List[PrCurve] = []

        for fold in range(self.k):
            outcome = cells[fold][(c, 0)]
            if isinstance(outcome, FoldOutcome):
                curves.append(outcome.curve)
                result.positives.append(outcome.positives)
                result.effective_lengths.append(len(outcome.curve))
                try:
                    result.fold_auprs.append(aupr(outcome.curve))
                except DtiLinkError:
                    result.fold_auprs.append(None)
            else:
                result.positives.append(None)
                result.effective_lengths.append(None)
                result.fold_auprs.append(None)
                result.failures.append(f"fold {fold}: {outcome}")

        if result.failures:
            return result

        try:
            result.curve = average_curves(curves)
            result.aupr = aupr(result.curve)
        except DtiLinkError as exc:
            result.failures.append(str(exc))
            return result

        if self.tie_repeats > 1:
            values = []
            for repeat in range(self.tie_repeats):
                repeat_curves = [cells[fold][(c, repeat)] for fold in range(self.k)]
                if all(isinstance(o, FoldOutcome) for o in repeat_curves):
                    values.append(aupr(average_curves([o.curve for o in repeat_curves])))
            result.tie_auprs = values

        return result


def run_experiment(
    dataset: Sequence[Interaction],
    configs: Sequence[IndexConfig],
    k: int = 10,
    seed: int = 0,
    max_n: int = DEFAULT_MAX_N,
    tie_policy: TiePolicy = TiePolicy.LEXICOGRAPHIC,
    baseline_curve: Optional[PrCurve] = None,
    dedup: DedupRule = DedupRule.SUM,
    tie_repeats: int = 1,
    threads: int = 1,
    show_progress: bool = False
) -> ExperimentReport:
    """Convenience function to run a full cross-validated experiment"""
    runner = ExperimentRunner(
        configs, k=k, seed=seed, max_n=max_n, tie_policy=tie_policy, dedup=dedup,
        tie_repeats=tie_repeats, threads=threads, show_progress=show_progress
    )
    return runner.run(dataset, baseline_curve)
