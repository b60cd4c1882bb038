#!/usr/bin/env python3
"""
dtilink CLI - Drug-target link prediction from network topology
Main entry point: validate, predict, evaluate, sweep, paths, plot
"""
import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# Fix Windows console encoding
if sys.platform == 'win32':
    sys.stdout.reconfigure(encoding='utf-8', errors='replace')
    sys.stderr.reconfigure(encoding='utf-8', errors='replace')

# Add project root to path
PROJECT_ROOT = Path(__file__).parent
sys.path.insert(0, str(PROJECT_ROOT))

# Load environment variables
from dotenv import load_dotenv
load_dotenv(PROJECT_ROOT / ".env")

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from core.config import (
    FOLD_STREAM,
    TIE_STREAM,
    CnVariant,
    DedupRule,
    IndexConfig,
    IndexKind,
    KatzMethod,
    derive_seed,
)
from core.errors import ConfigError, DtiLinkError, EmptyScores, UsageError
from core.evaluation import DEFAULT_MAX_N, PrCurve, path_length_analysis, split_folds
from core.experiment import ExperimentReport, ExperimentRunner, fold_graphs
from core.graph import BipartiteGraph, build_graph, connected_components
from core.indices import score_all
from core.ranking import TiePolicy, rank
from ingest.plotting import emit_plot
from ingest.readers import ColumnMap, DatasetFormat, DatasetManifest, load_dataset
from ingest.writers import (
    read_baseline_curve,
    read_pr_curve,
    write_folds,
    write_pr_curve,
    write_predictions,
    write_report,
    write_timing,
)
from utils.logger import configure_logger, get_logger

console = Console()

VERSION = "0.1.0"

DEFAULT_BETAS = (0.005, 0.01, 0.02)
DEFAULT_FOLDS = 10
DEFAULT_TOP_N = 100
ALL_INDICES = ("cn", "jaccard", "pa", "katz")


class CliArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting with status 2"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class CliConfig:
    """Validated command-line options"""
    command: str
    dataset: Optional[str] = None
    fmt: Optional[DatasetFormat] = None
    column_map: ColumnMap = field(default_factory=ColumnMap)
    header: Optional[bool] = None
    indices: List[IndexKind] = field(default_factory=list)
    cn_variant: CnVariant = CnVariant.PATH_COUNT
    weighted: bool = False
    betas: List[float] = field(default_factory=list)
    katz_method: Optional[KatzMethod] = None
    folds: int = DEFAULT_FOLDS
    seed: int = 0
    max_n: int = DEFAULT_MAX_N
    top_n: int = DEFAULT_TOP_N
    tie_policy: TiePolicy = TiePolicy.LEXICOGRAPHIC
    tie_repeats: int = 1
    dedup: DedupRule = DedupRule.SUM
    out_dir: Path = Path("results")
    baseline: Optional[str] = None
    threads: int = 1
    fold: int = 0
    curves: List[str] = field(default_factory=list)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        def get(name, default=None):
            return getattr(args, name, default)

        indices = [IndexKind(name) for name in (get("index") or [])]
        if args.command == "sweep":
            indices = [IndexKind.KATZ]

        score_col = get("score_col", "matador_score")
        config = cls(
            command=args.command,
            dataset=get("dataset"),
            fmt=DatasetFormat(get("format")) if get("format") else None,
            column_map=ColumnMap(
                chemical=get("chemical_col", "chemical_id"),
                protein=get("protein_col", "protein_id"),
                score=None if score_col in (None, "none") else score_col,
            ),
            header=get("header"),
            indices=indices,
            cn_variant=CnVariant(get("cn_variant", "path")),
            weighted=bool(get("weighted", False)),
            betas=list(get("beta") or []),
            katz_method=KatzMethod(get("katz_method")) if get("katz_method") else None,
            folds=get("folds", DEFAULT_FOLDS),
            seed=get("seed", 0),
            max_n=get("max_n", DEFAULT_MAX_N),
            top_n=get("top_n", DEFAULT_TOP_N),
            tie_policy=TiePolicy(get("tie_break", "lex")),
            tie_repeats=get("tie_repeats", 1),
            dedup=DedupRule(get("dedup", "sum")),
            out_dir=Path(get("out_dir", "results")),
            baseline=get("baseline"),
            threads=get("threads", 1),
            fold=get("fold", 0),
            curves=list(get("curves") or []),
        )
        config.validate()
        return config

    def validate(self):
        """Reject invalid combinations before any computation"""
        if self.folds < 2:
            raise ConfigError(f"--folds must be at least 2, got {self.folds}")
        if self.max_n < 1:
            raise ConfigError("--max-n must be positive")
        if self.top_n < 1:
            raise ConfigError("--top-n must be positive")
        if self.threads < 1:
            raise ConfigError("--threads must be positive")
        if self.tie_repeats < 1:
            raise ConfigError("--tie-repeats must be positive")
        if self.tie_repeats > 1 and self.tie_policy != TiePolicy.SEEDED_SHUFFLE:
            raise ConfigError("--tie-repeats needs --tie-break shuffle")
        if not 0 <= self.fold < self.folds:
            raise ConfigError(f"--fold must be in 0..{self.folds - 1}, got {self.fold}")
        if self.betas and IndexKind.KATZ not in self.indices:
            raise ConfigError("--beta only applies to the Katz index; add --index katz")
        if self.katz_method and IndexKind.KATZ not in self.indices:
            raise ConfigError("--katz-method only applies to the Katz index")
        if self.command == "predict":
            if len(self.indices) != 1:
                raise ConfigError("predict takes exactly one --index")
            if self.indices[0] == IndexKind.KATZ and len(self.betas) != 1:
                raise ConfigError("predict with the Katz index takes exactly one --beta")
        if self.command in ("evaluate", "sweep") and not self.betas:
            self.betas = list(DEFAULT_BETAS)
        if self.command == "plot" and not self.curves and not self.baseline:
            raise ConfigError("plot needs at least one curve file or --baseline")
        self.index_configs()

    def index_configs(self) -> List[IndexConfig]:
        configs = []
        for kind in self.indices:
            if kind == IndexKind.KATZ:
                configs.extend(
                    IndexConfig(kind, weighted=self.weighted, beta=beta, katz_method=self.katz_method)
                    for beta in self.betas
                )
            else:
                configs.append(IndexConfig(kind, cn_variant=self.cn_variant, weighted=self.weighted))
        return configs


# ---------------------------------------------------------------- parser

def _dataset_args(parser: argparse.ArgumentParser):
    parser.add_argument("dataset", help="MATADOR TSV or CSV edge list")
    parser.add_argument("--format", choices=[f.value for f in DatasetFormat],
                        help="input format (default: by suffix, .tsv = matador)")
    parser.add_argument("--chemical-col", default="chemical_id", help="MATADOR chemical id column")
    parser.add_argument("--protein-col", default="protein_id", help="MATADOR protein id column")
    parser.add_argument("--score-col", default="matador_score",
                        help="MATADOR score column, or 'none' for unweighted input")
    parser.add_argument("--dedup", choices=[d.value for d in DedupRule], default="sum",
                        help="merge rule for duplicate interactions")
    parser.add_argument("--header", action=argparse.BooleanOptionalAction, default=None,
                        help="whether an edge-list CSV starts with a header row (default: detect)")


def _index_args(parser: argparse.ArgumentParser, choose_index: bool = True, default_index=None):
    if choose_index:
        parser.add_argument("--index", nargs="+", choices=list(ALL_INDICES), default=default_index,
                            help="similarity index (several for evaluate)")
    parser.add_argument("--beta", nargs="+", type=float, help="Katz damping factor(s)")
    parser.add_argument("--katz-method", choices=[m.value for m in KatzMethod],
                        help="Katz computation (default: direct below 5000 nodes)")
    parser.add_argument("--cn-variant", choices=[v.value for v in CnVariant], default="path",
                        help="common neighbours form")
    parser.add_argument("--weighted", action="store_true", help="use interaction weights")


def _run_args(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--tie-break", choices=[t.value for t in TiePolicy], default="lex",
                        help="order of equal scores")
    parser.add_argument("--threads", type=int, default=int(os.getenv("DTILINK_THREADS", "1")),
                        help="worker threads (results do not depend on it)")
    parser.add_argument("--out-dir", default="results", help="output directory")


def _experiment_args(parser: argparse.ArgumentParser):
    parser.add_argument("--folds", type=int, default=DEFAULT_FOLDS, help="cross-validation folds")
    parser.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="rank cutoff of the PR sweep")
    parser.add_argument("--tie-repeats", type=int, default=1,
                        help="tie shuffles per fold (needs --tie-break shuffle)")
    parser.add_argument("--baseline", help="external baseline curve CSV (recall,precision)")


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="dtilink",
        description="Drug-target link prediction with topology-only similarity indices",
    )
    parser.add_argument("--version", action="version", version=f"dtilink {VERSION}")
    commands = parser.add_subparsers(dest="command", parser_class=CliArgumentParser)

    validate = commands.add_parser("validate", help="parse a dataset and summarise it")
    _dataset_args(validate)

    predict = commands.add_parser("predict", help="rank candidate pairs of the full dataset")
    _dataset_args(predict)
    _index_args(predict)
    _run_args(predict)
    predict.add_argument("--top-n", type=int, default=DEFAULT_TOP_N, help="predictions to write")

    evaluate = commands.add_parser("evaluate", help="cross-validated comparison of indices")
    _dataset_args(evaluate)
    _index_args(evaluate, default_index=list(ALL_INDICES))
    _run_args(evaluate)
    _experiment_args(evaluate)

    sweep = commands.add_parser("sweep", help="cross-validated Katz beta sweep")
    _dataset_args(sweep)
    _index_args(sweep, choose_index=False)
    _run_args(sweep)
    _experiment_args(sweep)

    paths = commands.add_parser("paths", help="path lengths of one fold's validation links")
    _dataset_args(paths)
    paths.add_argument("--folds", type=int, default=DEFAULT_FOLDS, help="cross-validation folds")
    paths.add_argument("--fold", type=int, default=0, help="fold to analyse")
    paths.add_argument("--seed", type=int, default=0, help="master seed")

    plot = commands.add_parser("plot", help="render curve CSVs as one SVG")
    plot.add_argument("curves", nargs="*", help="curve CSVs (n,precision,recall)")
    plot.add_argument("--baseline", help="external baseline curve CSV (recall,precision)")
    plot.add_argument("--out-dir", default="results", help="output directory")

    return parser


# --------------------------------------------------------------- helpers

def show_banner():
    """Display welcome banner"""
    console.print(Panel(
        f"""[bold cyan]dtilink[/bold cyan] v{VERSION}

[dim]Drug-target link prediction from network topology[/dim]

Commands:
  [cyan]validate[/cyan]  - Parse and summarise a dataset
  [cyan]predict[/cyan]   - Rank candidate drug-target pairs
  [green]evaluate[/green]  - Cross-validated AUPR of CN, Jaccard, PA and Katz
  [green]sweep[/green]     - Katz beta sweep
  [yellow]paths[/yellow]     - Path lengths of held-out links
  [magenta]plot[/magenta]      - Precision-recall SVG from curve files
""",
        border_style="cyan"
    ))


def _load(config: CliConfig) -> Tuple[DatasetManifest, BipartiteGraph, list]:
    interactions, manifest = load_dataset(config.dataset, config.fmt, config.column_map, config.header)
    graph = build_graph(interactions, weighted=True, dedup=config.dedup)
    return manifest, graph, interactions


def _open(path: Path):
    return open(path, "w", encoding="utf-8", newline="")


def _prepare_out_dir(config: CliConfig):
    config.out_dir.mkdir(parents=True, exist_ok=True)
    configure_logger(str(config.out_dir / "logs"))


def _summary_line(graph: BipartiteGraph) -> str:
    return f"{graph.n_drugs} drugs, {graph.n_proteins} proteins, {graph.n_edges} interactions"


# -------------------------------------------------------------- commands

def cmd_validate(config: CliConfig) -> int:
    """Parse the dataset and report counts and components"""
    manifest, graph, _ = _load(config)
    components = connected_components(graph)

    console.print(_summary_line(graph), markup=False, highlight=False)

    table = Table(title="Dataset")
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    rows = [
        ("source", manifest.source),
        ("format", manifest.format.value),
        ("data rows", manifest.rows),
        ("interactions (raw)", manifest.interactions),
        ("duplicates merged", manifest.duplicates),
        ("skipped rows", len(manifest.skipped)),
        ("components", components.count),
        ("largest component", components.sizes[0] if components.sizes else 0),
        ("isolated drugs", components.isolated_drugs),
        ("isolated proteins", components.isolated_proteins),
        ("sha256", manifest.content_hash),
    ]
    if manifest.column_map is not None:
        cm = manifest.column_map
        rows.insert(2, ("columns", f"{cm.chemical}, {cm.protein}, {cm.score or '-'}"))
    for name, value in rows:
        table.add_row(name, str(value))
    console.print(table)
    return 0


def cmd_predict(config: CliConfig) -> int:
    """Score and rank every candidate pair of the full dataset"""
    _prepare_out_dir(config)
    _, graph, _ = _load(config)
    index = config.index_configs()[0]

    table = score_all(graph, index, config.threads)
    positives = table.positive_count()
    if positives == 0:
        raise EmptyScores(f"{index.label} gives no candidate a positive score")
    seed = derive_seed(config.seed, TIE_STREAM) if config.tie_policy == TiePolicy.SEEDED_SHUFFLE else None
    ranked = rank(table, config.tie_policy, seed, top_n=min(config.top_n, positives))

    path = config.out_dir / f"predictions_{index.label}.csv"
    with _open(path) as stream:
        write_predictions(ranked, stream)

    preview = Table(title=f"Top predictions ({index.label})")
    for column in ("rank", "drug", "protein", "score"):
        preview.add_column(column)
    for entry in ranked.entries[:10]:
        preview.add_row(str(entry.rank), entry.drug, entry.protein, f"{entry.score:.6g}")
    console.print(preview)
    console.print(f"[green]✓[/green] {len(ranked)} of {positives} positive predictions written to {path}")
    return 0


def _baseline(config: CliConfig) -> Optional[PrCurve]:
    if not config.baseline:
        return None
    with open(config.baseline, "r", encoding="utf-8", newline="") as stream:
        return read_baseline_curve(stream, source=config.baseline)


def _write_experiment(config: CliConfig, report: ExperimentReport):
    out = config.out_dir
    with _open(out / "report.yaml") as stream:
        write_report(report, stream)
    with _open(out / "timing.yaml") as stream:
        write_timing(report, stream)
    if report.folds is not None:
        with _open(out / "folds.csv") as stream:
            write_folds(report.folds, stream)

    named = []
    for result in report.results:
        if result.curve is None:
            continue
        with _open(out / f"curve_{result.label}.csv") as stream:
            write_pr_curve(result.curve, stream)
        named.append((result.label, result.curve))
    if report.baseline is not None:
        named.append((report.baseline.name, report.baseline.curve))
    if named:
        with _open(out / "pr_curves.svg") as stream:
            emit_plot(named, stream)


def _aupr_table(report: ExperimentReport) -> Table:
    table = Table(title="AUPR")
    table.add_column("Index", style="cyan")
    table.add_column("AUPR", justify="right")
    table.add_column("Mean positives", justify="right")
    table.add_column("Status")
    for result in report.results:
        counts = [p for p in result.positives if p is not None]
        mean = f"{sum(counts) / len(counts):.0f}" if counts else "-"
        value = f"{result.aupr:.4f}" if result.aupr is not None else "-"
        status = "[green]ok[/green]" if result.succeeded else f"[red]{len(result.failures)} failure(s)[/red]"
        table.add_row(result.label, value, mean, status)
    if report.baseline is not None:
        table.add_row(report.baseline.name, f"{report.baseline.aupr:.4f}", "-", "external")
    return table


def cmd_evaluate(config: CliConfig) -> int:
    """Cross-validate every configured index and write report, curves and plot"""
    _prepare_out_dir(config)
    interactions, _ = load_dataset(config.dataset, config.fmt, config.column_map, config.header)
    baseline = _baseline(config)

    runner = ExperimentRunner(
        config.index_configs(),
        k=config.folds,
        seed=config.seed,
        max_n=config.max_n,
        tie_policy=config.tie_policy,
        dedup=config.dedup,
        tie_repeats=config.tie_repeats,
        threads=config.threads,
        show_progress=True,
    )
    report = runner.run(interactions, baseline)
    _write_experiment(config, report)

    console.print(_aupr_table(report))
    for result in report.results:
        for failure in result.failures:
            console.print(f"[red]{result.label}: {escape(failure)}[/red]", highlight=False)
    console.print(f"Outputs written to {config.out_dir}", highlight=False)
    return 0 if report.success else 3


def cmd_sweep(config: CliConfig) -> int:
    """Katz-only evaluation over the beta list"""
    return cmd_evaluate(config)


def cmd_paths(config: CliConfig) -> int:
    """Shortest training-graph paths to one fold's validation links"""
    _, graph, _ = _load(config)
    folds = split_folds(graph.interactions(), config.folds, derive_seed(config.seed, FOLD_STREAM))
    task = fold_graphs(graph, folds, config.fold)
    histogram = path_length_analysis(task.train, task.validation)

    table = Table(title=f"Path lengths, fold {config.fold} of {config.folds}")
    table.add_column("Length", style="cyan")
    table.add_column("Links", justify="right")
    table.add_column("Fraction", justify="right")
    for length, count in histogram.ordered():
        fraction = count / histogram.total if histogram.total else 0.0
        table.add_row(str(length), str(count), f"{fraction:.3f}")
    console.print(table)
    console.print(
        f"{histogram.counts.get(3, 0)}/{histogram.total} validation links at length 3 "
        f"({histogram.fraction_at(3):.1%}); cold start: {histogram.cold_start}",
        highlight=False
    )
    return 0


def cmd_plot(config: CliConfig) -> int:
    """Render curve CSVs (and an optional baseline) as one SVG"""
    _prepare_out_dir(config)
    named = []
    for path in config.curves:
        label = Path(path).stem
        label = label[len("curve_"):] if label.startswith("curve_") else label
        with open(path, "r", encoding="utf-8", newline="") as stream:
            named.append((label, read_pr_curve(stream, source=path)))
    baseline = _baseline(config)
    if baseline is not None:
        named.append(("baseline", baseline))

    out = config.out_dir / "pr_curves.svg"
    with _open(out) as stream:
        emit_plot(named, stream)
    console.print(f"[green]✓[/green] {len(named)} curve(s) plotted to {out}", highlight=False)
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "paths": cmd_paths,
    "plot": cmd_plot,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args_list = list(sys.argv[1:] if argv is None else argv)

    # No arguments - show help
    if not args_list:
        show_banner()
        parser.print_help()
        return 0

    try:
        args = parser.parse_args(args_list)
        if args.command is None:
            raise UsageError("a command is required")
        config = CliConfig.from_args(args)
        return COMMANDS[config.command](config)
    except DtiLinkError as exc:
        console.print(f"[red]Error: {escape(str(exc))}[/red]", highlight=False)
        get_logger().debug("Command failed", error=type(exc).__name__, exit_code=exc.exit_code)
        return exc.exit_code
    except OSError as exc:
        console.print(f"[red]Error: {escape(str(exc))}[/red]", highlight=False)
        return 2


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted[/yellow]")
        sys.exit(130)
    except Exception as e:
        console.print(f"[red]Fatal error: {escape(str(e))}[/red]")
        sys.exit(3)
