"""
Writers - Serialization of predictions, PR curves, fold assignments and reports
All output is UTF-8 with \n line endings and deterministic for identical input
"""
import csv
from typing import Any, Dict, List, Optional, TextIO

import numpy as np
import yaml

from core.errors import ParseError, SchemaError
from core.evaluation import FoldAssignment, PrCurve, Provenance
from core.experiment import ConfigResult, ExperimentReport
from core.graph import Interaction
from core.ranking import RankedPredictions

PREDICTION_HEADER = ["rank", "drug", "protein", "score"]
CURVE_HEADER = ["n", "precision", "recall"]
BASELINE_HEADER = ["recall", "precision"]
FOLD_HEADER = ["drug", "protein", "weight", "fold"]


def format_score(value: float) -> str:
    """Shortest round-trip decimal; integral values without a fraction"""
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def _writer(stream: TextIO):
    return csv.writer(stream, lineterminator="\n")


def write_predictions(ranked: RankedPredictions, stream: TextIO):
    writer = _writer(stream)
    writer.writerow(PREDICTION_HEADER)
    for entry in ranked:
        writer.writerow([entry.rank, entry.drug, entry.protein, format_score(entry.score)])


def write_pr_curve(curve: PrCurve, stream: TextIO):
    writer = _writer(stream)
    writer.writerow(CURVE_HEADER)
    for n, precision, recall in curve.points:
        writer.writerow([n, repr(precision), repr(recall)])


def _rows(stream: TextIO, header: List[str], source: str) -> List[Dict[str, str]]:
    reader = csv.DictReader(stream)
    fields = [name.strip() for name in (reader.fieldnames or [])]
    if sorted(fields) != sorted(header):
        raise SchemaError(f"{source}: expected columns {header}, got {fields}")
    reader.fieldnames = fields
    return [row for row in reader if any(isinstance(v, str) and v.strip() for v in row.values())]


def _probability(text: str, line: int, source: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"{source}: line {line}: {text!r} is not a number")
    if not 0.0 <= value <= 1.0:
        raise ParseError(f"{source}: line {line}: {value} is outside [0, 1]")
    return value


def read_pr_curve(
    stream: TextIO,
    provenance: Provenance = Provenance.FOLD_AVERAGED,
    max_n: Optional[int] = None,
    source: str = "<curve>"
) -> PrCurve:
    """Inverse of write_pr_curve; ranks must run 1..len without gaps"""
    rows = _rows(stream, CURVE_HEADER, source)
    precision, recall = [], []
    for line, row in enumerate(rows, start=2):
        if row["n"].strip() != str(line - 1):
            raise ParseError(f"{source}: line {line}: expected n={line - 1}, got {row['n']!r}")
        precision.append(_probability(row["precision"], line, source))
        recall.append(_probability(row["recall"], line, source))
    return PrCurve(
        precision=np.array(precision, dtype=np.float64),
        recall=np.array(recall, dtype=np.float64),
        max_n=max_n or len(rows),
        provenance=provenance,
    )


def read_baseline_curve(stream: TextIO, source: str = "<baseline>") -> PrCurve:
    """External `recall,precision` points in any order, sorted by recall"""
    rows = _rows(stream, BASELINE_HEADER, source)
    if not rows:
        raise ParseError(f"{source}: baseline curve has no points")
    recall = np.array([_probability(r["recall"], i, source) for i, r in enumerate(rows, start=2)])
    precision = np.array([_probability(r["precision"], i, source) for i, r in enumerate(rows, start=2)])
    order = np.argsort(recall, kind="stable")
    return PrCurve(
        precision=precision[order],
        recall=recall[order],
        max_n=len(rows),
        provenance=Provenance.EXTERNAL,
    )


def write_folds(folds: FoldAssignment, stream: TextIO):
    writer = _writer(stream)
    writer.writerow(FOLD_HEADER)
    for item in folds.interactions:
        writer.writerow([item.drug, item.protein, format_score(item.weight), folds.fold_of[item.key]])


def read_folds(stream: TextIO, seed: int = 0, source: str = "<folds>") -> FoldAssignment:
    rows = _rows(stream, FOLD_HEADER, source)
    interactions = []
    fold_of = {}
    for line, row in enumerate(rows, start=2):
        try:
            item = Interaction(row["drug"], row["protein"], float(row["weight"]))
            fold = int(row["fold"])
        except ValueError:
            raise ParseError(f"{source}: line {line}: malformed fold row")
        interactions.append(item)
        fold_of[item.key] = fold
    if not interactions:
        raise ParseError(f"{source}: no fold rows")
    return FoldAssignment(
        k=max(fold_of.values()) + 1,
        seed=seed,
        interactions=tuple(interactions),
        fold_of=fold_of,
    )


# ------------------------------------------------------------------ report

def _floats(values) -> List[Optional[float]]:
    return [None if v is None else float(v) for v in values]


def _result_document(result: ConfigResult) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "label": result.label,
        "config": result.config.summary(),
        "status": "ok" if result.succeeded else "failed",
        "aupr": None if result.aupr is None else float(result.aupr),
        "fold_aupr": _floats(result.fold_auprs),
        "positive_predictions": [None if p is None else int(p) for p in result.positives],
        "effective_lengths": [None if n is None else int(n) for n in result.effective_lengths],
    }
    if result.curve is not None:
        data["curve_points"] = len(result.curve)
    if result.failures:
        data["failures"] = list(result.failures)
    if result.tie_auprs:
        values = _floats(result.tie_auprs)
        data["tie_aupr"] = {
            "values": values,
            "min": min(values),
            "max": max(values),
            "spread": max(values) - min(values),
        }
    return data


def report_document(report: ExperimentReport) -> Dict[str, Any]:
    """Plain mapping of an ExperimentReport, ready for YAML"""
    table = [{"index": r.label, "aupr": None if r.aupr is None else float(r.aupr)} for r in report.results]
    if report.baseline is not None:
        table.append({"index": report.baseline.name, "aupr": float(report.baseline.aupr)})

    document: Dict[str, Any] = {
        "experiment": {
            "seed": report.seed,
            "folds": report.k,
            "fold_seed": report.fold_seed,
            "max_n": report.max_n,
            "tie_policy": report.tie_policy.value,
            "fold_sizes": [int(s) for s in report.fold_sizes],
            "success": report.success,
        },
        "dataset": {
            "drugs": report.n_drugs,
            "proteins": report.n_proteins,
            "interactions": report.n_interactions,
        },
        "aupr": table,
        "results": [_result_document(r) for r in report.results],
    }
    if report.baseline is not None:
        document["baseline"] = {
            "name": report.baseline.name,
            "aupr": float(report.baseline.aupr),
            "points": len(report.baseline.curve),
        }
    return document


def timing_document(report: ExperimentReport) -> Dict[str, float]:
    timing = {stage: float(seconds) for stage, seconds in report.timings.items()}
    timing["total"] = float(report.total_seconds)
    return timing


def write_report(report: ExperimentReport, stream: TextIO):
    yaml.safe_dump(
        report_document(report),
        stream,
        sort_keys=False,
        default_flow_style=False,
        allow_unicode=True,
    )


def write_timing(report: ExperimentReport, stream: TextIO):
    yaml.safe_dump({"timing": timing_document(report)}, stream, sort_keys=False, default_flow_style=False)
