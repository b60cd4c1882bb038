"""
Readers - MATADOR-style TSV and generic CSV edge-list parsers
Both produce Interactions plus a DatasetManifest describing the input
"""
import csv
import hashlib
import io
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, TextIO, Tuple

from core.errors import EmptyDataset, ParseError, SchemaError
from core.graph import Interaction
from utils.logger import get_logger

# Malformed rows tolerated: max(1, this fraction of data rows)
MAX_MALFORMED_FRACTION = 0.01


class DatasetFormat(Enum):
    MATADOR_TSV = "matador"
    EDGE_LIST_CSV = "edgelist"


@dataclass(frozen=True)
class ColumnMap:
    """Header names of the three fields we use; score None = unweighted input"""
    chemical: str = "chemical_id"
    protein: str = "protein_id"
    score: Optional[str] = "matador_score"


@dataclass(frozen=True)
class SkippedRow:
    line: int
    reason: str


@dataclass
class DatasetManifest:
    source: str
    format: DatasetFormat
    column_map: Optional[ColumnMap]
    rows: int
    interactions: int
    duplicates: int
    distinct_drugs: int
    distinct_proteins: int
    content_hash: str
    skipped: List[SkippedRow] = field(default_factory=list)

    @property
    def deduplicated(self) -> int:
        return self.interactions - self.duplicates


def _parse_weight(text: str) -> Optional[float]:
    try:
        value = float(text)
    except ValueError:
        return None
    return value


def _collect(
    rows: Sequence[Tuple[int, List[str]]],
    drug_col: int,
    protein_col: int,
    score_col: Optional[int],
    optional_score: bool = False
) -> Tuple[List[Interaction], List[SkippedRow]]:
    interactions: List[Interaction] = []
    skipped: List[SkippedRow] = []
    required = (drug_col, protein_col) if optional_score else (drug_col, protein_col, score_col)
    needed = max(c for c in required if c is not None) + 1

    for line, fields in rows:
        if len(fields) < needed:
            skipped.append(SkippedRow(line, f"expected at least {needed} fields, got {len(fields)}"))
            continue
        drug = fields[drug_col].strip()
        protein = fields[protein_col].strip()
        if not drug or not protein:
            skipped.append(SkippedRow(line, "empty identifier"))
            continue
        weight = 1.0
        if score_col is not None and len(fields) > score_col and fields[score_col].strip():
            weight = _parse_weight(fields[score_col].strip())
            if weight is None:
                skipped.append(SkippedRow(line, f"score {fields[score_col]!r} is not a number"))
                continue
            if not math.isfinite(weight):
                skipped.append(SkippedRow(line, f"non-finite weight {weight!r}"))
                continue
            if not weight > 0:
                skipped.append(SkippedRow(line, f"non-positive weight {weight!r}"))
                continue
        interactions.append(Interaction(drug, protein, weight))

    return interactions, skipped


def _finish(
    source: str,
    fmt: DatasetFormat,
    column_map: Optional[ColumnMap],
    text: str,
    data_rows: int,
    interactions: List[Interaction],
    skipped: List[SkippedRow]
) -> Tuple[List[Interaction], DatasetManifest]:
    logger = get_logger()
    allowed = max(1, int(MAX_MALFORMED_FRACTION * data_rows))
    if len(skipped) > allowed:
        first = "; ".join(f"line {s.line}: {s.reason}" for s in skipped[:5])
        raise ParseError(
            f"{source}: {len(skipped)} of {data_rows} rows are malformed (limit {allowed}); {first}",
            skipped
        )
    for row in skipped:
        logger.warning(f"{source}: skipped line {row.line} ({row.reason})", line=row.line)

    if not interactions:
        raise EmptyDataset(f"{source}: no interactions found")

    keys = {item.key for item in interactions}
    manifest = DatasetManifest(
        source=source,
        format=fmt,
        column_map=column_map,
        rows=data_rows,
        interactions=len(interactions),
        duplicates=len(interactions) - len(keys),
        distinct_drugs=len({d for d, _ in keys}),
        distinct_proteins=len({p for _, p in keys}),
        content_hash=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        skipped=skipped,
    )
    logger.info(
        "Dataset parsed",
        source=source,
        format=fmt.value,
        interactions=manifest.interactions,
        skipped=len(skipped)
    )
    return interactions, manifest


def _numbered_rows(text: str, delimiter: str) -> List[Tuple[int, List[str]]]:
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    return [(number, row) for number, row in enumerate(reader, start=1) if any(f.strip() for f in row)]


def parse_matador(
    stream: TextIO,
    column_map: ColumnMap = ColumnMap(),
    source: str = "<stream>"
) -> Tuple[List[Interaction], DatasetManifest]:
    """Tab-separated MATADOR export with a header row"""
    text = stream.read()
    rows = _numbered_rows(text, "\t")
    if not rows:
        raise EmptyDataset(f"{source}: file is empty")

    _, header = rows[0]
    header = [name.strip().lstrip("#").strip() for name in header]

    def _column(name: str) -> int:
        if name not in header:
            raise SchemaError(f"{source}: column {name!r} not found in header {header}")
        return header.index(name)

    drug_col = _column(column_map.chemical)
    protein_col = _column(column_map.protein)
    score_col = _column(column_map.score) if column_map.score else None

    data = rows[1:]
    interactions, skipped = _collect(data, drug_col, protein_col, score_col)
    return _finish(source, DatasetFormat.MATADOR_TSV, column_map, text, len(data), interactions, skipped)


# Words that mark a first edge-list row as column names
HEADER_WORDS = frozenset({
    "drug", "drugs", "chemical", "chemicals", "compound", "compounds", "ligand", "ligands",
    "molecule", "source", "protein", "proteins", "target", "targets", "gene", "genes",
    "uniprot", "receptor", "enzyme", "id", "ids", "name", "node", "weight", "score",
})


def _is_column_name(token: str) -> bool:
    parts = re.split(r"[^a-z]+", token.strip().lower())
    return any(part in HEADER_WORDS for part in parts if part)


def _looks_like_header(fields: List[str]) -> bool:
    if len(fields) >= 3 and _parse_weight(fields[2].strip()) is None:
        return True
    return any(_is_column_name(f) for f in fields[:2])


def parse_edge_list_with_manifest(
    stream: TextIO,
    source: str = "<stream>",
    header: Optional[bool] = None
) -> Tuple[List[Interaction], DatasetManifest]:
    """
    CSV `drug,protein[,weight]` with an optional header

    header=None detects it; True or False forces the first row's role.
    """
    text = stream.read()
    rows = _numbered_rows(text, ",")
    if not rows:
        raise EmptyDataset(f"{source}: file is empty")
    if header is None:
        header = _looks_like_header(rows[0][1])
    if header:
        rows = rows[1:]

    # the weight column is optional per row
    interactions, skipped = _collect(rows, 0, 1, 2, optional_score=True)
    return _finish(source, DatasetFormat.EDGE_LIST_CSV, None, text, len(rows), interactions, skipped)


def parse_edge_list(stream: TextIO) -> List[Interaction]:
    interactions, _ = parse_edge_list_with_manifest(stream)
    return interactions


def detect_format(path: Path) -> DatasetFormat:
    return DatasetFormat.MATADOR_TSV if path.suffix.lower() in (".tsv", ".tab") else DatasetFormat.EDGE_LIST_CSV


def load_dataset(
    path: str,
    fmt: Optional[DatasetFormat] = None,
    column_map: ColumnMap = ColumnMap(),
    header: Optional[bool] = None
) -> Tuple[List[Interaction], DatasetManifest]:
    """Parse a dataset file, picking the parser by format or suffix"""
    file_path = Path(path)
    fmt = fmt or detect_format(file_path)
    with open(file_path, "r", encoding="utf-8", newline="") as stream:
        if fmt == DatasetFormat.MATADOR_TSV:
            return parse_matador(stream, column_map, source=str(file_path))
        return parse_edge_list_with_manifest(stream, source=str(file_path), header=header)
