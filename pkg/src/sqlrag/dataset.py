"""Spider-layout dataset ingestion.

A dataset directory holds tables.json, a samples JSON (db_id, question,
query), an optional values sidecar (db_id -> "table.column" -> values) and
an optional difficulty sidecar (sample id -> easy|medium|hard|extra).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .ast.parser import parse_sql
from .errors import ParseError, SchemaRefError
from .schema.catalog import SchemaCatalog

DIFFICULTIES = ("easy", "medium", "hard", "extra", "unknown")
_SAMPLE_FILES = ("samples.json", "dev.json", "train.json")


@dataclass(frozen=True)
class DatasetSample:
    id: str
    db_id: str
    question: str
    gold_sql: str
    difficulty: str = "unknown"


class CatalogStore:
    def __init__(self, catalogs: dict[str, SchemaCatalog]):
        self._catalogs = catalogs

    def __contains__(self, db_id: str) -> bool:
        return db_id in self._catalogs

    def __len__(self) -> int:
        return len(self._catalogs)

    def get(self, db_id: str) -> SchemaCatalog:
        try:
            return self._catalogs[db_id]
        except KeyError:
            raise SchemaRefError(f"unknown database id {db_id!r}") from None

    def ids(self) -> list[str]:
        return sorted(self._catalogs)


@dataclass
class IngestResult:
    samples: list[DatasetSample]
    catalogs: CatalogStore
    errors: list[tuple[str, str]] = field(default_factory=list)


def load_catalogs(tables_path: str | Path,
                  values: dict | None = None,
                  value_cap: int = 1000) -> CatalogStore:
    entries = json.loads(Path(tables_path).read_text())
    catalogs = {}
    for entry in entries:
        db_values = (values or {}).get(entry["db_id"], {})
        db_values = {k.lower(): v for k, v in db_values.items()}
        catalogs[entry["db_id"]] = SchemaCatalog.from_spider(
            entry, values=db_values, value_cap=value_cap)
    return CatalogStore(catalogs)


def ingest(directory: str | Path, strict: bool = False,
           samples_file: str | None = None,
           value_cap: int = 1000) -> IngestResult:
    """Validate and load a dataset directory. With strict=False malformed
    samples are reported and skipped; strict=True re-raises the first."""
    directory = Path(directory)
    tables_path = directory / "tables.json"
    if not tables_path.exists():
        raise FileNotFoundError(f"{tables_path} not found")

    values = {}
    values_path = directory / "values.json"
    if values_path.exists():
        values = json.loads(values_path.read_text())

    catalogs = load_catalogs(tables_path, values=values, value_cap=value_cap)

    if samples_file:
        sample_path = directory / samples_file
    else:
        sample_path = next((directory / name for name in _SAMPLE_FILES
                            if (directory / name).exists()), None)
    if sample_path is None or not sample_path.exists():
        raise FileNotFoundError(
            f"no samples file in {directory} (looked for {', '.join(_SAMPLE_FILES)})")

    difficulties = {}
    difficulty_path = directory / "difficulty.json"
    if difficulty_path.exists():
        difficulties = json.loads(difficulty_path.read_text())

    entries = json.loads(sample_path.read_text())
    samples: list[DatasetSample] = []
    errors: list[tuple[str, str]] = []
    for position, entry in enumerate(entries):
        sample_id = str(entry.get("id", f"q{position:05d}"))
        try:
            db_id = entry["db_id"]
            if db_id not in catalogs:
                raise SchemaRefError(f"unknown database id {db_id!r}")
            gold = entry["query"]
            parse_sql(gold)
            difficulty = difficulties.get(sample_id, "unknown")
            if difficulty not in DIFFICULTIES:
                difficulty = "unknown"
            samples.append(DatasetSample(
                id=sample_id, db_id=db_id, question=entry["question"],
                gold_sql=gold, difficulty=difficulty))
        except (KeyError, SchemaRefError, ParseError) as exc:
            if strict:
                raise
            errors.append((sample_id, str(exc)))
    return IngestResult(samples=samples, catalogs=catalogs, errors=errors)
