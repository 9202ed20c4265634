"""Schema splitting for bounded-context approximators, label aggregation
with majority voting, and the pluggable approximator backends.

A schema of N columns is cut into ceil(N / r) splits of at most r columns;
every split repeats the question, one completion flag ([full_schema] when a
single split holds the whole schema, [part_schema] otherwise) and the full
table token list. Per-split semantic labels are unioned for columns and
majority-voted for tables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from .errors import (
    ApproximatorUnavailable,
    InvalidR,
    LookupMiss,
    MissingColumn,
)
from .schema.catalog import SchemaCatalog
from .text import split_words

FULL_SCHEMA = "[full_schema]"
PART_SCHEMA = "[part_schema]"
DEFAULT_R = 64


@dataclass(frozen=True)
class SchemaSplit:
    question_tokens: tuple[str, ...]
    completion_token: str  # FULL_SCHEMA or PART_SCHEMA
    column_slice: tuple[tuple[str, ...], ...]  # token group per column
    table_tokens: tuple[tuple[str, ...], ...]  # all tables, every split

    def flat_tokens(self, separator: str | None = None) -> list[str]:
        out = list(self.question_tokens) + [self.completion_token]
        for k, group in enumerate(self.column_slice):
            if separator is not None and k:
                out.append(separator)
            out.extend(group)
        for group in self.table_tokens:
            out.extend(group)
        return out


def split_schema(question_tokens: Sequence[str],
                 column_tokens: Sequence[Sequence[str]],
                 table_tokens: Sequence[Sequence[str]],
                 r: int = DEFAULT_R) -> list[SchemaSplit]:
    """Greedy r-at-a-time split over the catalog's flattened column order."""
    if r < 1:
        raise InvalidR(f"column budget must be >= 1, got {r}")
    total = len(column_tokens)
    completion = FULL_SCHEMA if total <= r else PART_SCHEMA
    question = tuple(question_tokens)
    tables = tuple(tuple(g) for g in table_tokens)
    splits: list[SchemaSplit] = []
    for start in range(0, total, r):
        chunk = tuple(tuple(g) for g in column_tokens[start:start + r])
        splits.append(SchemaSplit(question_tokens=question,
                                  completion_token=completion,
                                  column_slice=chunk,
                                  table_tokens=tables))
    assert len(splits) == math.ceil(total / r)
    return splits


@dataclass(frozen=True)
class SspLabeling:
    """Opaque per-element semantic labels (the taxonomy is the label
    source's business)."""

    column_labels: dict[str, str] = field(default_factory=dict)
    table_labels: dict[str, str] = field(default_factory=dict)


def aggregate_labels(per_split: Sequence[SspLabeling],
                     all_columns: Sequence[str] | None = None) -> SspLabeling:
    """Union the disjoint column labelings; majority-vote table labels with
    ties won by the label seen in the earliest split. Duplicate submissions
    of an identical split are ignored."""
    deduped: list[SspLabeling] = []
    seen: set[tuple] = set()
    for labeling in per_split:
        key = (tuple(sorted(labeling.column_labels.items())),
               tuple(sorted(labeling.table_labels.items())))
        if key in seen:
            continue
        seen.add(key)
        deduped.append(labeling)

    columns: dict[str, str] = {}
    for labeling in deduped:
        for column, label in labeling.column_labels.items():
            columns.setdefault(column, label)

    tables: dict[str, str] = {}
    table_names: list[str] = []
    for labeling in deduped:
        for table in labeling.table_labels:
            if table not in table_names:
                table_names.append(table)
    for table in table_names:
        votes: dict[str, int] = {}
        first_seen: dict[str, int] = {}
        for split_idx, labeling in enumerate(deduped):
            label = labeling.table_labels.get(table)
            if label is None:
                continue
            votes[label] = votes.get(label, 0) + 1
            first_seen.setdefault(label, split_idx)
        best = min(votes, key=lambda lab: (-votes[lab], first_seen[lab]))
        tables[table] = best

    if all_columns is not None:
        missing = [c for c in all_columns if c not in columns]
        if missing:
            raise MissingColumn(f"aggregated labels missing columns: {missing}")
    return SspLabeling(column_labels=columns, table_labels=tables)


# -- approximator backends ----------------------------------------------------


@dataclass(frozen=True)
class ApproximatorInput:
    """What an approximator may look at for one sample."""

    sample_id: str
    question: str
    db_id: str
    gold_sql: str | None = None


class Approximator(Protocol):
    def approximate(self, sample: ApproximatorInput,
                    catalog: SchemaCatalog) -> str:
        """Return the approximated SQL string for the sample."""
        ...


class OracleApproximator:
    """Echoes the gold query; the idealized upper bound."""

    def approximate(self, sample: ApproximatorInput,
                    catalog: SchemaCatalog) -> str:
        if sample.gold_sql is None:
            raise LookupMiss(f"sample {sample.sample_id} carries no gold SQL")
        return sample.gold_sql


class FileBackedApproximator:
    """Looks up predictions from a JSON-lines file {sample_id, sql}."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._by_id: dict[str, str] = {}
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self._by_id[str(entry["sample_id"])] = entry["sql"]

    def approximate(self, sample: ApproximatorInput,
                    catalog: SchemaCatalog) -> str:
        try:
            return self._by_id[sample.sample_id]
        except KeyError:
            raise LookupMiss(
                f"no stored approximation for sample {sample.sample_id}") from None


class RemoteApproximator:
    """POST {"question", "db_id", "schema"} -> {"sql"}."""

    def __init__(self, url: str, timeout: float = 30.0, max_retries: int = 2):
        self.url = url
        self.timeout = timeout
        self.max_retries = max_retries

    def approximate(self, sample: ApproximatorInput,
                    catalog: SchemaCatalog) -> str:
        schema = {
            "tables": [
                {"name": t.name,
                 "columns": [catalog.columns[i].name
                             for i in catalog.columns_of(k)]}
                for k, t in enumerate(catalog.tables)
            ]
        }
        payload = {"question": sample.question, "db_id": sample.db_id,
                   "schema": schema}
        last_error: Exception | None = None
        for _attempt in range(self.max_retries + 1):
            try:
                response = httpx.post(self.url, json=payload, timeout=self.timeout)
                response.raise_for_status()
                return response.json()["sql"]
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
        raise ApproximatorUnavailable(
            f"approximator endpoint failed: {last_error}")


class SplitLabelSource(Protocol):
    """Per-split labeler plus its deterministic SQL constructor."""

    def labels_for_split(self, split: SchemaSplit,
                         catalog: SchemaCatalog) -> SspLabeling:
        ...

    def build_sql(self, labeling: SspLabeling, catalog: SchemaCatalog) -> str:
        ...


class SplitLabelerApproximator:
    """Runs the splitting pipeline: split the schema, query the label source
    per split, aggregate, and delegate SQL construction."""

    def __init__(self, label_source: SplitLabelSource, r: int = DEFAULT_R,
                 separator: str | None = None):
        self.label_source = label_source
        self.r = r
        self.separator = separator

    def approximate(self, sample: ApproximatorInput,
                    catalog: SchemaCatalog) -> str:
        splits = make_schema_splits(sample.question, catalog, self.r)
        labelings = [self.label_source.labels_for_split(split, catalog)
                     for split in splits]
        aggregated = aggregate_labels(
            labelings,
            all_columns=[str(catalog.column_ref(i))
                         for i in range(len(catalog.columns))],
        )
        return self.label_source.build_sql(aggregated, catalog)


def make_schema_splits(question: str, catalog: SchemaCatalog,
                       r: int = DEFAULT_R) -> list[SchemaSplit]:
    """Tokenize a catalog into Algorithm-1 inputs: one token group per
    column name (kept whole) in flattened catalog order, one per table."""
    question_tokens = split_words(question)
    column_tokens = [(catalog.columns[i].name.lower(),)
                     for i in range(len(catalog.columns))]
    table_tokens = [(t.name.lower(),) for t in catalog.tables]
    return split_schema(question_tokens, column_tokens, table_tokens, r)


def approximate(approximator: Approximator, sample: ApproximatorInput,
                catalog: SchemaCatalog, r: int = DEFAULT_R) -> str:
    """Uniform entry point; ``r`` reaches split-based backends only."""
    if isinstance(approximator, SplitLabelerApproximator) \
            and approximator.r != r:
        approximator = SplitLabelerApproximator(approximator.label_source, r=r,
                                                separator=approximator.separator)
    return approximator.approximate(sample, catalog)
