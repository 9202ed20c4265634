"""Sub-schema selection: BM25 over column documents, approximated-query
elements, dynamic top-k and key completion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..ast.nodes import SqlAst
from ..bm25 import Bm25Index
from ..errors import SqlragError
from ..text import tokenize
from .catalog import ColumnRef, SchemaCatalog
from .elements import query_elements

K_MIN = 6
K_MAX = 20
K_FACTOR = 1.5

BM25_TOPK = "bm25-topk"
APPROX_ONLY = "approx-only"
HYBRID_DYNAMIC = "hybrid-dynamic"

PROV_BM25 = "bm25"
PROV_APPROX = "approx-query"
PROV_KEYS = "key-completion"


@dataclass(frozen=True)
class ColumnDocument:
    ref: ColumnRef
    tokens: tuple[str, ...]


@dataclass
class ColumnIndex:
    catalog: SchemaCatalog
    documents: list[ColumnDocument]
    bm25: Bm25Index


@dataclass(frozen=True)
class SelectedColumn:
    ref: ColumnRef
    provenance: str


@dataclass(frozen=True)
class SubSchema:
    db_id: str
    selected_tables: tuple[str, ...]
    selected_columns: tuple[SelectedColumn, ...]
    selected_values: dict[ColumnRef, tuple[str, ...]] = field(default_factory=dict)

    @property
    def table_keys(self) -> set[str]:
        return set(self.selected_tables)

    @property
    def column_refs(self) -> set[ColumnRef]:
        return {c.ref for c in self.selected_columns}

    def with_values(self, values: dict[ColumnRef, tuple[str, ...]]) -> "SubSchema":
        return replace(self, selected_values=dict(values))


def build_column_index(catalog: SchemaCatalog, k1: float = 1.5,
                       b: float = 0.75) -> ColumnIndex:
    """One BM25 document per column: table semantic name + column semantic
    name + the column's value set, all through the shared text pipeline."""
    documents: list[ColumnDocument] = []
    for i, col in enumerate(catalog.columns):
        table = catalog.tables[col.table_index]
        tokens = tokenize(table.semantic_name) + tokenize(col.semantic_name)
        for value in col.values:
            tokens.extend(tokenize(value))
        documents.append(ColumnDocument(ref=catalog.column_ref(i),
                                        tokens=tuple(tokens)))
    bm25 = Bm25Index.build([list(d.tokens) for d in documents], k1=k1, b=b)
    return ColumnIndex(catalog=catalog, documents=documents, bm25=bm25)


def score_bm25(index: ColumnIndex, question: str) -> list[tuple[ColumnRef, float]]:
    """Columns ranked by Okapi score, ties in catalog order (table index,
    then column position)."""
    query = tokenize(question)
    scores = index.bm25.scores(query)
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return [(index.documents[i].ref, scores[i]) for i in order]


def dynamic_k(approx_sql: str | SqlAst, catalog: SchemaCatalog | None = None) -> int:
    """clamp(floor(1.5 * gamma), 6, 20) with gamma the number of unique
    column references in the approximated query (stars count as zero)."""
    elements = query_elements(catalog, approx_sql) if catalog is not None \
        else query_elements(_NO_CATALOG, approx_sql)
    return max(K_MIN, min(K_MAX, math.floor(K_FACTOR * elements.gamma)))


class _EmptyCatalog:
    """Stand-in so gamma can be counted without schema knowledge."""

    tables: list = []

    def table_index(self, name):  # pragma: no cover - trivial
        return None

    def column_index(self, table, column):
        return None


_NO_CATALOG = _EmptyCatalog()


def select_sub_schema(catalog: SchemaCatalog, question: str,
                      approx_sql: str | SqlAst | None = None,
                      mode: str = HYBRID_DYNAMIC,
                      k: int | None = None,
                      column_index: ColumnIndex | None = None) -> SubSchema:
    """Hybrid sub-schema selection.

    bm25-topk      BM25 top-k columns plus key completion.
    approx-only    approximated-query elements; primary keys added only for
                   tables selected without any column.
    hybrid-dynamic union of approximated-query elements and BM25 top
                   dynamic-k columns, then key completion.
    """
    if mode not in (BM25_TOPK, APPROX_ONLY, HYBRID_DYNAMIC):
        raise SqlragError(f"unknown selection mode {mode!r}")
    if mode != BM25_TOPK and approx_sql is None:
        raise SqlragError(f"mode {mode} requires an approximated query")

    provenance: dict[int, str] = {}
    tables: set[int] = set()

    if mode in (APPROX_ONLY, HYBRID_DYNAMIC):
        elements = query_elements(catalog, approx_sql)
        tables |= elements.table_indexes
        for idx in elements.column_indexes:
            provenance[idx] = PROV_APPROX

    if mode in (BM25_TOPK, HYBRID_DYNAMIC):
        if mode == BM25_TOPK:
            if k is None:
                raise SqlragError("bm25-topk requires k")
            depth = k
        else:
            depth = dynamic_k(approx_sql, catalog)
        index = column_index or build_column_index(catalog)
        ranked = score_bm25(index, question)
        for ref, _score in ranked[:depth]:
            idx = catalog.column_index(ref.table, ref.column)
            provenance.setdefault(idx, PROV_BM25)

    tables |= {catalog.columns[i].table_index for i in provenance}

    if mode == APPROX_ONLY:
        # Keep CREATE TABLE statements meaningful for bare-table references.
        covered = {catalog.columns[i].table_index for i in provenance}
        for t in tables - covered:
            for pk in catalog.primary_keys:
                if catalog.columns[pk].table_index == t:
                    provenance.setdefault(pk, PROV_KEYS)
    else:
        for pk in catalog.primary_keys:
            if catalog.columns[pk].table_index in tables:
                provenance.setdefault(pk, PROV_KEYS)
        for a, b in catalog.foreign_keys:
            if catalog.columns[a].table_index in tables \
                    and catalog.columns[b].table_index in tables:
                provenance.setdefault(a, PROV_KEYS)
                provenance.setdefault(b, PROV_KEYS)

    tables |= {catalog.columns[i].table_index for i in provenance}
    ordered_tables = tuple(catalog.tables[t].key for t in sorted(tables))
    ordered_columns = tuple(
        SelectedColumn(ref=catalog.column_ref(i), provenance=provenance[i])
        for i in sorted(provenance)
    )
    return SubSchema(db_id=catalog.db_id, selected_tables=ordered_tables,
                     selected_columns=ordered_columns)
