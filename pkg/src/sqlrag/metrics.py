"""Evaluation metrics: schema recall, schema shortening, exact-match proxy
and the AST-similarity interval buckets.
"""

from __future__ import annotations

from .ast import NormalizationMode, normalize, parse_sql
from .errors import ParseError, SqlragError
from .schema.catalog import SchemaCatalog
from .schema.elements import query_elements
from .schema.select import SubSchema

# Mean-AST-score buckets, highest first; the top interval is closed.
AST_BUCKETS = (
    ("[0.95, 1.0]", 0.95),
    ("[0.9, 0.95)", 0.9),
    ("[0.85, 0.9)", 0.85),
    ("[0.8, 0.85)", 0.8),
    ("[0.0, 0.8)", 0.0),
)


def recall_metric(sub: SubSchema, gold_sql: str, catalog: SchemaCatalog) -> bool:
    """True iff every table and column the gold query references (after
    alias resolution) is in the sub-schema."""
    elements = query_elements(catalog, gold_sql)
    tables = {catalog.tables[t].key for t in elements.table_indexes}
    columns = {catalog.column_ref(i) for i in elements.column_indexes}
    return tables <= sub.table_keys and columns <= sub.column_refs


def shortening_metric(sub: SubSchema, catalog: SchemaCatalog) -> float:
    """Excluded fraction of schema elements (tables + columns)."""
    total = catalog.element_count
    kept = len(sub.selected_tables) + len(sub.selected_columns)
    if kept > total:
        raise SqlragError("sub-schema is larger than its catalog")
    return (total - kept) / total


def em_proxy(pred_sql: str, gold_sql: str) -> bool:
    """Structural equality of in-domain normalized trees; values compared
    literally. Unparseable predictions never match."""
    try:
        pred = normalize(parse_sql(pred_sql), NormalizationMode.IN_DOMAIN)
        gold = normalize(parse_sql(gold_sql), NormalizationMode.IN_DOMAIN)
    except (ParseError, SqlragError):
        return False
    return pred.root == gold.root


def ast_bucket(mean_score: float) -> str:
    for label, lower in AST_BUCKETS:
        if mean_score >= lower:
            return label
    return AST_BUCKETS[-1][0]
