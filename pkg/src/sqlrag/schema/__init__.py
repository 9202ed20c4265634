"""Schema catalogs, sub-schema selection and value selection."""

from .catalog import ColumnInfo, ColumnRef, SchemaCatalog, TableInfo
from .elements import QueryElements, query_elements
from .select import (
    APPROX_ONLY,
    BM25_TOPK,
    HYBRID_DYNAMIC,
    PROV_APPROX,
    PROV_BM25,
    PROV_KEYS,
    ColumnDocument,
    ColumnIndex,
    SelectedColumn,
    SubSchema,
    build_column_index,
    dynamic_k,
    score_bm25,
    select_sub_schema,
)
from .values import ValueSelection, select_values

__all__ = [
    "APPROX_ONLY", "BM25_TOPK", "HYBRID_DYNAMIC",
    "PROV_APPROX", "PROV_BM25", "PROV_KEYS",
    "ColumnDocument", "ColumnIndex", "ColumnInfo", "ColumnRef",
    "QueryElements", "SchemaCatalog", "SelectedColumn", "SubSchema",
    "TableInfo", "ValueSelection", "build_column_index", "dynamic_k",
    "query_elements", "score_bm25", "select_sub_schema", "select_values",
]
