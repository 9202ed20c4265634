"""Reading schema references off a SQL query: which tables and columns of a
catalog does a statement touch. Shared by sub-schema selection (approximated
queries) and the recall metric (gold queries).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ast.nodes import AstNode, NodeKind, SqlAst
from ..ast.normalize import resolve_aliases
from ..ast.parser import parse_sql
from .catalog import SchemaCatalog


@dataclass
class QueryElements:
    table_indexes: set[int]
    column_indexes: set[int]
    unique_column_names: set[str]  # normalized references, stars excluded

    @property
    def gamma(self) -> int:
        return len(self.unique_column_names)


def query_elements(catalog: SchemaCatalog, sql: str | SqlAst) -> QueryElements:
    ast = parse_sql(sql) if isinstance(sql, str) else sql
    root = resolve_aliases(ast)
    out = QueryElements(set(), set(), set())
    _walk_scope(root, catalog, scope_chain=(), out=out)
    return out


def _scope_tables(select: AstNode, catalog: SchemaCatalog) -> list[int]:
    from_node = next((c for c in select.children if c.kind is NodeKind.FROM), None)
    tables: list[int] = []
    if from_node is None:
        return tables
    for child in from_node.children:
        source = child
        if child.kind is NodeKind.JOIN:
            idx = 1 if child.children[0].kind is NodeKind.OPERATOR else 0
            source = child.children[idx]
        if source.kind is NodeKind.IDENTIFIER_TABLE:
            t = catalog.table_index(source.text)
            if t is not None and t not in tables:
                tables.append(t)
    return tables


def _walk_scope(n: AstNode, catalog: SchemaCatalog, scope_chain, out: QueryElements):
    if n.kind is NodeKind.SELECT:
        local = _scope_tables(n, catalog)
        out.table_indexes.update(local)
        chain = (local,) + scope_chain
        for child in n.children:
            _collect(child, catalog, chain, out)
        return
    for child in n.children:
        _walk_scope(child, catalog, scope_chain, out)


def _collect(n: AstNode, catalog: SchemaCatalog, chain, out: QueryElements):
    if n.kind is NodeKind.SUBQUERY:
        # Nested scope; the current chain becomes its outer environment.
        _walk_scope(n, catalog, chain, out)
        return
    if n.kind is NodeKind.IDENTIFIER_COLUMN:
        _record_column(n.text, catalog, chain, out)
        return
    for child in n.children:
        _collect(child, catalog, chain, out)


def _record_column(text: str, catalog: SchemaCatalog, chain, out: QueryElements):
    if "." in text:
        table, _, column = text.partition(".")
        out.unique_column_names.add(f"{table}.{column}".lower())
        idx = catalog.column_index(table, column)
        if idx is not None:
            out.column_indexes.add(idx)
        return
    # Bare column: resolve against scope tables, innermost scope first.
    column = text.lower()
    for scope in chain:
        containing = [t for t in scope
                      if catalog.column_index(catalog.tables[t].key, column) is not None]
        if containing:
            table_key = catalog.tables[containing[0]].key
            idx = catalog.column_index(table_key, column)
            out.column_indexes.add(idx)
            out.unique_column_names.add(f"{table_key}.{column}")
            return
    # Not resolvable in any scope; count it for gamma but select nothing.
    out.unique_column_names.add(column)
