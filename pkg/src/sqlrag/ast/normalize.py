"""Four-step normalization of SQL trees.

Steps, in order:

1. lowercase identifiers and drop table qualifiers that are provably
   redundant (single-table FROM scope);
2. delete alias-creating nodes, rewriting qualifier references to the
   aliased table's real name and replacing references to select-item
   aliases with a copy of the aliased expression;
3. in-domain only: sort JOIN sources lexicographically by rendered name and
   order the operands of each ON equality lexicographically by rendered
   text;
4. cross-domain only: replace the text of every identifier and literal leaf
   with "_" (qualified stars lose their qualifier).

Steps 1-2 are implemented as lowercase -> alias resolution -> qualifier
stripping; stripping after alias resolution is equivalent to the listed
order and avoids resolving qualifiers twice.
"""

from __future__ import annotations

from ..errors import UnresolvableAlias
from .nodes import (
    MASK_TEXT,
    MASKABLE_KINDS,
    AstNode,
    NodeKind,
    NormalizationMode,
    NormalizedAst,
    SqlAst,
)
from .render import render

_IDENTIFIER_KINDS = (NodeKind.IDENTIFIER_TABLE, NodeKind.IDENTIFIER_COLUMN)
_ALIAS_REF_CLAUSES = (NodeKind.GROUP_BY, NodeKind.HAVING, NodeKind.ORDER_BY)
_SCOPE_KINDS = (NodeKind.SELECT, NodeKind.SET_OP, NodeKind.SUBQUERY)


def normalize(ast: SqlAst, mode: NormalizationMode | str) -> NormalizedAst:
    mode = NormalizationMode(mode)
    root = _lowercase(ast.root)
    root = _resolve(root, env=())
    root = _strip_qualifiers(root)
    if mode is NormalizationMode.IN_DOMAIN:
        root = _sort_joins(root)
    else:
        root = _mask(root)
    return NormalizedAst(root, mode)


def resolve_aliases(ast: SqlAst) -> AstNode:
    """Steps 1-2 only (lowercase, de-alias, strip redundant qualifiers).

    Used wherever schema references must be read off a query without
    masking: approximated-query column extraction, recall checks.
    """
    root = _lowercase(ast.root)
    root = _resolve(root, env=())
    return _strip_qualifiers(root)


# -- step 1a: lowercase --------------------------------------------------


def _lowercase(n: AstNode) -> AstNode:
    if n.is_leaf:
        if n.kind in _IDENTIFIER_KINDS or n.kind is NodeKind.STAR:
            return n.replace(text=n.text.lower())
        return n
    return n.replace(children=tuple(_lowercase(c) for c in n.children))


# -- step 2: alias resolution ---------------------------------------------

# env is a tuple of scope mappings, innermost first. Each maps a visible
# qualifier to the real table name, or to None for anonymous relations
# (subquery sources) whose qualifiers are simply dropped.


def _resolve(n: AstNode, env: tuple[dict[str, str | None], ...]) -> AstNode:
    if n.kind is NodeKind.SELECT:
        return _resolve_select(n, env)
    if n.kind in (NodeKind.SET_OP, NodeKind.SUBQUERY):
        return n.replace(children=tuple(_resolve(c, env) for c in n.children))
    if n.is_leaf:
        return n
    return n.replace(children=tuple(_resolve(c, env) for c in n.children))


def _resolve_select(select: AstNode, env) -> AstNode:
    from_node = next((c for c in select.children if c.kind is NodeKind.FROM), None)
    table_map: dict[str, str | None] = {}
    new_from = None
    if from_node is not None:
        new_from = _resolve_from(from_node, env, table_map)
    scope_env = (table_map,) + env

    alias_exprs: dict[str, AstNode] = {}
    new_children: list[AstNode] = []
    for child in select.children:
        if child is from_node:
            new_children.append(new_from)
            continue
        resolved = _resolve_exprs(child, scope_env)
        if resolved.kind is NodeKind.ALIAS:  # select-item alias
            expr, name = resolved.children
            alias_exprs[name.text] = expr
            resolved = expr
        new_children.append(resolved)

    if alias_exprs:
        new_children = [
            _substitute_alias_refs(c, alias_exprs)
            if c.kind in _ALIAS_REF_CLAUSES else c
            for c in new_children
        ]
    return select.replace(children=tuple(new_children))


def _resolve_from(from_node: AstNode, env, table_map: dict) -> AstNode:
    # Collect every source first; ON conditions may reference any of them.
    slots: list[AstNode] = []
    for child in from_node.children:
        if child.kind is NodeKind.JOIN:
            join_children = list(child.children)
            idx = 1 if join_children[0].kind is NodeKind.OPERATOR else 0
            join_children[idx] = _resolve_source(join_children[idx], env, table_map)
            slots.append(child.replace(children=tuple(join_children)))
        else:
            slots.append(_resolve_source(child, env, table_map))
    scope_env = (table_map,) + env
    resolved: list[AstNode] = []
    for slot in slots:
        if slot.kind is NodeKind.JOIN:
            children = tuple(
                _resolve_exprs(c, scope_env) if c.kind is NodeKind.ON else c
                for c in slot.children
            )
            resolved.append(slot.replace(children=children))
        else:
            resolved.append(slot)
    return from_node.replace(children=tuple(resolved))


def _resolve_source(source: AstNode, env, table_map: dict) -> AstNode:
    if source.kind is NodeKind.ALIAS:
        subject, name = source.children
        if subject.kind is NodeKind.IDENTIFIER_TABLE:
            table_map[name.text] = subject.text
            table_map.setdefault(subject.text, subject.text)
            return subject
        table_map[name.text] = None  # subquery source: qualifier is dropped
        return _resolve(subject, env)
    if source.kind is NodeKind.IDENTIFIER_TABLE:
        table_map[source.text] = source.text
        return source
    return _resolve(source, env)


def _resolve_exprs(n: AstNode, env) -> AstNode:
    if n.kind is NodeKind.SUBQUERY:
        return n.replace(children=tuple(_resolve(c, env) for c in n.children))
    if n.is_leaf:
        if n.kind is NodeKind.IDENTIFIER_COLUMN and "." in n.text:
            qualifier, column = n.text.split(".", 1)
            target = _lookup(qualifier, env)
            return n.replace(text=f"{target}.{column}" if target else column)
        if n.kind is NodeKind.STAR and n.text.endswith(".*"):
            qualifier = n.text[:-2]
            target = _lookup(qualifier, env)
            return n.replace(text=f"{target}.*" if target else "")
        return n
    return n.replace(children=tuple(_resolve_exprs(c, env) for c in n.children))


def _lookup(qualifier: str, env) -> str | None:
    for scope in env:
        if qualifier in scope:
            return scope[qualifier]
    raise UnresolvableAlias(f"alias or table {qualifier!r} is never defined")


def _substitute_alias_refs(n: AstNode, alias_exprs: dict[str, AstNode]) -> AstNode:
    if n.is_leaf:
        if n.kind is NodeKind.IDENTIFIER_COLUMN and n.text in alias_exprs:
            return alias_exprs[n.text]
        return n
    if n.kind is NodeKind.SUBQUERY:  # inner scopes resolve their own names
        return n
    return n.replace(children=tuple(_substitute_alias_refs(c, alias_exprs)
                                    for c in n.children))


# -- step 1b: qualifier stripping ------------------------------------------


def _strip_qualifiers(n: AstNode) -> AstNode:
    if n.kind is NodeKind.SELECT:
        sole_table = _sole_table_of(n)
        children = []
        for child in n.children:
            child = _strip_qualifiers(child)
            if sole_table is not None:
                child = _strip_in_scope(child, sole_table)
            children.append(child)
        return n.replace(children=tuple(children))
    if n.is_leaf:
        return n
    return n.replace(children=tuple(_strip_qualifiers(c) for c in n.children))


def _sole_table_of(select: AstNode) -> str | None:
    from_node = next((c for c in select.children if c.kind is NodeKind.FROM), None)
    if from_node is None or len(from_node.children) != 1:
        return None
    source = from_node.children[0]
    if source.kind is NodeKind.IDENTIFIER_TABLE:
        return source.text
    return None


def _strip_in_scope(n: AstNode, table: str) -> AstNode:
    if n.kind in _SCOPE_KINDS and n.kind is not NodeKind.SELECT:
        return n  # nested scopes already handled by _strip_qualifiers
    if n.kind is NodeKind.SELECT:
        return n
    if n.is_leaf:
        prefix = f"{table}."
        if n.kind is NodeKind.IDENTIFIER_COLUMN and n.text.startswith(prefix):
            return n.replace(text=n.text[len(prefix):])
        if n.kind is NodeKind.STAR and n.text == f"{table}.*":
            return n.replace(text="")
        return n
    return n.replace(children=tuple(_strip_in_scope(c, table) for c in n.children))


# -- step 3: JOIN ordering (in-domain) --------------------------------------


def _sort_joins(n: AstNode) -> AstNode:
    if n.is_leaf:
        return n
    children = tuple(_sort_joins(c) for c in n.children)
    n = n.replace(children=children)
    if n.kind is NodeKind.FROM and len(n.children) > 1:
        return _reorder_from(n)
    if n.kind is NodeKind.ON:
        return _sort_on_equalities(n)
    return n


def _reorder_from(from_node: AstNode) -> AstNode:
    sources: list[AstNode] = []
    for child in from_node.children:
        sources.append(_join_source(child) if child.kind is NodeKind.JOIN else child)
    ranked = sorted(sources, key=render)
    slots: list[AstNode] = []
    for child, source in zip(from_node.children, ranked):
        if child.kind is NodeKind.JOIN:
            slots.append(_with_join_source(child, source))
        else:
            slots.append(source)
    return from_node.replace(children=tuple(slots))


def _join_source(join: AstNode) -> AstNode:
    idx = 1 if join.children[0].kind is NodeKind.OPERATOR else 0
    return join.children[idx]


def _with_join_source(join: AstNode, source: AstNode) -> AstNode:
    children = list(join.children)
    idx = 1 if children[0].kind is NodeKind.OPERATOR else 0
    children[idx] = source
    return join.replace(children=tuple(children))


def _sort_on_equalities(n: AstNode) -> AstNode:
    if n.is_leaf:
        return n
    children = tuple(_sort_on_equalities(c) for c in n.children)
    n = n.replace(children=children)
    if (n.kind is NodeKind.FUNCTION and len(n.children) == 3
            and n.children[0].text == "="):
        op, left, right = n.children
        if render(left) > render(right):
            return n.replace(children=(op, right, left))
    return n


# -- step 4: masking (cross-domain) -----------------------------------------


def _mask(n: AstNode) -> AstNode:
    if n.is_leaf:
        if n.kind in MASKABLE_KINDS:
            return n.replace(text=MASK_TEXT)
        if n.kind is NodeKind.STAR and n.text:
            return n.replace(text="")  # qualified stars would leak table names
        return n
    return n.replace(children=tuple(_mask(c) for c in n.children))
