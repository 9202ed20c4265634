"""Canonical SQL rendering: one line, uppercase keywords, single spaces.

Rendering then re-parsing any parser-produced tree yields a structurally
identical tree; golden tests pin the exact text.
"""

from __future__ import annotations

from .nodes import AstNode, NodeKind, NormalizedAst, SqlAst

_CLAUSE_KINDS = (
    NodeKind.FROM, NodeKind.WHERE, NodeKind.GROUP_BY, NodeKind.HAVING,
    NodeKind.ORDER_BY, NodeKind.LIMIT,
)

_INFIX = {"=", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/",
          "AND", "OR", "LIKE", "NOT LIKE"}

_PRECEDENCE = {
    "OR": 1,
    "AND": 2,
    "NOT": 3,
    "=": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "LIKE": 4, "NOT LIKE": 4, "IN": 4, "NOT IN": 4,
    "BETWEEN": 4, "NOT BETWEEN": 4, "IS NULL": 4, "IS NOT NULL": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}
_ATOM_PRECEDENCE = 9


def render(tree: AstNode | SqlAst | NormalizedAst) -> str:
    """Render a tree (or wrapper) to canonical SQL text."""
    root = tree if isinstance(tree, AstNode) else tree.root
    return _render(root)


def _render(n: AstNode) -> str:
    kind = n.kind
    if kind is NodeKind.SELECT:
        return _render_select(n)
    if kind is NodeKind.SET_OP:
        op, left, right = n.children
        left_sql = _render(left)
        right_sql = _render(right)
        if right.kind is NodeKind.SET_OP:  # right-nested grouping is explicit
            right_sql = f"({right_sql})"
        return f"{left_sql} {op.text} {right_sql}"
    if kind is NodeKind.SUBQUERY:
        return f"({_render(n.children[0])})"
    if kind is NodeKind.FROM:
        parts = [f"FROM {_render(n.children[0])}"]
        parts.extend(_render(child) for child in n.children[1:])
        return " ".join(parts)
    if kind is NodeKind.JOIN:
        children = list(n.children)
        word = "JOIN"
        if children[0].kind is NodeKind.OPERATOR:
            word = children.pop(0).text
        out = f"{word} {_render(children[0])}"
        if len(children) > 1:
            out += f" {_render(children[1])}"
        return out
    if kind is NodeKind.ON:
        return f"ON {_expr(n.children[0], 0)}"
    if kind is NodeKind.WHERE:
        return f"WHERE {_expr(n.children[0], 0)}"
    if kind is NodeKind.HAVING:
        return f"HAVING {_expr(n.children[0], 0)}"
    if kind is NodeKind.GROUP_BY:
        return "GROUP BY " + ", ".join(_expr(c, 0) for c in n.children)
    if kind is NodeKind.ORDER_BY:
        return "ORDER BY " + ", ".join(_expr(c, 0) for c in n.children)
    if kind is NodeKind.LIMIT:
        return f"LIMIT {n.children[0].text}"
    if kind is NodeKind.ALIAS:
        subject, name = n.children
        return f"{_expr(subject, 0)} AS {name.text}"
    if kind is NodeKind.FUNCTION:
        return _render_application(n)
    if kind is NodeKind.STAR:
        return n.text or "*"
    return n.text


def _render_select(n: AstNode) -> str:
    children = list(n.children)
    head = "SELECT"
    if children and children[0].kind is NodeKind.OPERATOR \
            and children[0].text == "DISTINCT":
        head = "SELECT DISTINCT"
        children.pop(0)
    items: list[str] = []
    clauses: list[str] = []
    for child in children:
        if child.kind in _CLAUSE_KINDS:
            clauses.append(_render(child))
        else:
            items.append(_expr(child, 0))
    out = f"{head} {', '.join(items)}"
    for clause in clauses:
        out += f" {clause}"
    return out


def _render_application(n: AstNode) -> str:
    op = n.children[0].text
    args = n.children[1:]
    prec = _PRECEDENCE.get(op, _ATOM_PRECEDENCE)
    if op in _INFIX and len(args) == 2:
        left = _expr(args[0], prec)
        right = _expr(args[1], prec, right_side=True)
        return f"{left} {op} {right}"
    if op in ("-", "+") and len(args) == 1:
        return f"{op}{_expr(args[0], _ATOM_PRECEDENCE)}"
    if op == "NOT":
        return f"NOT {_expr(args[0], prec)}"
    if op in ("BETWEEN", "NOT BETWEEN"):
        subject = _expr(args[0], prec)
        low = _expr(args[1], 5)
        high = _expr(args[2], 5)
        return f"{subject} {op} {low} AND {high}"
    if op in ("IN", "NOT IN"):
        subject = _expr(args[0], prec)
        if len(args) == 2 and args[1].kind is NodeKind.SUBQUERY:
            return f"{subject} {op} {_render(args[1])}"
        return f"{subject} {op} ({', '.join(_expr(a, 0) for a in args[1:])})"
    if op in ("IS NULL", "IS NOT NULL"):
        return f"{_expr(args[0], prec)} {op}"
    if op == "EXISTS":
        return f"EXISTS {_render(args[0])}"
    if op in ("ASC", "DESC"):
        return f"{_expr(args[0], 0)} {op}"
    if op == "DISTINCT":
        return f"DISTINCT {_expr(args[0], 0)}"
    return f"{op}({', '.join(_expr(a, 0) for a in args)})"


def _expr(n: AstNode, parent_prec: int, right_side: bool = False) -> str:
    rendered = _render(n)
    if n.kind is not NodeKind.FUNCTION:
        return rendered
    op = n.children[0].text
    prec = _PRECEDENCE.get(op, _ATOM_PRECEDENCE)
    if prec < parent_prec or (prec == parent_prec and right_side):
        return f"({rendered})"
    return rendered
