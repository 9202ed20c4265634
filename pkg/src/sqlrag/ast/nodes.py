"""Tree model for parsed SQL.

A statement is a rooted, ordered tree of :class:`AstNode`. Inner nodes carry
no text; every name, symbol or value lives in a leaf. Expression applications
(comparisons, boolean connectives, function calls, DISTINCT and sort-direction
wrappers) are ``FUNCTION`` nodes whose first child is an ``OPERATOR`` leaf
naming the operation, which keeps keywords and function names out of the
identifier/literal masking path.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator


class NodeKind(str, Enum):
    SELECT = "select"
    FROM = "from"
    JOIN = "join"
    ON = "on"
    WHERE = "where"
    GROUP_BY = "group-by"
    HAVING = "having"
    ORDER_BY = "order-by"
    LIMIT = "limit"
    SET_OP = "set-op"
    FUNCTION = "function"
    IDENTIFIER_TABLE = "identifier-table"
    IDENTIFIER_COLUMN = "identifier-column"
    ALIAS = "alias"
    LITERAL = "literal"
    OPERATOR = "operator"
    STAR = "star"
    SUBQUERY = "subquery"


# Leaf kinds whose text is replaced by "_" in cross-domain normalization.
MASKABLE_KINDS = frozenset(
    {NodeKind.IDENTIFIER_TABLE, NodeKind.IDENTIFIER_COLUMN, NodeKind.LITERAL}
)

MASK_TEXT = "_"


@dataclass(frozen=True)
class AstNode:
    """One node of a SQL tree. Immutable; children are a tuple."""

    kind: NodeKind
    text: str = ""
    children: tuple["AstNode", ...] = ()

    def __post_init__(self):
        if self.children and self.text:
            raise ValueError("inner nodes carry no text")
        if not self.children and not self.text and self.kind is not NodeKind.STAR:
            raise ValueError(f"leaf of kind {self.kind.value} needs text")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_masked(self) -> bool:
        return self.text == MASK_TEXT and self.kind in MASKABLE_KINDS

    def walk(self) -> Iterator["AstNode"]:
        """Pre-order traversal."""
        yield self
        for child in self.children:
            yield from child.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def replace(self, **changes) -> "AstNode":
        kind = changes.get("kind", self.kind)
        text = changes.get("text", self.text)
        children = tuple(changes.get("children", self.children))
        return AstNode(kind, text, children)


def node(kind: NodeKind, *children: AstNode) -> AstNode:
    return AstNode(kind, "", tuple(children))


def leaf(kind: NodeKind, text: str) -> AstNode:
    return AstNode(kind, text)


def star(text: str = "") -> AstNode:
    return AstNode(NodeKind.STAR, text)


class Dialect(str, Enum):
    GENERIC_SQLITE = "generic-sqlite"


@dataclass(frozen=True)
class SqlAst:
    """Parse result: a round-trippable tree for one SELECT statement."""

    root: AstNode
    dialect: Dialect = Dialect.GENERIC_SQLITE


class NormalizationMode(str, Enum):
    CROSS_DOMAIN = "cross-domain"
    IN_DOMAIN = "in-domain"


@dataclass(frozen=True)
class NormalizedAst:
    """Tree after normalization; the unit of similarity scoring."""

    root: AstNode
    mode: NormalizationMode

    def as_ast(self) -> SqlAst:
        return SqlAst(self.root)


def trees_equal(a: AstNode, b: AstNode) -> bool:
    """Structural equality that treats masked leaves of any maskable kind
    as interchangeable (tables, columns and values all render as "_")."""
    if a.is_masked and b.is_masked:
        return True
    if a.kind is not b.kind or a.text != b.text:
        return False
    if len(a.children) != len(b.children):
        return False
    return all(trees_equal(x, y) for x, y in zip(a.children, b.children))
