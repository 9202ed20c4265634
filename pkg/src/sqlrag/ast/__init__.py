"""SQL parsing, normalization and tree-diff similarity."""

from .diff import (
    ALIGNMENT,
    DELETE,
    INSERT,
    MOVE,
    UPDATE,
    AstSimilarity,
    EditOp,
    EditScript,
    apply_script,
    diff,
    script_is_sound,
    similarity,
    text_similarity,
)
from .nodes import (
    AstNode,
    Dialect,
    NodeKind,
    NormalizationMode,
    NormalizedAst,
    SqlAst,
    leaf,
    node,
    star,
    trees_equal,
)
from .normalize import normalize, resolve_aliases
from .parser import parse_sql
from .render import render

__all__ = [
    "ALIGNMENT", "DELETE", "INSERT", "MOVE", "UPDATE",
    "AstNode", "AstSimilarity", "Dialect", "EditOp", "EditScript",
    "NodeKind", "NormalizationMode", "NormalizedAst", "SqlAst",
    "apply_script", "diff", "leaf", "node", "normalize", "parse_sql",
    "render", "resolve_aliases", "script_is_sound", "similarity", "star",
    "text_similarity", "trees_equal",
]
