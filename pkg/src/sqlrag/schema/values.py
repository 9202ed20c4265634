"""Representative value selection for non-numeric columns."""

from __future__ import annotations

from dataclasses import dataclass

from ..text import tokenize
from .catalog import ColumnRef, SchemaCatalog
from .select import SubSchema

TOP_VALUES = 3


@dataclass(frozen=True)
class ValueSelection:
    ref: ColumnRef
    values: tuple[str, ...]
    matched: bool  # any value shared a stemmed token with the question


def select_values(catalog: SchemaCatalog, sub: SubSchema, question: str,
                  topk: int = TOP_VALUES) -> dict[ColumnRef, ValueSelection]:
    """Per selected non-numeric column: the up-to-``topk`` values sharing the
    most stemmed tokens with the question (ties by ascending value); columns
    with no match fall back to their first ``topk`` distinct values."""
    question_tokens = set(tokenize(question))
    out: dict[ColumnRef, ValueSelection] = {}
    for selected in sub.selected_columns:
        idx = catalog.column_index(selected.ref.table, selected.ref.column)
        if idx is None:
            continue
        col = catalog.columns[idx]
        if col.type == "number":
            continue
        distinct: list[str] = []
        seen: set[str] = set()
        for value in col.values:
            if value not in seen:
                seen.add(value)
                distinct.append(value)
        if not distinct:
            continue
        scored = [(len(set(tokenize(v)) & question_tokens), v) for v in distinct]
        matches = sorted((s, v) for s, v in scored if s > 0)
        matches.sort(key=lambda sv: (-sv[0], sv[1]))
        if matches:
            chosen = tuple(v for _s, v in matches[:topk])
            out[selected.ref] = ValueSelection(selected.ref, chosen, matched=True)
        else:
            out[selected.ref] = ValueSelection(selected.ref, tuple(distinct[:topk]),
                                               matched=False)
    return out
