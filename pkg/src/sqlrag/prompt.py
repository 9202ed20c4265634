"""Prompt assembly: CREATE TABLE rendering of the selected sub-schema with
value-bearing COMMENTs, the selected examples as bare Question/SQL pairs,
and the test question. The committed golden file is the byte-exact contract
for this layout.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import InconsistentBundle
from .fewshot.store import SelectionResult
from .schema.catalog import SchemaCatalog
from .schema.select import SubSchema

VALUE_CHAR_LIMIT = 64  # keeps runaway cell contents from bloating prompts

_TASK_LINE = "# Your task is to translate Question into SQL."
_EXAMPLES_LINE = "# Some examples are provided based on similar problems:"


@dataclass(frozen=True)
class PromptBundle:
    text: str
    sub: SubSchema
    examples: SelectionResult
    question: str
    db_id: str

    @property
    def prompt_sha256(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


def comment_is_redundant(name: str, semantic_name: str) -> bool:
    """A COMMENT is dropped when the semantic name is derivable from the raw
    name by lowercasing and/or removing underscores."""
    lowered = name.lower()
    candidates = {lowered, lowered.replace("_", " "), lowered.replace("_", "")}
    return semantic_name.strip().lower() in candidates


def render_prompt(catalog: SchemaCatalog, sub: SubSchema,
                  examples: SelectionResult, question: str) -> PromptBundle:
    """Deterministic prompt text for one test question.

    Example pairs come from other databases by design and carry no schema;
    only the sub-schema is checked against the catalog's database."""
    if sub.db_id != catalog.db_id:
        raise InconsistentBundle(
            f"sub-schema is for {sub.db_id!r}, catalog is {catalog.db_id!r}")

    lines: list[str] = [f"# Given SQLite database schema {catalog.db_id}:"]
    selected_tables = sub.table_keys
    selected_columns = sub.column_refs
    for t_idx, table in enumerate(catalog.tables):
        if table.key not in selected_tables:
            continue
        lines.append(f"CREATE TABLE {table.name}(")
        body: list[str] = []
        for c_idx in catalog.columns_of(t_idx):
            ref = catalog.column_ref(c_idx)
            if ref not in selected_columns:
                continue
            col = catalog.columns[c_idx]
            entry = f"{col.name} {col.type}"
            comment = _column_comment(col.name, col.semantic_name,
                                      sub.selected_values.get(ref, ()))
            if comment:
                entry += f" COMMENT '{comment}'"
            body.append(entry)
        pk_cols = [catalog.columns[i].name for i in catalog.primary_keys
                   if catalog.columns[i].table_index == t_idx
                   and catalog.column_ref(i) in selected_columns]
        if pk_cols:
            body.append(f"PRIMARY KEY ({', '.join(pk_cols)})")
        for a, b in catalog.foreign_keys:
            if catalog.columns[a].table_index != t_idx:
                continue
            if catalog.column_ref(a) not in selected_columns \
                    or catalog.column_ref(b) not in selected_columns:
                continue
            target_table = catalog.tables[catalog.columns[b].table_index]
            body.append(f"FOREIGN KEY ({catalog.columns[a].name}) REFERENCES "
                        f"{target_table.name}({catalog.columns[b].name})")
        for k, entry in enumerate(body):
            terminator = ");" if k == len(body) - 1 else ","
            lines.append(f"    {entry}{terminator}")
        if not body:  # tables are only selected through columns or keys
            lines[-1] = lines[-1].rstrip("(") + "();"

    lines.append("")
    lines.append(_TASK_LINE)
    lines.append(_EXAMPLES_LINE)
    for ranked in examples.chosen:
        lines.append(f"Question: {ranked.record.question}")
        lines.append(f"SQL: {ranked.record.sql}")

    lines.append("")
    lines.append(f"# Complete the following SQL for schema {catalog.db_id}:")
    lines.append(f"Question: {question}")
    lines.append("SQL:")
    return PromptBundle(text="\n".join(lines), sub=sub, examples=examples,
                        question=question, db_id=catalog.db_id)


def _column_comment(name: str, semantic_name: str,
                    values: tuple[str, ...]) -> str | None:
    redundant = comment_is_redundant(name, semantic_name)
    if redundant and not values:
        return None
    comment = semantic_name.strip()
    if values:
        shown = ", ".join(v[:VALUE_CHAR_LIMIT] for v in values)
        comment += f" (e.g. {shown})"
    return comment.replace("'", "''")
