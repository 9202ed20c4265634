"""Database schema catalogs in the Spider tables.json shape."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable


@dataclass(frozen=True, order=True)
class ColumnRef:
    table: str
    column: str

    def __str__(self) -> str:
        return f"{self.table}.{self.column}"

    @classmethod
    def parse(cls, text: str) -> "ColumnRef":
        table, _, column = text.partition(".")
        return cls(table.lower(), column.lower())


@dataclass(frozen=True)
class TableInfo:
    name: str           # original casing, as rendered in prompts
    semantic_name: str  # human-readable; falls back to the raw name

    @property
    def key(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class ColumnInfo:
    table_index: int
    name: str
    semantic_name: str
    type: str  # text | number | time | boolean | others
    values: tuple[str, ...] = ()

    @property
    def key(self) -> str:
        return self.name.lower()


@dataclass
class SchemaCatalog:
    db_id: str
    tables: list[TableInfo]
    columns: list[ColumnInfo]
    primary_keys: list[int] = field(default_factory=list)
    foreign_keys: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.tables:
            raise ValueError(f"{self.db_id}: catalog needs at least one table")
        for col in self.columns:
            if not 0 <= col.table_index < len(self.tables):
                raise ValueError(f"{self.db_id}: column {col.name} references "
                                 f"unknown table index {col.table_index}")
        per_table = {c.table_index for c in self.columns}
        for t in range(len(self.tables)):
            if t not in per_table:
                raise ValueError(f"{self.db_id}: table {self.tables[t].name} "
                                 "has no columns")
        for idx in self.primary_keys:
            self._check_column(idx)
        for a, b in self.foreign_keys:
            self._check_column(a)
            self._check_column(b)
        self._by_ref = {self.column_ref(i): i for i in range(len(self.columns))}
        self._table_by_key = {t.key: i for i, t in enumerate(self.tables)}

    def _check_column(self, idx: int):
        if not 0 <= idx < len(self.columns):
            raise ValueError(f"{self.db_id}: key references unknown column {idx}")

    # -- lookups -----------------------------------------------------------

    def column_ref(self, idx: int) -> ColumnRef:
        col = self.columns[idx]
        return ColumnRef(self.tables[col.table_index].key, col.key)

    def table_index(self, name: str) -> int | None:
        return self._table_by_key.get(name.lower())

    def column_index(self, table: str, column: str) -> int | None:
        return self._by_ref.get(ColumnRef(table.lower(), column.lower()))

    def columns_of(self, table_index: int) -> list[int]:
        return [i for i, c in enumerate(self.columns)
                if c.table_index == table_index]

    def tables_containing(self, column: str) -> list[int]:
        column = column.lower()
        return sorted({c.table_index for c in self.columns if c.key == column})

    @property
    def element_count(self) -> int:
        return len(self.tables) + len(self.columns)

    # -- construction --------------------------------------------------------

    @classmethod
    def from_spider(cls, entry: dict,
                    values: dict[str, list[str]] | None = None,
                    value_cap: int = 1000) -> "SchemaCatalog":
        """Build from one tables.json entry plus an optional values sidecar
        mapping "table.column" to distinct values."""
        raw_tables = entry["table_names_original"]
        semantic_tables = entry.get("table_names") or raw_tables
        tables = [TableInfo(name=raw, semantic_name=sem)
                  for raw, sem in zip(raw_tables, semantic_tables)]

        raw_cols = entry["column_names_original"]
        semantic_cols = entry.get("column_names") or raw_cols
        types = entry.get("column_types") or ["text"] * len(raw_cols)

        columns: list[ColumnInfo] = []
        orig_to_new: dict[int, int] = {}
        for orig_idx, (tbl_idx, name) in enumerate(raw_cols):
            if tbl_idx < 0:  # the "*" pseudo-column
                continue
            sem = semantic_cols[orig_idx][1] if orig_idx < len(semantic_cols) else name
            ref_key = f"{raw_tables[tbl_idx].lower()}.{name.lower()}"
            vals = tuple((values or {}).get(ref_key, ())[:value_cap])
            orig_to_new[orig_idx] = len(columns)
            columns.append(ColumnInfo(
                table_index=tbl_idx,
                name=name,
                semantic_name=sem or name,
                type=types[orig_idx] if orig_idx < len(types) else "text",
                values=vals,
            ))

        primary = [orig_to_new[i] for i in entry.get("primary_keys", ())
                   if i in orig_to_new]
        foreign = [(orig_to_new[a], orig_to_new[b])
                   for a, b in entry.get("foreign_keys", ())
                   if a in orig_to_new and b in orig_to_new]
        return cls(db_id=entry["db_id"], tables=tables, columns=columns,
                   primary_keys=primary, foreign_keys=foreign)

    def restrict(self, table_keys: Iterable[str],
                 column_refs: Iterable[ColumnRef]) -> "SchemaCatalog":
        """Catalog reduced to the given tables/columns (key indices remapped)."""
        table_keys = set(table_keys)
        column_refs = set(column_refs)
        kept_tables = [i for i, t in enumerate(self.tables) if t.key in table_keys]
        table_remap = {old: new for new, old in enumerate(kept_tables)}
        kept_cols = [i for i in range(len(self.columns))
                     if self.column_ref(i) in column_refs
                     and self.columns[i].table_index in table_remap]
        col_remap = {old: new for new, old in enumerate(kept_cols)}
        columns = [replace(self.columns[i],
                           table_index=table_remap[self.columns[i].table_index])
                   for i in kept_cols]
        return SchemaCatalog(
            db_id=self.db_id,
            tables=[self.tables[i] for i in kept_tables],
            columns=columns,
            primary_keys=[col_remap[i] for i in self.primary_keys if i in col_remap],
            foreign_keys=[(col_remap[a], col_remap[b])
                          for a, b in self.foreign_keys
                          if a in col_remap and b in col_remap],
        )
