"""Index of training (question, SQL) pairs and the two-stage selection:
retrieve a pool by question-embedding similarity, re-rank by AST similarity
against the approximated query.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ast import NormalizationMode, NormalizedAst, normalize, parse_sql, similarity
from ..errors import EmbedderUnavailable, ParseError
from .embedder import Embedder, _normalize_rows

DEFAULT_POOL = 500
DEFAULT_E = 5

_RECORDS_FILE = "records.jsonl"
_EMBEDDINGS_FILE = "embeddings.bin"


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    question: str
    sql: str
    normalized_ast: NormalizedAst  # cross-domain, precomputed


@dataclass
class ExampleIndex:
    records: list[ExampleRecord]
    embeddings: np.ndarray  # float32 (n, dim), unit rows, row i = records[i]
    embedder_id: str
    embedder: Embedder | None = None

    def __len__(self) -> int:
        return len(self.records)

    # -- persistence ---------------------------------------------------------

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / _RECORDS_FILE).open("w") as fh:
            for record in self.records:
                fh.write(json.dumps({"id": record.id, "question": record.question,
                                     "sql": record.sql}) + "\n")
        header = json.dumps({"dim": int(self.embeddings.shape[1]),
                             "count": int(self.embeddings.shape[0]),
                             "embedder_id": self.embedder_id}).encode()
        matrix = np.ascontiguousarray(self.embeddings, dtype="<f4")
        with (directory / _EMBEDDINGS_FILE).open("wb") as fh:
            fh.write(header + b"\n")
            fh.write(matrix.tobytes())

    @classmethod
    def load(cls, directory: str | Path,
             embedder: Embedder | None = None) -> "ExampleIndex":
        directory = Path(directory)
        raw = (directory / _EMBEDDINGS_FILE).read_bytes()
        newline = raw.index(b"\n")
        header = json.loads(raw[:newline].decode())
        matrix = np.frombuffer(raw[newline + 1:], dtype="<f4").reshape(
            header["count"], header["dim"]).copy()
        records = []
        with (directory / _RECORDS_FILE).open() as fh:
            for line in fh:
                entry = json.loads(line)
                records.append(_make_record(entry["id"], entry["question"],
                                            entry["sql"]))
        if len(records) != header["count"]:
            raise ValueError("records/embeddings count mismatch")
        return cls(records=records, embeddings=matrix,
                   embedder_id=header["embedder_id"], embedder=embedder)


def _make_record(pair_id: str, question: str, sql: str) -> ExampleRecord:
    try:
        ast = parse_sql(sql)
    except ParseError as exc:
        raise ParseError(f"pair {pair_id}: {exc}", exc.offset) from exc
    return ExampleRecord(
        id=pair_id, question=question, sql=sql,
        normalized_ast=normalize(ast, NormalizationMode.CROSS_DOMAIN),
    )


def build_index(pairs, embedder: Embedder) -> ExampleIndex:
    """``pairs`` is a sequence of (question, sql) or (id, question, sql);
    ids default to the zero-padded position."""
    records: list[ExampleRecord] = []
    for position, pair in enumerate(pairs):
        if len(pair) == 3:
            pair_id, question, sql = pair
        else:
            question, sql = pair
            pair_id = f"x{position:06d}"
        records.append(_make_record(str(pair_id), question, sql))
    if records:
        embeddings = _normalize_rows(embedder.embed([r.question for r in records]))
    else:
        embeddings = np.zeros((0, 1), dtype=np.float32)
    return ExampleIndex(records=records, embeddings=embeddings,
                        embedder_id=embedder.embedder_id, embedder=embedder)


@dataclass(frozen=True)
class RankedExample:
    record: ExampleRecord
    ast_score: float
    question_rank: int  # 0-based rank in the question-similarity pool


@dataclass(frozen=True)
class SelectionResult:
    chosen: tuple[RankedExample, ...]  # ascending score; best example last
    pool_size: int
    fallback: bool = False  # question-only selection (approximator failed)


def retrieve_by_question(index: ExampleIndex, question: str,
                         pool: int = DEFAULT_POOL) -> list[ExampleRecord]:
    """Records sorted by descending cosine similarity, ties by record id."""
    if index.embedder is None:
        raise EmbedderUnavailable("index has no embedder attached")
    if not index.records:
        return []
    query = index.embedder.embed([question])[0]
    scores = index.embeddings @ query
    order = sorted(range(len(index.records)),
                   key=lambda i: (-float(scores[i]), index.records[i].id))
    return [index.records[i] for i in order[:pool]]


def select_examples(index: ExampleIndex, question: str, approx_sql: str,
                    e: int = DEFAULT_E, pool: int = DEFAULT_POOL) -> SelectionResult:
    """Top-``pool`` by question similarity, re-ranked by AST similarity
    against the approximated query; ties by question rank, then id. The
    chosen list is ordered for prompting: most similar example last."""
    approx = normalize(parse_sql(approx_sql), NormalizationMode.CROSS_DOMAIN)
    candidates = retrieve_by_question(index, question, pool)
    ranked = [
        RankedExample(
            record=record,
            ast_score=similarity(approx, record.normalized_ast).score,
            question_rank=rank,
        )
        for rank, record in enumerate(candidates)
    ]
    ranked.sort(key=lambda r: (-r.ast_score, r.question_rank, r.record.id))
    chosen = tuple(reversed(ranked[:e]))
    return SelectionResult(chosen=chosen, pool_size=len(candidates))


def select_by_question_only(index: ExampleIndex, question: str, e: int = DEFAULT_E,
                            pool: int = DEFAULT_POOL) -> SelectionResult:
    """Fallback when the approximated query does not parse."""
    candidates = retrieve_by_question(index, question, pool)
    ranked = [RankedExample(record=record, ast_score=0.0, question_rank=rank)
              for rank, record in enumerate(candidates[:e])]
    return SelectionResult(chosen=tuple(reversed(ranked)),
                           pool_size=len(candidates), fallback=True)
