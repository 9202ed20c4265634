"""Few-shot example retrieval and AST re-ranking."""

from .embedder import Embedder, PrecomputedEmbedder, RemoteEmbedder
from .store import (
    DEFAULT_E,
    DEFAULT_POOL,
    ExampleIndex,
    ExampleRecord,
    RankedExample,
    SelectionResult,
    build_index,
    retrieve_by_question,
    select_by_question_only,
    select_examples,
)

__all__ = [
    "DEFAULT_E", "DEFAULT_POOL", "Embedder", "ExampleIndex", "ExampleRecord",
    "PrecomputedEmbedder", "RankedExample", "RemoteEmbedder",
    "SelectionResult", "build_index", "retrieve_by_question",
    "select_by_question_only", "select_examples",
]
