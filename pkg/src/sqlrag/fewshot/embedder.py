"""Question embedders behind a tiny protocol.

Re-embedding with a different model is not reproducible, so the default
backend reads precomputed vectors; a remote endpoint backend covers live
embedding. Vectors are L2-normalized on the way in.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Protocol, Sequence

import httpx
import numpy as np

from ..errors import EmbedderUnavailable


class Embedder(Protocol):
    embedder_id: str

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """Unit-normalized float32 matrix, one row per text."""
        ...


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float32)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


class PrecomputedEmbedder:
    """Vector file backend: JSON-lines with ``vector`` plus ``text`` and/or
    ``id`` keys. Lookup is by exact text (ids serve as secondary keys)."""

    def __init__(self, path: str | Path, embedder_id: str | None = None):
        self.path = Path(path)
        by_text: dict[str, list[float]] = {}
        header_id = None
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                if "embedder_id" in entry and "vector" not in entry:
                    header_id = entry["embedder_id"]
                    continue
                vector = entry["vector"]
                if "text" in entry:
                    by_text[entry["text"]] = vector
                if "id" in entry:
                    by_text.setdefault(f"id:{entry['id']}", vector)
        self._by_text = by_text
        self.embedder_id = embedder_id or header_id or f"precomputed:{self.path.name}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        rows = []
        for text in texts:
            vector = self._by_text.get(text)
            if vector is None:
                raise EmbedderUnavailable(
                    f"no precomputed vector for text {text[:60]!r}")
            rows.append(vector)
        return _normalize_rows(np.array(rows, dtype=np.float32))


class RemoteEmbedder:
    """POST {"model": ..., "input": [texts]} -> {"vectors": [[...], ...]}."""

    def __init__(self, url: str, model: str = "default",
                 api_key_env: str = "SQLRAG_API_KEY", timeout: float = 30.0):
        self.url = url
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.embedder_id = f"remote:{model}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        headers = {}
        token = os.environ.get(self.api_key_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        try:
            response = httpx.post(self.url, json={"model": self.model,
                                                  "input": list(texts)},
                                  headers=headers, timeout=self.timeout)
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise EmbedderUnavailable(f"embedding endpoint failed: {exc}") from exc
        vectors = payload.get("vectors")
        if vectors is None or len(vectors) != len(texts):
            raise EmbedderUnavailable("embedding endpoint returned a bad payload")
        return _normalize_rows(np.array(vectors, dtype=np.float32))
