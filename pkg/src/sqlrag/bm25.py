"""Okapi BM25 over small in-memory corpora.

One index per database schema; documents are column token lists. IDF is the
standard ln((N - df + 0.5) / (df + 0.5)) floored at zero, k1 = 1.5 and
b = 0.75 unless configured otherwise.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field


@dataclass
class Bm25Index:
    k1: float = 1.5
    b: float = 0.75
    doc_freqs: list[Counter] = field(default_factory=list)
    doc_lens: list[int] = field(default_factory=list)
    idf: dict[str, float] = field(default_factory=dict)
    avgdl: float = 0.0

    @classmethod
    def build(cls, documents: list[list[str]], k1: float = 1.5,
              b: float = 0.75) -> "Bm25Index":
        index = cls(k1=k1, b=b)
        index.doc_freqs = [Counter(doc) for doc in documents]
        index.doc_lens = [len(doc) for doc in documents]
        index.avgdl = (sum(index.doc_lens) / len(documents)) if documents else 0.0
        n = len(documents)
        df: Counter = Counter()
        for freqs in index.doc_freqs:
            df.update(freqs.keys())
        index.idf = {
            term: max(0.0, math.log((n - count + 0.5) / (count + 0.5)))
            for term, count in df.items()
        }
        return index

    def score(self, query_tokens: list[str], doc_id: int) -> float:
        freqs = self.doc_freqs[doc_id]
        length = self.doc_lens[doc_id]
        denom_norm = self.k1 * (1.0 - self.b + self.b * length / self.avgdl) \
            if self.avgdl else self.k1
        total = 0.0
        for term in query_tokens:
            tf = freqs.get(term, 0)
            if not tf:
                continue
            total += self.idf.get(term, 0.0) * tf * (self.k1 + 1.0) / (tf + denom_norm)
        return total

    def scores(self, query_tokens: list[str]) -> list[float]:
        return [self.score(query_tokens, i) for i in range(len(self.doc_freqs))]
