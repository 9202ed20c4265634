"""Retrieval-augmented text-to-SQL toolkit.

Selects few-shot (question, SQL) examples by normalized-AST similarity,
prunes database schemata with hybrid BM25 + approximated-query retrieval,
picks representative column values, renders prompts and evaluates recall,
schema shortening and exact-match proxies.
"""

__version__ = "0.1.0"
