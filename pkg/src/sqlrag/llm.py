"""LLM transport: a remote chat backend and a deterministic replay cache,
plus grammar-gated SQL extraction from completions.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx

from .ast.parser import parse_sql
from .errors import EndpointError, ExtractionError, ParseError, ReplayMiss
from .prompt import PromptBundle

DEFAULT_MAX_TOKENS = 256

_FENCE_RE = re.compile(r"```(?:sql)?\s*(.*?)```", re.DOTALL | re.IGNORECASE)
_SELECT_RE = re.compile(r"\bselect\b", re.IGNORECASE)


class LlmClient(Protocol):
    def complete(self, prompt: str) -> str:
        """Raw completion text for a prompt."""
        ...


def _prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ReplayCache:
    """Content-addressed JSON-lines cache keyed by the prompt hash.
    Reads are lock-free; writes are serialized and appended immediately."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, str] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    entry = json.loads(line)
                    self._entries[entry["prompt_sha256"]] = entry["completion"]

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, prompt: str) -> str | None:
        return self._entries.get(_prompt_key(prompt))

    def put(self, prompt: str, completion: str) -> None:
        key = _prompt_key(prompt)
        with self._lock:
            self._entries[key] = completion
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as fh:
                fh.write(json.dumps({"prompt_sha256": key,
                                     "completion": completion}) + "\n")


class ReplayClient:
    """Serves byte-identical cached completions; never touches the network."""

    def __init__(self, cache: ReplayCache | str | Path):
        self.cache = cache if isinstance(cache, ReplayCache) else ReplayCache(cache)

    def complete(self, prompt: str) -> str:
        completion = self.cache.get(prompt)
        if completion is None:
            raise ReplayMiss(
                f"replay cache has no completion for prompt {_prompt_key(prompt)[:12]}")
        return completion


class RemoteChatClient:
    """Single-user-message chat completion with sampling disabled."""

    def __init__(self, url: str, model: str,
                 max_tokens: int = DEFAULT_MAX_TOKENS,
                 api_key_env: str = "SQLRAG_API_KEY",
                 timeout: float = 60.0, max_retries: int = 3,
                 backoff: float = 1.0, max_inflight: int = 4):
        self.url = url
        self.model = model
        self.max_tokens = max_tokens
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self._slots = threading.Semaphore(max_inflight)

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
            "max_tokens": self.max_tokens,
        }
        headers = {}
        token = os.environ.get(self.api_key_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            with self._slots:
                try:
                    response = httpx.post(self.url, json=payload,
                                          headers=headers, timeout=self.timeout)
                    response.raise_for_status()
                    body = response.json()
                    return body["choices"][0]["message"]["content"]
                except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                    last_error = exc
        raise EndpointError(f"chat endpoint failed after "
                            f"{self.max_retries + 1} attempts: {last_error}")


@dataclass(frozen=True)
class Completion:
    raw: str
    sql: str


def extract_sql(raw: str) -> str:
    """The maximal parseable SELECT statement in a response: fenced code
    blocks are searched first, candidates start at each SELECT keyword and
    stop at the first statement terminator, and every candidate must parse."""
    regions = [m.group(1) for m in _FENCE_RE.finditer(raw)]
    if not regions:
        regions = [raw]
    for region in regions:
        for match in _SELECT_RE.finditer(region):
            candidate = region[match.start():]
            terminator = candidate.find(";")
            if terminator >= 0:
                candidate = candidate[:terminator]
            parsed = _first_parseable(candidate)
            if parsed is not None:
                return parsed
    raise ExtractionError("no parseable SQL statement in response", raw=raw)


def _first_parseable(candidate: str) -> str | None:
    lines = candidate.strip().splitlines()
    while lines:
        attempt = "\n".join(lines).strip()
        try:
            parse_sql(attempt)
            return " ".join(attempt.split())
        except ParseError:
            lines.pop()
    return None


def complete(client: LlmClient, bundle: PromptBundle) -> Completion:
    raw = client.complete(bundle.text)
    return Completion(raw=raw, sql=extract_sql(raw))
