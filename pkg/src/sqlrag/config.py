"""Declarative run configuration.

One file (JSON or YAML) drives a pipeline run; nested sections mirror the
CLI flags:

    dataset: path            index: path
    embedder:   {mode: precomputed|remote, path, url, model}
    approximator: {mode: oracle|file|remote, path, url}
    selection:  {mode: hybrid-dynamic|bm25-topk|approx-only|full, k}
    bm25:       {k1: 1.5, b: 0.75}
    values:     {topk: 3, enabled: true}
    examples:   {e: 5, pool: 500}
    split:      {r: 64}
    llm:        {backend: replay|remote, cache, url, model, max_tokens: 256}
    output: path             workers: 4
    cross_lingual: false     max_failure_fraction: 0.2
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml


@dataclass
class EmbedderConfig:
    mode: str = "precomputed"
    path: str | None = None
    url: str | None = None
    model: str = "default"


@dataclass
class ApproximatorConfig:
    mode: str = "oracle"
    path: str | None = None
    url: str | None = None


@dataclass
class SelectionConfig:
    mode: str = "hybrid-dynamic"
    k: int | None = None


@dataclass
class Bm25Config:
    k1: float = 1.5
    b: float = 0.75


@dataclass
class ValuesConfig:
    topk: int = 3
    enabled: bool = True


@dataclass
class ExamplesConfig:
    e: int = 5
    pool: int = 500


@dataclass
class SplitConfig:
    r: int = 64


@dataclass
class LlmConfig:
    backend: str = "replay"
    cache: str | None = None
    url: str | None = None
    model: str = "default"
    max_tokens: int = 256


@dataclass
class RunConfig:
    dataset: str = ""
    index: str = ""
    output: str = "report.json"
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    approximator: ApproximatorConfig = field(default_factory=ApproximatorConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    bm25: Bm25Config = field(default_factory=Bm25Config)
    values: ValuesConfig = field(default_factory=ValuesConfig)
    examples: ExamplesConfig = field(default_factory=ExamplesConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    llm: LlmConfig = field(default_factory=LlmConfig)
    workers: int = 4
    strict: bool = False
    cross_lingual: bool = False
    max_failure_fraction: float = 0.2

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        sections = {
            "embedder": EmbedderConfig, "approximator": ApproximatorConfig,
            "selection": SelectionConfig, "bm25": Bm25Config,
            "values": ValuesConfig, "examples": ExamplesConfig,
            "split": SplitConfig, "llm": LlmConfig,
        }
        kwargs: dict = {}
        for key, value in data.items():
            if key in sections:
                kwargs[key] = sections[key](**value)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        text = path.read_text()
        if path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
        return cls.from_dict(data or {})

    def to_dict(self) -> dict:
        return asdict(self)
