"""End-to-end pipeline: approximate, prune the schema, pick values and
examples, render the prompt, call the LLM, score. Samples are independent
and run on a bounded worker pool; the report is assembled in sample-id
order so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import llm as llm_mod
from .ast.parser import parse_sql
from .config import RunConfig
from .dataset import CatalogStore, DatasetSample, ingest
from .errors import ExtractionError, ParseError, SqlragError
from .fewshot.embedder import Embedder, PrecomputedEmbedder, RemoteEmbedder
from .fewshot.store import (
    ExampleIndex,
    SelectionResult,
    select_by_question_only,
    select_examples,
)
from .metrics import ast_bucket, em_proxy, recall_metric, shortening_metric
from .prompt import render_prompt
from .schema.catalog import SchemaCatalog
from .schema.select import (
    ColumnIndex,
    SelectedColumn,
    SubSchema,
    build_column_index,
    select_sub_schema,
)
from .schema.values import select_values
from .split import (
    Approximator,
    ApproximatorInput,
    FileBackedApproximator,
    OracleApproximator,
    RemoteApproximator,
)

SELECTION_FULL = "full"


@dataclass
class SampleOutcome:
    id: str
    db_id: str
    question: str
    approx_sql: str | None = None
    prediction: str = ""
    prompt_sha256: str | None = None
    recalled: bool = False
    shortening: float = 0.0
    em: bool = False
    mean_ast_score: float = 0.0
    ast_bucket: str = ""
    fallback_examples: bool = False
    selected_tables: list[str] = field(default_factory=list)
    selected_columns: list[dict] = field(default_factory=list)
    selected_values: dict[str, list[str]] = field(default_factory=dict)
    examples: list[dict] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


@dataclass
class RunReport:
    config: dict
    aggregates: dict
    samples: list[SampleOutcome]

    def to_json(self) -> str:
        return json.dumps({
            "config": self.config,
            "aggregates": self.aggregates,
            "samples": [asdict(s) for s in self.samples],
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        samples = [SampleOutcome(**entry) for entry in data["samples"]]
        return cls(config=data["config"], aggregates=data["aggregates"],
                   samples=samples)


def full_sub_schema(catalog: SchemaCatalog) -> SubSchema:
    """The unpruned schema (cross-lingual mode, N/A selection setups)."""
    return SubSchema(
        db_id=catalog.db_id,
        selected_tables=tuple(t.key for t in catalog.tables),
        selected_columns=tuple(
            SelectedColumn(ref=catalog.column_ref(i), provenance="approx-query")
            for i in range(len(catalog.columns))
        ),
    )


def make_embedder(config: RunConfig) -> Embedder:
    if config.embedder.mode == "precomputed":
        if not config.embedder.path:
            raise SqlragError("precomputed embedder needs a path")
        return PrecomputedEmbedder(config.embedder.path)
    if config.embedder.mode == "remote":
        if not config.embedder.url:
            raise SqlragError("remote embedder needs a url")
        return RemoteEmbedder(config.embedder.url, model=config.embedder.model)
    raise SqlragError(f"unknown embedder mode {config.embedder.mode!r}")


def make_approximator(config: RunConfig) -> Approximator:
    mode = config.approximator.mode
    if mode == "oracle":
        return OracleApproximator()
    if mode == "file":
        if not config.approximator.path:
            raise SqlragError("file approximator needs a path")
        return FileBackedApproximator(config.approximator.path)
    if mode == "remote":
        if not config.approximator.url:
            raise SqlragError("remote approximator needs a url")
        return RemoteApproximator(config.approximator.url)
    raise SqlragError(f"unknown approximator mode {mode!r}")


def make_llm_client(config: RunConfig) -> llm_mod.LlmClient:
    if config.llm.backend == "replay":
        if not config.llm.cache:
            raise SqlragError("replay backend needs a cache path")
        return llm_mod.ReplayClient(config.llm.cache)
    if config.llm.backend == "remote":
        if not config.llm.url:
            raise SqlragError("remote llm needs a url")
        return llm_mod.RemoteChatClient(config.llm.url, model=config.llm.model,
                                        max_tokens=config.llm.max_tokens)
    raise SqlragError(f"unknown llm backend {config.llm.backend!r}")


class Pipeline:
    """Holds the loaded state (catalogs, indexes, clients) and processes
    samples one at a time; reusable across a run or behind a service."""

    def __init__(self, config: RunConfig, catalogs: CatalogStore,
                 index: ExampleIndex, approximator: Approximator,
                 client: llm_mod.LlmClient):
        self.config = config
        self.catalogs = catalogs
        self.index = index
        self.approximator = approximator
        self.client = client
        self._column_indexes: dict[str, ColumnIndex] = {}

    @classmethod
    def from_config(cls, config: RunConfig,
                    catalogs: CatalogStore | None = None,
                    samples: list[DatasetSample] | None = None) -> "Pipeline":
        if catalogs is None:
            result = ingest(config.dataset, strict=config.strict)
            catalogs = result.catalogs
        embedder = make_embedder(config)
        index = ExampleIndex.load(config.index, embedder=embedder)
        return cls(config=config, catalogs=catalogs, index=index,
                   approximator=make_approximator(config),
                   client=make_llm_client(config))

    def column_index(self, db_id: str) -> ColumnIndex:
        if db_id not in self._column_indexes:
            catalog = self.catalogs.get(db_id)
            self._column_indexes[db_id] = build_column_index(
                catalog, k1=self.config.bm25.k1, b=self.config.bm25.b)
        return self._column_indexes[db_id]

    # -- per-sample stages --------------------------------------------------

    def approximate(self, sample: DatasetSample) -> str:
        return self.approximator.approximate(
            ApproximatorInput(sample_id=sample.id, question=sample.question,
                              db_id=sample.db_id, gold_sql=sample.gold_sql),
            self.catalogs.get(sample.db_id))

    def select_schema(self, db_id: str, question: str,
                      approx_sql: str | None) -> SubSchema:
        catalog = self.catalogs.get(db_id)
        mode = self.config.selection.mode
        if self.config.cross_lingual or mode == SELECTION_FULL or (
                approx_sql is None and mode != "bm25-topk"):
            return full_sub_schema(catalog)
        return select_sub_schema(
            catalog, question, approx_sql=approx_sql, mode=mode,
            k=self.config.selection.k, column_index=self.column_index(db_id))

    def pick_values(self, db_id: str, sub: SubSchema, question: str) -> SubSchema:
        if not self.config.values.enabled or self.config.cross_lingual:
            return sub
        catalog = self.catalogs.get(db_id)
        selections = select_values(catalog, sub, question,
                                   topk=self.config.values.topk)
        return sub.with_values({ref: vs.values for ref, vs in selections.items()})

    def pick_examples(self, question: str,
                      approx_sql: str | None) -> SelectionResult:
        if approx_sql is not None:
            try:
                return select_examples(self.index, question, approx_sql,
                                       e=self.config.examples.e,
                                       pool=self.config.examples.pool)
            except ParseError:
                pass
        return select_by_question_only(self.index, question,
                                       e=self.config.examples.e,
                                       pool=self.config.examples.pool)

    # -- one sample ----------------------------------------------------------

    def run_sample(self, sample: DatasetSample) -> SampleOutcome:
        outcome = SampleOutcome(id=sample.id, db_id=sample.db_id,
                                question=sample.question)
        catalog = self.catalogs.get(sample.db_id)

        approx_sql: str | None = None
        try:
            approx_sql = self.approximate(sample)
            outcome.approx_sql = approx_sql
        except SqlragError as exc:
            outcome.errors.append(f"approximator: {exc}")
        if approx_sql is not None:
            try:
                parse_sql(approx_sql)
            except ParseError as exc:
                outcome.errors.append(f"approx_sql unparseable: {exc}")
                approx_sql = None

        try:
            sub = self.select_schema(sample.db_id, sample.question, approx_sql)
        except SqlragError as exc:
            outcome.errors.append(f"schema selection: {exc}")
            sub = full_sub_schema(catalog)
        sub = self.pick_values(sample.db_id, sub, sample.question)
        outcome.selected_tables = list(sub.selected_tables)
        outcome.selected_columns = [
            {"ref": str(c.ref), "provenance": c.provenance}
            for c in sub.selected_columns
        ]
        outcome.selected_values = {str(ref): list(vals)
                                   for ref, vals in sub.selected_values.items()}

        selection = self.pick_examples(sample.question, approx_sql)
        outcome.fallback_examples = selection.fallback
        outcome.examples = [
            {"id": r.record.id, "ast_score": r.ast_score,
             "question_rank": r.question_rank}
            for r in selection.chosen
        ]
        scores = [r.ast_score for r in selection.chosen]
        outcome.mean_ast_score = sum(scores) / len(scores) if scores else 0.0
        outcome.ast_bucket = ast_bucket(outcome.mean_ast_score)

        bundle = render_prompt(catalog, sub, selection, sample.question)
        outcome.prompt_sha256 = bundle.prompt_sha256
        try:
            completion = llm_mod.complete(self.client, bundle)
            outcome.prediction = completion.sql
        except ExtractionError as exc:
            outcome.errors.append(f"extraction: {exc}")
        except SqlragError as exc:
            outcome.errors.append(f"llm: {exc}")

        outcome.recalled = recall_metric(sub, sample.gold_sql, catalog)
        outcome.shortening = shortening_metric(sub, catalog)
        outcome.em = bool(outcome.prediction) and em_proxy(outcome.prediction,
                                                           sample.gold_sql)
        return outcome


def aggregate(samples: list[SampleOutcome]) -> dict:
    n = len(samples)
    if not n:
        return {"n_samples": 0, "n_errors": 0, "recall_pct": 0.0,
                "shortening_pct": 0.0, "em_proxy_pct": 0.0, "ast_buckets": {}}
    buckets: dict[str, dict] = {}
    for outcome in samples:
        bucket = buckets.setdefault(outcome.ast_bucket,
                                    {"count": 0, "em_count": 0})
        bucket["count"] += 1
        bucket["em_count"] += int(outcome.em)
    for bucket in buckets.values():
        bucket["em_pct"] = round(100.0 * bucket["em_count"] / bucket["count"], 2)
    return {
        "n_samples": n,
        "n_errors": sum(1 for s in samples if s.errors),
        "recall_pct": round(100.0 * sum(s.recalled for s in samples) / n, 2),
        "shortening_pct": round(100.0 * sum(s.shortening for s in samples) / n, 2),
        "em_proxy_pct": round(100.0 * sum(s.em for s in samples) / n, 2),
        "ast_buckets": buckets,
    }


def run_pipeline(config: RunConfig) -> RunReport:
    result = ingest(config.dataset, strict=config.strict)
    pipeline = Pipeline.from_config(config, catalogs=result.catalogs)
    workers = max(1, config.workers)
    if workers == 1:
        outcomes = [pipeline.run_sample(s) for s in result.samples]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(pipeline.run_sample, result.samples))
    outcomes.sort(key=lambda o: o.id)
    report = RunReport(config=config.to_dict(), aggregates=aggregate(outcomes),
                       samples=outcomes)
    if config.output:
        Path(config.output).parent.mkdir(parents=True, exist_ok=True)
        Path(config.output).write_text(report.to_json())
    return report


def export_official(report: RunReport, out_dir: str | Path,
                    samples: list[DatasetSample] | None = None) -> tuple[Path, Path]:
    """Predictions in the external scorer's expected text layout: one
    query per line, plus gold lines as "query\tdb_id"."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pred_path = out_dir / "pred.sql"
    gold_path = out_dir / "gold.sql"
    gold_by_id = {s.id: s for s in samples or []}
    with pred_path.open("w") as pred, gold_path.open("w") as gold:
        for outcome in report.samples:
            pred.write((outcome.prediction or "") + "\n")
            sample = gold_by_id.get(outcome.id)
            if sample is not None:
                gold.write(f"{sample.gold_sql}\t{sample.db_id}\n")
    return pred_path, gold_path
