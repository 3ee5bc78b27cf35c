"""Timed dispatch of (document, model) extraction tasks.

Timing covers the whole read-to-prediction span: preprocessing the record's
text, building per-document structures, and scoring.  Failures never escape a
task; they become an error status on the result so a batch always completes.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..corpus import Corpus, ThesisRecord
from ..errors import InvalidParameter
from ..stats import DocumentFrequencyTable, TopicModel
from ..textproc import TextPipeline
from .base import DEFAULT_TOP_K, Keyphrase, KeyphraseExtractor
from .graphrank import PositionRankExtractor, SingleRankExtractor, TextRankExtractor
from .statistical import KpMinerExtractor, TfIdfExtractor, YakeExtractor
from .topical import MultipartiteRankExtractor, TopicalPageRankExtractor, TopicRankExtractor

MODEL_CLASSES: dict[str, type[KeyphraseExtractor]] = {
    cls.model_id: cls
    for cls in (
        TfIdfExtractor,
        KpMinerExtractor,
        YakeExtractor,
        TextRankExtractor,
        SingleRankExtractor,
        TopicRankExtractor,
        TopicalPageRankExtractor,
        PositionRankExtractor,
        MultipartiteRankExtractor,
    )
}
MODEL_IDS = tuple(sorted(MODEL_CLASSES))  # "M1" .. "M9"
MODEL_NAMES = {
    "M1": "TF-IDF",
    "M2": "KP-Miner",
    "M3": "YAKE",
    "M4": "TextRank",
    "M5": "SingleRank",
    "M6": "TopicRank",
    "M7": "TopicalPageRank",
    "M8": "PositionRank",
    "M9": "MultipartiteRank",
}

STATUS_OK = "ok"


@dataclass(slots=True)
class ExtractionResult:
    doc_id: str
    model: str
    keyphrases: list[Keyphrase]
    elapsed_seconds: float
    status: str = STATUS_OK

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def to_json(self) -> str:
        return json.dumps(
            {
                "doc_id": self.doc_id,
                "model": self.model,
                "keyphrases": [
                    {"phrase": kp.phrase, "surface": kp.surface, "score": kp.score}
                    for kp in self.keyphrases
                ],
                "elapsed_seconds": self.elapsed_seconds,
                "status": self.status,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "ExtractionResult":
        obj = json.loads(line)
        return cls(
            doc_id=obj["doc_id"],
            model=obj["model"],
            keyphrases=[
                Keyphrase(kp["phrase"], kp.get("surface", kp["phrase"]), kp["score"])
                for kp in obj["keyphrases"]
            ],
            elapsed_seconds=obj["elapsed_seconds"],
            status=obj["status"],
        )


@dataclass
class SharedArtifacts:
    """Immutable corpus-level inputs shared by every extraction task."""

    pipeline: TextPipeline
    df_table: DocumentFrequencyTable | None = None
    topic_model: TopicModel | None = None
    model_params: dict[str, dict] = field(default_factory=dict)

    def build_extractor(self, model_id: str, k: int = DEFAULT_TOP_K) -> KeyphraseExtractor:
        if model_id not in MODEL_CLASSES:
            raise InvalidParameter(f"unknown model {model_id!r}")
        params = dict(self.model_params.get(model_id, {}))
        params["top_k"] = k
        if model_id in ("M1", "M2"):
            params.setdefault("df_table", self.df_table)
        if model_id == "M7":
            params.setdefault("topic_model", self.topic_model)
        return MODEL_CLASSES[model_id](**params)


def run_model(
    model_id: str,
    record: ThesisRecord,
    shared: SharedArtifacts,
    k: int = DEFAULT_TOP_K,
    clock=time.perf_counter,
) -> ExtractionResult:
    """Run one model on one record, timing the full read-to-predict span."""
    started = clock()
    try:
        extractor = shared.build_extractor(model_id, k)
        doc = shared.pipeline.process_record(record)
        keyphrases = extractor.extract(doc)
        elapsed = clock() - started
        return ExtractionResult(record.code, model_id, keyphrases, elapsed)
    except Exception as exc:  # noqa: BLE001 — batch isolation is the contract
        elapsed = clock() - started
        return ExtractionResult(record.code, model_id, [], elapsed, status=f"error: {exc}")


def run_benchmark(
    corpus: Corpus,
    shared: SharedArtifacts,
    models: tuple[str, ...] = MODEL_IDS,
    k: int = DEFAULT_TOP_K,
    workers: int = 1,
    clock=time.perf_counter,
    progress=None,
) -> list[ExtractionResult]:
    """All (document, model) tasks, collected in corpus order then model order
    regardless of worker completion order."""
    if workers < 1:
        raise InvalidParameter(f"workers must be >= 1, got {workers}")
    for model_id in models:
        if model_id not in MODEL_CLASSES:
            raise InvalidParameter(f"unknown model {model_id!r}")

    tasks = [(record, model_id) for record in corpus for model_id in models]
    job = lambda task: run_model(task[1], task[0], shared, k, clock)  # noqa: E731
    results: list[ExtractionResult] = []
    per_doc = max(len(models), 1)
    if workers == 1:
        stream = map(job, tasks)
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        stream = pool.map(job, tasks)
    try:
        for idx, result in enumerate(stream, 1):
            results.append(result)
            if progress is not None and idx % (per_doc * 100) == 0:
                progress(idx // per_doc)
    finally:
        if workers > 1:
            pool.shutdown()
    return results


def write_results(results: list[ExtractionResult], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for result in results:
            fh.write(result.to_json() + "\n")


def read_results(path: str) -> list[ExtractionResult]:
    results = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                results.append(ExtractionResult.from_json(line))
            except (json.JSONDecodeError, KeyError) as exc:
                raise InvalidParameter(f"{path}:{line_no}: malformed result line: {exc}") from exc
    return results
