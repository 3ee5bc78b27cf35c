"""Evaluation suite: keyword matching, per-document metrics, hit/miss
accounting and per-model aggregate reports with timing statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Corpus
from .errors import InvalidParameter, UnknownDoc
from .extractors.runner import ExtractionResult
from .textproc import TextPipeline

POLICIES = ("exact", "normalized")
HIT_ANY = "any"
HIT_ALL = "all"


def _normalizer(policy: str, pipeline: TextPipeline | None):
    if policy == "exact":
        return lambda phrase: phrase
    if policy == "normalized":
        pipe = pipeline if pipeline is not None else TextPipeline()
        return pipe.normalize_phrase
    raise InvalidParameter(f"unknown match policy {policy!r}")


def match_keywords(
    predicted: list[str],
    gold: list[str],
    policy: str = "normalized",
    pipeline: TextPipeline | None = None,
) -> list[str]:
    """Gold keywords matched by at least one prediction; each at most once."""
    norm = _normalizer(policy, pipeline)
    predicted_forms = {norm(p) for p in predicted}
    matched, seen = [], set()
    for keyword in gold:
        form = norm(keyword)
        if form in predicted_forms and form not in seen:
            seen.add(form)
            matched.append(keyword)
    return matched


def _sets(predicted, gold, policy, pipeline):
    norm = _normalizer(policy, pipeline)
    return {norm(p) for p in predicted}, {norm(g) for g in gold}


def precision_recall_f1(
    predicted: list[str],
    gold: list[str],
    policy: str = "normalized",
    pipeline: TextPipeline | None = None,
) -> tuple[float, float, float]:
    pred_set, gold_set = _sets(predicted, gold, policy, pipeline)
    matches = len(pred_set & gold_set)
    precision = matches / len(pred_set) if pred_set else 0.0
    recall = matches / len(gold_set) if gold_set else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def subset_accuracy(
    predicted: list[str],
    gold: list[str],
    policy: str = "normalized",
    pipeline: TextPipeline | None = None,
) -> int:
    pred_set, gold_set = _sets(predicted, gold, policy, pipeline)
    return int(pred_set == gold_set)


def hamming_loss(
    predicted: list[str],
    gold: list[str],
    policy: str = "normalized",
    pipeline: TextPipeline | None = None,
) -> float:
    pred_set, gold_set = _sets(predicted, gold, policy, pipeline)
    universe = pred_set | gold_set
    if not universe:
        return 0.0
    return len(pred_set ^ gold_set) / len(universe)


def doc_success(
    predicted: list[str],
    gold: list[str],
    policy: str = "normalized",
    pipeline: TextPipeline | None = None,
    hit_rule: str = HIT_ANY,
) -> str:
    """'A' (hit) or 'E' (miss) per the configured hit rule.

    ``any``: at least one gold keyword matched; ``all``: every gold keyword
    matched; ``topk:<n>``: any match within the first n predictions.
    """
    if hit_rule == HIT_ANY:
        pool = predicted
        need_all = False
    elif hit_rule == HIT_ALL:
        pool = predicted
        need_all = True
    elif hit_rule.startswith("topk:"):
        try:
            n = int(hit_rule.split(":", 1)[1])
        except ValueError as exc:
            raise InvalidParameter(f"bad hit rule {hit_rule!r}") from exc
        pool = predicted[:n]
        need_all = False
    else:
        raise InvalidParameter(f"unknown hit rule {hit_rule!r}")
    matched = match_keywords(pool, gold, policy, pipeline)
    if need_all:
        return "A" if gold and len(matched) == len(gold) else "E"
    return "A" if matched else "E"


def percent(part: int, total: int) -> int:
    """Integer percentage, half rounded up."""
    if total == 0:
        return 0
    return int(math.floor(100.0 * part / total + 0.5))


def mean_sd(values: list[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (n-1); sd is 0 for fewer than 2 values."""
    if not values:
        return 0.0, 0.0
    m = sum(values) / len(values)
    if len(values) < 2:
        return m, 0.0
    variance = sum((v - m) ** 2 for v in values) / (len(values) - 1)
    return m, math.sqrt(variance)


@dataclass(slots=True)
class ModelReport:
    model: str
    n_docs_attempted: int
    n_errors: int  # nE: misses plus error-status extractions
    n_hits: int  # nA
    precision_mean: float
    recall_mean: float
    f1_mean: float
    subset_accuracy: float
    hamming_loss_mean: float
    time_mean_seconds: float
    time_sd_seconds: float

    @property
    def pct_e(self) -> int:
        return percent(self.n_errors, self.n_docs_attempted)

    @property
    def pct_a(self) -> int:
        return percent(self.n_hits, self.n_docs_attempted)


def aggregate(
    results: list[ExtractionResult],
    corpus: Corpus,
    policy: str = "normalized",
    pipeline: TextPipeline | None = None,
    hit_rule: str = HIT_ANY,
) -> list[ModelReport]:
    """One ModelReport per model present in the result stream.

    Error-status extractions count as misses and are excluded from the
    precision/recall/F1, subset-accuracy, Hamming and timing means.  Documents
    with no gold keywords are excluded from the P/R/F1 means as undefined.
    """
    gold_by_doc = {record.code: record.gold_keywords for record in corpus}
    by_model: dict[str, list[ExtractionResult]] = {}
    for result in results:
        if result.doc_id not in gold_by_doc:
            raise UnknownDoc(result.doc_id)
        by_model.setdefault(result.model, []).append(result)

    reports = []
    for model in sorted(by_model):
        hits = errors = 0
        precisions, recalls, f1s = [], [], []
        subset_hits, hammings, times = [], [], []
        for result in by_model[model]:
            if not result.ok:
                errors += 1
                continue
            gold = gold_by_doc[result.doc_id]
            predicted = [kp.phrase for kp in result.keyphrases]
            if doc_success(predicted, gold, policy, pipeline, hit_rule) == "A":
                hits += 1
            else:
                errors += 1
            if gold:
                p, r, f1 = precision_recall_f1(predicted, gold, policy, pipeline)
                precisions.append(p)
                recalls.append(r)
                f1s.append(f1)
            subset_hits.append(subset_accuracy(predicted, gold, policy, pipeline))
            hammings.append(hamming_loss(predicted, gold, policy, pipeline))
            times.append(result.elapsed_seconds)
        time_mean, time_sd = mean_sd(times)
        reports.append(
            ModelReport(
                model=model,
                n_docs_attempted=len(by_model[model]),
                n_errors=errors,
                n_hits=hits,
                precision_mean=mean_sd(precisions)[0],
                recall_mean=mean_sd(recalls)[0],
                f1_mean=mean_sd(f1s)[0],
                subset_accuracy=mean_sd([float(s) for s in subset_hits])[0],
                hamming_loss_mean=mean_sd(hammings)[0],
                time_mean_seconds=time_mean,
                time_sd_seconds=time_sd,
            )
        )
    return reports


CSV_HEADER = "model,n,nE,nA,pctE,pctA,precision,recall,f1,subset_acc,hamming,time_mean,time_sd"


def report_csv(reports: list[ModelReport]) -> str:
    lines = [CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.model},{r.n_docs_attempted},{r.n_errors},{r.n_hits},"
            f"{r.pct_e},{r.pct_a},"
            f"{r.precision_mean:.6f},{r.recall_mean:.6f},{r.f1_mean:.6f},"
            f"{r.subset_accuracy:.6f},{r.hamming_loss_mean:.6f},"
            f"{r.time_mean_seconds:.6f},{r.time_sd_seconds:.6f}"
        )
    return "\n".join(lines) + "\n"


def scatter_csv(reports: list[ModelReport]) -> str:
    lines = ["model,time_mean,pctA"]
    for r in reports:
        lines.append(f"{r.model},{r.time_mean_seconds:.6f},{r.pct_a}")
    return "\n".join(lines) + "\n"


def format_table(reports: list[ModelReport]) -> str:
    header = f"{'Model':<6}{'nE':>7}{'nA':>7}{'Total':>7}{'%E':>6}{'%A':>6}" \
             f"{'F1':>8}{'Time':>10}{'SD':>9}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.model:<6}{r.n_errors:>7}{r.n_hits:>7}{r.n_docs_attempted:>7}"
            f"{r.pct_e:>5} %{r.pct_a:>5} %"
            f"{r.f1_mean:>8.3f}{r.time_mean_seconds:>10.4f}{r.time_sd_seconds:>9.4f}"
        )
    return "\n".join(lines) + "\n"
