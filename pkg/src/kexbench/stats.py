"""Corpus-level artifacts: document-frequency table and LDA topic model.

Both are built once per corpus, persisted as TSV, and then shared read-only by
the extractors (document frequencies feed TF-IDF and KP-Miner, the topic model
feeds topical PageRank).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus
from .errors import CorruptTable, EmptyCorpus, InvalidParameter
from .textproc import ProcessedDocument, TextPipeline, chunk_candidates, ngram_candidates

STRATEGIES = ("ngram", "chunk")


def candidates_for(doc: ProcessedDocument, strategy: str, n_max: int = 3):
    if strategy == "ngram":
        return ngram_candidates(doc, n_max)
    if strategy == "chunk":
        return chunk_candidates(doc)
    raise InvalidParameter(f"unknown candidate strategy {strategy!r}")


@dataclass
class DocumentFrequencyTable:
    n_docs: int
    strategy: str
    df: dict[str, int] = field(default_factory=dict)

    def lookup(self, normalized: str) -> int:
        """Document count for a candidate; 0 when unseen (scorers clamp to 1)."""
        return self.df.get(normalized, 0)


def df_from_documents(
    docs: list[ProcessedDocument], strategy: str = "ngram", n_max: int = 3
) -> DocumentFrequencyTable:
    if not docs:
        raise EmptyCorpus("cannot build a document-frequency table from zero documents")
    counts: dict[str, int] = {}
    for doc in docs:
        for normalized in {c.normalized for c in candidates_for(doc, strategy, n_max)}:
            counts[normalized] = counts.get(normalized, 0) + 1
    return DocumentFrequencyTable(n_docs=len(docs), strategy=strategy, df=counts)


def build_df(
    corpus: Corpus, pipeline: TextPipeline, strategy: str = "ngram", n_max: int = 3
) -> DocumentFrequencyTable:
    if corpus.n_docs == 0:
        raise EmptyCorpus("empty corpus")
    return df_from_documents([pipeline.process_record(r) for r in corpus], strategy, n_max)


def persist_df(table: DocumentFrequencyTable) -> str:
    lines = [f"#n_docs={table.n_docs}\t#strategy={table.strategy}"]
    lines += [f"{cand}\t{count}" for cand, count in sorted(table.df.items())]
    return "\n".join(lines) + "\n"


def load_df(text: str) -> DocumentFrequencyTable:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#n_docs="):
        raise CorruptTable("missing #n_docs header")
    head, _, strat = lines[0].partition("\t")
    if not strat.startswith("#strategy="):
        raise CorruptTable("missing #strategy header")
    try:
        n_docs = int(head[len("#n_docs=") :])
    except ValueError as exc:
        raise CorruptTable(f"bad n_docs: {exc}") from exc
    strategy = strat[len("#strategy=") :]
    if strategy not in STRATEGIES:
        raise CorruptTable(f"unknown strategy {strategy!r}")
    df: dict[str, int] = {}
    for line_no, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cand, sep, count = line.rpartition("\t")
        if not sep:
            raise CorruptTable(f"line {line_no}: expected 'candidate\\tdf'")
        try:
            value = int(count)
        except ValueError as exc:
            raise CorruptTable(f"line {line_no}: bad count: {exc}") from exc
        if not 1 <= value <= n_docs:
            raise CorruptTable(f"line {line_no}: df={value} outside [1, {n_docs}]")
        df[cand] = value
    return DocumentFrequencyTable(n_docs=n_docs, strategy=strategy, df=df)


def save_df(table: DocumentFrequencyTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(persist_df(table))


def load_df_file(path: str) -> DocumentFrequencyTable:
    return load_df(open(path, encoding="utf-8").read())


def stem_bag(doc: ProcessedDocument) -> list[str]:
    return [t.stem for t in doc.tokens if t.is_alphabetic and not t.is_stopword]


def _sample(rng: np.random.RandomState, weights: np.ndarray) -> int:
    """Draw an index proportional to unnormalized weights (inverse CDF)."""
    cdf = np.cumsum(weights)
    return int(np.searchsorted(cdf, rng.random_sample() * cdf[-1], side="right"))


def _doc_seed(train_seed: int, stems: list[str]) -> int:
    # Stable per-document seed so folding-in is deterministic in any run order.
    return (train_seed * 1000003 + zlib.crc32(" ".join(stems).encode("utf-8"))) % 2**32


@dataclass
class TopicModel:
    k_topics: int
    vocab: list[str]
    phi: np.ndarray  # (K, V), rows sum to 1
    alpha: float
    beta: float
    train_seed: int
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {w: i for i, w in enumerate(self.vocab)}

    def infer_theta(self, stems: list[str], iters: int = 20, seed: int | None = None) -> np.ndarray:
        """Fold a held-out stem bag in with fixed phi; returns the topic mixture."""
        ids = [self._index[s] for s in stems if s in self._index]
        k = self.k_topics
        if not ids:
            return np.full(k, 1.0 / k)
        rng = np.random.RandomState(
            _doc_seed(self.train_seed, stems) if seed is None else seed
        )
        z = rng.randint(k, size=len(ids))
        n_dk = np.bincount(z, minlength=k).astype(float)
        for _ in range(iters):
            for i, w in enumerate(ids):
                n_dk[z[i]] -= 1
                p = (n_dk + self.alpha) * self.phi[:, w]
                z[i] = _sample(rng, p)
                n_dk[z[i]] += 1
        theta = n_dk + self.alpha
        return theta / theta.sum()

    def word_probability(self, theta: np.ndarray, stem: str, floor: float = 1e-9) -> float:
        """P(word | doc mixture); smoothed floor for out-of-vocabulary stems."""
        idx = self._index.get(stem)
        if idx is None:
            return floor
        return max(float(theta @ self.phi[:, idx]), floor)


def train_lda(
    corpus: Corpus,
    pipeline: TextPipeline,
    k: int = 10,
    iters: int = 500,
    alpha: float | None = None,
    beta: float = 0.01,
    seed: int = 0,
) -> TopicModel:
    if corpus.n_docs == 0:
        raise EmptyCorpus("empty corpus")
    docs = [pipeline.process_record(r) for r in corpus]
    return train_lda_docs(docs, k=k, iters=iters, alpha=alpha, beta=beta, seed=seed)


def train_lda_docs(
    docs: list[ProcessedDocument],
    k: int = 10,
    iters: int = 500,
    alpha: float | None = None,
    beta: float = 0.01,
    seed: int = 0,
) -> TopicModel:
    """Collapsed Gibbs sampling over per-document stem bags (stopwords removed)."""
    if k < 1:
        raise InvalidParameter(f"k must be >= 1, got {k}")
    if iters < 1:
        raise InvalidParameter(f"iters must be >= 1, got {iters}")
    if not docs:
        raise EmptyCorpus("empty corpus")
    if alpha is None:
        alpha = 50.0 / k

    bags = [stem_bag(doc) for doc in docs]
    vocab = sorted({s for bag in bags for s in bag})
    if not vocab:
        raise EmptyCorpus("corpus has no content-bearing tokens")
    index = {w: i for i, w in enumerate(vocab)}
    doc_words = [[index[s] for s in bag] for bag in bags]

    v = len(vocab)
    rng = np.random.RandomState(seed)
    n_dk = np.zeros((len(bags), k))
    n_kw = np.zeros((k, v))
    n_k = np.zeros(k)
    assignments = []
    for d, words in enumerate(doc_words):
        z = rng.randint(k, size=len(words))
        assignments.append(z)
        for topic, w in zip(z, words):
            n_dk[d, topic] += 1
            n_kw[topic, w] += 1
            n_k[topic] += 1

    for _ in range(iters):
        for d, words in enumerate(doc_words):
            z = assignments[d]
            for i, w in enumerate(words):
                topic = z[i]
                n_dk[d, topic] -= 1
                n_kw[topic, w] -= 1
                n_k[topic] -= 1
                p = (n_dk[d] + alpha) * (n_kw[:, w] + beta) / (n_k + v * beta)
                topic = _sample(rng, p)
                z[i] = topic
                n_dk[d, topic] += 1
                n_kw[topic, w] += 1
                n_k[topic] += 1

    phi = (n_kw + beta) / (n_k[:, None] + v * beta)
    model = TopicModel(k_topics=k, vocab=vocab, phi=phi, alpha=alpha, beta=beta, train_seed=seed)
    model.final_assignments_ = assignments
    return model


def persist_topic_model(model: TopicModel) -> str:
    lines = [
        f"#k={model.k_topics}\t#seed={model.train_seed}"
        f"\t#alpha={model.alpha!r}\t#beta={model.beta!r}"
    ]
    lines.append("\t".join(model.vocab))
    for row in model.phi:
        lines.append("\t".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def load_topic_model(text: str) -> TopicModel:
    lines = text.splitlines()
    if len(lines) < 3 or not lines[0].startswith("#k="):
        raise CorruptTable("malformed topic-model header")
    header = {}
    for part in lines[0].split("\t"):
        if not part.startswith("#") or "=" not in part:
            raise CorruptTable(f"bad header field {part!r}")
        key, _, value = part[1:].partition("=")
        header[key] = value
    try:
        k = int(header["k"])
        seed = int(header["seed"])
        alpha = float(header["alpha"])
        beta = float(header["beta"])
    except (KeyError, ValueError) as exc:
        raise CorruptTable(f"bad header: {exc}") from exc
    vocab = lines[1].split("\t")
    rows = lines[2 : 2 + k]
    if len(rows) != k:
        raise CorruptTable(f"expected {k} phi rows, found {len(rows)}")
    phi = np.array([[float(x) for x in row.split("\t")] for row in rows])
    if phi.shape != (k, len(vocab)):
        raise CorruptTable(f"phi shape {phi.shape} does not match k={k}, |vocab|={len(vocab)}")
    return TopicModel(k_topics=k, vocab=vocab, phi=phi, alpha=alpha, beta=beta, train_seed=seed)


def save_topic_model(model: TopicModel, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(persist_topic_model(model))


def load_topic_model_file(path: str) -> TopicModel:
    return load_topic_model(open(path, encoding="utf-8").read())
