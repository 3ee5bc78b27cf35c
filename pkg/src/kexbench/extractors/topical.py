"""Topic-aware models: TopicRank (M6), topical PageRank (M7), MultipartiteRank (M9)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import MissingModel
from ..graph import WeightedDigraph, pagerank
from ..stats import TopicModel, stem_bag, train_lda_docs
from ..textproc import CandidatePhrase, ProcessedDocument, chunk_candidates
from .base import DEFAULT_TOP_K, Keyphrase, KeyphraseExtractor, rank_top_k
from .graphrank import SingleRankExtractor

DEFAULT_SIM_THRESHOLD = 0.25


@dataclass(slots=True)
class Topic:
    """A cluster of near-duplicate candidates treated as one rankable unit."""

    members: list[CandidatePhrase]

    @property
    def representative(self) -> CandidatePhrase:
        return min(self.members, key=lambda c: (c.first_position, c.normalized))

    @property
    def first_position(self) -> int:
        return self.representative.first_position


def jaccard(a: set[str], b: set[str]) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 1.0


def cluster_topics(candidates: list[CandidatePhrase],
                   threshold: float = DEFAULT_SIM_THRESHOLD) -> list[Topic]:
    """Average-linkage agglomerative clustering on stem-set Jaccard similarity.

    Merging continues while the closest cluster pair is at least ``threshold``
    similar; ties go to the lowest-index pair, so the result is deterministic
    for a fixed candidate order.
    """
    n = len(candidates)
    stem_sets = [set(c.stems) for c in candidates]
    sim = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            sim[i][j] = sim[j][i] = jaccard(stem_sets[i], stem_sets[j])

    clusters: list[list[int]] = [[i] for i in range(n)]
    while len(clusters) > 1:
        best_pair, best_sim = None, -1.0
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                linkage = sum(
                    sim[i][j] for i in clusters[a] for j in clusters[b]
                ) / (len(clusters[a]) * len(clusters[b]))
                if linkage > best_sim:
                    best_pair, best_sim = (a, b), linkage
        if best_sim < threshold:
            break
        a, b = best_pair
        clusters[a].extend(clusters[b])
        del clusters[b]
    return [Topic([candidates[i] for i in cluster]) for cluster in clusters]


def proximity_weight(a: CandidatePhrase, b: CandidatePhrase) -> float:
    """Sum of reciprocal distances between occurrence start positions."""
    weight = 0.0
    for start_a, _ in a.spans:
        for start_b, _ in b.spans:
            distance = abs(start_a - start_b)
            if distance:
                weight += 1.0 / distance
    return weight


class TopicRankExtractor(KeyphraseExtractor):
    """M6: cluster candidates into topics, rank topics on a complete proximity
    graph, and emit each top topic's earliest-appearing member."""

    model_id = "M6"

    def __init__(self, top_k: int = DEFAULT_TOP_K,
                 sim_threshold: float = DEFAULT_SIM_THRESHOLD, damping: float = 0.85):
        self.top_k = top_k
        self.sim_threshold = sim_threshold
        self.damping = damping

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        candidates = self._require_candidates(chunk_candidates(doc))
        topics = cluster_topics(candidates, self.sim_threshold)
        graph = WeightedDigraph()
        for idx in range(len(topics)):
            graph.add_node(str(idx))
        for i in range(len(topics)):
            for j in range(i + 1, len(topics)):
                weight = sum(
                    proximity_weight(a, b)
                    for a in topics[i].members
                    for b in topics[j].members
                )
                if weight > 0:
                    graph.add_symmetric_edge(str(i), str(j), weight)
        scores = pagerank(graph, damping=self.damping)
        scored = [
            (topic.representative, scores[str(idx)]) for idx, topic in enumerate(topics)
        ]
        return rank_top_k(scored, self.top_k)


class TopicalPageRankExtractor(SingleRankExtractor):
    """M7: SingleRank graph with a topical restart distribution — a single
    personalized PageRank where p(w) blends the document's inferred topic
    mixture with each topic's word distribution."""

    model_id = "M7"

    def __init__(self, top_k: int = DEFAULT_TOP_K, window: int = 10,
                 damping: float = 0.85, topic_model: TopicModel | None = None,
                 fold_iters: int = 20, lda_k: int = 10, lda_iters: int = 500,
                 seed: int = 0):
        super().__init__(top_k=top_k, window=window, damping=damping)
        self.topic_model = topic_model
        self.fold_iters = fold_iters
        self.lda_k = lda_k
        self.lda_iters = lda_iters
        self.seed = seed

    def fit(self, X: list[ProcessedDocument], y=None):
        if self.topic_model is not None:
            self.topic_model_ = self.topic_model
        else:
            self.topic_model_ = train_lda_docs(
                X, k=self.lda_k, iters=self.lda_iters, seed=self.seed
            )
        return self

    def _model(self) -> TopicModel:
        model = self.topic_model if self.topic_model is not None \
            else getattr(self, "topic_model_", None)
        if model is None:
            raise MissingModel(f"{self.model_id} needs a topic model; call fit()")
        return model

    def _personalization(self, doc: ProcessedDocument) -> dict[str, float]:
        model = self._model()
        theta = model.infer_theta(stem_bag(doc), iters=self.fold_iters)
        stems = {t.stem for t in doc.tokens if t.is_alphabetic and not t.is_stopword}
        return {s: model.word_probability(theta, s) for s in stems}


class MultipartiteRankExtractor(KeyphraseExtractor):
    """M9: candidate graph with edges only across topics, plus an incoming-weight
    boost for each topic's earliest candidate."""

    model_id = "M9"

    def __init__(self, top_k: int = DEFAULT_TOP_K,
                 sim_threshold: float = DEFAULT_SIM_THRESHOLD,
                 alpha_boost: float = 1.1, damping: float = 0.85):
        self.top_k = top_k
        self.sim_threshold = sim_threshold
        self.alpha_boost = alpha_boost
        self.damping = damping

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        candidates = self._require_candidates(chunk_candidates(doc))
        topics = cluster_topics(candidates, self.sim_threshold)
        topic_of = {}
        for t_idx, topic in enumerate(topics):
            for member in topic.members:
                topic_of[member.normalized] = t_idx

        graph = WeightedDigraph()
        labels = {c.normalized: f"c{i}" for i, c in enumerate(candidates)}
        for c in candidates:
            graph.add_node(labels[c.normalized])
        for i, a in enumerate(candidates):
            for b in candidates[i + 1:]:
                if topic_of[a.normalized] == topic_of[b.normalized]:
                    continue
                weight = proximity_weight(a, b)
                if weight > 0:
                    graph.add_symmetric_edge(
                        labels[a.normalized], labels[b.normalized], weight
                    )

        # Promote each topic's earliest candidate: every incoming edge gains
        # mass proportional to how strongly the source connects to the rest of
        # the topic, scaled by e^(1/(1+first_position)).
        for topic in topics:
            if len(topic.members) < 2:
                continue
            first = topic.representative
            others = [m for m in topic.members if m is not first]
            scale = self.alpha_boost * math.exp(1.0 / (1.0 + first.first_position))
            for source in candidates:
                if topic_of[source.normalized] == topic_of[first.normalized]:
                    continue
                inflow = sum(
                    graph.edge_weight(labels[m.normalized], labels[source.normalized])
                    for m in others
                )
                if inflow > 0:
                    graph.add_edge(
                        labels[source.normalized], labels[first.normalized],
                        scale * inflow,
                    )

        scores = pagerank(graph, damping=self.damping)
        scored = [(c, scores[labels[c.normalized]]) for c in candidates]
        return rank_top_k(scored, self.top_k)
