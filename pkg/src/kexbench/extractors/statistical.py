"""Statistical scorers: TF-IDF (M1), KP-Miner (M2) and YAKE (M3)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import mean, median, pstdev

from ..errors import MissingModel
from ..stats import DocumentFrequencyTable, df_from_documents
from ..textproc import (
    CandidatePhrase,
    ProcessedDocument,
    levenshtein_similarity,
    ngram_candidates,
)
from .base import DEFAULT_TOP_K, Keyphrase, KeyphraseExtractor, rank_top_k


class TfIdfExtractor(KeyphraseExtractor):
    """M1: tf * log2(N / df) over n-gram candidates."""

    model_id = "M1"

    def __init__(self, top_k: int = DEFAULT_TOP_K, n_max: int = 3,
                 df_table: DocumentFrequencyTable | None = None):
        self.top_k = top_k
        self.n_max = n_max
        self.df_table = df_table

    def fit(self, X: list[ProcessedDocument], y=None):
        if self.df_table is not None:
            self.df_table_ = self.df_table
        else:
            self.df_table_ = df_from_documents(X, "ngram", self.n_max)
        return self

    def _df(self) -> DocumentFrequencyTable:
        table = self.df_table if self.df_table is not None else getattr(self, "df_table_", None)
        if table is None:
            raise MissingModel(f"{self.model_id} needs a document-frequency table; call fit()")
        return table

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        table = self._df()
        candidates = self._require_candidates(ngram_candidates(doc, self.n_max))
        scored = [(c, tfidf_score(c.frequency, table.lookup(c.normalized), table.n_docs))
                  for c in candidates]
        return rank_top_k(scored, self.top_k)


def tfidf_score(tf: int, df: int, n_docs: int) -> float:
    # Unseen candidates are treated as df=1 so the log never divides by zero.
    return tf * math.log2(n_docs / max(df, 1))


class KpMinerExtractor(TfIdfExtractor):
    """M2: least-allowable-seen-frequency filter + position cutoff + a boosting
    factor favouring multiword candidates on top of the TF-IDF score."""

    model_id = "M2"

    def __init__(self, top_k: int = DEFAULT_TOP_K, n_max: int = 3,
                 df_table: DocumentFrequencyTable | None = None,
                 lasf: int = 3, cutoff: int = 400, sigma: float = 3.0, alpha: float = 2.3):
        super().__init__(top_k=top_k, n_max=n_max, df_table=df_table)
        self.lasf = lasf
        self.cutoff = cutoff
        self.sigma = sigma
        self.alpha = alpha

    def boost_factor(self, candidates: list[CandidatePhrase]) -> float:
        n_multi = sum(1 for c in candidates if c.n_words > 1)
        if n_multi == 0:
            return self.sigma
        return min(len(candidates) / (n_multi * self.alpha), self.sigma)

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        table = self._df()
        raw = self._require_candidates(ngram_candidates(doc, self.n_max))
        survivors = [c for c in raw
                     if c.frequency >= self.lasf and c.first_position < self.cutoff]
        boost = self.boost_factor(survivors)
        scored = []
        for c in survivors:
            base = tfidf_score(c.frequency, table.lookup(c.normalized), table.n_docs)
            scored.append((c, base * (boost if c.n_words > 1 else 1.0)))
        return rank_top_k(scored, self.top_k)


@dataclass(slots=True)
class YakeTermStats:
    tf: int = 0
    caps_count: int = 0
    proper_count: int = 0
    sentence_indices: list[int] = field(default_factory=list)
    left_neighbors: set[str] = field(default_factory=set)
    right_neighbors: set[str] = field(default_factory=set)


@dataclass(slots=True)
class YakeTermFeatures:
    t_case: float
    t_pos: float
    tf_norm: float
    t_rel: float
    t_sent: float

    @property
    def score(self) -> float:
        return (self.t_rel * self.t_pos) / (
            self.t_case + self.tf_norm / self.t_rel + self.t_sent / self.t_rel
        )


def yake_term_features(doc: ProcessedDocument, window: int = 2) -> dict[str, YakeTermFeatures]:
    """Per-term statistical features, keyed by stem.

    Terms are non-stopword alphabetic tokens.  Neighbor sets collect distinct
    lowercase forms of any token within ``window`` positions on that side in
    the same sentence.  tf normalization uses the population standard
    deviation of term frequencies.
    """
    stats: dict[str, YakeTermStats] = {}
    for start, end in doc.sentences:
        toks = doc.tokens[start:end]
        for i, tok in enumerate(toks):
            if not tok.is_alphabetic or tok.is_stopword:
                continue
            st = stats.setdefault(tok.stem, YakeTermStats())
            st.tf += 1
            st.caps_count += tok.is_all_caps
            st.proper_count += tok.is_capitalized
            st.sentence_indices.append(tok.sentence_idx)
            for other in toks[max(i - window, 0):i]:
                st.left_neighbors.add(other.lower)
            for other in toks[i + 1:i + 1 + window]:
                st.right_neighbors.add(other.lower)

    if not stats:
        return {}
    tfs = [st.tf for st in stats.values()]
    tf_mean, tf_std, tf_max = mean(tfs), pstdev(tfs), max(tfs)
    n_sentences = max(doc.n_sentences, 1)

    features = {}
    for term, st in stats.items():
        t_rel = 1.0 + (
            len(st.left_neighbors) / st.tf + len(st.right_neighbors) / st.tf
        ) * (st.tf / tf_max)
        features[term] = YakeTermFeatures(
            t_case=max(st.caps_count, st.proper_count) / (1.0 + math.log(st.tf)),
            t_pos=math.log(math.log(3.0 + median(st.sentence_indices))),
            tf_norm=st.tf / (tf_mean + tf_std),
            t_rel=t_rel,
            t_sent=len(set(st.sentence_indices)) / n_sentences,
        )
    return features


def yake_phrase_score(candidate: CandidatePhrase,
                      features: dict[str, YakeTermFeatures]) -> float:
    scores = [features[s].score for s in candidate.stems]
    product = math.prod(scores)
    return product / (candidate.frequency * (1.0 + sum(scores)))


class YakeExtractor(KeyphraseExtractor):
    """M3: per-term statistical features combined into a lower-is-better phrase
    score, with Levenshtein-based near-duplicate removal.

    Reported scores are negated so rankings are comparable to the other models
    (higher reported score = better phrase).
    """

    model_id = "M3"

    def __init__(self, top_k: int = DEFAULT_TOP_K, n_max: int = 3, window: int = 2,
                 dedup_threshold: float = 0.8):
        self.top_k = top_k
        self.n_max = n_max
        self.window = window
        self.dedup_threshold = dedup_threshold

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        # Candidates may not contain stopwords anywhere (an interior stopword
        # terminates the phrase).
        candidates = self._require_candidates(
            ngram_candidates(doc, self.n_max, allow_interior_stopwords=False)
        )
        features = yake_term_features(doc, self.window)
        scored = [(c, yake_phrase_score(c, features)) for c in candidates]
        scored.sort(key=lambda cs: (cs[1], cs[0].first_position, cs[0].normalized))

        kept: list[tuple[CandidatePhrase, float]] = []
        for cand, score in scored:
            duplicate = any(
                levenshtein_similarity(cand.surface.lower(), other.surface.lower())
                >= self.dedup_threshold
                for other, _ in kept
            )
            if not duplicate:
                kept.append((cand, score))
        return rank_top_k([(c, -s) for c, s in kept], self.top_k)
