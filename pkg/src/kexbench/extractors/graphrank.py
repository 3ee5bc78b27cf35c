"""Word-graph ranking models: TextRank (M4), SingleRank (M5), PositionRank (M8)."""

from __future__ import annotations

import math

from ..graph import build_cooccurrence_graph, default_node_filter, pagerank
from ..textproc import CandidatePhrase, ProcessedDocument, chunk_candidates
from .base import DEFAULT_TOP_K, Keyphrase, KeyphraseExtractor, rank_top_k


def candidate_word_sum(candidates: list[CandidatePhrase],
                       word_scores: dict[str, float]) -> list[tuple[CandidatePhrase, float]]:
    """Candidate score = sum of member word scores (0 for words off the graph)."""
    return [
        (c, sum(word_scores.get(stem, 0.0) for stem in c.stems))
        for c in candidates
    ]


class TextRankExtractor(KeyphraseExtractor):
    """M4: unweighted co-occurrence graph; keep the top third of words and
    rebuild phrases from adjacent kept words in the document."""

    model_id = "M4"

    def __init__(self, top_k: int = DEFAULT_TOP_K, window: int = 2,
                 damping: float = 0.85, keep_fraction: float = 1 / 3):
        self.top_k = top_k
        self.window = window
        self.damping = damping
        self.keep_fraction = keep_fraction

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        graph = build_cooccurrence_graph(doc, window=self.window, weighted=False)
        if graph.n_nodes == 0:
            self._require_candidates([])
        scores = pagerank(graph, damping=self.damping)

        first_pos: dict[str, int] = {}
        for tok in doc.tokens:
            if default_node_filter(tok) and tok.stem not in first_pos:
                first_pos[tok.stem] = tok.position
        n_keep = math.ceil(graph.n_nodes * self.keep_fraction)
        ordered = sorted(scores, key=lambda s: (-scores[s], first_pos[s], s))
        kept = set(ordered[:n_keep])

        # Maximal same-sentence runs of kept words become phrases.
        merged: dict[str, CandidatePhrase] = {}
        phrase_scores: dict[str, float] = {}
        for start, end in doc.sentences:
            run = []
            for tok in doc.tokens[start:end] + [None]:
                if tok is not None and default_node_filter(tok) and tok.stem in kept:
                    run.append(tok)
                    continue
                if run:
                    normalized = " ".join(t.stem for t in run)
                    if normalized not in merged:
                        merged[normalized] = CandidatePhrase(
                            normalized,
                            " ".join(t.surface for t in run),
                            [(run[0].position, run[-1].position + 1)],
                        )
                        phrase_scores[normalized] = sum(scores[t.stem] for t in run)
                    else:
                        merged[normalized].spans.append(
                            (run[0].position, run[-1].position + 1)
                        )
                run = []
        scored = [(c, phrase_scores[norm]) for norm, c in merged.items()]
        return rank_top_k(scored, self.top_k)


class SingleRankExtractor(KeyphraseExtractor):
    """M5: weighted co-occurrence graph, uniform PageRank, chunk candidates
    scored by member-word sum."""

    model_id = "M5"

    def __init__(self, top_k: int = DEFAULT_TOP_K, window: int = 10,
                 damping: float = 0.85):
        self.top_k = top_k
        self.window = window
        self.damping = damping

    def _personalization(self, doc: ProcessedDocument) -> dict[str, float] | None:
        return None

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        candidates = self._require_candidates(chunk_candidates(doc))
        graph = build_cooccurrence_graph(doc, window=self.window, weighted=True)
        if graph.n_nodes == 0:
            self._require_candidates([])
        scores = pagerank(
            graph, damping=self.damping, personalization=self._personalization(doc)
        )
        return rank_top_k(candidate_word_sum(candidates, scores), self.top_k)


class PositionRankExtractor(SingleRankExtractor):
    """M8: SingleRank graph with position-biased personalization — each word
    restarts with mass proportional to the sum of 1/(position+1) over its
    occurrences."""

    model_id = "M8"

    def _personalization(self, doc: ProcessedDocument) -> dict[str, float]:
        weights: dict[str, float] = {}
        for tok in doc.tokens:
            if default_node_filter(tok):
                weights[tok.stem] = weights.get(tok.stem, 0.0) + 1.0 / (tok.position + 1)
        return weights
