"""Estimator-style base class shared by the nine extraction models.

Extractors follow the scikit-learn convention: hyperparameters are plain
constructor attributes (so ``get_params`` / ``set_params`` / ``clone`` work),
``fit`` learns corpus-level artifacts from a list of processed documents and
stores them with a trailing underscore, and ``extract`` scores one document.
"""

from __future__ import annotations

from dataclasses import dataclass

from sklearn.base import BaseEstimator

from ..errors import EmptyDocument
from ..textproc import CandidatePhrase, ProcessedDocument

DEFAULT_TOP_K = 10


@dataclass(slots=True)
class Keyphrase:
    phrase: str  # normalized (stemmed) form
    surface: str
    score: float


def rank_top_k(
    scored: list[tuple[CandidatePhrase, float]], k: int
) -> list[Keyphrase]:
    """Total order: score descending, then earliest occurrence, then lexicographic."""
    ordered = sorted(scored, key=lambda cs: (-cs[1], cs[0].first_position, cs[0].normalized))
    return [Keyphrase(c.normalized, c.surface, s) for c, s in ordered[:k]]


class KeyphraseExtractor(BaseEstimator):
    """Base API: ``fit(docs) -> self``; ``extract(doc) -> list[Keyphrase]``."""

    model_id: str = ""

    def fit(self, X: list[ProcessedDocument], y=None):
        return self

    def extract(self, doc: ProcessedDocument) -> list[Keyphrase]:
        raise NotImplementedError

    def transform(self, X: list[ProcessedDocument]) -> list[list[Keyphrase]]:
        return [self.extract(doc) for doc in X]

    def fit_transform(self, X: list[ProcessedDocument], y=None):
        return self.fit(X, y).transform(X)

    @staticmethod
    def _require_candidates(candidates: list[CandidatePhrase]) -> list[CandidatePhrase]:
        if not candidates:
            raise EmptyDocument("no candidates")
        return candidates
