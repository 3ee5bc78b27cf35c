from .base import DEFAULT_TOP_K, Keyphrase, KeyphraseExtractor, rank_top_k
from .graphrank import PositionRankExtractor, SingleRankExtractor, TextRankExtractor
from .runner import (
    MODEL_CLASSES,
    MODEL_IDS,
    MODEL_NAMES,
    ExtractionResult,
    SharedArtifacts,
    read_results,
    run_benchmark,
    run_model,
    write_results,
)
from .statistical import KpMinerExtractor, TfIdfExtractor, YakeExtractor
from .topical import (
    MultipartiteRankExtractor,
    Topic,
    TopicalPageRankExtractor,
    TopicRankExtractor,
    cluster_topics,
)

__all__ = [
    "DEFAULT_TOP_K",
    "Keyphrase",
    "KeyphraseExtractor",
    "rank_top_k",
    "MODEL_CLASSES",
    "MODEL_IDS",
    "MODEL_NAMES",
    "ExtractionResult",
    "SharedArtifacts",
    "read_results",
    "run_benchmark",
    "run_model",
    "write_results",
    "TfIdfExtractor",
    "KpMinerExtractor",
    "YakeExtractor",
    "TextRankExtractor",
    "SingleRankExtractor",
    "TopicRankExtractor",
    "TopicalPageRankExtractor",
    "PositionRankExtractor",
    "MultipartiteRankExtractor",
    "Topic",
    "cluster_topics",
]
