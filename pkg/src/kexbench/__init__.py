"""kexbench: unsupervised keyphrase extraction models (M1-M9) with a timed
benchmark harness and IR evaluation suite."""

from importlib import resources

from .corpus import Corpus, ThesisRecord, load_corpus, save_corpus, validate_record
from .evaluate import (
    ModelReport,
    aggregate,
    doc_success,
    hamming_loss,
    match_keywords,
    precision_recall_f1,
    subset_accuracy,
)
from .extractors import (
    MODEL_CLASSES,
    MODEL_IDS,
    MODEL_NAMES,
    ExtractionResult,
    Keyphrase,
    KeyphraseExtractor,
    SharedArtifacts,
    run_benchmark,
    run_model,
)
from .graph import WeightedDigraph, build_cooccurrence_graph, pagerank
from .stats import DocumentFrequencyTable, TopicModel, build_df, train_lda
from .textproc import (
    CandidatePhrase,
    ProcessedDocument,
    TextPipeline,
    Token,
    chunk_candidates,
    clean_text,
    load_stopwords,
    ngram_candidates,
    segment_and_tokenize,
    stem,
)

__version__ = "0.1.0"


def minicorpus_path() -> str:
    """Filesystem path of the bundled 20-document bilingual mini-corpus."""
    return str(resources.files("kexbench.data").joinpath("minicorpus.tsv"))


def load_minicorpus() -> Corpus:
    return load_corpus(minicorpus_path(), "tsv", language="mixed")
