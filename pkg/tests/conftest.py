import pytest

import kexbench as kx
from kexbench.corpus import Corpus, ThesisRecord
from kexbench.textproc import TextPipeline


@pytest.fixture(scope="session")
def spanish_pipeline():
    return TextPipeline("spanish")


@pytest.fixture(scope="session")
def english_pipeline():
    return TextPipeline("english")


@pytest.fixture(scope="session")
def mixed_pipeline():
    return TextPipeline("mixed")


@pytest.fixture(scope="session")
def minicorpus():
    return kx.load_minicorpus()


def make_record(code, title, summary, keywords=(), work_type="Thesis", **kwargs):
    return ThesisRecord(
        work_type=work_type,
        code=code,
        title=title,
        summary=summary,
        gold_keywords=list(keywords),
        **kwargs,
    )


@pytest.fixture(scope="session")
def five_doc_corpus():
    """Small English corpus with overlapping vocabulary for df/tf-idf oracles."""
    records = [
        make_record(
            "D-1",
            "Water quality monitoring",
            "Water quality was measured in the lake. The monitoring network "
            "covers water quality stations.",
            ["water quality", "monitoring"],
        ),
        make_record(
            "D-2",
            "Lake pollution sources",
            "Pollution sources affect the lake. Water quality decreases near "
            "pollution sources.",
            ["pollution sources", "lake"],
        ),
        make_record(
            "D-3",
            "Solar energy adoption",
            "Solar energy systems power rural homes. Solar energy adoption is growing.",
            ["solar energy", "rural homes"],
        ),
        make_record(
            "D-4",
            "Crop yield models",
            "Crop yield depends on rainfall. Yield models use rainfall records "
            "and soil data.",
            ["crop yield", "rainfall"],
        ),
        make_record(
            "D-5",
            "Water quality and crop yield",
            "Irrigation water quality affects crop yield. Clean water improves "
            "the yield of crops.",
            ["water quality", "crop yield", "irrigation"],
        ),
    ]
    return Corpus(records=records, language="english")
