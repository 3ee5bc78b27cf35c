"""Deterministic text normalization, tokenization, stemming and candidate generation.

Every extractor consumes the same :class:`ProcessedDocument`, so all of this is
pure: same input and configuration always produce the same output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import InvalidParameter

SPANISH = "spanish"
ENGLISH = "english"
MIXED = "mixed"
LANGUAGES = (SPANISH, ENGLISH, MIXED)

# Characters kept by clean_text: unicode letters/digits, whitespace, and a
# small punctuation set.  Everything else (including underscore, which \w
# would keep) becomes a single space.
_DROP_RE = re.compile(r"[^\w\s\-.,;:?!]|_")
_WS_RE = re.compile(r"\s+")

# A token is a run of word characters, allowing internal hyphens
# ("tagger-free" stays one token).  Underscore is excluded from \w on purpose.
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")

_SENT_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")

# Ordered suffix-strip rules, longest suffix first.  A rule applies only if
# the result keeps at least _MIN_STEM characters; otherwise the next rule is
# tried, and with no applicable rule the word is returned unchanged.
_MIN_STEM = 3
_SPANISH_RULES = [
    ("aciones", "ación"),
    ("ciones", "ción"),
    ("es", ""),
    ("s", ""),
    ("a", ""),
    ("o", ""),
]
_ENGLISH_RULES = [
    ("ing", ""),
    ("ed", ""),
    ("es", ""),
    ("s", ""),
]
_MIXED_RULES = sorted(
    _SPANISH_RULES + [r for r in _ENGLISH_RULES if r not in _SPANISH_RULES],
    key=lambda r: -len(r[0]),
)
_RULES = {SPANISH: _SPANISH_RULES, ENGLISH: _ENGLISH_RULES, MIXED: _MIXED_RULES}


def clean_text(raw: str) -> str:
    """Strip special characters, keeping letters (accents included), digits,
    whitespace and ``- . , ; : ? !``; collapse whitespace runs."""
    return _WS_RE.sub(" ", _DROP_RE.sub(" ", raw)).strip()


def stem(lower: str, lang: str = SPANISH) -> str:
    """Deterministic suffix stripping; never empty for non-empty input."""
    rules = _RULES[lang]
    for suffix, repl in rules:
        if lower.endswith(suffix):
            candidate = lower[: len(lower) - len(suffix)] + repl
            if len(candidate) >= _MIN_STEM:
                return candidate
    return lower


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance / max length; 1.0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def load_stopwords(lang: str = SPANISH) -> frozenset[str]:
    """Bundled stopword list(s); ``mixed`` is the union of Spanish and English."""
    if lang not in LANGUAGES:
        raise InvalidParameter(f"unknown language {lang!r}")
    langs = (SPANISH, ENGLISH) if lang == MIXED else (lang,)
    words: set[str] = set()
    for name in langs:
        text = resources.files("kexbench.data").joinpath(f"stopwords_{name[:2]}.txt").read_text(
            "utf-8"
        )
        words.update(parse_stopword_file(text))
    return frozenset(words)


def parse_stopword_file(text: str) -> set[str]:
    """One lowercase word per line; ``#`` starts a comment."""
    words = set()
    for line in text.splitlines():
        word = line.split("#", 1)[0].strip().lower()
        if word:
            words.add(word)
    return words


@dataclass(slots=True)
class Token:
    surface: str
    lower: str
    stem: str
    sentence_idx: int
    position: int
    is_stopword: bool
    is_alphabetic: bool
    is_capitalized: bool
    is_all_caps: bool


@dataclass(slots=True)
class ProcessedDocument:
    doc_id: str
    sentences: list[tuple[int, int]]  # [start, end) ranges into tokens
    tokens: list[Token]
    full_text: str

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)

    def sentence_tokens(self, idx: int) -> list[Token]:
        start, end = self.sentences[idx]
        return self.tokens[start:end]


@dataclass(slots=True)
class CandidatePhrase:
    """A normalized phrase plus every place it occurs in the document."""

    normalized: str  # space-joined stems
    surface: str  # surface form of the first occurrence
    spans: list[tuple[int, int]] = field(default_factory=list)  # [start, end) positions

    @property
    def frequency(self) -> int:
        return len(self.spans)

    @property
    def first_position(self) -> int:
        return min(start for start, _ in self.spans)

    @property
    def stems(self) -> list[str]:
        return self.normalized.split()

    @property
    def n_words(self) -> int:
        return len(self.stems)


def segment_and_tokenize(
    cleaned: str, lang: str, stopwords: frozenset[str], doc_id: str = ""
) -> ProcessedDocument:
    """Split into sentences on ``. ! ?`` + whitespace/end, tokenize, annotate.

    Punctuation-only chunks produce no tokens; sentences without tokens are
    dropped so sentence ranges exactly partition the token stream.
    """
    tokens: list[Token] = []
    sentences: list[tuple[int, int]] = []
    for chunk in _SENT_SPLIT_RE.split(cleaned):
        start = len(tokens)
        sent_idx = len(sentences)
        for match in _TOKEN_RE.finditer(chunk):
            surface = match.group()
            lower = surface.lower()
            bare = surface.replace("-", "")
            all_caps = len(bare) > 1 and bare.isupper()
            tokens.append(
                Token(
                    surface=surface,
                    lower=lower,
                    stem=stem(lower, lang),
                    sentence_idx=sent_idx,
                    position=len(tokens),
                    is_stopword=lower in stopwords,
                    is_alphabetic=bare.isalpha(),
                    is_capitalized=surface[:1].isupper() and not all_caps,
                    is_all_caps=all_caps,
                )
            )
        if len(tokens) > start:
            sentences.append((start, len(tokens)))
    return ProcessedDocument(doc_id=doc_id, sentences=sentences, tokens=tokens, full_text=cleaned)


def _merge(occurrences: list[tuple[str, str, tuple[int, int]]]) -> list[CandidatePhrase]:
    """Merge (normalized, surface, span) occurrences by normalized form."""
    merged: dict[str, CandidatePhrase] = {}
    for normalized, surface, span in occurrences:
        cand = merged.get(normalized)
        if cand is None:
            merged[normalized] = CandidatePhrase(normalized, surface, [span])
        else:
            cand.spans.append(span)
    return list(merged.values())


MAX_CHUNK_LEN = 4


def chunk_candidates(doc: ProcessedDocument, max_len: int = MAX_CHUNK_LEN) -> list[CandidatePhrase]:
    """Maximal same-sentence runs of non-stopword alphabetic tokens; runs longer
    than ``max_len`` keep only their first ``max_len`` tokens."""
    occurrences = []
    for start, end in doc.sentences:
        run: list[Token] = []
        for tok in doc.tokens[start:end] + [None]:  # type: ignore[list-item]
            if tok is not None and tok.is_alphabetic and not tok.is_stopword:
                run.append(tok)
                continue
            if run:
                kept = run[:max_len]
                occurrences.append(
                    (
                        " ".join(t.stem for t in kept),
                        " ".join(t.surface for t in kept),
                        (kept[0].position, kept[-1].position + 1),
                    )
                )
            run = []
    return _merge(occurrences)


def ngram_candidates(
    doc: ProcessedDocument, n_max: int = 3, allow_interior_stopwords: bool = True
) -> list[CandidatePhrase]:
    """All within-sentence n-grams with 1 <= n <= n_max made of alphabetic
    tokens, never starting or ending with a stopword."""
    if n_max < 1:
        raise InvalidParameter(f"n_max must be >= 1, got {n_max}")
    occurrences = []
    for start, end in doc.sentences:
        toks = doc.tokens[start:end]
        for i in range(len(toks)):
            for n in range(1, n_max + 1):
                if i + n > len(toks):
                    break
                gram = toks[i : i + n]
                if not all(t.is_alphabetic for t in gram):
                    break  # longer grams from i contain the same token
                if gram[0].is_stopword or gram[-1].is_stopword:
                    continue
                if not allow_interior_stopwords and any(t.is_stopword for t in gram):
                    continue
                occurrences.append(
                    (
                        " ".join(t.stem for t in gram),
                        " ".join(t.surface for t in gram),
                        (gram[0].position, gram[-1].position + 1),
                    )
                )
    return _merge(occurrences)


class TextPipeline:
    """Shared preprocessing front-end: record text -> ProcessedDocument."""

    def __init__(self, language: str = SPANISH, stopwords: frozenset[str] | None = None):
        if language not in LANGUAGES:
            raise InvalidParameter(f"unknown language {language!r}")
        self.language = language
        self.stopwords = stopwords if stopwords is not None else load_stopwords(language)

    def process_text(self, text: str, doc_id: str = "") -> ProcessedDocument:
        return segment_and_tokenize(clean_text(text), self.language, self.stopwords, doc_id)

    def process_record(self, record) -> ProcessedDocument:
        return self.process_text(record.title + ". " + record.summary, doc_id=record.code)

    def normalize_phrase(self, phrase: str) -> str:
        """Lowercased, stemmed, whitespace-normalized form used for matching."""
        cleaned = clean_text(phrase)
        return " ".join(
            stem(m.group().lower(), self.language) for m in _TOKEN_RE.finditer(cleaned)
        )
