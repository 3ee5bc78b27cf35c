"""Thesis-record corpora: loading, validation and round-trip serialization.

Three interchangeable formats:

* ``tsv``  — header ``type\tcode\ttitle\tsummary\tkeywords`` (optional trailing
  ``area`` and ``status`` columns); keywords ";"-delimited.
* ``jsonl`` — one object per line with the same keys.
* ``txt_dir`` — ``<code>.txt`` (title, blank line, summary) plus ``<code>.keys``
  with one gold keyword per line.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import DuplicateId, EmptyCorpus, InvalidParameter, PathNotFound

KNOWLEDGE_AREAS = ("Biomedical", "BusinessEconomics", "Engineering", "SocialSciences")
STATUSES = ("Archived", "Rejected", "Project", "Proposal", "Completed")

FORMATS = ("tsv", "jsonl", "txt_dir")
_TSV_COLUMNS = ("type", "code", "title", "summary", "keywords")
_OPTIONAL_COLUMNS = ("area", "status")

KEYWORD_MIN = 3
KEYWORD_MAX = 10


@dataclass(slots=True)
class ThesisRecord:
    work_type: str
    code: str
    title: str
    summary: str
    gold_keywords: list[str]
    knowledge_area: str | None = None
    status: str | None = None


@dataclass(slots=True)
class Diagnostic:
    """One rejected row/file and why; rejection never aborts the load."""

    location: str  # "line 7" or a file name
    reason: str

    def __str__(self) -> str:
        return f"{self.location}: {self.reason}"


@dataclass
class Corpus:
    records: list[ThesisRecord]
    language: str = "spanish"
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def n_docs(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def get(self, code: str) -> ThesisRecord | None:
        for record in self.records:
            if record.code == code:
                return record
        return None


def parse_keywords(raw: str, sep: str = ";") -> list[str]:
    """Split, trim, drop empties, drop case-insensitive exact duplicates."""
    keywords: list[str] = []
    seen: set[str] = set()
    for item in raw.split(sep):
        item = item.strip()
        if item and item.lower() not in seen:
            seen.add(item.lower())
            keywords.append(item)
    return keywords


def _check_record(record: ThesisRecord, location: str) -> Diagnostic | None:
    if not record.code.strip():
        return Diagnostic(location, "empty code")
    if not record.title.strip():
        return Diagnostic(location, "empty title")
    if not record.summary.strip():
        return Diagnostic(location, "empty summary")
    return None


def validate_record(record: ThesisRecord) -> list[str]:
    """Advisory warnings only; gold data is always kept as-is."""
    warnings = []
    if not record.gold_keywords:
        warnings.append("EmptyKeywords")
    if not KEYWORD_MIN <= len(record.gold_keywords) <= KEYWORD_MAX:
        warnings.append("KeywordCountOutOfRange")
    return warnings


def _finish(records, locations, diagnostics, language) -> Corpus:
    seen: dict[str, str] = {}
    for record, location in zip(records, locations):
        if record.code in seen:
            raise DuplicateId(record.code, seen[record.code], location)
        seen[record.code] = location
    if not records:
        raise EmptyCorpus("no valid records loaded")
    return Corpus(records=records, language=language, diagnostics=diagnostics)


def load_corpus(path: str, format: str, language: str = "spanish") -> Corpus:
    if format not in FORMATS:
        raise InvalidParameter(f"unknown corpus format {format!r}")
    if not os.path.exists(path):
        raise PathNotFound(path)
    if format == "tsv":
        return _load_tsv(path, language)
    if format == "jsonl":
        return _load_jsonl(path, language)
    return _load_txt_dir(path, language)


def _decoded_lines(path: str):
    """Yield (line_no, text | None, error) decoding each line independently so
    a bad byte sequence rejects one row, not the file."""
    with open(path, "rb") as fh:
        for line_no, raw in enumerate(fh, 1):
            try:
                yield line_no, raw.decode("utf-8").rstrip("\r\n"), None
            except UnicodeDecodeError as exc:
                yield line_no, None, str(exc)


def _load_tsv(path: str, language: str) -> Corpus:
    records, locations, diagnostics = [], [], []
    header: list[str] | None = None
    for line_no, text, err in _decoded_lines(path):
        location = f"line {line_no}"
        if err is not None:
            diagnostics.append(Diagnostic(location, f"invalid UTF-8: {err}"))
            continue
        if header is None:
            header = [c.strip() for c in text.split("\t")]
            if tuple(header[:5]) != _TSV_COLUMNS or any(
                c not in _OPTIONAL_COLUMNS for c in header[5:]
            ):
                raise InvalidParameter(
                    f"bad TSV header {header!r}, expected {list(_TSV_COLUMNS)}"
                )
            continue
        if not text.strip():
            continue
        fields = text.split("\t")
        if len(fields) != len(header):
            diagnostics.append(
                Diagnostic(location, f"expected {len(header)} columns, got {len(fields)}")
            )
            continue
        row = dict(zip(header, fields))
        record = ThesisRecord(
            work_type=row["type"].strip(),
            code=row["code"].strip(),
            title=row["title"].strip(),
            summary=row["summary"].strip(),
            gold_keywords=parse_keywords(row["keywords"]),
            knowledge_area=row.get("area", "").strip() or None,
            status=row.get("status", "").strip() or None,
        )
        problem = _check_record(record, location)
        if problem:
            diagnostics.append(problem)
            continue
        records.append(record)
        locations.append(location)
    return _finish(records, locations, diagnostics, language)


def _load_jsonl(path: str, language: str) -> Corpus:
    records, locations, diagnostics = [], [], []
    for line_no, text, err in _decoded_lines(path):
        location = f"line {line_no}"
        if err is not None:
            diagnostics.append(Diagnostic(location, f"invalid UTF-8: {err}"))
            continue
        if not text.strip():
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            diagnostics.append(Diagnostic(location, f"invalid JSON: {exc}"))
            continue
        if not isinstance(obj, dict):
            diagnostics.append(Diagnostic(location, "expected a JSON object"))
            continue
        missing = [k for k in _TSV_COLUMNS if k not in obj]
        if missing:
            diagnostics.append(Diagnostic(location, f"missing keys: {missing}"))
            continue
        keywords = obj["keywords"]
        if isinstance(keywords, str):
            keywords = parse_keywords(keywords)
        else:
            keywords = parse_keywords(";".join(str(k) for k in keywords))
        record = ThesisRecord(
            work_type=str(obj["type"]).strip(),
            code=str(obj["code"]).strip(),
            title=str(obj["title"]).strip(),
            summary=str(obj["summary"]).strip(),
            gold_keywords=keywords,
            knowledge_area=str(obj.get("area") or "").strip() or None,
            status=str(obj.get("status") or "").strip() or None,
        )
        problem = _check_record(record, location)
        if problem:
            diagnostics.append(problem)
            continue
        records.append(record)
        locations.append(location)
    return _finish(records, locations, diagnostics, language)


def _load_txt_dir(path: str, language: str) -> Corpus:
    if not os.path.isdir(path):
        raise PathNotFound(f"{path} is not a directory")
    records, locations, diagnostics = [], [], []
    for name in sorted(os.listdir(path)):
        if not name.endswith(".txt"):
            continue
        code = name[:-4]
        try:
            body = open(os.path.join(path, name), encoding="utf-8").read()
        except UnicodeDecodeError as exc:
            diagnostics.append(Diagnostic(name, f"invalid UTF-8: {exc}"))
            continue
        title, _, summary = body.partition("\n\n")
        keys_path = os.path.join(path, code + ".keys")
        keywords: list[str] = []
        if os.path.exists(keys_path):
            lines = open(keys_path, encoding="utf-8").read().splitlines()
            keywords = parse_keywords(";".join(lines))
        else:
            diagnostics.append(Diagnostic(name, "no sibling .keys file; gold keywords empty"))
        record = ThesisRecord(
            work_type="",
            code=code,
            title=title.strip(),
            summary=summary.strip(),
            gold_keywords=keywords,
        )
        problem = _check_record(record, name)
        if problem:
            diagnostics.append(problem)
            continue
        records.append(record)
        locations.append(name)
    return _finish(records, locations, diagnostics, language)


def save_corpus(corpus: Corpus, path: str, format: str) -> None:
    if format not in FORMATS:
        raise InvalidParameter(f"unknown corpus format {format!r}")
    if format == "tsv":
        has_meta = any(r.knowledge_area or r.status for r in corpus)
        columns = _TSV_COLUMNS + _OPTIONAL_COLUMNS if has_meta else _TSV_COLUMNS
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\t".join(columns) + "\n")
            for r in corpus:
                row = [r.work_type, r.code, r.title, r.summary, ";".join(r.gold_keywords)]
                if has_meta:
                    row += [r.knowledge_area or "", r.status or ""]
                fh.write("\t".join(row) + "\n")
    elif format == "jsonl":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for r in corpus:
                obj = {
                    "type": r.work_type,
                    "code": r.code,
                    "title": r.title,
                    "summary": r.summary,
                    "keywords": r.gold_keywords,
                }
                if r.knowledge_area:
                    obj["area"] = r.knowledge_area
                if r.status:
                    obj["status"] = r.status
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    else:
        os.makedirs(path, exist_ok=True)
        for r in corpus:
            with open(os.path.join(path, r.code + ".txt"), "w", encoding="utf-8") as fh:
                fh.write(r.title + "\n\n" + r.summary + "\n")
            with open(os.path.join(path, r.code + ".keys"), "w", encoding="utf-8") as fh:
                fh.write("\n".join(r.gold_keywords) + ("\n" if r.gold_keywords else ""))
