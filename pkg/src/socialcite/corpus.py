"""Corpus ingestion: parse, validate and filter line-delimited bibliographic records."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Optional, Sequence

log = logging.getLogger(__name__)

EARLIEST_DATE = date(1800, 1, 1)
RULE_ORDER = ("drop_tags", "require_tags", "max_authors", "journal_allowlist")


class CorpusError(ValueError):
    """Raised for fatal corpus problems (unreadable file, duplicate IDs, strict-mode violations)."""

    def __init__(self, message: str, diagnostics: Sequence["Diagnostic"] = ()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: [{self.code}] {self.message}"


@dataclass(frozen=True)
class BibRecord:
    paper_id: str
    date: date
    author_ids: tuple[str, ...]
    ref_ids: tuple[str, ...] = ()
    tags: tuple[str, ...] = ()
    journal: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.paper_id,
                "date": self.date.isoformat(),
                "authors": list(self.author_ids),
                "refs": list(self.ref_ids),
                "tags": list(self.tags),
                "journal": self.journal,
            },
            ensure_ascii=False,
            separators=(",", ":"),
        )


def parse_date(text: str) -> date:
    """Parse ``YYYY-MM-DD`` or ``YYYY-MM`` (normalized to the first of the month)."""
    if not isinstance(text, str):
        raise ValueError(f"date must be a string, got {type(text).__name__}")
    parts = text.split("-")
    if len(parts) == 2:
        parts.append("01")
    if len(parts) != 3 or len(parts[0]) != 4:
        raise ValueError(f"unparseable date {text!r}")
    return date(int(parts[0]), int(parts[1]), int(parts[2]))


def _string_list(obj: dict, key: str) -> tuple[str, ...]:
    value = obj.get(key, [])
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValueError(f"{key!r} must be an array of strings")
    return tuple(value)


def record_from_obj(obj: dict, today: Optional[date] = None) -> BibRecord:
    """Build a record from a decoded line, enforcing every record invariant.

    Raises ValueError with a short code prefix (``code: message``) on violation.
    """
    if not isinstance(obj, dict):
        raise ValueError("malformed: line is not a JSON object")
    today = today or date.today()
    paper_id = obj.get("id")
    if not isinstance(paper_id, str) or not paper_id:
        raise ValueError("missing_id: 'id' must be a non-empty string")
    try:
        when = parse_date(obj.get("date"))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad_date: {exc}") from None
    if not EARLIEST_DATE <= when <= today:
        raise ValueError(f"bad_date: {when.isoformat()} outside [{EARLIEST_DATE}, {today}]")
    try:
        authors = _string_list(obj, "authors")
        refs = _string_list(obj, "refs")
        tags = _string_list(obj, "tags")
    except ValueError as exc:
        raise ValueError(f"malformed: {exc}") from None
    if not authors:
        raise ValueError("no_authors: author list is empty")
    if len(set(authors)) != len(authors):
        raise ValueError("duplicate_author: author list has duplicates")
    if any(not a for a in authors):
        raise ValueError("no_authors: empty author ID")
    if len(set(refs)) != len(refs):
        raise ValueError("duplicate_ref: reference list has duplicates")
    if paper_id in refs:
        raise ValueError("self_citation: record cites itself")
    journal = obj.get("journal", "")
    if not isinstance(journal, str):
        raise ValueError("malformed: 'journal' must be a string")
    return BibRecord(paper_id, when, authors, refs, tags, journal)


def parse_lines(
    lines: Iterable[str], strict: bool = False, today: Optional[date] = None
) -> tuple[list[BibRecord], list[Diagnostic]]:
    records: list[BibRecord] = []
    diagnostics: list[Diagnostic] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            diag = Diagnostic(lineno, "malformed", f"invalid JSON: {exc.msg}")
        else:
            try:
                record = record_from_obj(obj, today)
            except ValueError as exc:
                code, _, msg = str(exc).partition(": ")
                diag = Diagnostic(lineno, code, msg)
            else:
                if record.paper_id in seen:
                    diag = Diagnostic(
                        lineno,
                        "duplicate_id",
                        f"paper {record.paper_id!r} already defined on line {seen[record.paper_id]}",
                    )
                    raise CorpusError(str(diag), diagnostics + [diag])
                seen[record.paper_id] = lineno
                records.append(record)
                continue
        if strict:
            raise CorpusError(str(diag), diagnostics + [diag])
        diagnostics.append(diag)
    return records, diagnostics


def parse_corpus(
    path, strict: bool = False, today: Optional[date] = None
) -> tuple[list[BibRecord], list[Diagnostic]]:
    """Read a corpus file (one JSON object per line).

    In lenient mode, invalid lines are skipped and reported as diagnostics with
    their 1-based line number. Duplicate paper IDs are fatal in either mode.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_lines(fh, strict=strict, today=today)
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise CorpusError(f"corpus {path} is not valid UTF-8: {exc}") from exc


def write_corpus(records: Iterable[BibRecord], path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(rec.to_json())
            fh.write("\n")


@dataclass(frozen=True)
class FilterConfig:
    drop_tags: frozenset[str] = frozenset()
    require_tags: frozenset[str] = frozenset()
    max_authors: Optional[int] = None
    journal_allowlist: Optional[frozenset[str]] = None
    rule_order: tuple[str, ...] = RULE_ORDER

    def __post_init__(self):
        object.__setattr__(self, "drop_tags", frozenset(self.drop_tags))
        object.__setattr__(self, "require_tags", frozenset(self.require_tags))
        if self.journal_allowlist is not None:
            object.__setattr__(self, "journal_allowlist", frozenset(self.journal_allowlist))
        overlap = self.drop_tags & self.require_tags
        if overlap:
            raise ValueError(f"tags both dropped and required: {sorted(overlap)}")
        if self.max_authors is not None and self.max_authors < 1:
            raise ValueError("max_authors must be a positive integer")
        if sorted(self.rule_order) != sorted(RULE_ORDER):
            raise ValueError(f"rule_order must be a permutation of {RULE_ORDER}")

    @classmethod
    def from_json(cls, path) -> "FilterConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        allow = raw.get("journal_allowlist")
        return cls(
            drop_tags=frozenset(raw.get("drop_tags", ())),
            require_tags=frozenset(raw.get("require_tags", ())),
            max_authors=raw.get("max_authors"),
            journal_allowlist=frozenset(allow) if allow is not None else None,
            rule_order=tuple(raw.get("rule_order", RULE_ORDER)),
        )


@dataclass
class FilterReport:
    input_count: int = 0
    kept_count: int = 0
    dropped_by_rule: dict[str, int] = field(default_factory=lambda: {r: 0 for r in RULE_ORDER})

    def rows(self) -> list[tuple[str, int]]:
        out = [("input", self.input_count), ("kept", self.kept_count)]
        out += [(f"dropped_{rule}", n) for rule, n in self.dropped_by_rule.items()]
        return out


def _matches(rule: str, rec: BibRecord, config: FilterConfig) -> bool:
    if rule == "drop_tags":
        return bool(config.drop_tags.intersection(rec.tags))
    if rule == "require_tags":
        return bool(config.require_tags) and not config.require_tags.intersection(rec.tags)
    if rule == "max_authors":
        return config.max_authors is not None and len(rec.author_ids) > config.max_authors
    if rule == "journal_allowlist":
        return config.journal_allowlist is not None and rec.journal not in config.journal_allowlist
    raise ValueError(f"unknown filter rule {rule!r}")


def apply_filters(
    records: Sequence[BibRecord], config: FilterConfig
) -> tuple[list[BibRecord], FilterReport]:
    """Drop every record matching at least one rule; the first matching rule is charged."""
    report = FilterReport(input_count=len(records))
    kept = []
    for rec in records:
        for rule in config.rule_order:
            if _matches(rule, rec, config):
                report.dropped_by_rule[rule] += 1
                break
        else:
            kept.append(rec)
    report.kept_count = len(kept)
    return kept, report


@dataclass(frozen=True)
class CorpusSummary:
    n_papers: int
    n_authors: int
    n_citations: int
    n_authorships: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_papers, self.n_authors, self.n_citations, self.n_authorships)


def corpus_summary(records: Sequence[BibRecord]) -> CorpusSummary:
    """Node and edge counts; citations to papers outside the corpus are not counted."""
    ids = {r.paper_id for r in records}
    authors = {a for r in records for a in r.author_ids}
    citations = sum(1 for r in records for ref in r.ref_ids if ref in ids)
    authorships = sum(len(r.author_ids) for r in records)
    return CorpusSummary(len(records), len(authors), citations, authorships)


def split_by_journal(records: Iterable[BibRecord]) -> dict[str, list[BibRecord]]:
    groups: dict[str, list[BibRecord]] = {}
    for rec in records:
        groups.setdefault(rec.journal, []).append(rec)
    return dict(sorted(groups.items()))
