import csv
import json
from collections import Counter
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialcite.corpus import (
    BibRecord,
    CorpusError,
    FilterConfig,
    apply_filters,
    corpus_summary,
    parse_corpus,
    parse_date,
    parse_lines,
    split_by_journal,
    write_corpus,
)


def line(**kw):
    obj = {"id": "p1", "date": "1995-03-01", "authors": ["a1"], "refs": [], "tags": [], "journal": "J"}
    obj.update(kw)
    return json.dumps(obj)


def test_minimal_record_parses():
    records, diags = parse_lines([line()])
    assert diags == []
    assert records == [BibRecord("p1", date(1995, 3, 1), ("a1",), (), (), "J")]


def test_self_citation_is_skipped_with_diagnostic():
    records, diags = parse_lines([line(refs=["p1"])])
    assert records == []
    assert [(d.line, d.code) for d in diags] == [(1, "self_citation")]


def test_strict_mode_raises_on_first_violation():
    with pytest.raises(CorpusError) as exc:
        parse_lines([line(), line(id="p2", authors=[])], strict=True)
    assert exc.value.diagnostics[0].line == 2
    assert exc.value.diagnostics[0].code == "no_authors"


def test_duplicate_id_is_fatal_even_when_lenient():
    with pytest.raises(CorpusError, match="duplicate_id"):
        parse_lines([line(), line(date="1996-01-01")])


@pytest.mark.parametrize(
    "kw, code",
    [
        ({"date": "1995-13-01"}, "bad_date"),
        ({"date": "2999-01-01"}, "bad_date"),
        ({"date": 1995}, "bad_date"),
        ({"id": ""}, "missing_id"),
        ({"authors": ["a", "a"]}, "duplicate_author"),
        ({"refs": ["x", "x"]}, "duplicate_ref"),
        ({"authors": "a1"}, "malformed"),
        ({"journal": 3}, "malformed"),
    ],
)
def test_invariant_violations(kw, code):
    _, diags = parse_lines([line(**kw)], today=date(2020, 1, 1))
    assert [d.code for d in diags] == [code]


def test_month_precision_dates_normalize_to_first():
    assert parse_date("1990-06") == date(1990, 6, 1)


def test_corrupt_file_reports_line_numbers(data_dir):
    records, diags = parse_corpus(data_dir / "corrupt.jsonl")
    assert [r.paper_id for r in records] == ["c1", "c6"]
    assert [(d.line, d.code) for d in diags] == [
        (2, "bad_date"), (3, "malformed"), (4, "no_authors"), (5, "self_citation")
    ]


def test_toy20_matches_manifest(data_dir):
    records, diags = parse_corpus(data_dir / "toy20.jsonl")
    assert diags == [] and len(records) == 20
    with open(data_dir / "toy20_manifest.csv", newline="") as fh:
        manifest = {row["paper_id"]: row for row in csv.DictReader(fh)}
    assert set(manifest) == {r.paper_id for r in records}
    for r in records:
        assert sorted(r.author_ids) == manifest[r.paper_id]["authors"].split()
        assert sorted(r.ref_ids) == manifest[r.paper_id]["refs"].split()
    authors = Counter(a for r in records for a in r.author_ids)
    manifest_authors = Counter(a for row in manifest.values() for a in row["authors"].split())
    assert authors == manifest_authors


def test_toy20_summaries(data_dir):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    assert corpus_summary(records).as_tuple() == (20, 9, 42, 36)
    by_journal = split_by_journal(records)
    assert list(by_journal) == ["JT", "JX"]
    assert corpus_summary(by_journal["JT"]).as_tuple() == (15, 6, 34, 29)
    assert corpus_summary(by_journal["JX"]).as_tuple() == (5, 3, 7, 7)


def test_toy3_summary(data_dir):
    records, _ = parse_corpus(data_dir / "toy3.jsonl")
    assert corpus_summary(records).as_tuple() == (3, 3, 3, 5)


def test_empty_summary():
    assert corpus_summary([]).as_tuple() == (0, 0, 0, 0)


def test_drop_experimental(data_dir):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    kept, report = apply_filters(records, FilterConfig(drop_tags=frozenset({"experimental"})))
    assert {r.paper_id for r in records} - {r.paper_id for r in kept} == {"t04", "t13"}
    assert report.dropped_by_rule["drop_tags"] == 2
    assert report.kept_count == 18


def test_empty_filter_is_identity(data_dir):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    kept, report = apply_filters(records, FilterConfig())
    assert kept == records
    assert sum(report.dropped_by_rule.values()) == 0


def test_max_authors_boundary():
    big = BibRecord("big", date(2000, 1, 1), tuple(f"a{i}" for i in range(1001)))
    ok = BibRecord("ok", date(2000, 1, 1), tuple(f"a{i}" for i in range(1000)))
    kept, report = apply_filters([big, ok], FilterConfig(max_authors=1000))
    assert [r.paper_id for r in kept] == ["ok"]
    assert report.dropped_by_rule["max_authors"] == 1


def test_drop_is_charged_to_first_matching_rule():
    rec = BibRecord("x", date(2000, 1, 1), ("a", "b"), tags=("experimental",), journal="Z")
    config = FilterConfig(drop_tags=frozenset({"experimental"}), max_authors=1,
                          journal_allowlist=frozenset({"J"}))
    _, report = apply_filters([rec], config)
    assert report.dropped_by_rule == {"drop_tags": 1, "require_tags": 0, "max_authors": 0, "journal_allowlist": 0}


def test_require_tags_and_allowlist(data_dir):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    kept, _ = apply_filters(records, FilterConfig(require_tags=frozenset({"theory"})))
    assert sorted(r.paper_id for r in kept) == ["t03", "t09"]
    kept, _ = apply_filters(records, FilterConfig(journal_allowlist=frozenset({"JX"})))
    assert len(kept) == 5


def test_conflicting_filter_config_rejected():
    with pytest.raises(ValueError):
        FilterConfig(drop_tags=frozenset({"x"}), require_tags=frozenset({"x"}))


def test_filter_config_from_json(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"drop_tags": ["experimental"], "max_authors": 10}))
    config = FilterConfig.from_json(path)
    assert config.drop_tags == frozenset({"experimental"}) and config.max_authors == 10


ids = st.text("abcdefgh", min_size=1, max_size=4)


@st.composite
def records(draw):
    pid = draw(ids)
    return BibRecord(
        paper_id=pid,
        date=draw(st.dates(date(1900, 1, 1), date(2020, 12, 31))),
        author_ids=tuple(draw(st.lists(ids, min_size=1, max_size=4, unique=True))),
        ref_ids=tuple(draw(st.lists(ids.filter(lambda r: r != pid), max_size=4, unique=True))),
        tags=tuple(draw(st.lists(st.sampled_from(["experimental", "theory", "ü"]), max_size=2))),
        journal=draw(st.sampled_from(["", "J", "Phys. Rev. é"])),
    )


@settings(max_examples=200, deadline=None)
@given(st.lists(records(), max_size=8, unique_by=lambda r: r.paper_id))
def test_round_trip(tmp_path_factory, recs):
    path = tmp_path_factory.mktemp("rt") / "c.jsonl"
    write_corpus(recs, path)
    parsed, diags = parse_corpus(path)
    assert diags == [] and parsed == recs
