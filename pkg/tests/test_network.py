from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialcite.corpus import BibRecord, parse_corpus
from socialcite.network import TimeCursor, build_network

from conftest import random_corpus


@pytest.fixture
def toy3(data_dir):
    records, _ = parse_corpus(data_dir / "toy3.jsonl")
    return build_network(records)


def pairs(net):
    return {(net.author_ids[m], net.author_ids[n]) for m, n in net.coauthorships}


def test_toy3_layers(toy3):
    assert (toy3.n_papers, toy3.n_authors, toy3.n_citations, toy3.n_authorships) == (3, 3, 3, 5)
    assert pairs(toy3) == {("a", "b"), ("a", "c")}


def test_single_author_paper_has_no_coauthorships():
    net = build_network([BibRecord("x", date(2000, 1, 1), ("solo",))])
    assert net.coauthorships == {}


def test_anachronistic_citation_dropped():
    net = build_network([
        BibRecord("old", date(2000, 1, 1), ("a",), ref_ids=("new",)),
        BibRecord("new", date(2001, 1, 1), ("b",)),
    ])
    assert net.n_citations == 0
    assert net.report.anachronistic_citations == 1


def test_external_refs_counted(data_dir):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    net = build_network(records)
    # ext-9 and t30 are outside the corpus
    assert net.report.external_refs == 2
    assert net.n_citations == 42


def test_in_degree(toy3):
    assert toy3.in_degree_at("p1", TimeCursor.through(date(2001, 1, 1))) == 1
    assert toy3.in_degree_at("p1", TimeCursor.through(date(2001, 6, 1))) == 1
    assert toy3.in_degree_at("p1", TimeCursor.through(date(2002, 1, 1))) == 2
    for pid in toy3.paper_ids:
        assert toy3.in_degree_at(pid, TimeCursor.before(toy3.date_of(pid))) == 0


def test_author_degree(toy3):
    p3 = toy3.date_of("p3")
    assert toy3.author_degree_at("b", TimeCursor.before(p3)) == 1
    assert toy3.author_degree_at("a", TimeCursor.through(p3)) == 2
    for a in toy3.author_ids:
        assert toy3.author_degree_at(a, TimeCursor.before(toy3.first_date)) == 0


def test_interlayer_degree(toy3):
    p3 = toy3.date_of("p3")
    assert toy3.interlayer_degree_at("a", TimeCursor.before(p3)) == 1
    assert toy3.interlayer_degree_at("c", TimeCursor.before(p3)) == 0
    assert toy3.interlayer_degree_at("a", TimeCursor.through(p3)) == 2


def test_unknown_ids_raise(toy3):
    with pytest.raises(KeyError):
        toy3.in_degree_at("nope", TimeCursor.through(date(2002, 1, 1)))
    with pytest.raises(KeyError):
        toy3.author_degree_at("zed", TimeCursor.through(date(2002, 1, 1)))


def test_edge_and_node_dumps(toy3, tmp_path):
    toy3.write_edges_csv(tmp_path / "e.csv")
    toy3.write_nodes_csv(tmp_path / "n.csv")
    rows = (tmp_path / "e.csv").read_text().splitlines()
    assert rows[0] == "layer,source,target,date,weight"
    assert sum(r.startswith("citation,") for r in rows) == 3
    assert sum(r.startswith("authorship,") for r in rows) == 5
    assert "coauthorship,a,b,2000-01-01,1" in rows
    assert len((tmp_path / "n.csv").read_text().splitlines()) == 1 + 3 + 3


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 60))
def test_degree_monotone_and_bounded(seed, day):
    """k_n is non-decreasing in time and never exceeds the sum of (team size - 1)."""
    rng = np.random.default_rng(seed)
    recs = random_corpus(rng, 30, 10)
    net = build_network(recs)
    base = net.first_date.toordinal()
    early = TimeCursor.before(date.fromordinal(base + day))
    late = TimeCursor.through(date.fromordinal(base + day))
    for a in net.author_ids:
        k_early = net.author_degree_at(a, early)
        k_late = net.author_degree_at(a, late)
        bound = sum(len(r.author_ids) - 1 for r in recs
                    if a in r.author_ids and r.date.toordinal() <= base + day)
        assert k_early <= k_late <= bound
        assert net.interlayer_degree_at(a, early) <= net.interlayer_degree_at(a, late)
