from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialcite import kernels
from socialcite.corpus import BibRecord, parse_corpus, split_by_journal
from socialcite.network import build_network
from socialcite.social import (
    oracle_social_nc,
    oracle_social_np,
    read_metrics_csv,
    social_nc,
    social_np,
    social_profiles,
    write_metrics_csv,
)

from conftest import random_corpus


def rec(pid, y, authors, refs=()):
    return BibRecord(pid, date(y, 1, 1), tuple(authors), tuple(refs), (), "J")


def test_debutant_single_author():
    net = build_network([rec("x", 2000, ["solo"])])
    assert social_nc(net, "x") == (0, 0)
    assert social_np(net, "x") == (0, 0)


def test_toy3_p3(data_dir):
    records, _ = parse_corpus(data_dir / "toy3.jsonl")
    net = build_network(records)
    assert social_nc(net, "p3") == (1, 0)
    assert social_np(net, "p3") == (1, 0)
    assert oracle_social_nc(records, "p3") == 1
    assert oracle_social_np(records, "p3") == 1


def test_prior_coauthors_count_each_other():
    recs = [rec("old", 2000, ["a", "b"]), rec("new", 2001, ["a", "b"])]
    net = build_network(recs)
    # each of a, b has degree 1 (the other); the union is {a, b}
    assert social_nc(net, "new") == (2, 0)
    # the shared earlier paper is counted once
    assert social_np(net, "new") == (1, 1)


def test_same_day_papers_do_not_count():
    recs = [rec("x", 2000, ["a", "b"]), rec("y", 2000, ["a", "c"])]
    net = build_network(recs)
    assert social_nc(net, "y") == (0, 0)
    assert social_np(net, "y") == (0, 0)


def test_toy20_t20(data_dir):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    net = build_network(split_by_journal(records)["JT"])
    # ada {bo,cy,dee,fin} + bo {ada,fin,cy,dee,eve} + cy {ada,dee,eve,fin,bo}
    assert social_nc(net, "t20") == (6, 14 - 6)
    # 5 + 4 + 5 earlier papers, 10 distinct
    assert social_np(net, "t20") == (10, 14 - 10)


def test_profiles_default_to_network_order(data_dir):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    net = build_network(records)
    profiles = social_profiles(net)
    assert [p.paper_id for p in profiles] == list(net.paper_ids)
    t03 = profiles[net.paper("t03")]
    assert (t03.s_nc, t03.correction_nc, t03.n_authors) == (1, 0, 3)
    assert t03.degree_sum_nc == 1


def test_metrics_csv_round_trip(data_dir, tmp_path):
    records, _ = parse_corpus(data_dir / "toy20.jsonl")
    profiles = social_profiles(build_network(records))
    write_metrics_csv(profiles, tmp_path / "m.csv")
    assert read_metrics_csv(tmp_path / "m.csv") == {p.paper_id: p for p in profiles}


def test_unknown_paper():
    net = build_network([rec("x", 2000, ["a"])])
    with pytest.raises(KeyError):
        social_nc(net, "y")


def _kernel_args(net):
    return (np.arange(net.n_papers, dtype=np.int64), net.paper_date, net.paper_auth_ptr, net.paper_auth_idx,
            net.author_paper_ptr, net.author_paper_idx, net.author_paper_date, net.n_authors)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree(seed):
    net = build_network(random_corpus(np.random.default_rng(seed)))
    args = _kernel_args(net)
    for a, b in zip(kernels._social_counts_numpy(*args), kernels._social_counts_numba(*args)):
        np.testing.assert_array_equal(a, b)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_corrections_non_negative_and_bounded(seed):
    recs = random_corpus(np.random.default_rng(seed))
    for p in social_profiles(build_network(recs)):
        assert p.correction_nc >= 0 and p.correction_np >= 0
        # nobody outside the union of prior papers' authors can be a prior coauthor
        assert p.s_np <= p.degree_sum_np
        if p.s_np == 0:
            assert p.s_nc == 0
