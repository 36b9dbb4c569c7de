import csv
from datetime import date

import numpy as np
import pytest

from socialcite.corpus import parse_corpus
from socialcite.histories import TimeScale, compute_history, exclusion_reason, parametrize
from socialcite.network import build_network
from socialcite.social import social_profiles
from socialcite.synth import PlantedParams, generate_corpus, intensity_shape, write_synthetic

SMALL = PlantedParams(n_papers=800, n_authors=300, span_years=20, citations_per_paper_mean=15, seed=4)


@pytest.fixture(scope="module")
def small():
    return generate_corpus(SMALL)


def test_ground_truth_matches_metrics(small):
    records, truth, _ = small
    profiles = {p.paper_id: p for p in social_profiles(build_network(records))}
    for g in truth:
        assert (profiles[g.paper_id].s_nc, profiles[g.paper_id].s_np) == (g.s_nc_true, g.s_np_true)


def test_no_anachronisms_and_valid_records(small):
    records, _, report = small
    net = build_network(records)
    assert net.report.anachronistic_citations == 0
    assert net.report.external_refs == 0
    assert net.n_citations == report.placed
    assert report.placed + report.unplaceable + report.beyond_horizon == report.scheduled


def test_byte_identical_output(tmp_path):
    for name in ("a", "b"):
        write_synthetic(SMALL, tmp_path / f"{name}.jsonl", tmp_path / f"{name}.csv")
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    records, diags = parse_corpus(tmp_path / "a.jsonl")
    assert diags == [] and len(records) == SMALL.n_papers
    with open(tmp_path / "a.csv", newline="") as fh:
        assert next(csv.reader(fh)) == ["paper_id", "s_nc_true", "s_np_true", "t_peak_true", "tau_true"]


def test_different_seeds_differ():
    a, _, _ = generate_corpus(SMALL)
    b, _, _ = generate_corpus(PlantedParams(**{**SMALL.__dict__, "seed": 5}))
    assert a != b


def test_fixed_team_size():
    records, _, _ = generate_corpus(PlantedParams(n_papers=50, n_authors=10, team_size_law="fixed",
                                                  team_size=3, citations_per_paper_mean=2))
    assert {len(r.author_ids) for r in records} == {3}


@pytest.mark.parametrize("kw", [
    {"n_papers": 1},
    {"theta": 0.0},
    {"team_size_law": "poisson"},
    {"team_size_law": "fixed", "team_size": 50, "n_authors": 10},
    {"n_papers": 10, "citations_per_paper_mean": 10},
    {"start": date(2020, 1, 1)},
    {"tail_years": 0.5},
])
def test_infeasible_params(kw):
    with pytest.raises(ValueError):
        generate_corpus(PlantedParams(**kw))


def test_intensity_shape():
    shape = intensity_shape(2, 5.0, 6)
    np.testing.assert_allclose(shape[:3], [1 / 3, 2 / 3, 1])
    np.testing.assert_allclose(shape[3:], np.exp(-np.arange(1, 4) / 5.0))


def test_empirical_peak_tracks_planted_mean():
    """Measured yearly peak delays of kept papers average within 5% of the drawn ones."""
    measured, planted = [], []
    for seed in range(4):
        records, truth, _ = generate_corpus(PlantedParams(seed=seed))
        net = build_network(records)
        end = max(r.date for r in records)
        drawn = {g.paper_id: g.t_peak_true for g in truth}
        for pid in net.paper_ids:
            h = compute_history(net, pid, TimeScale(), end)
            if exclusion_reason(h, end):
                continue
            p = parametrize(h)
            if p.t_peak is not None:
                measured.append(p.t_peak)
                planted.append(drawn[pid])
    assert abs(np.mean(measured) / np.mean(planted) - 1) < 0.05
