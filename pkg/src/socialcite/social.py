"""Pre-publication social metrics of a paper's authors.

``s_nc`` counts the distinct people who coauthored anything with at least one
author of the paper, strictly before its publication date. ``s_np`` counts the
distinct earlier papers written by at least one of its authors. The correction
terms are what must be subtracted from the summed per-author degrees to
remove double counting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .corpus import BibRecord
from .network import TwoLayerNetwork


@dataclass(frozen=True)
class PaperSocialProfile:
    paper_id: str
    delta_i: date
    s_nc: int
    s_np: int
    correction_nc: int
    correction_np: int
    n_authors: int

    @property
    def degree_sum_nc(self) -> int:
        return self.s_nc + self.correction_nc

    @property
    def degree_sum_np(self) -> int:
        return self.s_np + self.correction_np


def _counts(network: TwoLayerNetwork, targets: np.ndarray):
    return kernels.social_counts(
        targets,
        network.paper_date,
        network.paper_auth_ptr,
        network.paper_auth_idx,
        network.author_paper_ptr,
        network.author_paper_idx,
        network.author_paper_date,
        network.n_authors,
    )


def social_nc(network: TwoLayerNetwork, paper_id: str) -> tuple[int, int]:
    """(s_nc, correction_nc) for one paper."""
    s_nc, sum_k, _, _ = _counts(network, np.array([network.paper(paper_id)]))
    return int(s_nc[0]), int(sum_k[0] - s_nc[0])


def social_np(network: TwoLayerNetwork, paper_id: str) -> tuple[int, int]:
    """(s_np, correction_np) for one paper."""
    _, _, s_np, sum_kt = _counts(network, np.array([network.paper(paper_id)]))
    return int(s_np[0]), int(sum_kt[0] - s_np[0])


def social_profiles(
    network: TwoLayerNetwork, paper_ids: Optional[Iterable[str]] = None
) -> list[PaperSocialProfile]:
    """Profiles for the given papers (all papers, in network order, by default)."""
    if paper_ids is None:
        targets = np.arange(network.n_papers, dtype=np.int64)
    else:
        targets = np.array([network.paper(p) for p in paper_ids], dtype=np.int64)
    s_nc, sum_k, s_np, sum_kt = _counts(network, targets)
    out = []
    for t, i in enumerate(targets):
        out.append(
            PaperSocialProfile(
                paper_id=network.paper_ids[i],
                delta_i=date.fromordinal(int(network.paper_date[i])),
                s_nc=int(s_nc[t]),
                s_np=int(s_np[t]),
                correction_nc=int(sum_k[t] - s_nc[t]),
                correction_np=int(sum_kt[t] - s_np[t]),
                n_authors=int(network.paper_auth_ptr[i + 1] - network.paper_auth_ptr[i]),
            )
        )
    return out


# -- brute-force oracles ----------------------------------------------------


def _find(records: Sequence[BibRecord], paper_id: str) -> BibRecord:
    for rec in records:
        if rec.paper_id == paper_id:
            return rec
    raise KeyError(f"unknown paper {paper_id!r}")


def oracle_social_nc(records: Sequence[BibRecord], paper_id: str) -> int:
    """Scan every record: people who shared an earlier paper with any author of ``paper_id``."""
    target = _find(records, paper_id)
    people = set()
    for rec in records:
        if rec.date < target.date:
            for r in target.author_ids:
                if r in rec.author_ids:
                    people.update(a for a in rec.author_ids if a != r)
    return len(people)


def oracle_social_np(records: Sequence[BibRecord], paper_id: str) -> int:
    """Scan every record: earlier papers with at least one author of ``paper_id``."""
    target = _find(records, paper_id)
    authors = set(target.author_ids)
    return sum(1 for rec in records if rec.date < target.date and authors.intersection(rec.author_ids))


# -- output -----------------------------------------------------------------

METRICS_COLUMNS = ["paper_id", "date", "n_authors", "s_nc", "correction_nc", "s_np", "correction_np"]


def write_metrics_csv(profiles: Iterable[PaperSocialProfile], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_COLUMNS)
        for p in profiles:
            w.writerow([p.paper_id, p.delta_i.isoformat(), p.n_authors,
                        p.s_nc, p.correction_nc, p.s_np, p.correction_np])


def read_metrics_csv(path) -> dict[str, PaperSocialProfile]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["paper_id"]] = PaperSocialProfile(
                paper_id=row["paper_id"],
                delta_i=date.fromisoformat(row["date"]),
                s_nc=int(row["s_nc"]),
                s_np=int(row["s_np"]),
                correction_nc=int(row["correction_nc"]),
                correction_np=int(row["correction_np"]),
                n_authors=int(row["n_authors"]),
            )
    return out
