"""Immutable two-layer temporal network: papers citing papers, authors coauthoring.

Paper nodes are indexed in (date, paper_id) order. All adjacency is stored as
CSR arrays whose rows are date-sorted, so every "degree at time" query is a
binary search.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from datetime import date
from functools import cached_property
from typing import Sequence

import numpy as np

from .corpus import BibRecord, CorpusError


class Strictness(enum.Enum):
    BEFORE = "strictly-before"
    THROUGH = "up-to-and-including"


@dataclass(frozen=True)
class TimeCursor:
    instant: date
    strictness: Strictness = Strictness.BEFORE

    @classmethod
    def before(cls, instant: date) -> "TimeCursor":
        return cls(instant, Strictness.BEFORE)

    @classmethod
    def through(cls, instant: date) -> "TimeCursor":
        return cls(instant, Strictness.THROUGH)

    @property
    def side(self) -> str:
        # searchsorted side that counts dates < instant (left) or <= instant (right)
        return "left" if self.strictness is Strictness.BEFORE else "right"


@dataclass(frozen=True)
class BuildReport:
    anachronistic_citations: int = 0
    external_refs: int = 0


def _csr(n_rows: int, rows: np.ndarray, cols: np.ndarray, keys: np.ndarray):
    """CSR arrays (ptr, cols) with each row sorted by ``keys`` then ``cols``."""
    order = np.lexsort((cols, keys, rows))
    ptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=ptr[1:])
    return ptr, cols[order], keys[order]


class TwoLayerNetwork:
    """Paper layer, author layer and the authorship links between them.

    Build with :func:`build_network`; instances are never mutated afterwards.
    """

    def __init__(self, records: Sequence[BibRecord]):
        ordered = sorted(records, key=lambda r: (r.date, r.paper_id))
        self.paper_ids: tuple[str, ...] = tuple(r.paper_id for r in ordered)
        self.paper_index = {pid: i for i, pid in enumerate(self.paper_ids)}
        if len(self.paper_index) != len(self.paper_ids):
            raise CorpusError("duplicate paper IDs in corpus")
        self.paper_date = np.array([r.date.toordinal() for r in ordered], dtype=np.int64)
        self.journals: tuple[str, ...] = tuple(r.journal for r in ordered)

        author_ids = sorted({a for r in ordered for a in r.author_ids})
        self.author_ids: tuple[str, ...] = tuple(author_ids)
        self.author_index = {a: n for n, a in enumerate(author_ids)}

        auth_rows, auth_cols = [], []
        for i, rec in enumerate(ordered):
            for a in rec.author_ids:
                auth_rows.append(i)
                auth_cols.append(self.author_index[a])
        auth_rows = np.asarray(auth_rows, dtype=np.int64)
        auth_cols = np.asarray(auth_cols, dtype=np.int64)
        # paper -> authors, in record order
        self.paper_auth_ptr = np.zeros(self.n_papers + 1, dtype=np.int64)
        np.cumsum(np.bincount(auth_rows, minlength=self.n_papers), out=self.paper_auth_ptr[1:])
        self.paper_auth_idx = auth_cols
        # author -> papers, date-sorted
        self.author_paper_ptr, self.author_paper_idx, self.author_paper_date = _csr(
            self.n_authors, auth_cols, auth_rows, self.paper_date[auth_rows]
        )

        src, dst = [], []
        anachronistic = external = 0
        for i, rec in enumerate(ordered):
            for ref in rec.ref_ids:
                j = self.paper_index.get(ref)
                if j is None:
                    external += 1
                elif self.paper_date[j] > self.paper_date[i]:
                    anachronistic += 1
                else:
                    src.append(i)
                    dst.append(j)
        self.citation_src = np.asarray(src, dtype=np.int64)
        self.citation_dst = np.asarray(dst, dtype=np.int64)
        # cited paper -> citing papers, date-sorted
        self.cited_ptr, self.citing_idx, self.citing_date = _csr(
            self.n_papers, self.citation_dst, self.citation_src, self.paper_date[self.citation_src]
        )
        self.report = BuildReport(anachronistic, external)

    # -- sizes -------------------------------------------------------------

    @property
    def n_papers(self) -> int:
        return len(self.paper_ids)

    @property
    def n_authors(self) -> int:
        return len(self.author_ids)

    @property
    def n_citations(self) -> int:
        return int(self.citation_src.size)

    @property
    def n_authorships(self) -> int:
        return int(self.paper_auth_idx.size)

    @property
    def first_date(self) -> date:
        return date.fromordinal(int(self.paper_date[0]))

    @property
    def last_date(self) -> date:
        return date.fromordinal(int(self.paper_date[-1]))

    # -- lookups -----------------------------------------------------------

    def paper(self, paper_id: str) -> int:
        try:
            return self.paper_index[paper_id]
        except KeyError:
            raise KeyError(f"unknown paper {paper_id!r}") from None

    def author(self, author_id: str) -> int:
        try:
            return self.author_index[author_id]
        except KeyError:
            raise KeyError(f"unknown author {author_id!r}") from None

    def date_of(self, paper_id: str) -> date:
        return date.fromordinal(int(self.paper_date[self.paper(paper_id)]))

    def authors_of(self, i: int) -> np.ndarray:
        return self.paper_auth_idx[self.paper_auth_ptr[i] : self.paper_auth_ptr[i + 1]]

    def citing_dates(self, i: int) -> np.ndarray:
        """Date ordinals of all papers citing paper index ``i``, ascending."""
        return self.citing_date[self.cited_ptr[i] : self.cited_ptr[i + 1]]

    @cached_property
    def coauthorships(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Undirected author pairs (m < n) mapped to the ascending dates of their joint papers."""
        edges: dict[tuple[int, int], list[int]] = {}
        for i in range(self.n_papers):
            team = np.sort(self.authors_of(i))
            d = int(self.paper_date[i])
            for x in range(team.size):
                for y in range(x + 1, team.size):
                    edges.setdefault((int(team[x]), int(team[y])), []).append(d)
        # papers are visited in date order, so each list is already sorted
        return {k: tuple(v) for k, v in sorted(edges.items())}

    @cached_property
    def _first_coauthor_dates(self) -> list[np.ndarray]:
        firsts: list[list[int]] = [[] for _ in range(self.n_authors)]
        for (m, n), dates in self.coauthorships.items():
            firsts[m].append(dates[0])
            firsts[n].append(dates[0])
        return [np.sort(np.asarray(f, dtype=np.int64)) for f in firsts]

    # -- degree queries ----------------------------------------------------

    def in_degree_at(self, paper_id: str, cursor: TimeCursor) -> int:
        """Number of papers citing ``paper_id`` up to the cursor."""
        dates = self.citing_dates(self.paper(paper_id))
        return int(np.searchsorted(dates, cursor.instant.toordinal(), side=cursor.side))

    def author_degree_at(self, author_id: str, cursor: TimeCursor) -> int:
        """Distinct coauthors of ``author_id`` over papers up to the cursor."""
        firsts = self._first_coauthor_dates[self.author(author_id)]
        return int(np.searchsorted(firsts, cursor.instant.toordinal(), side=cursor.side))

    def interlayer_degree_at(self, author_id: str, cursor: TimeCursor) -> int:
        """Distinct papers written by ``author_id`` up to the cursor."""
        n = self.author(author_id)
        dates = self.author_paper_date[self.author_paper_ptr[n] : self.author_paper_ptr[n + 1]]
        return int(np.searchsorted(dates, cursor.instant.toordinal(), side=cursor.side))

    # -- export ------------------------------------------------------------

    def write_edges_csv(self, path) -> None:
        """One row per edge: layer, source, target, date, weight."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["layer", "source", "target", "date", "weight"])
            for s, t in zip(self.citation_src, self.citation_dst):
                w.writerow(["citation", self.paper_ids[s], self.paper_ids[t],
                            date.fromordinal(int(self.paper_date[s])).isoformat(), 1])
            for i in range(self.n_papers):
                d = date.fromordinal(int(self.paper_date[i])).isoformat()
                for a in self.authors_of(i):
                    w.writerow(["authorship", self.author_ids[a], self.paper_ids[i], d, 1])
            for (m, n), dates in self.coauthorships.items():
                w.writerow(["coauthorship", self.author_ids[m], self.author_ids[n],
                            date.fromordinal(dates[0]).isoformat(), len(dates)])

    def write_nodes_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["layer", "node_id", "date"])
            for i, pid in enumerate(self.paper_ids):
                w.writerow(["paper", pid, date.fromordinal(int(self.paper_date[i])).isoformat()])
            for a in self.author_ids:
                w.writerow(["author", a, ""])


def build_network(records: Sequence[BibRecord]) -> TwoLayerNetwork:
    """Build the network; anachronistic and out-of-corpus citations are dropped and counted."""
    return TwoLayerNetwork(records)
