from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

from socialcite.corpus import BibRecord

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list[str] = []


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)


def random_corpus(rng: np.random.Generator, max_papers: int = 50, max_authors: int = 20) -> list[BibRecord]:
    """Small corpus with plenty of same-day papers and repeated collaborations."""
    n_papers = int(rng.integers(1, max_papers + 1))
    n_authors = int(rng.integers(1, max_authors + 1))
    base = date(1990, 1, 1)
    offsets = np.sort(rng.integers(0, max(2, n_papers // 2), n_papers))
    records = []
    for i, off in enumerate(offsets):
        k = int(rng.integers(1, min(5, n_authors) + 1))
        team = rng.choice(n_authors, size=k, replace=False)
        earlier = [j for j in range(i) if offsets[j] < off]
        n_refs = int(rng.integers(0, min(4, len(earlier)) + 1)) if earlier else 0
        refs = rng.choice(earlier, size=n_refs, replace=False) if n_refs else []
        records.append(
            BibRecord(
                paper_id=f"r{i}",
                date=base + timedelta(days=int(off)),
                author_ids=tuple(f"u{a}" for a in team),
                ref_ids=tuple(f"r{j}" for j in refs),
                journal="R",
            )
        )
    order = rng.permutation(n_papers)
    return [records[i] for i in order]
