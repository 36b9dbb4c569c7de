"""Hot inner loops, each with a numba kernel and a pure-numpy twin.

The public functions dispatch on :data:`socialcite._accel.USE_NUMBA`. Both twins
are importable directly so tests can check they agree exactly.
"""

import numpy as np

from ._accel import USE_NUMBA, njit


# ---------------------------------------------------------------------------
# Pre-publication social counts
# ---------------------------------------------------------------------------


@njit(cache=True)
def _social_counts_numba(
    targets,
    paper_date,
    paper_auth_ptr,
    paper_auth_idx,
    author_paper_ptr,
    author_paper_idx,
    author_paper_date,
    n_authors,
):
    n_papers = paper_date.shape[0]
    m = targets.shape[0]
    s_nc = np.zeros(m, dtype=np.int64)
    sum_k = np.zeros(m, dtype=np.int64)
    s_np = np.zeros(m, dtype=np.int64)
    sum_kt = np.zeros(m, dtype=np.int64)

    in_union = np.full(n_authors, -1, dtype=np.int64)
    in_degree = np.full(n_authors, -1, dtype=np.int64)
    in_papers = np.full(n_papers, -1, dtype=np.int64)
    token = 0
    for t in range(m):
        i = targets[t]
        d = paper_date[i]
        for ai in range(paper_auth_ptr[i], paper_auth_ptr[i + 1]):
            a = paper_auth_idx[ai]
            lo = author_paper_ptr[a]
            hi = author_paper_ptr[a + 1]
            end = lo + np.searchsorted(author_paper_date[lo:hi], d)
            sum_kt[t] += end - lo
            token += 1
            for q in range(lo, end):
                p = author_paper_idx[q]
                if in_papers[p] != t:
                    in_papers[p] = t
                    s_np[t] += 1
                for bi in range(paper_auth_ptr[p], paper_auth_ptr[p + 1]):
                    b = paper_auth_idx[bi]
                    if b == a:
                        continue
                    if in_degree[b] != token:
                        in_degree[b] = token
                        sum_k[t] += 1
                    if in_union[b] != t:
                        in_union[b] = t
                        s_nc[t] += 1
    return s_nc, sum_k, s_np, sum_kt


def _gather(ptr, idx, rows):
    """Concatenate CSR rows ``rows`` into one flat array."""
    if rows.size == 0:
        return idx[:0]
    starts = ptr[rows]
    lengths = ptr[rows + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        return idx[:0]
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    return idx[offsets + np.arange(total)]


def _social_counts_numpy(
    targets,
    paper_date,
    paper_auth_ptr,
    paper_auth_idx,
    author_paper_ptr,
    author_paper_idx,
    author_paper_date,
    n_authors,
):
    m = targets.shape[0]
    s_nc = np.zeros(m, dtype=np.int64)
    sum_k = np.zeros(m, dtype=np.int64)
    s_np = np.zeros(m, dtype=np.int64)
    sum_kt = np.zeros(m, dtype=np.int64)
    for t, i in enumerate(targets):
        d = paper_date[i]
        coauthor_sets = []
        paper_sets = []
        for a in paper_auth_idx[paper_auth_ptr[i] : paper_auth_ptr[i + 1]]:
            lo, hi = author_paper_ptr[a], author_paper_ptr[a + 1]
            end = lo + np.searchsorted(author_paper_date[lo:hi], d)
            prior = author_paper_idx[lo:end]
            sum_kt[t] += prior.size
            co = np.unique(_gather(paper_auth_ptr, paper_auth_idx, prior))
            co = co[co != a]
            sum_k[t] += co.size
            coauthor_sets.append(co)
            paper_sets.append(prior)
        if coauthor_sets:
            s_nc[t] = np.unique(np.concatenate(coauthor_sets)).size
            s_np[t] = np.unique(np.concatenate(paper_sets)).size
    return s_nc, sum_k, s_np, sum_kt


def social_counts(targets, paper_date, paper_auth_ptr, paper_auth_idx,
                  author_paper_ptr, author_paper_idx, author_paper_date, n_authors):
    """Per target paper: (union coauthor count, summed author degrees,
    union prior-paper count, summed interlayer degrees), all strictly before
    the target's date.

    ``author_paper_idx`` rows must be sorted by date, with ``author_paper_date``
    holding the matching dates.
    """
    fn = _social_counts_numba if USE_NUMBA else _social_counts_numpy
    return fn(
        np.ascontiguousarray(targets, dtype=np.int64),
        paper_date,
        paper_auth_ptr,
        paper_auth_idx,
        author_paper_ptr,
        author_paper_idx,
        author_paper_date,
        int(n_authors),
    )


# ---------------------------------------------------------------------------
# Permutation null slopes
# ---------------------------------------------------------------------------


@njit(cache=True)
def _permuted_slopes_numba(xc, yc, perms, sxx):
    k, n = perms.shape
    out = np.empty(k, dtype=np.float64)
    for j in range(k):
        acc = 0.0
        for q in range(n):
            acc += xc[perms[j, q]] * yc[q]
        out[j] = acc / sxx
    return out


def _permuted_slopes_numpy(xc, yc, perms, sxx):
    return (xc[perms] @ yc) / sxx


def permuted_slopes(xc, yc, perms, sxx):
    """OLS slopes of ``yc`` on ``xc[perm]`` for each row of ``perms``.

    ``xc`` and ``yc`` must be centered; permuting x leaves its mean and sum of
    squares ``sxx`` unchanged, so each slope is a single dot product.
    """
    fn = _permuted_slopes_numba if USE_NUMBA else _permuted_slopes_numpy
    return fn(
        np.ascontiguousarray(xc, dtype=np.float64),
        np.ascontiguousarray(yc, dtype=np.float64),
        np.ascontiguousarray(perms, dtype=np.int64),
        float(sxx),
    )
