"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py --papers 20000 --perms 2000

Both backends are called directly, so SOCIALCITE_NUMBA does not matter here.
Results are checked for agreement before timing.
"""

import argparse
import time

import numpy as np

from socialcite import kernels
from socialcite.network import build_network
from socialcite.synth import PlantedParams, generate_corpus


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--papers", type=int, default=20000)
    ap.add_argument("--authors", type=int, default=8000)
    ap.add_argument("--perms", type=int, default=2000)
    ap.add_argument("--n", type=int, default=5000, help="observations for the permutation kernel")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    params = PlantedParams(n_papers=args.papers, n_authors=args.authors, citations_per_paper_mean=5)
    records, _, _ = generate_corpus(params)
    net = build_network(records)
    social_args = (np.arange(net.n_papers, dtype=np.int64), net.paper_date, net.paper_auth_ptr,
                   net.paper_auth_idx, net.author_paper_ptr, net.author_paper_idx,
                   net.author_paper_date, net.n_authors)

    rng = np.random.default_rng(0)
    xc = rng.normal(size=args.n)
    xc -= xc.mean()
    yc = rng.normal(size=args.n)
    perms = np.stack([rng.permutation(args.n) for _ in range(args.perms)])
    sxx = float(xc @ xc)
    perm_args = (xc, yc, perms, sxx)

    cases = [
        (f"social_counts ({net.n_papers} papers)", kernels._social_counts_numba,
         kernels._social_counts_numpy, social_args),
        (f"permuted_slopes ({args.perms} x {args.n})", kernels._permuted_slopes_numba,
         kernels._permuted_slopes_numpy, perm_args),
    ]
    print(f"{'kernel':40s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, fast, slow, call_args in cases:
        t0 = time.perf_counter()
        a = fast(*call_args)
        compile_s = time.perf_counter() - t0
        b = slow(*call_args)
        for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            np.testing.assert_allclose(x, y, rtol=1e-10)
        t_fast = best_of(lambda: fast(*call_args), args.repeat)
        t_slow = best_of(lambda: slow(*call_args), args.repeat)
        print(f"{name:40s} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:7.1f}x  (first call {compile_s:.2f} s)")


if __name__ == "__main__":
    main()
