"""Time the numba kernels against the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Point counting uses the same scalar routine in both flavours (compiled vs
vectorised over equations).  The density histogram differs in algorithm as
well: the compiled kernel walks the Hensel tree, the fallback enumerates all
residues mod ell^n.
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from isoclass import kernels

census_mod = importlib.import_module("isoclass.census")


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def point_count_cases():
    for q, family, nblocks in [(16, "full", 2), (27, "cubic", 4), (49, "short", 49)]:
        blocks, _ = census_mod._family_blocks(q, family)
        eqs = np.concatenate(blocks[:nblocks])
        F, add, mul, neg, nsol = census_mod._field_tables(q)
        args = (eqs, F.p, add, mul, neg, nsol)
        yield f"point_counts q={q} {family} ({len(eqs)} eqs)", args


def histogram_cases():
    for ell, n, a, d in [(2, 20, 1, 2), (3, 12, 1, 3), (7, 7, 3, 7), (97, 3, 1, 2)]:
        yield f"valuation_histogram {ell}^{n}", (ell, n, a, d)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        parser.exit(1, "numba is not installed; nothing to compare\n")

    rows = []
    for label, a in point_count_cases():
        assert np.array_equal(kernels.point_counts_numba(*a), kernels.point_counts_numpy(*a))
        rows.append((label, best_of(lambda: kernels.point_counts_numba(*a), args.repeat),
                     best_of(lambda: kernels.point_counts_numpy(*a), args.repeat)))
    for label, a in histogram_cases():
        assert np.array_equal(kernels.valuation_histogram_numba(*a), kernels.valuation_histogram_numpy(*a))
        rows.append((label, best_of(lambda: kernels.valuation_histogram_numba(*a), args.repeat),
                     best_of(lambda: kernels.valuation_histogram_numpy(*a), args.repeat)))

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'numba [s]':>10}  {'numpy [s]':>10}  {'speed-up':>8}")
    for label, tn, tp in rows:
        print(f"{label:<{width}}  {tn:10.4f}  {tp:10.4f}  {tp / tn:8.1f}")


if __name__ == "__main__":
    main()
