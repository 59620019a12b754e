"""Compare the compiled kernels with the numpy/pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 2e9] [--segments 5]

Times the sieve and the interval scan separately per backend, then the
whole verify_segment call.
"""

import argparse
import math
import time

import numpy as np

from oppermann import kernels, rtable, search, sieve


def bench_sieve(kern, plan, repeat):
    x = sieve.BitVector(plan.L)
    primes = sieve.sieve_primes(plan.B)
    t0 = time.perf_counter()
    for _ in range(repeat):
        x.clear()
        sieve.sieve_segment(x, plan, primes, backend=kern)
    return (time.perf_counter() - t0) / repeat, x


def bench_scan(kern, plan, x, repeat):
    intervals = list(search.segment_intervals(plan))
    t0 = time.perf_counter()
    for _ in range(repeat):
        for iv in intervals:
            stop = min(-(-(iv.hi - 1) // plan.M) - plan.q, plan.nbits)
            j = kern.next_zero(x.words, iv.q_i, stop)
            while j >= 0:
                ell = plan.candidate(j)
                a, f = kern.bls_powers(ell, plan.R)
                if f == 1 and math.gcd(a - 1, ell) == 1:
                    break
                j = kern.next_zero(x.words, j + 1, stop)
    return (time.perf_counter() - t0) / repeat


def bench_segment(name, plan, table, repeat):
    # swap the module-level backend used by sieve/search/prover
    saved = {k: getattr(kernels, k) for k in ("sieve_words", "next_zero", "popcount", "bls_powers")}
    kern = kernels.load(name)
    for k in saved:
        setattr(kernels, k, getattr(kern, k))
    try:
        t0 = time.perf_counter()
        for _ in range(repeat):
            search.verify_segment(plan, table=table)
        return (time.perf_counter() - t0) / repeat
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=float, default=2e9)
    ap.add_argument("--segments", type=int, default=5)
    args = ap.parse_args()

    table = rtable.default_table()
    plan = sieve.plan_segment(int(args.n), table)
    print(f"n={plan.n} t={plan.t} R={plan.R} m={plan.m} bits={plan.nbits} backends={kernels.available()}")
    rows = []
    for name in kernels.available():
        kern = kernels.load(name)
        t_sieve, x = bench_sieve(kern, plan, args.segments)
        t_scan = bench_scan(kern, plan, x, args.segments)
        t_seg = bench_segment(name, plan, table, args.segments)
        rows.append((name, t_sieve, t_scan, t_seg))
    print(f"{'backend':<10}{'sieve ms':>12}{'scan ms':>12}{'segment ms':>14}{'intervals/s':>14}")
    for name, a, b, c in rows:
        print(f"{name:<10}{a * 1e3:>12.2f}{b * 1e3:>12.2f}{c * 1e3:>14.2f}{2 * plan.t / c:>14.0f}")
    if len(rows) == 2:
        print(f"speedup (segment): {rows[1][3] / rows[0][3]:.1f}x")
    # sanity: both backends give identical vectors
    if len(rows) == 2:
        a = sieve.sieve_segment(sieve.BitVector(plan.L), plan, backend=kernels.load("compiled"))
        b = sieve.sieve_segment(sieve.BitVector(plan.L), plan, backend=kernels.load("python"))
        assert np.array_equal(a.words, b.words)


if __name__ == "__main__":
    main()
