import random

import numpy as np
import pytest

from oppermann import kernels
from oppermann.arith import InvalidArgument, small_primes
from oppermann.sieve import (
    BitVector,
    SegmentPlan,
    SieveConfig,
    candidate_count,
    clear,
    first_hit,
    fit_t,
    make_plan,
    plan_segment,
    sieve_segment,
)


def toy_plan(M=30, q=1, nbits=16, B=13):
    # n=5 gives q = ceil(25/30) = 1; t=17 gives ceil((22**2 - 31)/30) = 16 bits
    plan = SegmentPlan(n=5, t=17, s=1, R=M // 2, m=2, M=M, q=q, B=B, L=nbits)
    assert plan.nbits == nbits
    return plan


def test_plan_example_n_1e9():
    plan = make_plan(10**9, fit_t(10**9, 6000018, 131072), 1000003, 6, 131072)
    assert plan.M == 6000018
    assert plan.t == 393 == (131072 * 6000018) // (2 * 10**9 + 384)
    assert plan.q == -(-(10**18) // 6000018)
    assert 256 <= plan.t <= 512
    assert round(10**9 / plan.M) == 167
    assert plan.nbits <= 131072


def test_plan_toy_q():
    assert -(-10000 // 210) == 48
    plan = make_plan(100, 1, 7, 30, 1024)
    assert plan.q == 48 and plan.candidate(0) == 10081 > 10000


@pytest.mark.parametrize("n", [2, 100, 10**4, 10**6, 10**8, 10**9, 2 * 10**9, 10**12, 33 * 10**12])
def test_plan_segment_invariants(table, n):
    cfg = SieveConfig()
    plan = plan_segment(n, table, cfg)
    assert plan.R**3 > (n + cfg.t_max) ** 2
    assert plan.m % 2 == 0 and np.gcd(plan.m, plan.R) == 1
    assert plan.M == plan.R * plan.m
    assert plan.nbits <= plan.L == plan.B == 131072
    assert plan.mq1 > n * n and plan.mq1 - plan.M <= n * n
    assert plan.t <= cfg.t_max
    if n >= 10**8:
        assert cfg.t_min <= plan.t
    # deterministic
    assert plan_segment(n, table, cfg) == plan


def test_plan_segment_t_cap(table):
    assert plan_segment(10**6, table, t_cap=7).t == 7


def test_plan_segment_regime_at_2e9(table):
    # at the start of the new range, ~170 candidates per interval (>= s=128)
    plan = plan_segment(2 * 10**9, table)
    assert plan.n / plan.M >= 128


def test_plan_segment_rejects_small_n(table):
    with pytest.raises(InvalidArgument):
        plan_segment(1, table)


def test_segment_tiling(table):
    n, end = 2, 200_000
    covered = []
    while n <= end:
        plan = plan_segment(n, table, t_cap=end - n + 1)
        covered.extend(range(plan.n, plan.n + plan.t))
        n += plan.t
    assert covered == list(range(2, end + 1))


def test_candidate_count_bound():
    assert candidate_count(5, 17, 30, 1) == 16


def test_clear():
    x = BitVector(256)
    x.words[:] = np.uint64(12345)
    clear(x)
    assert x.popcount() == 0
    clear(x)
    assert not x.to_bools().any()


def test_first_hit_examples():
    plan = toy_plan()
    assert first_hit(7, plan) == 2 and plan.candidate(2) == 91
    assert first_hit(11, plan) == 3 and plan.candidate(3) == 121 == 11**2
    assert first_hit(13, plan) == 2
    assert first_hit(31, plan) == 0  # 31 divides M*q+1 itself
    with pytest.raises(InvalidArgument):
        first_hit(5, plan)


def test_sieve_toy_example(backend):
    plan = toy_plan()
    x = sieve_segment(BitVector(16), plan, np.array([2, 3, 5, 7, 11, 13]), backend=backend)
    expected = {2, 9} | {3, 14} | {2, 15}
    assert set(np.flatnonzero(x.to_bools()).tolist()) == expected
    for j in expected:
        v = plan.candidate(j)
        assert any(v % p == 0 for p in (7, 11, 13))


def random_toy_plan(rng, max_M=10**4, max_L=10**4):
    M = rng.randrange(2, max_M + 1)
    L = rng.randrange(64, max_L + 1)
    B = rng.randrange(2, L + 1)
    n = rng.randrange(2, 10**6)
    q = -(-(n * n) // M)
    # largest t keeping the candidate count within L
    t = max(1, int(((n * n + (L - 1) * M) ** 0.5)) - n)
    while candidate_count(n, t, M, q) > L:
        t -= 1
    if t < 1:
        return None
    return SegmentPlan(n, t, 1, 1, M, M, q, B, L)


def sieve_oracle(plan):
    """Bit j set iff a prime p <= B, p not dividing M, properly divides
    the candidate; plain remainders, no start offsets."""
    v = plan.mq1 + plan.M * np.arange(plan.nbits, dtype=np.int64)
    marked = np.zeros(plan.nbits, dtype=bool)
    for p in small_primes(plan.B):
        if plan.M % p:
            marked |= (v % p == 0) & (v != p)
    return marked


def sieve_mismatches(rng, count, backend=None):
    bad = 0
    done = 0
    while done < count:
        plan = random_toy_plan(rng)
        if plan is None:
            continue
        x = sieve_segment(BitVector(plan.L), plan, backend=backend)
        bits = x.to_bools(plan.nbits)
        bad += int((bits != sieve_oracle(plan)).sum())
        assert x.popcount() == int(bits.sum())
        done += 1
    return bad


def test_sieve_soundness_random_toy_plans(backend):
    assert sieve_mismatches(random.Random(42), 150, backend) == 0


def test_sieve_small_n_keeps_small_prime_candidates(backend):
    # candidates 31, 61, ... are themselves primes <= B here
    plan = SegmentPlan(5, 17, 1, 15, 2, 30, 1, 1000, 16)
    x = sieve_segment(BitVector(16), plan, backend=backend)
    assert x[0] == 0 and x[1] == 0  # 31, 61 prime
    assert x[2] == 1  # 91 = 7*13


def test_mask_and_direct_paths_agree(backend):
    rng = random.Random(9)
    for _ in range(100):
        plan = random_toy_plan(rng)
        if plan is None:
            continue
        a = sieve_segment(BitVector(plan.L), plan, use_masks=True, backend=backend)
        b = sieve_segment(BitVector(plan.L), plan, use_masks=False, backend=backend)
        assert np.array_equal(a.words, b.words)


def test_full_size_plan_backends_agree(table):
    if "compiled" not in kernels.available():
        pytest.skip("extension not built")
    plan = plan_segment(2 * 10**9, table)
    a = sieve_segment(BitVector(plan.L), plan, backend=kernels.load("compiled"))
    b = sieve_segment(BitVector(plan.L), plan, backend=kernels.load("python"))
    assert np.array_equal(a.words, b.words)
    # 128-bit candidates: n ~ 3e13 puts M*q+1 above 2**64
    plan = plan_segment(33 * 10**12, table)
    assert plan.mq1 > 2**64
    a = sieve_segment(BitVector(plan.L), plan, backend=kernels.load("compiled"))
    b = sieve_segment(BitVector(plan.L), plan, backend=kernels.load("python"))
    assert np.array_equal(a.words, b.words)


def test_vector_too_small():
    plan = toy_plan()
    with pytest.raises(InvalidArgument):
        sieve_segment(BitVector(8), plan)
