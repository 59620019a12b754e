"""Segment planning and the bit-vector sieve over the progression 1 mod M.

Bit j of a segment's vector stands for the candidate M*(q+j)+1; a set bit
means a prime <= B, coprime to M, properly divides it.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from . import kernels
from .arith import InvalidArgument, deterministic_prime, modinv, small_primes
from .rtable import TableExhausted

MASK_LIMIT = 64


@dataclass(frozen=True)
class SieveConfig:
    segment_bits: int = 17
    s: int = 128
    t_min: int = 256
    t_max: int = 512

    def __post_init__(self):
        if not 4 <= self.segment_bits <= 30:
            raise InvalidArgument("segment_bits must be in 4..30")
        if self.s < 1 or not 1 <= self.t_min <= self.t_max:
            raise InvalidArgument("need s >= 1 and 1 <= t_min <= t_max")

    @property
    def L(self):
        return 1 << self.segment_bits


@dataclass(frozen=True)
class SegmentPlan:
    n: int
    t: int
    s: int
    R: int
    m: int
    M: int
    q: int
    B: int
    L: int
    class_index: int = -1

    @property
    def mq1(self):
        return self.M * self.q + 1

    @property
    def end(self):
        """Exclusive upper value of the segment, (n+t)**2."""
        return (self.n + self.t) ** 2

    @property
    def nbits(self):
        """Number of candidates M*(q+j)+1 below (n+t)**2."""
        return candidate_count(self.n, self.t, self.M, self.q)

    def candidate(self, j):
        return self.M * (self.q + j) + 1


def candidate_count(n, t, M, q):
    span = (n + t) ** 2 - (M * q + 1)
    return max(0, -(-span // M))


def make_plan(n, t, R, m, L, s=128, B=None, class_index=-1):
    """Plan with R, m and t given explicitly (tests, fallbacks, examples)."""
    if n < 2 or t < 1:
        raise InvalidArgument(f"need n >= 2 and t >= 1, got n={n}, t={t}")
    M = R * m
    q = -(-(n * n) // M)
    plan = SegmentPlan(n, t, s, R, m, M, q, L if B is None else B, L, class_index)
    if plan.nbits > L:
        raise InvalidArgument(f"{plan.nbits} candidates exceed the {L}-bit vector")
    return plan


def fit_t(n, M, L):
    """Largest t whose segment has at most L candidates."""
    q = -(-(n * n) // M)
    t = max(1, isqrt(n * n + L * M) - n)
    while t > 1 and candidate_count(n, t, M, q) > L:
        t -= 1
    while candidate_count(n, t + 1, M, q) <= L:
        t += 1
    if candidate_count(n, t, M, q) > L:
        raise InvalidArgument(f"modulus {M} too small for an {L}-bit segment at n={n}")
    return t


def target_modulus(n, config):
    t_mid = Fraction(config.t_min + config.t_max, 2)
    by_bits = 2 * n * t_mid / config.L
    by_density = (n + t_mid / 2) / config.s
    return min(by_bits, by_density)


def multiplier_options(ratio):
    """Even multipliers bracketing ratio; multiples of 30 once ratio allows."""
    step = 30 if ratio >= 30 else 2
    lo = max(step, (ratio // step) * step)
    hi = max(step, -(-ratio // step) * step)
    return sorted({int(lo), int(hi)})


def choose_modulus(n, table, config, threshold_n=None):
    """(class_index, R, m) with R**3 > (threshold_n)**2 and R*m nearest the
    target modulus; ties go to the smaller m."""
    top = (n + config.t_max) if threshold_n is None else threshold_n
    bound = top * top
    target = target_modulus(n, config)
    best = None
    for k, group in enumerate(table.groups):
        R = group[0]
        if R**3 <= bound:
            continue
        for m in multiplier_options(target / R):
            if gcd(m, R) != 1:
                continue
            key = (abs(R * m - target), m)
            if best is None or key < best[0]:
                best = (key, k, R, m)
    if best is None:
        raise TableExhausted(f"no R class with R**3 > {bound}; regenerate a larger table")
    return best[1], best[2], best[3]


def plan_segment(n, table, config=SieveConfig(), t_cap=None):
    """Plan the segment starting at n. `t_cap` truncates t (end of range)."""
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    k, R, m = choose_modulus(n, table, config)
    M = R * m
    t = min(config.t_max, fit_t(n, M, config.L))
    if t_cap is not None:
        t = min(t, t_cap)
    return make_plan(n, t, R, m, config.L, config.s, class_index=k)


def first_hit(p, plan):
    """Least j >= 0 with p | M*(q+j)+1."""
    if plan.M % p == 0:
        raise InvalidArgument(f"{p} divides the modulus {plan.M}")
    return -plan.mq1 * modinv(plan.M % p, p) % p


@dataclass
class BitVector:
    L: int
    words: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.words = np.zeros((self.L + 63) // 64 + 1, dtype=np.uint64)

    def clear(self):
        self.words[:] = 0
        return self

    def __getitem__(self, j):
        if not 0 <= j < self.L:
            raise IndexError(j)
        return (int(self.words[j >> 6]) >> (j & 63)) & 1

    def popcount(self):
        return kernels.popcount(self.words, self.L)

    def to_bools(self, nbits=None):
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little").astype(bool)
        return bits[: self.L if nbits is None else nbits]


def clear(x):
    return x.clear()


@lru_cache(maxsize=8)
def sieve_primes(B):
    return np.array(small_primes(B), dtype=np.int64)


@lru_cache(maxsize=8)
def build_masks(L):
    """Row p (prime p < 64) has bits at every multiple of p over L+64 bits."""
    width = (L + 64) // 64 + 1
    out = np.zeros((MASK_LIMIT, width), dtype=np.uint64)
    for p in small_primes(MASK_LIMIT - 1):
        bits = np.zeros(width * 64, dtype=bool)
        bits[::p] = True
        out[p] = np.packbits(bits, bitorder="little").view(np.uint64)
    out.setflags(write=False)
    return out


def sieve_segment(x, plan, primes=None, use_masks=True, backend=None):
    """Sieve a cleared vector for plan by every prime <= plan.B."""
    if x.L < plan.nbits:
        raise InvalidArgument("bit vector smaller than the segment")
    if primes is None:
        primes = sieve_primes(plan.B)
    kern = backend or kernels
    masks = build_masks(x.L)
    kern.sieve_words(x.words, plan.nbits, plan.M, plan.mq1, primes, masks, use_masks)
    _unmark_small_primes(x, plan)
    return x


def _unmark_small_primes(x, plan):
    # A candidate that is itself a prime <= B was struck by its own stride.
    j = 0
    while j < plan.nbits:
        v = plan.candidate(j)
        if v > plan.B:
            break
        if v > 1 and deterministic_prime(v) and x[j]:
            x.words[j >> 6] &= ~np.uint64(1 << (j & 63))
        j += 1
