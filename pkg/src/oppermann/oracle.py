"""Brute-force ground truth: a plain segmented Eratosthenes sieve.

Deliberately unoptimized and independent of the fast path (no bit vector,
no modulus tricks) so it can falsify it.
"""

from math import isqrt

import numpy as np

from .arith import InvalidArgument, small_primes

MAX_SPAN = 10**8
MAX_VALUE = 2**64


class OracleRefused(InvalidArgument):
    pass


def _guard(lo, hi, M=1):
    if (hi - lo) // M > MAX_SPAN:
        raise OracleRefused(f"range of {hi - lo} exceeds the oracle limit {MAX_SPAN}")
    if hi >= MAX_VALUE:
        raise OracleRefused("oracle works below 2**64 only")


def primes_in_range(lo, hi):
    """Primes p with lo < p < hi, ascending."""
    _guard(lo, hi)
    start = max(lo + 1, 2)
    if start >= hi:
        return []
    flags = bytearray([1]) * (hi - start)
    for p in small_primes(isqrt(hi - 1)):
        first = max(p * p, -(-start // p) * p)
        if first < hi:
            flags[first - start :: p] = bytes(len(range(first, hi, p)))
    return [start + i for i, f in enumerate(flags) if f]


def ap_primes_in_range(lo, hi, M):
    """Primes p = 1 (mod M) with lo < p < hi, by sieving the progression
    itself with every prime up to sqrt(hi)."""
    if M < 1:
        raise InvalidArgument(f"modulus must be >= 1, got {M}")
    if M == 1:
        return primes_in_range(lo, hi)
    _guard(lo, hi, M)
    a0 = ((lo - 1) // M + 1) * M + 1  # first element > lo
    if a0 == 1:
        a0 += M
    if a0 >= hi:
        return []
    count = (hi - 1 - a0) // M + 1
    flags = np.ones(count, dtype=bool)
    P = np.array(small_primes(isqrt(hi - 1)), dtype=np.int64)
    P = P[M % P != 0]
    if len(P):
        # j0: first index with p | a0 + M*j; then push to the first
        # multiple >= p*p so a prime never strikes itself
        inv = _inverse_mod(M % P, P)
        j0 = (-(a0 % P)) % P * inv % P
        jmin = np.maximum(0, -((a0 - P * P) // M))
        j0 = j0 + P * -((j0 - jmin) // P).clip(max=0)
        small = P < count
        for p, j in zip(P[small].tolist(), j0[small].tolist()):
            flags[j::p] = False
        hit = j0[~small]
        flags[hit[hit < count]] = False
    return [a0 + M * int(j) for j in np.flatnonzero(flags)]


def _inverse_mod(a, p):
    """Elementwise a**(p-2) mod p for primes p < 2**31."""
    result = np.ones_like(a)
    base = a % p
    e = p - 2
    while e.any():
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * base % p, result)
        base = base * base % p
        e >>= 1
    return result


def smallest_ap_prime(lo, hi, M, exempt=()):
    skip = set(exempt)
    for p in ap_primes_in_range(lo, hi, M):
        if p not in skip:
            return p
    return None
