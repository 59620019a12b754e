"""Exact integer primitives shared by the prover, sieve and search code.

Python integers are arbitrary precision, so every modular product here is
exact regardless of operand width; candidates around 2**128 need nothing
special.
"""

from functools import lru_cache
from math import gcd, isqrt

# The first 13 primes form a deterministic Miller-Rabin witness set below
# this bound (Sorenson & Webster).
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_BOUND = 3317044064679887385961981


class InvalidArgument(ValueError):
    pass


class NotInvertible(ValueError):
    pass


class OutOfRange(ValueError):
    """Raised when the deterministic prover is asked about n >= MR_BOUND."""


def powmod(base, exponent, modulus):
    if modulus < 2:
        raise InvalidArgument(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise InvalidArgument("negative exponent")
    return pow(base, exponent, modulus)


def modinv(a, p):
    """Return x in (0, p) with a*x == 1 (mod p)."""
    if p < 2:
        raise InvalidArgument(f"modulus must be >= 2, got {p}")
    if gcd(a, p) != 1:
        raise NotInvertible(f"{a} is not invertible modulo {p}")
    return pow(a, -1, p)


def is_perfect_square(n):
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def strong_probable_prime(n, base):
    """Miller-Rabin round: True iff n is a strong probable prime to `base`."""
    if n < 3 or n % 2 == 0:
        raise InvalidArgument(f"n must be odd and >= 3, got {n}")
    if not 2 <= base < n:
        raise InvalidArgument(f"base must satisfy 2 <= base < n, got {base}")
    d = n - 1
    e = 0
    while d % 2 == 0:
        d //= 2
        e += 1
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(e - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def deterministic_prime(n):
    """Unconditional primality for 2 <= n < MR_BOUND."""
    if n >= MR_BOUND:
        raise OutOfRange(f"{n} is beyond the deterministic witness bound")
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    for p in MR_WITNESSES:
        if n == p:
            return True
        if n % p == 0:
            return False
    for a in MR_WITNESSES:
        if not strong_probable_prime(n, a):
            return False
    return True


@lru_cache(maxsize=4096)
def cached_prime(n):
    """deterministic_prime memoized; used for the small set of R values."""
    return deterministic_prime(n)


def small_primes(limit):
    """All primes <= limit by a plain sieve of Eratosthenes."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def factorize_small(n):
    """Trial-division factorization {prime: exponent}; meant for small m."""
    if n < 1:
        raise InvalidArgument(f"cannot factor {n}")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out
