"""Brillhart-Lehmer-Selfridge n-1 test with a single prime factor r of l-1.

With r**3 > l and base 2 passing Pocklington's conditions, every prime
factor of l is 1 mod r, so l has at most two of them. Writing
l = c2*r**2 + c1*r + 1, a split l = (a*r+1)(b*r+1) forces c1 = a+b and
c2 = a*b; the quadratic discriminant c1**2 - 4*c2 then decides the question.
"""

from dataclasses import dataclass
from math import gcd, isqrt

from . import kernels
from .arith import InvalidArgument, cached_prime, is_perfect_square

NONSQUARE = "discriminant-nonsquare"
TRIVIAL_ROOT = "trivial-square-root"


@dataclass(frozen=True)
class PrimeCertificate:
    candidate: int
    r: int
    c1: int
    c2: int
    branch: str
    base: int = 2


@dataclass(frozen=True)
class Prime:
    certificate: PrimeCertificate


@dataclass(frozen=True)
class Composite:
    """`reason` is "fermat", "pocklington" or "split"; `factor` is a proper
    divisor when one is known."""

    reason: str
    factor: int | None = None


@dataclass(frozen=True)
class Inconclusive:
    """2**((l-1)/r) == 1 (mod l): base 2 cannot certify l against r."""


def digits(ell, r):
    c2, c1 = divmod((ell - 1) // r, r)
    return c1, c2


def _split_factor(ell, r, c1, c2):
    """The factor a*r+1 implied by a square discriminant, or None."""
    disc = c1 * c1 - 4 * c2
    if disc < 0 or not is_perfect_square(disc):
        return None
    sigma = isqrt(disc)
    if (c1 - sigma) % 2:
        return None
    a = (c1 - sigma) // 2
    f = a * r + 1
    if a >= 1 and 1 < f < ell and ell % f == 0:
        return f
    return None


def _check_args(ell, r):
    if ell <= r or ell % 2 == 0:
        raise InvalidArgument(f"need odd l > r, got l={ell}, r={r}")
    if (ell - 1) % r:
        raise InvalidArgument(f"{ell} is not 1 mod {r}")
    if r**3 <= ell:
        raise InvalidArgument(f"r={r} too small: r**3 <= {ell}")
    if r < 2 or not cached_prime(r):
        raise InvalidArgument(f"r={r} is not prime")


def bls_test(ell, r):
    _check_args(ell, r)
    return _bls(ell, r)


def _bls(ell, r):
    a, f = kernels.bls_powers(ell, r)
    c1, c2 = digits(ell, r)
    if f != 1:
        return Composite("fermat", _split_factor(ell, r, c1, c2))
    g = gcd(a - 1, ell)
    if g == ell:
        return Inconclusive()
    if g != 1:
        return Composite("pocklington", g)
    disc = c1 * c1 - 4 * c2
    if not is_perfect_square(disc):
        return Prime(PrimeCertificate(ell, r, c1, c2, NONSQUARE))
    factor = _split_factor(ell, r, c1, c2)
    if factor is not None:
        return Composite("split", factor)
    return Prime(PrimeCertificate(ell, r, c1, c2, TRIVIAL_ROOT))


def verify_certificate(cert):
    """Re-check a certificate from scratch with Python's own pow."""
    try:
        ell, r, c1, c2 = cert.candidate, cert.r, cert.c1, cert.c2
        if cert.base != 2 or r < 2 or ell <= r or ell % 2 == 0:
            return False
        if not (0 <= c1 < r and 0 <= c2 < r):
            return False
        if ell != c2 * r * r + c1 * r + 1:
            return False
        if r**3 <= ell or not cached_prime(r):
            return False
        if pow(2, ell - 1, ell) != 1:
            return False
        if gcd(pow(2, (ell - 1) // r, ell) - 1, ell) != 1:
            return False
        disc = c1 * c1 - 4 * c2
        if cert.branch == NONSQUARE:
            return not is_perfect_square(disc)
        if cert.branch == TRIVIAL_ROOT:
            return is_perfect_square(disc) and _split_factor(ell, r, c1, c2) is None
        return False
    except (AttributeError, TypeError, ValueError):
        return False
