"""Prime finding per interval over a sieved segment, with fallbacks.

Levels: 0 is the sieved scan with the segment's R; 1-4 walk the progression
1 mod R'*m' for the other primes R' of the same class using trial division
instead of a sieve; 5 is a plain sequential scan with an unconditional
prover; 6 means the interval was exhausted without a prime.
"""

from dataclasses import dataclass
from math import gcd

from . import kernels
from .arith import (
    MR_WITNESSES,
    InvalidArgument,
    OutOfRange,
    cached_prime,
    deterministic_prime,
    small_primes,
    strong_probable_prime,
)
from .prover import Inconclusive, Prime, _bls, bls_test
from .rtable import CLASS_SIZE, TableExhausted
from .sieve import BitVector, multiplier_options, sieve_primes, sieve_segment

FOUND = "found"
COUNTEREXAMPLE = "counterexample-candidate"

LEVEL_SIEVE = 0
LEVEL_ALGORITHM_A = 5
LEVEL_EXHAUSTED = 6

PROOF_MR = "deterministic-mr13"
PROOF_UNPROVEN = "sprp13-unproven"

ALT_TRIAL_LIMIT = 64
A_TRIAL_LIMIT = 1000
_ALT_PRIMES = tuple(small_primes(ALT_TRIAL_LIMIT))
_A_PRIMES = tuple(small_primes(A_TRIAL_LIMIT))


@dataclass(frozen=True)
class Interval:
    """Case "A" is ((k)**2, k*(k+1)), case "B" is (k*(k+1), (k+1)**2) with
    k = base + i. q_i is relative to the plan's q."""

    base: int
    i: int
    case: str
    lo: int
    hi: int
    q_i: int = 0

    @property
    def n(self):
        return self.base + self.i


def make_interval(base, i, case, M=None, q=0):
    k = base + i
    if case == "A":
        lo, hi = k * k, k * (k + 1)
    elif case == "B":
        lo, hi = k * (k + 1), (k + 1) ** 2
    else:
        raise InvalidArgument(f"case must be 'A' or 'B', got {case!r}")
    q_i = 0 if M is None else (lo - 1) // M + 1 - q
    return Interval(base, i, case, lo, hi, q_i)


def segment_intervals(plan):
    for i in range(plan.t):
        for case in ("A", "B"):
            yield make_interval(plan.n, i, case, plan.M, plan.q)


@dataclass(frozen=True)
class IntervalResult:
    interval: Interval
    outcome: str
    prime: int | None = None
    proof: object = None  # PrimeCertificate, or a PROOF_* tag at level 5
    candidates_tested: int = 0
    fallback_level: int = LEVEL_SIEVE
    inconclusive: tuple = ()
    unproven: bool = False

    @property
    def failed_tests(self):
        return self.candidates_tested - (self.outcome == FOUND)


def _check_plan(plan):
    if plan.M % 2 or plan.M % plan.R:
        raise InvalidArgument("modulus must be even and divisible by R")
    if plan.R**3 <= plan.end or not cached_prime(plan.R):
        raise InvalidArgument(f"R={plan.R} cannot prove candidates below {plan.end}")


def scan_interval(x, plan, interval, table=None):
    """Scan zero bits of x inside the interval with the BLS test; on
    exhaustion continue down the fallback chain."""
    M, q, R = plan.M, plan.q, plan.R
    stop = min(-(-(interval.hi - 1) // M) - q, plan.nbits)
    words = x.words
    next_zero = kernels.next_zero
    tested = 0
    skips = []
    j = next_zero(words, interval.q_i, stop)
    while j >= 0:
        ell = M * (q + j) + 1
        tested += 1
        res = _bls(ell, R)
        if type(res) is Prime:
            return IntervalResult(interval, FOUND, ell, res.certificate, tested, LEVEL_SIEVE, tuple(skips))
        if type(res) is Inconclusive:
            skips.append(ell)
        j = next_zero(words, j + 1, stop)
    return escalate(plan, interval, table, tested, skips)


def escalate(plan, interval, table, tested=0, skips=()):
    skips = list(skips)
    if table is not None:
        for level in range(1, CLASS_SIZE):
            res = fallback_alt_r(plan, interval, table, level)
            tested += res.candidates_tested
            skips.extend(res.inconclusive)
            if res.outcome == FOUND:
                return _with_totals(res, tested, skips)
    res = fallback_algorithm_a(interval)
    return _with_totals(res, tested + res.candidates_tested, skips)


def _with_totals(res, tested, skips):
    return IntervalResult(
        res.interval, res.outcome, res.prime, res.proof, tested,
        res.fallback_level, tuple(skips), res.unproven,
    )


def alternate_modulus(plan, table, level):
    """(R', m') for fallback `level`: the level-th prime of the plan's class,
    with m' re-derived so R'*m' stays near the plan's modulus."""
    k = plan.class_index
    if k < 0:
        k = _class_for(plan, table)
    r_alt = table.groups[k][level]
    options = [m for m in multiplier_options(plan.M / r_alt) if gcd(m, r_alt) == 1]
    m_alt = min(options, key=lambda m: (abs(r_alt * m - plan.M), m))
    return r_alt, m_alt


def _class_for(plan, table):
    for k, group in enumerate(table.groups):
        if group[0] ** 3 > plan.end:
            return k
    raise TableExhausted(f"no R class can prove candidates below {plan.end}")


def _trial_divisible(c, primes, modulus=1):
    for p in primes:
        if p * p > c:
            return False
        if modulus % p and c % p == 0:
            return True
    return False


def fallback_alt_r(plan, interval, table, level):
    """Walk c = 1 mod R'*m' in (lo, hi): trial division by primes < 64, a
    base-2 strong test, then BLS with R'."""
    if not 1 <= level < CLASS_SIZE:
        raise InvalidArgument(f"level must be in 1..{CLASS_SIZE - 1}")
    r_alt, m_alt = alternate_modulus(plan, table, level)
    M = r_alt * m_alt
    lo, hi = interval.lo, interval.hi
    if r_alt**3 <= hi:
        raise InvalidArgument(f"R'={r_alt} too small for the interval")
    tested = 0
    skips = []
    c = ((lo - 1) // M + 1) * M + 1
    while c < hi:
        if not _trial_divisible(c, _ALT_PRIMES, M):
            tested += 1
            if strong_probable_prime(c, 2):
                res = bls_test(c, r_alt)
                if type(res) is Prime:
                    return IntervalResult(interval, FOUND, c, res.certificate, tested, level, tuple(skips))
                if type(res) is Inconclusive:
                    skips.append(c)
        c += M
    return IntervalResult(interval, COUNTEREXAMPLE, None, None, tested, LEVEL_EXHAUSTED, tuple(skips))


def fallback_algorithm_a(interval):
    """Test lo+1, lo+2, ... below hi: trial division to 1000, a base-2
    strong test, then deterministic Miller-Rabin."""
    tested = 0
    for c in range(interval.lo + 1, interval.hi):
        if c < 2 or (c > 2 and c % 2 == 0) or _trial_divisible(c, _A_PRIMES):
            continue
        tested += 1
        if c > 2 and not strong_probable_prime(c, 2):
            continue
        try:
            if deterministic_prime(c):
                return IntervalResult(interval, FOUND, c, PROOF_MR, tested, LEVEL_ALGORITHM_A)
        except OutOfRange:
            if all(strong_probable_prime(c, a) for a in MR_WITNESSES):
                return IntervalResult(
                    interval, FOUND, c, PROOF_UNPROVEN, tested, LEVEL_ALGORITHM_A, unproven=True
                )
    return IntervalResult(interval, COUNTEREXAMPLE, None, None, tested, LEVEL_EXHAUSTED)


def verify_segment(plan, x=None, table=None, primes=None):
    """All 2t interval results for plan, ordered by (i, case)."""
    _check_plan(plan)
    if x is None:
        x = BitVector(plan.L)
    x.clear()
    sieve_segment(x, plan, primes if primes is not None else sieve_primes(plan.B))
    return [scan_interval(x, plan, iv, table) for iv in segment_intervals(plan)]

