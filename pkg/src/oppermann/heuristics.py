"""Cramér-model estimates used for parameter sanity checks and reporting."""

import math
from dataclasses import dataclass

import numpy as np

from .arith import InvalidArgument, deterministic_prime, factorize_small

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class HeuristicParams:
    v: float
    b: int
    gamma: float = EULER_GAMMA

    def __post_init__(self):
        if self.v <= 1 or self.b < 2:
            raise InvalidArgument("need v > 1 and b >= 2")


def prime_prob(x):
    if x <= math.e:
        raise InvalidArgument(f"x must exceed e, got {x}")
    return 1.0 / math.log(x)


def totient_ratio(factorization):
    """M/phi(M) from {prime: exponent}."""
    ratio = 1.0
    for p, k in factorization.items():
        if k < 1 or p < 2 or not deterministic_prime(p):
            raise InvalidArgument(f"bad factor {p}**{k}")
        ratio *= p / (p - 1)
    return ratio


def ap_prime_prob(x, m_factorization, R):
    """Chance that a random element of 1 mod m*R near x is prime."""
    if R in m_factorization:
        raise InvalidArgument("R must not divide m")
    if not deterministic_prime(R):
        raise InvalidArgument(f"R={R} is not prime")
    return totient_ratio(m_factorization) * R / (R - 1) * prime_prob(x)


def mertens_factor(b):
    """e**gamma * ln b, the asymptotic size of prod_{p<=b} p/(p-1)."""
    return math.exp(EULER_GAMMA) * math.log(b)


def all_composite_prob(count, x):
    if count < 0:
        raise InvalidArgument("count must be >= 0")
    return (1.0 - prime_prob(x)) ** count


def expected_failed_tests(n, B):
    """ln(n**2)/ln(B): zero bits tested per prime found."""
    if B < 3:
        raise InvalidArgument("B must be >= 3")
    return 2 * math.log(n) / math.log(B)


def simulate_all_composite(count, x, trials, seed=0):
    """Monte Carlo estimate of all_composite_prob: each trial flips `count`
    independent coins with success 1/ln x. Returns (estimate, std_error)."""
    rng = np.random.default_rng(seed)
    p = prime_prob(x)
    k = int(count)
    hits = 0
    chunk = max(1, 4_000_000 // max(k, 1))
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        coins = rng.random((size, k)) < p
        hits += int((~coins.any(axis=1)).sum())
        done += size
    est = hits / trials
    return est, math.sqrt(est * (1 - est) / trials)


def plan_estimates(plan):
    """Expected behaviour of a SegmentPlan at its own magnitude."""
    x = float(plan.n) ** 2
    per_interval = plan.n / plan.M
    p_hit = ap_prime_prob(x, factorize_small(plan.m), plan.R)
    miss = (1 - p_hit) ** per_interval
    return {
        "candidates_per_interval": per_interval,
        "ap_prime_prob": p_hit,
        "expected_failed_tests": expected_failed_tests(plan.n, plan.B),
        "level1_rate": miss,
        "level2_rate": miss * miss,
        "mertens_factor": mertens_factor(max(p for p in factorize_small(plan.m))),
    }
