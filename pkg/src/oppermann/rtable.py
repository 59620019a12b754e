"""Table of proven primes R in geometric size classes of five.

File format: one ``<class-index> <prime>`` pair per line, ascending; lines
starting with ``#`` are comments. Every entry is re-proven on load.
"""

import hashlib
import math
import os
from dataclasses import dataclass

from .arith import InvalidArgument, deterministic_prime

CLASS_SIZE = 5
CLASS_RATIO = 1.25
# Default range covers R for every n up to ~1e18.
DEFAULT_MIN = 16
DEFAULT_MAX = 10**12


class TableExhausted(LookupError):
    pass


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RTable:
    groups: tuple  # tuple of 5-tuples of primes, ascending

    def __post_init__(self):
        prev = 0
        for g in self.groups:
            if len(g) != CLASS_SIZE or len(set(g)) != CLASS_SIZE:
                raise TableFormatError(f"class {g} does not hold {CLASS_SIZE} distinct primes")
            if list(g) != sorted(g) or g[0] < prev:
                raise TableFormatError("classes must be sorted ascending")
            prev = g[0]

    def __len__(self):
        return len(self.groups)

    def dumps(self):
        lines = [f"{k} {p}" for k, g in enumerate(self.groups) for p in g]
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.dumps().encode()).hexdigest()

    def eligible(self, threshold):
        """Indices of classes whose smallest prime exceeds threshold."""
        return [k for k, g in enumerate(self.groups) if g[0] > threshold]


def _next_prime(n):
    n = max(n, 2)
    while not deterministic_prime(n):
        n += 1
    return n


def generate(min_magnitude, max_magnitude):
    """Classes at round(min * 1.25**k) <= max, each the five smallest
    primes >= its magnitude."""
    if not 2 <= min_magnitude < max_magnitude:
        raise InvalidArgument(f"empty range [{min_magnitude}, {max_magnitude}]")
    if max_magnitude >= 2**64:
        raise InvalidArgument("R values must stay below 2**64")
    groups = []
    k = 0
    last = None
    while True:
        mag = math.floor(min_magnitude * CLASS_RATIO**k)
        k += 1
        if mag > max_magnitude:
            break
        if mag == last:
            continue
        last = mag
        g = []
        p = _next_prime(mag)
        while len(g) < CLASS_SIZE:
            g.append(p)
            p = _next_prime(p + 1)
        # at low magnitudes neighbouring classes would share primes
        if groups and g[0] <= groups[-1][-1]:
            continue
        groups.append(tuple(g))
    return RTable(tuple(groups))


def default_table():
    return generate(DEFAULT_MIN, DEFAULT_MAX)


def select(table, threshold, fallback_index=0, class_index=None):
    """Prime number `fallback_index` of the first class above threshold, or
    of `class_index` when the caller has already picked a class."""
    if not 0 <= fallback_index < CLASS_SIZE:
        raise InvalidArgument(f"fallback_index must be in 0..{CLASS_SIZE - 1}")
    ks = table.eligible(threshold)
    if not ks:
        raise TableExhausted(f"no R class above {threshold}; regenerate a larger table")
    if class_index is None:
        class_index = ks[0]
    elif class_index not in ks:
        raise InvalidArgument(f"class {class_index} is not above {threshold}")
    return table.groups[class_index][fallback_index]


def loads(text):
    rows = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            k, p = (int(x) for x in line.split())
        except ValueError:
            raise TableFormatError(f"line {lineno}: expected '<class> <prime>'") from None
        if not deterministic_prime(p):
            raise TableFormatError(f"line {lineno}: {p} is not prime")
        rows.setdefault(k, []).append(p)
    if sorted(rows) != list(range(len(rows))):
        raise TableFormatError("class indices must be contiguous from 0")
    return RTable(tuple(tuple(rows[k]) for k in range(len(rows))))


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def store(table, path):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(table.dumps())
    os.replace(tmp, path)
