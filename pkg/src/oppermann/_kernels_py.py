"""Pure-Python/numpy twins of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

BACKEND = "python"

_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def _unpack(words):
    return np.unpackbits(words.view(np.uint8), bitorder="little").astype(bool)


def sieve_words(words, nbits, M, mq1, primes, masks, use_masks):
    bits = _unpack(words)
    unpacked = {}
    for p in primes.tolist():
        mm = M % p
        if mm == 0:
            continue
        h = (-mq1) * pow(mm, -1, p) % p
        if use_masks and p < 64:
            row = unpacked.get(p)
            if row is None:
                row = unpacked[p] = _unpack(np.ascontiguousarray(masks[p]))
            off = (p - h) % p
            bits[:nbits] |= row[off : off + nbits]
        else:
            bits[h:nbits:p] = True
    bits[nbits:] = False
    words[:] = np.packbits(bits, bitorder="little").view(np.uint64)


def next_zero(words, start, stop):
    if start >= stop:
        return -1
    w = start >> 6
    inv = ~int(words[w]) & (0xFFFFFFFFFFFFFFFF << (start & 63)) & 0xFFFFFFFFFFFFFFFF
    while True:
        if inv:
            j = (w << 6) + ((inv & -inv).bit_length() - 1)
            return j if j < stop else -1
        w += 1
        if (w << 6) >= stop:
            return -1
        inv = ~int(words[w]) & 0xFFFFFFFFFFFFFFFF


def popcount(words, nbits):
    return int(_unpack(words)[:nbits].sum())


def bls_powers(ell, r):
    a = pow(2, (ell - 1) // r, ell)
    return a, pow(a, r, ell)


def powmod_u64(b, e, n):
    return pow(b, e, n)
