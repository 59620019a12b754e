# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the packed bit-vector sieve with its zero-bit scan, plus 64-bit
Montgomery exponentiation for the base-2 BLS powers.

Every function has a pure-Python twin in ``_kernels_py``; both must agree
bit for bit.
"""

from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    """
    #include <stdint.h>
    typedef unsigned __int128 opp_u128;

    static inline uint64_t opp_mont_reduce(opp_u128 t, uint64_t n, uint64_t nneg) {
        uint64_t m = (uint64_t)t * nneg;
        opp_u128 s = t + (opp_u128)m * n;
        uint64_t carry = s < t;
        uint64_t r = (uint64_t)(s >> 64);
        if (carry || r >= n) r -= n;
        return r;
    }

    static inline uint64_t opp_mont_mul(uint64_t a, uint64_t b, uint64_t n, uint64_t nneg) {
        return opp_mont_reduce((opp_u128)a * b, n, nneg);
    }

    /* n odd, n >= 3 */
    static uint64_t opp_powmod_odd(uint64_t b, uint64_t e, uint64_t n) {
        uint64_t inv = n;
        for (int i = 0; i < 6; i++) inv *= 2 - n * inv;
        uint64_t nneg = (uint64_t)0 - inv;
        uint64_t r1 = ((uint64_t)0 - n) % n;
        uint64_t r2 = (uint64_t)(((opp_u128)r1 * r1) % n);
        uint64_t x = opp_mont_mul(b % n, r2, n, nneg);
        uint64_t acc = r1;
        if (e == 0) return 1 % n;
        int top = 63 - __builtin_clzll(e);
        for (int i = top; i >= 0; i--) {
            acc = opp_mont_mul(acc, acc, n, nneg);
            if ((e >> i) & 1) acc = opp_mont_mul(acc, x, n, nneg);
        }
        return opp_mont_reduce((opp_u128)acc, n, nneg);
    }

    static inline uint64_t opp_mod128(uint64_t hi, uint64_t lo, uint64_t p) {
        return (uint64_t)((((opp_u128)hi << 64) | lo) % p);
    }
    """
    uint64_t opp_powmod_odd(uint64_t b, uint64_t e, uint64_t n) nogil
    uint64_t opp_mod128(uint64_t hi, uint64_t lo, uint64_t p) nogil
    int __builtin_ctzll(unsigned long long) nogil
    int __builtin_popcountll(unsigned long long) nogil

cdef uint64_t U64_MAX = 0xFFFFFFFFFFFFFFFF
BACKEND = "compiled"


cdef inline int64_t _inv_mod(int64_t a, int64_t p) nogil:
    cdef int64_t t = 0, newt = 1, r = p, newr = a, qq, tmp
    while newr != 0:
        qq = r // newr
        tmp = t - qq * newt
        t = newt
        newt = tmp
        tmp = r - qq * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def sieve_words(uint64_t[::1] words, Py_ssize_t nbits, object M, object mq1,
                const int64_t[::1] primes, const uint64_t[:, ::1] masks, bint use_masks):
    """Set bit j (0 <= j < nbits) whenever a listed prime p, coprime to M,
    divides M*j + mq1. Primes below 64 go through the shifted-mask OR when
    use_masks is set."""
    if mq1 >> 128 or M >> 64:
        raise OverflowError("compiled sieve needs M < 2**64 and M*q+1 < 2**128")
    cdef uint64_t lo = mq1 & U64_MAX
    cdef uint64_t hi = mq1 >> 64
    cdef uint64_t Mv = M
    cdef Py_ssize_t k, w, nw = (nbits + 63) >> 6
    cdef int64_t p, mm, c, h, off
    cdef Py_ssize_t j
    with nogil:
        for k in range(primes.shape[0]):
            p = primes[k]
            mm = <int64_t>(Mv % <uint64_t>p)
            if mm == 0:
                continue
            c = <int64_t>opp_mod128(hi, lo, <uint64_t>p)
            h = ((p - c) % p) * _inv_mod(mm, p) % p
            if use_masks and p < 64:
                off = (p - h) % p
                if off == 0:
                    for w in range(nw):
                        words[w] |= masks[p, w]
                else:
                    for w in range(nw):
                        words[w] |= (masks[p, w] >> off) | (masks[p, w + 1] << (64 - off))
            else:
                j = h
                while j < nbits:
                    words[j >> 6] |= (<uint64_t>1) << (j & 63)
                    j += p
        # bits at or past nbits are not part of the vector
        if nbits & 63:
            words[nw - 1] &= ((<uint64_t>1) << (nbits & 63)) - 1
        for w in range(nw, words.shape[0]):
            words[w] = 0


def next_zero(const uint64_t[::1] words, Py_ssize_t start, Py_ssize_t stop):
    """First j in [start, stop) whose bit is 0, or -1."""
    cdef Py_ssize_t w, j
    cdef uint64_t inv
    if start >= stop:
        return -1
    w = start >> 6
    inv = ~words[w] & (U64_MAX << (start & 63))
    while True:
        if inv:
            j = (w << 6) + __builtin_ctzll(inv)
            return j if j < stop else -1
        w += 1
        if (w << 6) >= stop:
            return -1
        inv = ~words[w]


def popcount(const uint64_t[::1] words, Py_ssize_t nbits):
    cdef Py_ssize_t w, nw = (nbits + 63) >> 6
    cdef int64_t total = 0
    cdef uint64_t last
    for w in range(nw):
        if w == nw - 1 and (nbits & 63):
            last = words[w] & (((<uint64_t>1) << (nbits & 63)) - 1)
            total += __builtin_popcountll(last)
        else:
            total += __builtin_popcountll(words[w])
    return total


def bls_powers(object ell, object r):
    """(a, a**r mod ell) with a = 2**((ell-1)/r) mod ell."""
    cdef uint64_t n, rv, e, a, f
    if ell >> 64:
        big = pow(2, (ell - 1) // r, ell)
        return big, pow(big, r, ell)
    n = ell
    rv = r
    e = (n - 1) // rv
    with nogil:
        a = opp_powmod_odd(2, e, n)
        f = opp_powmod_odd(a, rv, n)
    return a, f


def powmod_u64(uint64_t b, uint64_t e, uint64_t n):
    """b**e mod n for odd n >= 3 (Montgomery form)."""
    return opp_powmod_odd(b, e, n)
