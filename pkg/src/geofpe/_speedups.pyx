# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled round network kernel; mirrors _rounds.py bit for bit for w <= 63."""

from libc.stdint cimport uint32_t, uint64_t


cpdef uint64_t encrypt_rounds_raw(uint64_t v, int w, uint32_t t, unsigned int[::1] rk, int n_rounds):
    cdef uint64_t mask = ((<uint64_t>1) << w) - 1
    cdef uint64_t x = (v ^ t) & mask
    cdef int tk = t & 31
    cdef int ts = t & 7
    cdef int i, s
    for i in range(n_rounds):
        s = (((i ^ ts) % 7) + 1) % w
        if s == 0:
            s = 1
        x ^= rk[(i + tk) & 31] & mask
        if s != w:
            x = ((x << s) | (x >> (w - s))) & mask
    return x


cpdef uint64_t decrypt_rounds_raw(uint64_t c, int w, uint32_t t, unsigned int[::1] rk, int n_rounds):
    cdef uint64_t mask = ((<uint64_t>1) << w) - 1
    cdef uint64_t x = c & mask
    cdef int tk = t & 31
    cdef int ts = t & 7
    cdef int i, s
    for i in range(n_rounds - 1, -1, -1):
        s = (((i ^ ts) % 7) + 1) % w
        if s == 0:
            s = 1
        if s != w:
            x = ((x >> s) | (x << (w - s))) & mask
        x ^= rk[(i + tk) & 31] & mask
    return (x ^ t) & mask
