"""Pure-Python round network kernel.

Reference implementation of the tweak-driven XOR/rotate rounds; the compiled
module in _speedups.pyx mirrors it bit for bit.  Callers guarantee
0 <= v < 2**w and n_rounds >= 0.
"""

from __future__ import annotations


def encrypt_rounds_raw(v: int, w: int, t: int, rk, n_rounds: int) -> int:
    mask = (1 << w) - 1
    x = (v ^ t) & mask
    tk = t & 31
    ts = t & 7
    for i in range(n_rounds):
        s = (((i ^ ts) % 7) + 1) % w
        if s == 0:
            s = 1
        x ^= rk[(i + tk) & 31] & mask
        if s != w:
            x = ((x << s) | (x >> (w - s))) & mask
    return x


def decrypt_rounds_raw(c: int, w: int, t: int, rk, n_rounds: int) -> int:
    mask = (1 << w) - 1
    x = c & mask
    tk = t & 31
    ts = t & 7
    for i in range(n_rounds - 1, -1, -1):
        s = (((i ^ ts) % 7) + 1) % w
        if s == 0:
            s = 1
        if s != w:
            x = ((x >> s) | (x << (w - s))) & mask
        x ^= rk[(i + tk) & 31] & mask
    return (x ^ t) & mask
