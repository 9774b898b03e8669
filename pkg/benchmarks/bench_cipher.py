#!/usr/bin/env python3
"""Benchmark the compiled round-network kernel against the pure-Python one.

Usage: python benchmarks/bench_cipher.py [--n 200000] [--rounds 8]
"""

import argparse
import random
import time
from array import array

from geofpe import _rounds
from geofpe.cipher import CoordinateCipher
from geofpe.sm4 import derive_round_keys

try:
    from geofpe import _speedups
except ImportError:
    _speedups = None

KEY = bytes(range(16))


def time_kernel(fn, samples, rk, n_rounds):
    start = time.perf_counter()
    acc = 0
    for v, w, t in samples:
        acc ^= fn(v, w, t, rk, n_rounds)
    elapsed = time.perf_counter() - start
    return elapsed, acc


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=200_000)
    parser.add_argument("--rounds", type=int, default=8)
    args = parser.parse_args()

    rng = random.Random(1)
    rk = derive_round_keys(KEY)
    rk_buf = array("I", rk)
    samples = []
    for _ in range(args.n):
        w = rng.choice((8, 10, 16, 17))
        samples.append((rng.randrange(1 << w), w, rng.randrange(1 << 32)))

    pure_s, pure_acc = time_kernel(
        _rounds.encrypt_rounds_raw, samples, rk, args.rounds
    )
    print(f"pure python : {args.n / pure_s:>12,.0f} ops/s  ({pure_s:.3f}s)")

    if _speedups is None:
        print("cython      : not built (pip install -e . --no-build-isolation)")
        return
    cy_s, cy_acc = time_kernel(
        _speedups.encrypt_rounds_raw, samples, rk_buf, args.rounds
    )
    print(f"cython      : {args.n / cy_s:>12,.0f} ops/s  ({cy_s:.3f}s)")
    print(f"speedup     : {pure_s / cy_s:.1f}x")
    assert pure_acc == cy_acc, "backends disagree"

    # whole-component path (tweak + rounds + constraint)
    cipher = CoordinateCipher(KEY, n_rounds=args.rounds)
    values = [rng.randrange(100_000) for _ in range(50_000)]
    start = time.perf_counter()
    for v in values:
        cipher.encrypt_component(v, "lon_frac", 5)
    comp_s = time.perf_counter() - start
    print(f"components  : {len(values) / comp_s:>12,.0f} ops/s  [{len(values)} lon_frac]")


if __name__ == "__main__":
    main()
