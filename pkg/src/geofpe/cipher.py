"""Tweak-driven, dynamically keyed round network over masked coordinate parts.

Each component (integer or fraction part of a longitude/latitude) is XOR-mixed
with a per-value tweak, run through n_rounds of key-XOR + data-dependent
rotation inside a w-bit mask, and finally folded into its valid range.  The
fold is lossy by design; exact decryption goes through the mapping store.

The round kernel is compiled (geofpe._speedups) when available; set
GEOFPE_PURE=1 to force the pure-Python fallback.
"""

from __future__ import annotations

import hashlib
import os
from array import array

from . import _rounds
from .coords import DecimalNumber
from .ranges import fraction_constrain, mask_width, range_constrain, range_type

try:
    from . import _speedups
except ImportError:
    _speedups = None
if os.environ.get("GEOFPE_PURE"):
    _speedups = None

BACKEND = "cython" if _speedups is not None else "pure"

KINDS = ("lon_int", "lon_frac", "lat_int", "lat_frac")
DEFAULT_ROUNDS = 8

# _speedups works on C uint64; wider masks take the pure path.
_C_MAX_WIDTH = 63


class DomainError(ValueError):
    """Input outside the cipher's declared domain."""


def check_key(key: bytes) -> bytes:
    if not isinstance(key, (bytes, bytearray)) or len(key) != 16:
        raise DomainError("master key must be exactly 16 bytes")
    return bytes(key)


def is_lon(kind: str) -> bool:
    return kind.startswith("lon")


def is_int_part(kind: str) -> bool:
    return kind.endswith("_int")


def compute_tweak(tag: str, value_text: str, key: bytes) -> int:
    """32-bit tweak: leading four bytes (big-endian) of
    MD5(tag ':' value_text MD5(key))."""
    if tag not in KINDS:
        raise DomainError(f"unknown component tag {tag!r}")
    if not value_text or not value_text.isascii() or not value_text.isdigit():
        raise DomainError(f"tweak value text must be ASCII digits, got {value_text!r}")
    key_hash = hashlib.md5(check_key(key)).digest()
    digest = hashlib.md5(
        tag.encode("ascii") + b":" + value_text.encode("ascii") + key_hash
    ).digest()
    return int.from_bytes(digest[:4], "big")


def key_index(i: int, t: int) -> int:
    """Round-key index for round i: the tweak's low 5 bits rotate the schedule."""
    return (i + (t & 31)) & 31


def shift_amount(i: int, t: int) -> int:
    """Rotation amount in [1, 7] from the round number and the tweak's low 3 bits."""
    return ((i ^ (t & 7)) % 7) + 1


def _check_rounds_args(v: int, w: int, n_rounds: int) -> None:
    if w < 1:
        raise DomainError(f"mask width must be >= 1, got {w}")
    if n_rounds < 0:
        raise DomainError(f"round count must be >= 0, got {n_rounds}")
    if not 0 <= v < (1 << w):
        raise DomainError(f"value {v} outside [0, 2^{w})")


def _as_u32_buffer(rk) -> array:
    if isinstance(rk, array) and rk.typecode == "I":
        return rk
    return array("I", rk)


def encrypt_rounds(v: int, w: int, t: int, rk, n_rounds: int = DEFAULT_ROUNDS) -> int:
    """Bijective w-bit transform: tweak mix, then n_rounds of XOR + rotate."""
    _check_rounds_args(v, w, n_rounds)
    t &= 0xFFFFFFFF
    if _speedups is not None and w <= _C_MAX_WIDTH:
        return _speedups.encrypt_rounds_raw(v, w, t, _as_u32_buffer(rk), n_rounds)
    return _rounds.encrypt_rounds_raw(v, w, t, rk, n_rounds)


def decrypt_rounds(c: int, w: int, t: int, rk, n_rounds: int = DEFAULT_ROUNDS) -> int:
    """Exact inverse of encrypt_rounds on the pre-constraint domain."""
    _check_rounds_args(c, w, n_rounds)
    t &= 0xFFFFFFFF
    if _speedups is not None and w <= _C_MAX_WIDTH:
        return _speedups.decrypt_rounds_raw(c, w, t, _as_u32_buffer(rk), n_rounds)
    return _rounds.decrypt_rounds_raw(c, w, t, rk, n_rounds)


def encrypt_component(
    value: int,
    kind: str,
    d: int,
    key: bytes,
    rk,
    n_rounds: int = DEFAULT_ROUNDS,
) -> int:
    """Encrypt one coordinate part, constrained to its plaintext digit class.

    The range type is taken from the plaintext value so a 3-digit longitude
    integer always encrypts to a 3-digit longitude integer.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown component kind {kind!r}")
    if value < 0:
        raise DomainError("component value must be non-negative")
    int_kind = is_int_part(kind)
    if not int_kind and value >= 10**d:
        raise DomainError(f"fraction {value} does not fit in {d} digits")
    w = mask_width(value, int_kind, d)
    t = compute_tweak(kind, str(value), key)
    c = encrypt_rounds(value & ((1 << w) - 1), w, t, rk, n_rounds)
    if int_kind:
        return range_constrain(c, range_type(value, is_lon(kind), True))
    return fraction_constrain(c, d)


class CoordinateCipher:
    """Master key, derived schedule and round count bound together.

    Instances are immutable after construction and safe to share across
    worker threads.
    """

    def __init__(self, key: bytes, n_rounds: int = DEFAULT_ROUNDS):
        from .sm4 import derive_round_keys

        self.key = check_key(key)
        if n_rounds < 1:
            raise DomainError(f"round count must be >= 1, got {n_rounds}")
        self.n_rounds = n_rounds
        self.round_keys = derive_round_keys(self.key)
        self._rk_buf = array("I", self.round_keys)
        self._key_hash = hashlib.md5(self.key).digest()

    def tweak(self, kind: str, value_text: str) -> int:
        digest = hashlib.md5(
            kind.encode("ascii") + b":" + value_text.encode("ascii") + self._key_hash
        ).digest()
        return int.from_bytes(digest[:4], "big")

    def encrypt_component(self, value: int, kind: str, d: int = 0) -> int:
        int_kind = is_int_part(kind)
        w = mask_width(value, int_kind, d)
        t = self.tweak(kind, str(value))
        c = encrypt_rounds(value, w, t, self._rk_buf, self.n_rounds)
        if int_kind:
            return range_constrain(c, range_type(value, is_lon(kind), True))
        return fraction_constrain(c, d)

    def encrypt_number(self, n: DecimalNumber, axis: str) -> DecimalNumber:
        """Encrypt one coordinate: sign passes through, parts independently."""
        enc_int = self.encrypt_component(n.int_part, f"{axis}_int")
        enc_frac = self.encrypt_component(n.frac_value, f"{axis}_frac", n.frac_digits)
        return DecimalNumber(n.sign, enc_int, enc_frac, n.frac_digits)
