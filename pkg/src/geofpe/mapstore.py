"""Composite-key mapping store: (coordinate id, encrypted value) -> original.

The range/fraction constraints are lossy, so decryption is driven by this
store.  Four independent maps cover the longitude/latitude integer and
fraction parts; collisions between different originals on the same encrypted
value are expected, counted, and harmless thanks to the coordinate id in the
key.
"""

from __future__ import annotations

import csv
import struct
import threading
import zlib
from dataclasses import dataclass
from fractions import Fraction

from .cipher import KINDS

FRESH = "fresh"
CONFLICT = "conflict_detected"

_MAGIC = b"GFPEMAP1"
_REC = struct.Struct("<BQQQB")  # kind, coord_id, enc_value, orig_value, d
_COUNT = struct.Struct("<Q")
_KIND_CODE = {kind: i for i, kind in enumerate(KINDS)}


class IntegrityError(ValueError):
    """A composite key was re-recorded with a contradictory original value."""


class MapFormatError(ValueError):
    """The map file is not a readable GFPEMAP1 store."""


@dataclass(frozen=True)
class Ambiguous:
    """Fuzzy lookup hit several distinct originals."""

    candidates: int


class MappingStore:
    """Thread-safe store of the four composite-key maps plus conflict counters.

    The conflict counter of a kind counts insertions that attached a new
    distinct original value to an encrypted value that already had one, which
    makes counters (and the maps) independent of insertion order.
    """

    def __init__(self) -> None:
        self._maps: dict[str, dict[tuple[int, int], tuple[int, int]]] = {
            k: {} for k in KINDS
        }
        self._index: dict[str, dict[int, set[int]]] = {k: {} for k in KINDS}
        self._conflicts: dict[str, int] = {k: 0 for k in KINDS}
        self._lock = threading.Lock()

    def record(
        self, kind: str, coord_id: int, enc_value: int, orig_value: int, d: int = 0
    ) -> str:
        """Store one mapping; returns CONFLICT when enc_value already maps to
        a different original under this kind.  Never interrupts the flow."""
        key = (coord_id, enc_value)
        with self._lock:
            kmap = self._maps[kind]
            existing = kmap.get(key)
            if existing is not None:
                if existing != (orig_value, d):
                    raise IntegrityError(
                        f"{kind} composite key {key} already maps to "
                        f"{existing[0]} (d={existing[1]}), refusing "
                        f"{orig_value} (d={d})"
                    )
                return FRESH
            originals = self._index[kind].setdefault(enc_value, set())
            conflict = bool(originals) and orig_value not in originals
            kmap[key] = (orig_value, d)
            originals.add(orig_value)
            if conflict:
                self._conflicts[kind] += 1
                return CONFLICT
            return FRESH

    def lookup_exact(self, kind: str, coord_id: int, enc_value: int) -> int | None:
        entry = self._maps[kind].get((coord_id, enc_value))
        return None if entry is None else entry[0]

    def lookup_fuzzy(self, kind: str, enc_value: int) -> int | Ambiguous | None:
        """Fallback lookup by encrypted value alone.

        Returns the original when exactly one distinct value maps to
        enc_value, an Ambiguous marker with the candidate count when several
        do, and None when the value is unknown.
        """
        originals = self._index[kind].get(enc_value)
        if not originals:
            return None
        if len(originals) > 1:
            return Ambiguous(len(originals))
        return next(iter(originals))

    def conflicts(self, kind: str) -> int:
        return self._conflicts[kind]

    def conflict_rate(self, kind: str) -> Fraction:
        """Share of distinct encrypted values mapping to >= 2 originals."""
        index = self._index[kind]
        if not index:
            return Fraction(0)
        colliding = sum(1 for originals in index.values() if len(originals) >= 2)
        return Fraction(colliding, len(index))

    def entry_count(self, kind: str) -> int:
        return len(self._maps[kind])

    def _sorted_entries(self, kind: str):
        return sorted(
            (coord_id, enc, orig, d)
            for (coord_id, enc), (orig, d) in self._maps[kind].items()
        )

    def save(self, path) -> None:
        """Write the store: magic, then per kind an entry count and fixed-width
        records in canonical order, trailed by a CRC32."""
        buf = bytearray(_MAGIC)
        with self._lock:
            for kind in KINDS:
                code = _KIND_CODE[kind]
                entries = self._sorted_entries(kind)
                buf += _COUNT.pack(len(entries))
                for coord_id, enc, orig, d in entries:
                    buf += _REC.pack(code, coord_id, enc, orig, d)
        buf += struct.pack("<I", zlib.crc32(buf))
        with open(path, "wb") as fh:
            fh.write(buf)

    @classmethod
    def load(cls, path) -> "MappingStore":
        with open(path, "rb") as fh:
            data = fh.read()
        if len(data) < len(_MAGIC) + 4:
            raise MapFormatError(f"{path}: truncated map file")
        if data[: len(_MAGIC)] != _MAGIC:
            raise MapFormatError(
                f"{path}: bad magic {data[:8]!r}, expected {_MAGIC!r}"
            )
        (crc_stored,) = struct.unpack("<I", data[-4:])
        if zlib.crc32(data[:-4]) != crc_stored:
            raise MapFormatError(f"{path}: checksum failure")
        store = cls()
        pos = len(_MAGIC)
        body = data[:-4]
        for kind in KINDS:
            if pos + _COUNT.size > len(body):
                raise MapFormatError(f"{path}: truncated map file")
            (count,) = _COUNT.unpack_from(body, pos)
            pos += _COUNT.size
            code = _KIND_CODE[kind]
            for _ in range(count):
                if pos + _REC.size > len(body):
                    raise MapFormatError(f"{path}: truncated map file")
                rec_code, coord_id, enc, orig, d = _REC.unpack_from(body, pos)
                pos += _REC.size
                if rec_code != code:
                    raise MapFormatError(
                        f"{path}: record kind {rec_code} in {kind} section"
                    )
                store.record(kind, coord_id, enc, orig, d)
        if pos != len(body):
            raise MapFormatError(f"{path}: {len(body) - pos} trailing bytes")
        return store

    def export_csv(self, path) -> None:
        """Diagnostic audit export, canonical order."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "coord_id", "enc_value", "orig_value"])
            with self._lock:
                for kind in KINDS:
                    for coord_id, enc, orig, _d in self._sorted_entries(kind):
                        writer.writerow([kind, coord_id, enc, orig])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MappingStore):
            return NotImplemented
        return self._maps == other._maps and self._conflicts == other._conflicts
