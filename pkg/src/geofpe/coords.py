"""Exact decimal representation of geographic coordinates.

Coordinates are carried as sign / integer-part / fraction-value / digit-count
quadruples end to end, never as binary floats, so a decrypt can reproduce the
original text byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Canonical decimal text: optional sign, integer part without leading zeros,
# optional fraction.  No exponent notation.
_DECIMAL_RE = re.compile(r"^[+-]?(0|[1-9][0-9]*)(\.[0-9]+)?$")

LON_MAX = 180
LAT_MAX = 90


class ParseError(ValueError):
    """Raised when a coordinate string is not well-formed decimal text."""


@dataclass(frozen=True, slots=True)
class DecimalNumber:
    """A decimal value split into sign, integer part and fraction digits.

    ``frac_value`` keeps the fraction as an integer; ``frac_digits`` keeps the
    written digit count so trailing/leading zeros survive a round trip
    (``frac_value < 10**frac_digits``).
    """

    sign: int  # +1 or -1
    int_part: int
    frac_value: int
    frac_digits: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.int_part < 0 or self.frac_value < 0 or self.frac_digits < 0:
            raise ValueError("negative component in DecimalNumber")
        if self.frac_value >= 10**self.frac_digits:
            raise ValueError(
                f"frac_value {self.frac_value} needs more than "
                f"{self.frac_digits} digits"
            )

    def to_float(self) -> float:
        """Approximate float value; for metrics only, never for round trips."""
        return self.sign * (self.int_part + self.frac_value / 10**self.frac_digits)


@dataclass(frozen=True, slots=True)
class GeoPoint:
    lon: DecimalNumber
    lat: DecimalNumber


def decompose(text: str) -> DecimalNumber:
    """Split decimal text into (sign, int part, fraction value, digit count).

    Accepts canonical decimal strings only (no exponent, no leading zeros on
    the integer part, fraction digits present when a '.' is).  Raises
    ParseError naming the offending input otherwise.
    """
    if not _DECIMAL_RE.match(text):
        raise ParseError(f"malformed decimal text: {text!r}")
    sign = -1 if text[0] == "-" else 1
    body = text.lstrip("+-")
    if "." in body:
        int_text, frac_text = body.split(".", 1)
        return DecimalNumber(sign, int(int_text), int(frac_text), len(frac_text))
    return DecimalNumber(sign, int(body), 0, 0)


def recombine(n: DecimalNumber) -> str:
    """Inverse of decompose: canonical text with exactly ``frac_digits`` digits.

    Positive values carry no sign character; a zero digit count emits no
    decimal point.
    """
    sign = "-" if n.sign < 0 else ""
    if n.frac_digits == 0:
        return f"{sign}{n.int_part}"
    return f"{sign}{n.int_part}.{n.frac_value:0{n.frac_digits}d}"


def _abs_within(n: DecimalNumber, bound: int) -> bool:
    # |value| <= bound, exactly: int*10^d + frac <= bound*10^d
    scale = 10**n.frac_digits
    return n.int_part * scale + n.frac_value <= bound * scale


def validate_point(p: GeoPoint) -> str | None:
    """Return None when the point is in range, else the failing axis.

    Longitude must lie in [-180, 180] and latitude in [-90, 90]; the check is
    exact integer arithmetic so boundary values are handled precisely.
    """
    if not _abs_within(p.lon, LON_MAX):
        return "lon"
    if not _abs_within(p.lat, LAT_MAX):
        return "lat"
    return None
