"""Parsing, formatting, and integer-scaling helpers for exact rationals.

All utilities in this package are `fractions.Fraction`.  Serialized form
is "p/q" (reduced) or a plain integer string; decimal strings such as
"0.5" are accepted on input and normalized.  For large enumeration
kernels we rescale a family of rationals to a shared integer grid so
the hot loops can run on machine integers (numpy int64 when the values
fit, arbitrary-precision Python ints otherwise).
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .errors import ValidationError

_INT64_SAFE = 2**62


def parse_rational(text) -> Fraction:
    """Parse "p/q", integer, or decimal text into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise ValidationError(
            f"refusing float {text!r}: pass a string or Fraction for exactness")
    if not isinstance(text, str):
        raise ValidationError(f"cannot parse rational from {type(text).__name__}")
    body = text.strip()
    try:
        return Fraction(body)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"malformed rational {text!r}: {exc}") from None


def format_rational(value: Fraction) -> str:
    """Canonical serialized form: integer string or reduced "p/q"."""
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


class ScaledInts:
    """A family of rationals rescaled onto one common integer grid.

    `scale` is the common denominator: each stored integer equals the
    original value times `scale`, exactly.  `vectors` mirrors the input
    nesting.  `as_numpy` is set when all magnitudes fit comfortably in
    int64, in which case `rows` holds int64 arrays.
    """

    def __init__(self, vectors):
        denoms = [f.denominator for row in vectors for f in row]
        self.scale = lcm(*denoms) if denoms else 1
        self.vectors = [
            [f.numerator * (self.scale // f.denominator) for f in row]
            for row in vectors
        ]
        peak = max((abs(v) for row in self.vectors for v in row), default=0)
        self.as_numpy = peak < _INT64_SAFE
        if self.as_numpy:
            self.rows = [np.array(row, dtype=np.int64) for row in self.vectors]
        else:
            self.rows = self.vectors

    def to_fraction(self, scaled: int) -> Fraction:
        return Fraction(int(scaled), self.scale)
