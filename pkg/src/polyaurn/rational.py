"""Exact rational scalars: parsing, formatting, and coercion helpers.

Rationals are plain fractions.Fraction throughout the package; files carry
them as strings "p/q" (or bare integer strings).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, and "p/q" strings to Fraction.

    Floats are rejected: exact arithmetic is part of the algebra contract,
    and silently rationalizing a float would hide rounding.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InputError(f"expected an exact rational, got {type(value).__name__}: {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or an integer string into a Fraction."""
    s = text.strip()
    try:
        if "/" in s:
            num, _, den = s.partition("/")
            d = int(den)
            if d == 0:
                raise InputError(f"zero denominator in rational {text!r}")
            return Fraction(int(num), d)
        return Fraction(int(s))
    except ValueError as exc:
        raise InputError(f"malformed rational {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "p/q", or "p" when the denominator is one."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
