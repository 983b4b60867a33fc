"""Exact rational helpers built on :class:`fractions.Fraction`."""

from __future__ import annotations

from fractions import Fraction
from math import lcm

Rat = Fraction


def rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` / decimal strings to a Fraction.

    Floats are refused: every quantity in this package must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"cannot build an exact rational from {type(value).__name__}")


def parse_rat(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def fmt_rat(q: Fraction) -> str:
    """Lossless ``p/q`` text (``p`` alone for integers)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def is_finite_decimal(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def to_decimal(q: Fraction, digits: int = 12) -> str:
    """Decimal text; exact when the denominator has only factors 2 and 5."""
    if q.denominator == 1:
        return str(q.numerator)
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole, rem = divmod(q.numerator, q.denominator)
    out = []
    n = 0
    while rem and n < (10_000 if is_finite_decimal(q) else digits):
        rem *= 10
        dig, rem = divmod(rem, q.denominator)
        out.append(str(dig))
        n += 1
    return f"{sign}{whole}." + ("".join(out) or "0")


def bitlen(q: Fraction) -> int:
    """Encoding length of a rational: bits of |numerator| plus bits of denominator."""
    return abs(q.numerator).bit_length() + q.denominator.bit_length()


def common_denominator(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out
