"""Exact rationals and their canonical "p/q" string form.

All quantities in this package (labels, distances, sequence terms, epsilons)
are `fractions.Fraction` values; nothing is ever a float.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidDeclaration


def parse_rational(text) -> Fraction:
    """Parse "p/q" or "p" (also accepts int/Fraction passthrough)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise InvalidDeclaration(f"floats are not accepted, got {text!r}")
    if not isinstance(text, str):
        raise InvalidDeclaration(f"not a rational: {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidDeclaration(f"not a rational: {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Canonical string: "p" for integers, "p/q" otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
