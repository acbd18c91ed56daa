"""Valuation values shared by both engines.

A valuation is a ``Fraction`` (normalized so that ord_p(p) = 1), the float
``INF`` for an exact zero, or an ``AtLeast`` marker when truncated p-adic
arithmetic could only bound it from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

INF = math.inf


@dataclass(frozen=True)
class AtLeast:
    """The value is >= ``bound``; truncated arithmetic saw no nonzero digit below it."""

    bound: Fraction

    def __str__(self) -> str:
        return f">={fmt_frac(self.bound)}"


Valuation = Union[Fraction, float, AtLeast]


def fmt_frac(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_val(v: Valuation) -> str:
    """Serialize as "a/b", "inf" or ">=a/b"."""
    if isinstance(v, AtLeast):
        return str(v)
    if v == INF:
        return "inf"
    return fmt_frac(v)


def parse_val(text: str) -> Valuation:
    text = text.strip()
    if text == "inf":
        return INF
    if text.startswith(">="):
        return AtLeast(Fraction(text[2:]))
    return Fraction(text)


def is_finite(v: Valuation) -> bool:
    return isinstance(v, Fraction)
