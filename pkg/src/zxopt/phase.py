"""Exact phases, stored as rational multiples of pi in [0, 2)."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Phase = Fraction
PhaseLike = Union[Fraction, int, str]

ZERO = Fraction(0)
HALF = Fraction(1, 2)
PI = Fraction(1)


def phase(value: PhaseLike = 0) -> Fraction:
    """Normalize ``value`` (in units of pi) into ``[0, 2)``."""
    if isinstance(value, float):
        raise TypeError("phases must be exact; got a float")
    return Fraction(value) % 2


def is_clifford(p: Fraction) -> bool:
    return (p * 2).denominator == 1


def is_pauli(p: Fraction) -> bool:
    return p.denominator == 1


def is_proper_clifford(p: Fraction) -> bool:
    """True for +-pi/2."""
    return p.denominator == 2


def is_odd_quarter(p: Fraction) -> bool:
    """True when ``p`` is an odd multiple of pi/4 (a T-like phase)."""
    q = p * 4
    return q.denominator == 1 and q.numerator % 2 == 1


def to_radians(p: Fraction) -> float:
    import math

    return float(p) * math.pi
