"""Helpers for exact rationals: parsing, formatting, seeded sampling."""

from __future__ import annotations

from fractions import Fraction
from random import Random

#: denominator used when sampling "generic" rationals; large enough that the
#: randomized genericity suites never hit a proper algebraic null set in practice
GENERIC_DENOM = 2**20


def frac(value) -> Fraction:
    """Coerce ints, Fractions, and strings like '7/10' or '3' to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("refusing float -> rational coercion; pass a string or Fraction")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(value: Fraction) -> str:
    """Lowest-terms 'p/q' (or 'p' for integers), the wire format for rationals."""
    return str(Fraction(value))


def rand_frac(rng: Random, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1),
              denom: int = GENERIC_DENOM) -> Fraction:
    """Uniform rational in [lo, hi] with denominator dividing `denom`."""
    return lo + (hi - lo) * Fraction(rng.randrange(denom + 1), denom)


def rand_vec(rng: Random, dim: int, **kw) -> tuple[Fraction, ...]:
    return tuple(rand_frac(rng, **kw) for _ in range(dim))
