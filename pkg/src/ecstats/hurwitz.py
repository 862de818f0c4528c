"""Hurwitz class numbers by enumeration of reduced binary quadratic forms.

H(d) counts SL2(Z)-classes of positive definite forms ax^2 + bxy + cy^2
of discriminant b^2 - 4ac = -d, primitive or not, where the classes of
a(x^2 + y^2) and a(x^2 + xy + y^2) are weighted 1/2 and 1/3.  All
arithmetic is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """Reduced forms (a, b, c) with b^2 - 4ac = -d.

    Reduced means |b| <= a <= c, and b >= 0 whenever |b| == a or a == c.
    """
    _check_discriminant(d)
    forms = []
    # a <= sqrt(d/3) follows from 4a^2 <= 4ac = b^2 + d <= a^2 + d
    amax = math.isqrt(d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b + d) % (4 * a):
                continue
            c = (b * b + d) // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            forms.append((a, b, c))
    return forms


def _check_discriminant(d: int) -> None:
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    if (-d) % 4 not in (0, 1):
        raise ValueError(f"-{d} is not a discriminant (must be 0 or 1 mod 4)")


@lru_cache(maxsize=None)
def hurwitz_class_number(d: int) -> Fraction:
    """H(-d) as an exact rational."""
    total = Fraction(0)
    for a, b, c in reduced_forms(d):
        if b == 0 and a == c:
            total += Fraction(1, 2)
        elif a == b == c:
            total += Fraction(1, 3)
        else:
            total += 1
    return total


def weil_range(p: int) -> range:
    """Integers a with a^2 < 4p."""
    r = math.isqrt(4 * p)
    if r * r == 4 * p:
        r -= 1
    return range(-r, r + 1)


def hurwitz_moment(p: int, r: int) -> Fraction:
    """Sum over |a| <= 2 sqrt(p) of a^r H(4p - a^2)."""
    return sum((Fraction(a**r) * hurwitz_class_number(4 * p - a * a) for a in weil_range(p)), Fraction(0))


def _check_p(p: int) -> None:
    if p < 5:
        raise ValueError(f"need p >= 5, got {p}")


def kronecker_hurwitz_first_moment(p: int) -> Fraction:
    """Sum of H(4p - a^2) over the Weil range; equals 2p for primes p."""
    _check_p(p)
    return hurwitz_moment(p, 0)


def eichler_selberg_second_moment(p: int) -> Fraction:
    """Sum of a^2 H(4p - a^2) over the Weil range; equals 2p^2 - 2 for primes p."""
    _check_p(p)
    return hurwitz_moment(p, 2)


def odd_moment_vanishing(p: int, r: int) -> Fraction:
    _check_p(p)
    if r % 2 == 0 or r < 1:
        raise ValueError(f"r must be an odd positive integer, got {r}")
    return hurwitz_moment(p, r)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"
