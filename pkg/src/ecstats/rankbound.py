"""Exact rank-distribution and rank-moment bounds.

Everything returned here is a :class:`fractions.Fraction` except the
test function values and the quadrature, which are floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from scipy import integrate

HALF = Fraction(1, 2)
SIXTH = Fraction(1, 6)

# Lower bounds on P(rank <= a), six decimals, as published.
REFERENCE_CDF_TABLE = {
    11: "0.935185", 12: "0.963541", 13: "0.976666", 14: "0.983796", 15: "0.988095",
    16: "0.990885", 17: "0.992798", 18: "0.994166", 19: "0.995179", 20: "0.995949",
    21: "0.996548", 22: "0.998033", 23: "0.999051", 24: "0.999488", 25: "0.999699",
    26: "0.999812", 27: "0.999877", 28: "0.999916", 34: "0.999985", 35: "0.999988",
}


def sigma(n: int) -> Fraction:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return Fraction(2, 9 * n)


def phi(n: int, x: float) -> float:
    """sin^2(pi sigma x) / (2 pi x)^2, with value sigma^2/4 at 0."""
    s = float(sigma(n))
    if x == 0:
        return s * s / 4
    return math.sin(math.pi * s * x) ** 2 / (2 * math.pi * x) ** 2


def phi_hat(n: int, u: float) -> float:
    """(sigma - |u|)/4 on [-sigma, sigma], zero outside."""
    s = float(sigma(n))
    if abs(u) >= s:
        return 0.0
    return 0.5 * (0.5 * s - 0.5 * abs(u))


def integral_closed_form(n: int) -> Fraction:
    """sigma^4 / 96."""
    return sigma(n) ** 4 / 96


def integral_identity_exact(n: int) -> bool:
    """sigma^4/96 == phi(0)^2 / 6 in exact arithmetic."""
    phi0 = sigma(n) ** 2 / 4
    return integral_closed_form(n) == phi0**2 / 6


def check_integral_identity(n: int, tol: float = 1e-12) -> tuple[float, float]:
    """(quadrature of |u| phi_hat(u)^2 over R, sigma^4/96)."""
    s = float(sigma(n))
    g = lambda u: abs(u) * phi_hat(n, u) ** 2
    # split at the kink; outside [-s, s] the integrand vanishes
    left, _ = integrate.quad(g, -s, 0.0, epsabs=tol, epsrel=0)
    right, _ = integrate.quad(g, 0.0, s, epsabs=tol, epsrel=0)
    return left + right, float(integral_closed_form(n))


def f(t: int) -> Fraction:
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    return sum(
        (comb(2 * t, 2 * k) * HALF ** (2 * t - 2 * k) * factorial(2 * k) * SIXTH**k for k in range(t + 1)),
        Fraction(0),
    )


def paired_sum(size: int) -> Fraction:
    """Sum over even-size subsets S2 of a set of `size` elements of (1/2)^|S \\ S2| |S2|! (1/6)^(|S2|/2)."""
    return sum(
        (comb(size, k) * HALF ** (size - k) * factorial(k) * SIXTH ** (k // 2) for k in range(0, size + 1, 2)),
        Fraction(0),
    )


def tail_bound(n: int, C) -> Fraction:
    """Upper bound on P(rank >= (1 + C) 9n)."""
    C = Fraction(C)
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return f(n) / (C * 9 * n) ** (2 * n)


@dataclass(frozen=True)
class RankBoundRow:
    a: int
    bound: Fraction
    chosen_l: int

    @property
    def truncated(self) -> str:
        return truncate_decimal(self.bound, 6)


def truncate_decimal(x: Fraction, places: int) -> str:
    """Decimal expansion of 0 <= x cut (not rounded) after `places` digits."""
    if x < 0:
        raise ValueError("only non-negative values")
    scaled = x.numerator * 10**places // x.denominator
    whole, frac = divmod(scaled, 10**places)
    return f"{whole}.{frac:0{places}d}"


def cdf_lower_bound(a: int) -> RankBoundRow:
    """Lower bound on P(rank <= a), minimising over l = 1..floor(a/9)."""
    if a < 11:
        raise ValueError(f"a must be >= 11, got {a}")
    n = a // 9
    best = None
    for l in range(1, n + 1):
        tail = f(l) / Fraction(a + 1 - 9 * l) ** (2 * l)
        if best is None or tail < best[0]:
            best = (tail, l)
    return RankBoundRow(a, 1 - best[0], best[1])


def moment_bound(n: int) -> Fraction:
    """Upper bound on the n-th moment of analytic rank, summed by subset sizes."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    inv_sigma = 1 / sigma(n)
    return sum(
        (comb(n, s) * inv_sigma ** (n - s) * paired_sum(s) for s in range(n + 1)),
        Fraction(0),
    )


def moment_bound_by_subsets(n: int) -> Fraction:
    """Same value as :func:`moment_bound` by literal enumeration of S and S2 (2^n * 2^|S| terms)."""
    inv_sigma = 1 / sigma(n)
    universe = range(n)
    total = Fraction(0)
    for s in range(n + 1):
        for S in itertools.combinations(universe, s):
            inner = Fraction(0)
            for k in range(0, s + 1, 2):
                for _S2 in itertools.combinations(S, k):
                    inner += HALF ** (s - k) * factorial(k) * SIXTH ** (k // 2)
            total += inv_sigma ** (n - s) * inner
    return total
