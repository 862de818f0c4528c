"""The height-ordered family of curves y^2 = x^3 + ax + b.

A pair (a, b) belongs to the family E(X) when

    4a^3 + 27b^2 != 0,   max(|a|^3, b^2) <= X,

and no prime q has q^4 | a and q^6 | b.  The last condition picks one
representative per isomorphism class over Q and makes the model minimal
at every prime q >= 5.

Two enumeration paths are provided: :func:`enumerate_family` yields
:class:`CurveParams` one at a time in lexicographic (a, b) order, and
:func:`family_arrays` returns the same pairs as numpy columns for an
a-range, which is what the batch classifiers consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

ZETA_10 = math.pi**10 / 93555
FAMILY_CONSTANT = 4 / ZETA_10

# 31 * X must fit in int64 for the vectorised discriminant.
MAX_HEIGHT = 10**17


@dataclass(frozen=True, order=True)
class CurveParams:
    a: int
    b: int

    def __iter__(self):
        yield self.a
        yield self.b


@dataclass(frozen=True)
class CongruenceClass:
    p: int
    m: int
    alpha: int
    beta: int

    def __post_init__(self):
        if self.p < 5 or not is_prime(self.p):
            raise ValueError(f"congruence class needs a prime p >= 5, got {self.p}")
        if self.m < 1:
            raise ValueError(f"modulus exponent must be >= 1, got {self.m}")
        q = self.p**self.m
        if not (0 <= self.alpha < q and 0 <= self.beta < q):
            raise ValueError(f"residues must lie in [0, {q})")

    @property
    def modulus(self) -> int:
        return self.p**self.m


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    q = 3
    while q * q <= n:
        if n % q == 0:
            return False
        q += 2
    return True


def icbrt(n: int) -> int:
    """Largest integer r >= 0 with r^3 <= n, for n >= 0."""
    if n < 0:
        raise ValueError("icbrt of a negative number")
    r = int(round(n ** (1 / 3)))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def height(a: int, b: int) -> int:
    return max(abs(a) ** 3, b * b)


def discriminant(a: int, b: int) -> int:
    """4a^3 + 27b^2; differs from the usual discriminant by the unit -16 at p >= 5."""
    return 4 * a**3 + 27 * b**2


def satisfies_minimality(a: int, b: int) -> bool:
    """True iff no prime q has q^4 | a and q^6 | b.

    Trial division runs over every integer q >= 2 rather than primes only;
    the answer is the same, because a composite q violating the condition
    has a prime factor that violates it too.
    """
    if a == 0 and b == 0:
        return False
    if a == 0:
        q = 2
        while q**6 <= abs(b):
            if b % q**6 == 0:
                return False
            q += 1
        return True
    q = 2
    while q**4 <= abs(a):
        if a % q**4 == 0 and b % q**6 == 0:
            return False
        q += 1
    return True


def is_member(a: int, b: int, x: int) -> bool:
    return (
        height(a, b) <= x
        and discriminant(a, b) != 0
        and satisfies_minimality(a, b)
    )


def coefficient_bounds(x: int) -> tuple[int, int]:
    """(max |a|, max |b|) for height bound x."""
    _check_height(x)
    return icbrt(x), math.isqrt(x)


def _check_height(x: int) -> None:
    if x < 1:
        raise ValueError(f"height bound must be >= 1, got {x}")
    if x > MAX_HEIGHT:
        raise ValueError(f"height bound {x} exceeds supported maximum {MAX_HEIGHT}")


def enumerate_family(x: int) -> Iterator[CurveParams]:
    """Yield E(x) in lexicographic (a, b) order."""
    amax, _ = coefficient_bounds(x)
    for a in range(-amax, amax + 1):
        aa, bb = _row(a, x)
        for b in bb.tolist():
            assert is_member(a, b, x), (a, b)
            yield CurveParams(a, b)


def _excluded_moduli(a: int, bmax: int) -> list[int]:
    """Moduli q^6 such that b == 0 mod q^6 puts (a, b) outside condition (M)."""
    out = []
    if a == 0:
        q = 2
        while q**6 <= bmax:
            if is_prime(q):
                out.append(q**6)
            q += 1
        return out
    q = 2
    while q**4 <= abs(a):
        if a % q**4 == 0 and is_prime(q):
            out.append(q**6)
        q += 1
    return out


def _row(a: int, x: int) -> tuple[int, np.ndarray]:
    bmax = math.isqrt(x)
    b = np.arange(-bmax, bmax + 1, dtype=np.int64)
    keep = 4 * a**3 + 27 * b * b != 0
    for q6 in _excluded_moduli(a, bmax):
        keep &= b % q6 != 0
    if a == 0:
        keep &= b != 0
    return a, b[keep]


def family_arrays(x: int, a_lo: int | None = None, a_hi: int | None = None):
    """Columns (a, b) of E(x) restricted to a_lo <= a <= a_hi, lexicographic."""
    amax, _ = coefficient_bounds(x)
    lo = -amax if a_lo is None else max(a_lo, -amax)
    hi = amax if a_hi is None else min(a_hi, amax)
    a_parts, b_parts = [], []
    for a in range(lo, hi + 1):
        _, bb = _row(a, x)
        a_parts.append(np.full(bb.shape, a, dtype=np.int64))
        b_parts.append(bb)
    if not a_parts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    return np.concatenate(a_parts), np.concatenate(b_parts)


def family_size(x: int) -> int:
    amax, _ = coefficient_bounds(x)
    return sum(_row(a, x)[1].size for a in range(-amax, amax + 1))


def partition_a_range(x: int, parts: int) -> list[tuple[int, int]]:
    """Split [-amax, amax] into at most `parts` contiguous, disjoint, ordered ranges."""
    amax, _ = coefficient_bounds(x)
    n = 2 * amax + 1
    parts = max(1, min(parts, n))
    bounds = [(-amax + (n * i) // parts, -amax + (n * (i + 1)) // parts - 1) for i in range(parts)]
    return [(lo, hi) for lo, hi in bounds if lo <= hi]


def count_congruence_class(cls: CongruenceClass, x: int) -> int:
    """Number of (a, b) in E(x) with (a, b) == (alpha, beta) mod p^m, by direct enumeration."""
    amax, bmax = coefficient_bounds(x)
    q = cls.modulus
    first_a = -amax + (cls.alpha + amax) % q
    first_b = -bmax + (cls.beta + bmax) % q
    count = 0
    for a in range(first_a, amax + 1, q):
        excluded = _excluded_moduli(a, bmax)
        for b in range(first_b, bmax + 1, q):
            if 4 * a**3 + 27 * b * b == 0:
                continue
            if a == 0 and b == 0:
                continue
            if any(b % q6 == 0 for q6 in excluded):
                continue
            count += 1
    return count


def congruence_main_term(cls: CongruenceClass, x: int) -> float | None:
    """Asymptotic main term for count_congruence_class, or None if no closed form applies.

    Classes with p^4 not dividing alpha or p^6 not dividing beta get
    p^(-2m) * p^10/(p^10 - 1) * (4/zeta(10)) * x^(5/6); the class (0, 0)
    mod p gets (p^8 - 1)/(p^10 - 1) times the same family constant.
    """
    p, m = cls.p, cls.m
    scale = FAMILY_CONSTANT * x ** (5 / 6)
    if m == 1 and cls.alpha == 0 and cls.beta == 0:
        return (p**8 - 1) / (p**10 - 1) * scale
    if cls.alpha % p**4 != 0 or cls.beta % p**6 != 0:
        return p ** (-2 * m) * p**10 / (p**10 - 1) * scale
    return None
