"""Local-condition densities: closed forms, empirical counts, residue-level checks.

A local condition at p is one of good, bad, mult, split, nonsplit,
additive, a trace value a_p = a, or a Kodaira type.  Its closed-form
density c(p) is an exact rational carrying the factor
p^10 / (p^10 - 1) that accounts for the minimality condition at p.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import family
from .census import Census, LocalType, compute_census
from .hurwitz import hurwitz_class_number, weil_range
from .reduction import KodairaType, ReductionClass, local_trace_table

KINDS = ("good", "bad", "mult", "split", "nonsplit", "additive", "trace", "kodaira")

# single-condition and joint tolerances: relative floor and constant on the h-term
REL_TOL = 0.02
JOINT_REL_TOL = 0.03
H_CONST = 5


@dataclass(frozen=True)
class LocalCondition:
    p: int
    kind: str
    a: int | None = None
    kodaira: KodairaType | None = None

    def __post_init__(self):
        if self.p < 5 or not family.is_prime(self.p):
            raise ValueError(f"local conditions need a prime p >= 5, got {self.p}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown condition kind {self.kind!r}")
        if self.kind == "trace":
            if self.a is None or self.a * self.a >= 4 * self.p:
                raise ValueError(f"trace value {self.a} outside the Weil range at {self.p}")
        if self.kind == "kodaira" and self.kodaira is None:
            raise ValueError("kodaira condition needs a type")

    @classmethod
    def parse(cls, text: str) -> "LocalCondition":
        """'good@5', 'split@7', 'ap=-2@5', 'I1@5', 'I0*@7', 'II*@5', ..."""
        try:
            body, p_text = text.strip().rsplit("@", 1)
            p = int(p_text)
        except ValueError:
            raise ValueError(f"condition {text!r} is not of the form kind@p") from None
        key = body.lower()
        aliases = {"addi": "additive", "non-split": "nonsplit", "multiplicative": "mult"}
        key = aliases.get(key, key)
        if key in KINDS and key not in ("trace", "kodaira"):
            return cls(p, key)
        if key.startswith("ap="):
            return cls(p, "trace", a=int(key[3:]))
        return cls(p, "kodaira", kodaira=KodairaType.parse(body))

    def __str__(self) -> str:
        if self.kind == "trace":
            return f"ap={self.a}@{self.p}"
        if self.kind == "kodaira":
            return f"{self.kodaira}@{self.p}"
        return f"{self.kind}@{self.p}"

    def matches(self, t: LocalType) -> bool:
        k = self.kind
        if k == "good":
            return t.good
        if k == "bad":
            return not t.good
        if k == "mult":
            return t.cls.is_multiplicative
        if k == "split":
            return t.cls is ReductionClass.SPLIT
        if k == "nonsplit":
            return t.cls is ReductionClass.NONSPLIT
        if k == "additive":
            return t.cls is ReductionClass.ADDITIVE
        if k == "trace":
            return t.good and t.ap == self.a
        return t.kodaira == self.kodaira


def unit_factor(p: int) -> Fraction:
    return Fraction(p**10, p**10 - 1)


def closed_form_density(lc: LocalCondition) -> Fraction:
    p, u = lc.p, unit_factor(lc.p)
    k = lc.kind
    if k == "good":
        return Fraction(p * p - p, p * p) * u
    if k == "bad":
        return Fraction(p**10 - p, p**11) * u
    if k == "mult":
        return Fraction(p - 1, p * p) * u
    if k in ("split", "nonsplit"):
        return Fraction(p - 1, 2 * p * p) * u
    if k == "additive":
        return Fraction(p**9 - p, p**11) * u
    if k == "trace":
        return (p - 1) * hurwitz_class_number(4 * p - lc.a**2) / (2 * p * p) * u
    t = lc.kodaira
    once = 1 - Fraction(1, p)
    if t.tag == "I0":
        return closed_form_density(LocalCondition(p, "good"))
    if t.tag == "Im":
        return Fraction(1, p**t.m) * once**2 * u
    if t.tag == "Im*":
        return Fraction(1, p ** (t.m + 5)) * once**2 * u
    exponent = {"II": 2, "III": 3, "IV": 4, "I0*": 5, "IV*": 7, "III*": 8, "II*": 9}[t.tag]
    return Fraction(1, p**exponent) * once * u


def modulus_exponent(lc: LocalCondition) -> int:
    if lc.kind != "kodaira":
        return 1
    t = lc.kodaira
    if t.tag == "Im":
        return t.m + 1
    if t.tag == "Im*":
        return t.m + 6
    return {"I0": 1, "II": 2, "III": 3, "IV": 4, "I0*": 5, "IV*": 6, "III*": 5, "II*": 7}[t.tag]


def _h_parts(lc: LocalCondition) -> tuple[float, str]:
    """(coefficient of X^(1/2), description) of the error scale h(X)."""
    p = lc.p
    if lc.kind in ("good", "bad", "additive"):
        return p, "p X^(1/2)"
    if lc.kind in ("mult", "split", "nonsplit"):
        return 1.0, "X^(1/2)"
    if lc.kind == "trace":
        return float(hurwitz_class_number(4 * p - lc.a**2)), "H(a^2 - 4p) X^(1/2)"
    tag = lc.kodaira.tag
    if tag in ("I0", "Im", "Im*", "I0*"):
        return p, "p X^(1/2)"
    if tag in ("II", "III", "IV"):
        return 1.0, "X^(1/2)"
    power = {"IV*": 1, "III*": 3, "II*": 2}[tag]
    return p**-power, f"p^-{power} X^(1/2)"


def error_scale(lc: LocalCondition, x: int) -> float:
    return _h_parts(lc)[0] * math.sqrt(x)


@dataclass(frozen=True)
class DensityRule:
    condition: LocalCondition
    closed_form: Fraction
    modulus_exponent: int
    error_scale: str


def density_rule(lc: LocalCondition) -> DensityRule:
    return DensityRule(lc, closed_form_density(lc), modulus_exponent(lc), _h_parts(lc)[1])


def density_tolerance(lc: LocalCondition, x: int) -> float:
    cf = float(closed_form_density(lc))
    h_term = H_CONST * error_scale(lc, x) / (family.FAMILY_CONSTANT * x ** (5 / 6))
    return max(REL_TOL * cf, h_term)


def joint_tolerance(conditions: Sequence[LocalCondition], x: int) -> float:
    pred = float(math.prod((closed_form_density(c) for c in conditions), start=Fraction(1)))
    if not conditions:
        return 0.0
    scale = 1.0
    for c in conditions:
        scale *= float(closed_form_density(c) / unit_factor(c.p)) * c.p ** modulus_exponent(c)
    h_term = H_CONST * scale * math.sqrt(x) / (family.FAMILY_CONSTANT * x ** (5 / 6))
    return max(JOINT_REL_TOL * pred, h_term)


@dataclass
class DensityReport:
    conditions: list[str]
    x: int
    count: int
    family_size: int
    closed_form: Fraction
    tolerance: float
    m: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def empirical(self) -> Fraction:
        return Fraction(self.count, self.family_size)

    @property
    def abs_error(self) -> float:
        return abs(float(self.empirical - self.closed_form))

    @property
    def passed(self) -> bool:
        return self.abs_error <= self.tolerance

    def to_dict(self) -> dict:
        primes = [int(c.rsplit("@", 1)[1]) for c in self.conditions]
        return {
            "condition": ",".join(self.conditions),
            "p": primes[0] if len(primes) == 1 else primes,
            "m": self.m[0] if len(self.m) == 1 else self.m,
            "X": self.x,
            "count": self.count,
            "family_size": self.family_size,
            "empirical": _dec(self.empirical),
            "closed_form": _dec(self.closed_form),
            "closed_form_exact": f"{self.closed_form.numerator}/{self.closed_form.denominator}",
            "abs_error": _dec(self.abs_error),
            "tolerance": _dec(self.tolerance),
            "pass": self.passed,
        }


def _dec(v) -> float:
    return float(f"{float(v):.12g}")


def _range_warning(lc: LocalCondition, x: int) -> str | None:
    m = modulus_exponent(lc)
    if lc.p ** (3 * m) > x:
        return f"{lc}: p exceeds X^(1/(3*{m})); the closed form is not expected to hold"
    return None


def empirical_density(lc: LocalCondition, x: int, census: Census | None = None, workers: int = 1) -> DensityReport:
    if census is None:
        census = compute_census(x, [lc.p], workers)
    i = census.index(lc.p)
    count = census.count(lambda key: lc.matches(key[i]))
    report = DensityReport(
        conditions=[str(lc)],
        x=x,
        count=count,
        family_size=census.total,
        closed_form=closed_form_density(lc),
        tolerance=density_tolerance(lc, x),
        m=[modulus_exponent(lc)],
    )
    msg = _range_warning(lc, x)
    if msg:
        warnings.warn(msg, stacklevel=2)
        report.warnings.append(msg)
    return report


def joint_density(
    conditions: Sequence[LocalCondition], x: int, census: Census | None = None, workers: int = 1
) -> DensityReport:
    primes = [c.p for c in conditions]
    if len(set(primes)) != len(primes):
        raise ValueError(f"joint conditions need distinct primes, got {primes}")
    if census is None:
        census = compute_census(x, primes, workers)
    idx = [census.index(p) for p in primes]
    count = census.count(lambda key: all(c.matches(key[i]) for c, i in zip(conditions, idx)))
    pred = math.prod((closed_form_density(c) for c in conditions), start=Fraction(1))
    report = DensityReport(
        conditions=[str(c) for c in conditions],
        x=x,
        count=count,
        family_size=census.total,
        closed_form=pred,
        tolerance=joint_tolerance(conditions, x),
        m=[modulus_exponent(c) for c in conditions],
    )
    modulus = math.prod(c.p ** modulus_exponent(c) for c in conditions)
    if conditions and modulus**3 > x:
        msg = f"product of p^m = {modulus} exceeds X^(1/3)"
        warnings.warn(msg, stacklevel=2)
        report.warnings.append(msg)
    return report


# ---------------------------------------------------------------------------
# exact identities of the table
# ---------------------------------------------------------------------------

def kodaira_total(p: int) -> Fraction:
    """Sum of the closed forms over every Kodaira type, the two I_m series summed as geometric series."""
    lc = lambda tag, m=0: LocalCondition(p, "kodaira", kodaira=KodairaType(tag, m))
    ratio = Fraction(1, p)
    im_series = closed_form_density(lc("Im", 1)) / (1 - ratio)
    imstar_series = closed_form_density(lc("Im*", 1)) / (1 - ratio)
    singles = sum(closed_form_density(lc(t)) for t in ("II", "III", "IV", "I0*", "IV*", "III*", "II*"))
    return closed_form_density(LocalCondition(p, "good")) + im_series + imstar_series + singles


def trace_total(p: int) -> Fraction:
    """Sum of the trace-value closed forms over the Weil range."""
    return sum((closed_form_density(LocalCondition(p, "trace", a=a)) for a in weil_range(p)), Fraction(0))


# ---------------------------------------------------------------------------
# residue-level counts
# ---------------------------------------------------------------------------

MAX_RESIDUE_PAIRS = 2 * 10**8


def _vcap(r: np.ndarray, p: int, cap: int) -> np.ndarray:
    """Valuation of residues mod p^cap; 0 counts as valuation cap (i.e. >= cap)."""
    v = np.zeros(r.shape, dtype=np.int64)
    live = np.ones(r.shape, dtype=bool)
    for k in range(1, cap + 1):
        live &= r % p**k == 0
        v += live
    return v


def _min_valuations(lc: LocalCondition) -> tuple[int, int]:
    if lc.kind in ("bad", "additive"):
        return (1, 1) if lc.kind == "additive" else (0, 0)
    if lc.kind != "kodaira":
        return 0, 0
    return {
        "I0": (0, 0), "Im": (0, 0), "II": (1, 1), "III": (1, 2), "IV": (2, 2),
        "I0*": (2, 3), "Im*": (2, 3), "IV*": (3, 4), "III*": (3, 5), "II*": (4, 5),
    }[lc.kodaira.tag]


def _residue_mask(lc: LocalCondition, alpha: int, beta: np.ndarray, M: int) -> np.ndarray:
    """Which (alpha, beta) mod p^M satisfy lc, read off the valuation criteria directly."""
    p = lc.p
    k = lc.kind
    mod = p**M
    delta = ((4 * alpha**3) % mod + 27 * (beta * beta % mod)) % mod
    if k in ("good", "bad", "mult", "split", "nonsplit", "trace"):
        d0 = delta % p == 0
        if k == "good":
            return ~d0
        if k == "bad":
            return d0 & ~((alpha % p**4 == 0) & (beta % p**6 == 0))
        if k == "mult":
            return d0 & (alpha % p != 0)
        t = local_trace_table(p)[alpha % p, beta % p]
        if k == "trace":
            return ~d0 & (t == lc.a)
        sign = 1 if k == "split" else -1
        return d0 & (alpha % p != 0) & (t == sign)
    if k == "additive":
        return (alpha % p == 0) & (beta % p == 0) & ~((alpha % p**4 == 0) & (beta % p**6 == 0))
    t = lc.kodaira
    va = _vcap(np.array([alpha % p**M]), p, M)[0]
    vb = _vcap(beta, p, M)
    if t.tag == "I0":
        return delta % p != 0
    if t.tag == "Im":
        if alpha % p == 0:
            return np.zeros(beta.shape, dtype=bool)
        return (delta % p**t.m == 0) & (delta % p ** (t.m + 1) != 0)
    simple = {
        "II": (va >= 1) & (vb == 1),
        "III": (va == 1) & (vb >= 2),
        "IV": (va >= 2) & (vb == 2),
        "IV*": (va >= 3) & (vb == 4),
        "III*": (va == 3) & (vb >= 5),
        "II*": (va >= 4) & (vb == 5),
    }
    if t.tag in simple:
        return np.broadcast_to(simple[t.tag], beta.shape)
    # I0* and Im*: both quotients are integral; q is known mod p^(M-3)
    if va < 2:
        return np.zeros(beta.shape, dtype=bool)
    qmod = p ** (M - 3)
    q = ((4 * (alpha // p**2) ** 3) % qmod + 27 * ((beta // p**3) ** 2 % qmod)) % qmod
    exact = (va == 2) & (vb == 3)
    if t.tag == "I0*":
        return ((va == 2) & (vb >= 4)) | ((va >= 3) & (vb == 3)) | (exact & (q % p != 0))
    return exact & (q % p**t.m == 0) & (q % p ** (t.m + 1) != 0)


def residue_count(lc: LocalCondition, M: int | None = None) -> tuple[int, int]:
    """(number of residue pairs mod p^M satisfying lc, M).

    Pairs whose valuations cannot meet the condition are skipped; the count
    is still over all of (Z/p^M)^2.  Non-minimal classes are excluded.
    """
    p = lc.p
    if M is None:
        M = 6 if lc.kind in ("bad", "additive") else modulus_exponent(lc)
    ka, kb = _min_valuations(lc)
    n_alpha, n_beta = p ** (M - min(ka, M)), p ** (M - min(kb, M))
    if n_alpha * n_beta > MAX_RESIDUE_PAIRS:
        raise ValueError(f"{n_alpha * n_beta} residue pairs exceeds the limit {MAX_RESIDUE_PAIRS}")
    step_a, step_b = p ** min(ka, M), p ** min(kb, M)
    betas = np.arange(0, p**M, step_b, dtype=np.int64)
    total = 0
    for alpha in range(0, p**M, step_a):
        total += int(np.count_nonzero(_residue_mask(lc, alpha, betas, M)))
    return total, M


def local_density_by_congruence(lc: LocalCondition, M: int | None = None) -> Fraction:
    """Density of lc predicted from residue counts: count / p^(2M) * p^10/(p^10 - 1)."""
    n, M = residue_count(lc, M)
    return Fraction(n, lc.p ** (2 * M)) * unit_factor(lc.p)


def verify_singular_counts(p: int, m: int) -> tuple[int | None, int]:
    """Exhaustive counts of two sets of residue pairs.

    First: units (alpha, beta) mod p^m with 4 alpha^3 + 27 beta^2 == 0 mod p^m
    (None for m = 0, where the ring is trivial).  Second: pairs mod p^(m+6)
    with v(alpha) >= 2, v(beta) >= 3, (v(alpha) == 2 or v(beta) == 3), and
    v(4 (alpha/p^2)^3 + 27 (beta/p^3)^2) == m.
    """
    if p < 5 or not family.is_prime(p):
        raise ValueError(f"need a prime p >= 5, got {p}")
    if m < 0:
        raise ValueError("m must be >= 0")
    first = None
    if m >= 1:
        q = p**m
        units = np.array([u for u in range(q) if u % p], dtype=np.int64)
        lhs = (4 * units**3) % q
        rhs = (27 * units * units) % q
        first = int(np.count_nonzero((lhs[:, None] + rhs[None, :]) % q == 0))
    tag = KodairaType("Im*", m) if m else KodairaType("I0*")
    second, _ = residue_count(LocalCondition(p, "kodaira", kodaira=tag), M=m + 6)
    return first, second
