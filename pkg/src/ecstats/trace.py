"""Family averages of products of normalized Dirichlet coefficients.

A moment spec is a list of factors (p, e, r) at distinct primes, read as
the product over factors of coef(E, p^e)^r with coef either hat a_E or
lambda_E.  The predicted family average is an integer in {-1, 0, 1}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import family
from .census import Census, LocalType, compute_census
from .reduction import coefficient_from_trace

KINDS = ("ahat", "lambda")


@dataclass(frozen=True, order=True)
class Factor:
    p: int
    e: int
    r: int


@dataclass(frozen=True)
class TraceMomentSpec:
    factors: tuple[Factor, ...]
    kind: str = "ahat"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        primes = [f.p for f in self.factors]
        if len(set(primes)) != len(primes):
            raise ValueError(f"factor primes must be distinct, got {primes}")
        for f in self.factors:
            if f.p < 5 or not family.is_prime(f.p):
                raise ValueError(f"factor prime must be a prime >= 5, got {f.p}")
            if f.e == 1:
                if f.r < 1 or (f.r % 2 == 0 and f.r != 2):
                    raise ValueError(f"with e = 1 the power must be odd or 2, got r = {f.r}")
            elif f.e == 2:
                if f.r != 1:
                    raise ValueError(f"with e = 2 the power must be 1, got r = {f.r}")
            else:
                raise ValueError(f"e must be 1 or 2, got {f.e}")

    @classmethod
    def parse(cls, text: str, kind: str = "ahat") -> "TraceMomentSpec":
        """Parse 'p^e:r,p^e:r,...', e.g. '5^1:2,7^2:1'."""
        factors = []
        for item in filter(None, (s.strip() for s in text.split(","))):
            try:
                pe, r = item.split(":")
                p, e = pe.split("^")
                factors.append(Factor(int(p), int(e), int(r)))
            except ValueError:
                raise ValueError(f"bad factor {item!r}; expected p^e:r") from None
        return cls(tuple(factors), kind)

    def __str__(self) -> str:
        return ",".join(f"{f.p}^{f.e}:{f.r}" for f in self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(f.p for f in self.factors)


def predicted_constant(spec: TraceMomentSpec) -> int:
    fs = spec.factors
    if spec.kind == "lambda":
        return 1 if all(f.e == 1 and f.r == 2 for f in fs) else 0
    if any(f.e == 1 and f.r % 2 == 1 for f in fs):
        return 0
    if sum(f.r for f in fs if f.e == 2) % 2 == 1:
        return -1
    return 1


def moment_tolerance(spec: TraceMomentSpec, x: int) -> float:
    """5 * sum(1/p) + 5 * prod(p) * X^(-1/3)."""
    return 5 * sum(1 / f.p for f in spec.factors) + 5 * math.prod(spec.primes) * x ** (-1 / 3)


def _term(spec: TraceMomentSpec, key: tuple[LocalType, ...], index: dict[int, int]) -> float:
    value = 1.0
    # canonical factor order, so permuting the spec cannot change rounding
    for f in sorted(spec.factors):
        t = key[index[f.p]]
        value *= coefficient_from_trace(t.ap, t.good, f.p, f.e, spec.kind) ** f.r
    return value


def moment_from_census(spec: TraceMomentSpec, census: Census) -> float:
    index = {p: census.index(p) for p in spec.primes}
    terms = [n * _term(spec, key, index) for key, n in census.items()]
    return math.fsum(terms) / census.total


def empirical_moment(spec: TraceMomentSpec, x: int, census: Census | None = None, workers: int = 1) -> float:
    """Average over E(x) of the product of coefficient powers."""
    if math.prod(spec.primes) ** 3 > x:
        warnings.warn(f"product of primes {math.prod(spec.primes)} exceeds X^(1/3)", stacklevel=2)
    if census is None:
        census = compute_census(x, sorted(spec.primes), workers)
    return moment_from_census(spec, census)


@dataclass
class MomentReport:
    spec: TraceMomentSpec
    x: int
    empirical: float
    predicted: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.empirical - self.predicted) <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "spec": str(self.spec),
            "kind": self.spec.kind,
            "X": self.x,
            "empirical": float(f"{self.empirical:.12g}"),
            "predicted": self.predicted,
            "tolerance": float(f"{self.tolerance:.12g}"),
            "pass": self.passed,
        }


def moment_report(
    spec: TraceMomentSpec, x: int, census: Census | None = None, workers: int = 1, tolerance: float | None = None
) -> MomentReport:
    emp = empirical_moment(spec, x, census, workers)
    tol = moment_tolerance(spec, x) if tolerance is None else tolerance
    return MomentReport(spec, x, emp, predicted_constant(spec), tol)
