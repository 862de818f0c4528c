"""The full verification run behind ``ecstats verify-all``."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import family, hurwitz, rankbound, reduction
from .census import compute_census
from .density import (
    LocalCondition,
    closed_form_density,
    empirical_density,
    joint_density,
    kodaira_total,
    modulus_exponent,
    trace_total,
    verify_singular_counts,
)
from .reduction import local_trace_table
from .trace import TraceMomentSpec, moment_from_census, moment_report

DEFAULT_PRIMES = (5, 7, 11, 13)
DEFAULT_HEIGHT = 10**6
DENSITY_KINDS = ("good", "mult", "split", "nonsplit", "additive", "ap=0", "I1", "II")


@dataclass
class RunConfig:
    height_bound: int = DEFAULT_HEIGHT
    primes: tuple[int, ...] = DEFAULT_PRIMES
    conditions: tuple[LocalCondition, ...] = ()
    output_format: str = "json"
    worker_count: int = 1

    def __post_init__(self):
        if self.height_bound < 1:
            raise ValueError("height bound must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker count must be >= 1")
        for p in self.primes:
            if p < 5 or not family.is_prime(p):
                raise ValueError(f"primes must be primes >= 5, got {p}")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("duplicate primes")


@dataclass
class Check:
    name: str
    passed: bool
    measured: object = None
    predicted: object = None
    tolerance: object = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "measured": _jsonable(self.measured),
            "predicted": _jsonable(self.predicted),
            "tolerance": _jsonable(self.tolerance),
            "detail": self.detail,
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class Summary:
    config: RunConfig
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "X": self.config.height_bound,
            "primes": list(self.config.primes),
            "pass": self.passed,
            "n_checks": len(self.checks),
            "n_fail": sum(not c.passed for c in self.checks),
            "checks": [c.to_dict() for c in self.checks],
        }


def _guarded(summary: Summary, name: str, fn: Callable[[], list[Check] | Check]) -> None:
    try:
        out = fn()
    except Exception as exc:  # reported, never raised
        summary.checks.append(Check(name, False, detail=f"{type(exc).__name__}: {exc}"))
        return
    summary.checks.extend(out if isinstance(out, list) else [out])


# --- X-independent checks ---------------------------------------------------

def _rank_table() -> Check:
    bad = []
    for a, want in rankbound.REFERENCE_CDF_TABLE.items():
        got = rankbound.cdf_lower_bound(a).truncated
        if got != want:
            bad.append(f"a={a}: {got} != {want}")
    return Check("rank_table", not bad, len(rankbound.REFERENCE_CDF_TABLE) - len(bad),
                 len(rankbound.REFERENCE_CDF_TABLE), 0, "; ".join(bad))


def _moment_bounds() -> list[Check]:
    m2, m3 = rankbound.moment_bound(2), rankbound.moment_bound(3)
    return [
        Check("moment_bound_2", m2 == Fraction(1087, 12) and abs(float(m2) - 90.584) < 1e-3,
              m2, Fraction(1087, 12), 1e-3),
        Check("moment_bound_3", m3 == 2758, m3, 2758, 0),
        Check("moment_bound_subset_oracle",
              all(rankbound.moment_bound(n) == rankbound.moment_bound_by_subsets(n) for n in range(1, 9)),
              detail="n = 1..8"),
        Check("f_paired_sum_consistency",
              all(rankbound.f(n) == rankbound.paired_sum(2 * n) for n in range(1, 7)), detail="n = 1..6"),
    ]


def _integral() -> list[Check]:
    out = []
    for n in range(1, 7):
        quad, closed = rankbound.check_integral_identity(n)
        out.append(Check(f"integral_identity_n{n}",
                         abs(quad - closed) <= 1e-10 and rankbound.integral_identity_exact(n),
                         quad, closed, 1e-10))
    return out


def _class_number_identities() -> list[Check]:
    primes = [p for p in range(5, 201) if family.is_prime(p)]
    bad = []
    for p in primes:
        if hurwitz.kronecker_hurwitz_first_moment(p) != 2 * p:
            bad.append(f"first@{p}")
        if hurwitz.eichler_selberg_second_moment(p) != 2 * p * p - 2:
            bad.append(f"second@{p}")
        if any(hurwitz.odd_moment_vanishing(p, r) != 0 for r in (1, 3, 5)):
            bad.append(f"odd@{p}")
    return [Check("class_number_identities", not bad, len(primes), len(primes), 0,
                  "primes 5..200" if not bad else ", ".join(bad))]


def _singular_counts() -> list[Check]:
    out = []
    p = 5
    for m in (0, 1, 2):
        first, second = verify_singular_counts(p, m)
        want2 = p**6 * (p - 1) if m == 0 else p ** (m + 5) * (p - 1) ** 2
        ok = second == want2
        want1 = None
        if m >= 1:
            want1 = p ** (m - 1) * (p - 1)
            ok = ok and first == want1
        out.append(Check(f"singular_counts_p{p}_m{m}", ok, [first, second], [want1, want2], 0))
    return out


# --- per-prime checks --------------------------------------------------------

def _table_sums(p: int) -> Check:
    lc = lambda kind: closed_form_density(LocalCondition(p, kind))
    ok = (
        kodaira_total(p) == 1
        and lc("split") + lc("nonsplit") == lc("mult")
        and lc("mult") + lc("additive") == lc("bad")
        and lc("good") + lc("bad") == 1
        and trace_total(p) + lc("bad") == 1
    )
    return Check(f"density_table_sums_p{p}", ok, kodaira_total(p), 1, 0)


def _ap_counts(p: int) -> Check:
    if p > 200:
        return Check(f"ap_count_identity_p{p}", True, detail="skipped: p > 200")
    table = local_trace_table(p)
    counts = Counter(
        int(table[alpha, beta])
        for alpha in range(p)
        for beta in range(p)
        if (4 * alpha**3 + 27 * beta**2) % p
    )
    bad = []
    for a in hurwitz.weil_range(p):
        want = Fraction(p - 1, 2) * hurwitz.hurwitz_class_number(4 * p - a * a)
        if counts[a] != want:
            bad.append(f"a={a}: {counts[a]} != {want}")
    return Check(f"ap_count_identity_p{p}", not bad, detail="; ".join(bad))


def _oracles(p: int, x: int) -> list[Check]:
    kod_bad, split_bad, n_mult = 0, 0, 0
    for a, b in family.enumerate_family(x):
        if reduction.kodaira_type(a, b, p) != reduction.kodaira_type_standard(a, b, p):
            kod_bad += 1
        cls = reduction.reduction_class(a, b, p)
        if cls.is_multiplicative:
            n_mult += 1
            want = p - 1 if cls is reduction.ReductionClass.SPLIT else p + 1
            if reduction.smooth_point_count(a, b, p) != want:
                split_bad += 1
    return [
        Check(f"kodaira_oracle_p{p}_X{x}", kod_bad == 0, kod_bad, 0, 0, "mismatches"),
        Check(f"split_oracle_p{p}_X{x}", split_bad == 0, split_bad, 0, 0, f"{n_mult} multiplicative curves"),
    ]


def _family_size(x: int) -> Check:
    n = family.family_size(x)
    ratio = n / x ** (5 / 6)
    tol = max(0.1, 10 * x ** (-1 / 3))
    ok = family.family_size(1) == 8 and family.family_size(64) == 150 and abs(ratio - family.FAMILY_CONSTANT) <= tol
    return Check("family_size", ok, ratio, family.FAMILY_CONSTANT, tol, f"|E(X)| = {n}")


def verify_all(config: RunConfig) -> Summary:
    summary = Summary(config)
    x = config.height_bound
    _guarded(summary, "rank_table", _rank_table)
    _guarded(summary, "moment_bounds", _moment_bounds)
    _guarded(summary, "integral_identity", _integral)
    _guarded(summary, "class_number_identities", _class_number_identities)
    if not config.primes:
        return summary

    _guarded(summary, "singular_counts", _singular_counts)
    _guarded(summary, "family_size", lambda: _family_size(x))
    for p in config.primes:
        _guarded(summary, f"density_table_sums_p{p}", lambda p=p: _table_sums(p))
        _guarded(summary, f"ap_count_identity_p{p}", lambda p=p: _ap_counts(p))
        _guarded(summary, f"oracles_p{p}", lambda p=p: _oracles(p, min(x, 10**4)))

    census = compute_census(x, config.primes, config.worker_count)
    conditions = [LocalCondition.parse(f"{k}@{p}") for p in config.primes for k in DENSITY_KINDS]
    conditions += [c for c in config.conditions if c not in conditions]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for lc in conditions:
            _guarded(summary, f"density_{lc}", lambda lc=lc: _density_check(lc, x, census))
        for p in config.primes:
            _guarded(summary, f"complement_p{p}", lambda p=p: _complement(p, census))
            _guarded(summary, f"trace_p{p}", lambda p=p: _trace_checks(p, x, census))
        for p1, p2 in zip(config.primes, config.primes[1:]):
            if (p1 * p2) ** 3 > x:
                continue
            for pair in (("good", "good"), ("split", "nonsplit")):
                conds = [LocalCondition(p1, pair[0]), LocalCondition(p2, pair[1])]
                _guarded(summary, f"joint_{pair}", lambda conds=conds: _joint_check(conds, x, census))
    return summary


def _density_check(lc: LocalCondition, x: int, census) -> list[Check]:
    if lc.p ** (3 * modulus_exponent(lc)) > x:
        return [Check(f"density_{lc}", True, detail=f"skipped: p > X^(1/{3 * modulus_exponent(lc)})")]
    r = empirical_density(lc, x, census=census)
    return [Check(f"density_{lc}", r.passed, float(r.empirical), r.closed_form, r.tolerance,
                  f"count {r.count} of {r.family_size}")]


def _joint_check(conds, x, census) -> Check:
    r = joint_density(conds, x, census=census)
    rel = r.abs_error / float(r.closed_form)
    return Check(f"joint_density_{'+'.join(map(str, conds))}", r.passed, float(r.empirical), r.closed_form,
                 r.tolerance, f"relative deviation {rel:.4f}")


def _complement(p: int, census) -> Check:
    i = census.index(p)
    good = census.count(lambda k: k[i].good)
    bad = census.count(lambda k: not k[i].good)
    return Check(f"complement_counts_p{p}", good + bad == census.total, good + bad, census.total, 0)


def _trace_checks(p: int, x: int, census) -> list[Check]:
    out = []
    for text in (f"{p}^1:2", f"{p}^2:1", f"{p}^1:3"):
        r = moment_report(TraceMomentSpec.parse(text), x, census=census)
        out.append(Check(f"trace_moment_{text}", r.passed, r.empirical, r.predicted, r.tolerance))
    sq = moment_from_census(TraceMomentSpec.parse(f"{p}^1:2"), census)
    e2 = moment_from_census(TraceMomentSpec.parse(f"{p}^2:1"), census)
    i = census.index(p)
    good = census.count(lambda k: k[i].good) / census.total
    diff = abs(e2 - (sq - 2 * good))
    out.append(Check(f"trace_decomposition_p{p}", diff <= 1e-10, e2, sq - 2 * good, 1e-10))
    return out
