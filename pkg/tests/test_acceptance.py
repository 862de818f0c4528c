"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are
collected into the "acceptance criteria" section of the terminal summary.
"""

import time
import warnings
from fractions import Fraction

import pytest

from ecstats import family, hurwitz, rankbound, reduction
from ecstats.census import compute_census
from ecstats.density import (
    LocalCondition,
    closed_form_density,
    density_tolerance,
    empirical_density,
    joint_density,
    kodaira_total,
    verify_singular_counts,
)
from ecstats.trace import TraceMomentSpec, moment_from_census

X = 10**6


@pytest.fixture(scope="module")
def census_5_7():
    return compute_census(X, (5, 7))


def test_c01_rank_table(criterion):
    t0 = time.perf_counter()
    bad = [a for a, want in rankbound.REFERENCE_CDF_TABLE.items() if rankbound.cdf_lower_bound(a).truncated != want]
    dt = time.perf_counter() - t0
    ok = not bad and len(rankbound.REFERENCE_CDF_TABLE) == 20 and dt < 1
    criterion("1 rank table", ok, f"20 entries, mismatches {bad}, {dt:.3f}s")
    assert ok


def test_c02_moment_bounds(criterion):
    t0 = time.perf_counter()
    m2, m3 = rankbound.moment_bound(2), rankbound.moment_bound(3)
    dt = time.perf_counter() - t0
    ok = m2 == Fraction(1087, 12) and abs(float(m2) - 90.584) <= 0.001 and m3 == 2758 and dt < 1
    criterion("2 moment bounds", ok, f"n=2 {m2} ~ {float(m2):.6f}, n=3 {m3}, {dt:.3f}s")
    assert ok


def test_c03_class_number_identities(criterion):
    t0 = time.perf_counter()
    primes = [p for p in range(5, 201) if family.is_prime(p)]
    bad = []
    for p in primes:
        ok_p = (
            hurwitz.kronecker_hurwitz_first_moment(p) == 2 * p
            and hurwitz.eichler_selberg_second_moment(p) == 2 * p * p - 2
            and all(hurwitz.odd_moment_vanishing(p, r) == 0 for r in (1, 3, 5, 7))
        )
        if not ok_p:
            bad.append(p)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    criterion("3 class-number identities", ok, f"{len(primes)} primes, failures {bad}, {dt:.2f}s")
    assert ok


def test_c04_trace_count_identity(criterion):
    t0 = time.perf_counter()
    bad = []
    for p in (5, 7, 11, 13, 17, 19, 23):
        counts = {}
        for alpha in range(p):
            for beta in range(p):
                if (4 * alpha**3 + 27 * beta**2) % p:
                    a = reduction.trace_of_frobenius(alpha, beta, p)
                    counts[a] = counts.get(a, 0) + 1
        for a in hurwitz.weil_range(p):
            if counts.get(a, 0) != Fraction(p - 1, 2) * hurwitz.hurwitz_class_number(4 * p - a * a):
                bad.append((p, a))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    criterion("4 a_p-count identity", ok, f"mismatches {bad}, {dt:.2f}s")
    assert ok


def test_c05_kodaira_oracle(criterion):
    t0 = time.perf_counter()
    curves = list(family.enumerate_family(10**4))
    mismatches = sum(
        reduction.kodaira_type(a, b, p) != reduction.kodaira_type_standard(a, b, p)
        for p in (5, 7, 11, 13)
        for a, b in curves
    )
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 60
    criterion("5 Kodaira oracle", ok, f"{len(curves)} curves x 4 primes, {mismatches} mismatches, {dt:.2f}s")
    assert ok


def test_c06_density_table_sums(criterion):
    ok = True
    for p in (5, 7, 11):
        cf = lambda kind: closed_form_density(LocalCondition(p, kind))
        ok &= kodaira_total(p) == 1
        ok &= cf("split") + cf("nonsplit") == cf("mult")
        ok &= cf("mult") + cf("additive") == cf("bad")
    criterion("6 density table sums", ok, "p = 5, 7, 11 in exact rationals")
    assert ok


def test_c07_empirical_densities(criterion, census_5_7):
    t0 = time.perf_counter()
    rows, ok = [], True
    for text in ("good@5", "mult@5", "split@5", "nonsplit@5", "additive@5", "ap=0@5", "I1@5", "II@5"):
        lc = LocalCondition.parse(text)
        r = empirical_density(lc, X, census=census_5_7)
        assert r.tolerance == density_tolerance(lc, X)
        ok &= r.passed
        rows.append(f"{text} {r.abs_error / float(r.closed_form):.2%}")
    dt = time.perf_counter() - t0
    ok &= dt < 300
    criterion("7 empirical densities", ok, "rel. dev: " + ", ".join(rows))
    assert ok


def test_c08_independence(criterion, census_5_7):
    rows, ok = [], True
    for pair in (("good@5", "good@7"), ("split@5", "nonsplit@7")):
        conds = [LocalCondition.parse(t) for t in pair]
        r = joint_density(conds, X, census=census_5_7)
        rel = r.abs_error / float(r.closed_form)
        ok &= rel <= 0.03
        rows.append(f"{'+'.join(pair)} count {r.count} rel {rel:.2%}")
    criterion("8 independence (3% relative)", ok, "; ".join(rows))
    assert ok


def test_c09_trace_formula(criterion, census_5_7):
    targets = (("5^1:2", 1, 0.25), ("5^2:1", -1, 0.25), ("5^1:3", 0, 0.1))
    rows, ok = [], True
    for text, want, tol in targets:
        got = moment_from_census(TraceMomentSpec.parse(text), census_5_7)
        ok &= abs(got - want) <= tol
        rows.append(f"{text} {got:+.4f}")
    worst = 0.0
    for x in (10**4, 10**5, X):
        c = census_5_7 if x == X else compute_census(x, (5,))
        sq = moment_from_census(TraceMomentSpec.parse("5^1:2"), c)
        e2 = moment_from_census(TraceMomentSpec.parse("5^2:1"), c)
        i = c.index(5)
        good = c.count(lambda k: k[i].good) / c.total
        worst = max(worst, abs(e2 - (sq - 2 * good)))
    ok &= worst <= 1e-10
    criterion("9 trace formula", ok, ", ".join(rows) + f", decomposition residual {worst:.1e}")
    assert ok


def test_c10_integral_identity(criterion):
    worst, exact = 0.0, True
    for n in range(1, 7):
        quad, closed = rankbound.check_integral_identity(n)
        worst = max(worst, abs(quad - closed))
        exact &= rankbound.integral_identity_exact(n)
    ok = worst <= 1e-10 and exact
    criterion("10 test-function identity", ok, f"max |quad - sigma^4/96| = {worst:.1e}")
    assert ok


def test_c11_singular_counts(criterion):
    t0 = time.perf_counter()
    p, rows, ok = 5, [], True
    for m in (0, 1, 2):
        first, second = verify_singular_counts(p, m)
        want2 = p**6 * (p - 1) if m == 0 else p ** (m + 5) * (p - 1) ** 2
        ok &= second == want2
        if m >= 1:
            ok &= first == p ** (m - 1) * (p - 1)
        rows.append(f"m={m}: {first}, {second}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    criterion("11 residue exhaustion", ok, "; ".join(rows) + f", {dt:.1f}s")
    assert ok


def test_c12_family_size(criterion):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        n = family.family_size(X)
    ratio = n / X ** (5 / 6)
    ok = 3.9 <= ratio <= 4.1 and family.family_size(1) == 8 and family.family_size(64) == 150
    criterion("12 family size", ok, f"|E(10^6)| = {n}, ratio {ratio:.5f}")
    assert ok
