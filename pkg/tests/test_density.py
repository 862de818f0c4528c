from fractions import Fraction

import pytest

from ecstats import family, hurwitz, reduction
from ecstats.census import compute_census
from ecstats.density import (
    LocalCondition,
    closed_form_density,
    density_rule,
    density_tolerance,
    empirical_density,
    joint_density,
    kodaira_total,
    local_density_by_congruence,
    residue_count,
    trace_total,
    unit_factor,
    verify_singular_counts,
)
from ecstats.reduction import KodairaType

X = 10**6
KODAIRA_TAGS = ("I1", "I2", "I3", "II", "III", "IV", "I0*", "IV*", "III*", "II*")


@pytest.fixture(scope="module")
def census():
    return compute_census(X, (5, 7, 11, 13))


def cf(text):
    return closed_form_density(LocalCondition.parse(text))


def test_closed_form_examples():
    u = unit_factor(5)
    assert cf("good@5") == Fraction(20, 25) * u
    assert float(cf("good@5")) == pytest.approx(0.8000001, abs=1e-7)
    assert cf("II*@5") == Fraction(4, 5**10 - 1)
    assert float(cf("II*@5")) == pytest.approx(4.096e-7, rel=1e-3)
    assert float(cf("I1@5")) == pytest.approx(0.128, rel=1e-6)
    assert cf("ap=0@5") == Fraction(4 * 2, 50) * u
    assert cf("additive@5") == Fraction(5**9 - 5, 5**11) * u
    assert cf("split@5") == Fraction(4, 50) * u
    assert cf("nonsplit@7") == Fraction(6, 98) * unit_factor(7)


@pytest.mark.parametrize("p", (5, 7, 11, 13, 101))
def test_table_identities(p):
    assert kodaira_total(p) == 1
    assert trace_total(p) + cf(f"bad@{p}") == 1
    assert cf(f"split@{p}") + cf(f"nonsplit@{p}") == cf(f"mult@{p}")
    assert cf(f"mult@{p}") + cf(f"additive@{p}") == cf(f"bad@{p}")
    assert cf(f"good@{p}") + cf(f"bad@{p}") == 1
    assert cf(f"I0@{p}") == cf(f"good@{p}")
    # truncated I_m series approaches the multiplicative density
    partial = sum(cf(f"I{m}@{p}") for m in range(1, 40))
    assert abs(partial - cf(f"mult@{p}")) < Fraction(1, p**38)


def test_density_rule():
    rule = density_rule(LocalCondition.parse("I2*@5"))
    assert rule.modulus_exponent == 8
    assert rule.closed_form == Fraction(1, 5**7) * Fraction(16, 25) * unit_factor(5)
    assert density_rule(LocalCondition.parse("II@5")).modulus_exponent == 2


@pytest.mark.parametrize("p", (5, 7))
@pytest.mark.parametrize("text", KODAIRA_TAGS + ("good", "mult", "split", "nonsplit", "additive", "ap=0", "ap=1", "ap=-2"))
def test_closed_forms_match_residue_counts(text, p):
    if (text, p) == ("additive", 7):
        pytest.skip("7^10 residue pairs exceeds the enumeration guard")
    lc = LocalCondition.parse(f"{text}@{p}")
    assert local_density_by_congruence(lc) == closed_form_density(lc)


def test_im_star_by_residue_counts():
    lc = LocalCondition.parse("I1*@5")
    assert local_density_by_congruence(lc) == closed_form_density(lc)


def test_residue_count_guard():
    with pytest.raises(ValueError):
        residue_count(LocalCondition.parse("I1@101"), M=6)


@pytest.mark.parametrize(
    "m, first, second", [(0, None, 5**6 * 4), (1, 4, 5**6 * 16), (2, 20, 5**7 * 16)]
)
def test_singular_counts(m, first, second):
    assert verify_singular_counts(5, m) == (first, second)


def test_singular_counts_other_prime():
    first, second = verify_singular_counts(7, 1)
    assert first == 6 and second == 7**6 * 36


@pytest.mark.parametrize("text", ("good@5", "ap=0@5", "additive@5", "split@5", "I1@5", "II@5", "good@7", "mult@11"))
def test_empirical_density_within_tolerance(text, census):
    lc = LocalCondition.parse(text)
    r = empirical_density(lc, X, census=census)
    assert r.family_size == family.family_size(X)
    assert r.tolerance == density_tolerance(lc, X)
    assert r.passed, r.to_dict()


def test_census_matches_direct_count():
    lc = LocalCondition.parse("split@5")
    direct = sum(reduction.reduction_class(a, b, 5).name == "SPLIT" for a, b in family.enumerate_family(10**4))
    assert empirical_density(lc, 10**4).count == direct


@pytest.mark.filterwarnings("ignore::UserWarning")
@pytest.mark.parametrize("p", (5, 7, 11, 13))
def test_complements_partition_family(p, census):
    n = {k: empirical_density(LocalCondition(p, k), X, census=census).count for k in ("good", "bad", "mult", "additive", "split", "nonsplit")}
    assert n["good"] + n["bad"] == census.total
    assert n["mult"] + n["additive"] == n["bad"]
    assert n["split"] + n["nonsplit"] == n["mult"]
    traces = sum(empirical_density(LocalCondition(p, "trace", a=a), X, census=census).count for a in hurwitz.weil_range(p))
    assert traces == n["good"]
    i = census.index(p)
    kinds = {str(key[i].kodaira) for key in census.counts}
    per_type = sum(
        empirical_density(LocalCondition(p, "kodaira", kodaira=KodairaType.parse(t)), X, census=census).count
        for t in kinds
    )
    assert per_type == census.total


def test_joint_density(census):
    empty = joint_density([], X, census=census)
    assert empty.closed_form == 1 and empty.count == census.total and empty.passed
    good = joint_density([LocalCondition.parse("good@5"), LocalCondition.parse("good@7")], X, census=census)
    assert good.closed_form == cf("good@5") * cf("good@7")
    assert good.abs_error / float(good.closed_form) < 0.03
    with pytest.raises(ValueError):
        joint_density([LocalCondition.parse("good@5"), LocalCondition.parse("split@5")], X, census=census)


def test_out_of_range_warning():
    with pytest.warns(UserWarning):
        r = empirical_density(LocalCondition.parse("I3@13"), 10**4)
    assert r.warnings


@pytest.mark.parametrize(
    "text, kind",
    [("good@5", "good"), ("Addi@7", "additive"), ("non-split@5", "nonsplit"), ("ap=-3@7", "trace"), ("I0*@5", "kodaira")],
)
def test_parse(text, kind):
    assert LocalCondition.parse(text).kind == kind


@pytest.mark.parametrize("text", ("good", "good@4", "ap=5@5", "V@5", "good@x"))
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        LocalCondition.parse(text)


def test_report_dict(census):
    d = empirical_density(LocalCondition.parse("ap=0@5"), X, census=census).to_dict()
    assert set(d) >= {"condition", "p", "m", "X", "count", "empirical", "closed_form", "closed_form_exact", "tolerance", "pass"}
    assert d["closed_form_exact"] == f"{cf('ap=0@5').numerator}/{cf('ap=0@5').denominator}"
