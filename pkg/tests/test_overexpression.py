import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditbackbone.errors import DomainError
from creditbackbone.model import AttributeClass, EntityId, Side
from creditbackbone.overexpression import hypergeometric_tail, overexpression_report

from .conftest import attrs, snap


def enumerated_tail(N, N_A, n, k_obs):
    """Literal enumeration of every draw of n balls from N (first N_A marked)."""
    hits = total = 0
    for draw in itertools.combinations(range(N), n):
        total += 1
        hits += sum(1 for b in draw if b < N_A) >= k_obs
    return Fraction(hits, total)


def test_tail_from_zero():
    assert hypergeometric_tail(20, 7, 5, 0) == 1.0


def test_tail_small_examples():
    assert enumerated_tail(10, 5, 4, 4) == Fraction(5, 210)
    assert hypergeometric_tail(10, 5, 4, 4) == pytest.approx(5 / 210, rel=1e-15)
    assert enumerated_tail(6, 3, 3, 2) == Fraction(1, 2)
    assert hypergeometric_tail(6, 3, 3, 2) == 0.5


@pytest.mark.parametrize("N", range(1, 11))
def test_tail_matches_enumeration(N):
    for N_A in range(N + 1):
        for n in range(N + 1):
            for k in range(min(n, N_A) + 1):
                exact = enumerated_tail(N, N_A, n, k)
                got = hypergeometric_tail(N, N_A, n, k)
                assert abs(got - float(exact)) <= 1e-12 * float(exact)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3000).flatmap(lambda N: st.tuples(
    st.just(N), st.integers(0, N), st.integers(0, N))))
def test_tail_nonincreasing_in_k(args):
    N, N_A, n = args
    prev = 1.0
    for k in range(0, min(n, N_A) + 1, max(1, min(n, N_A) // 25)):
        p = hypergeometric_tail(N, N_A, n, k)
        assert 0.0 <= p <= prev + 1e-15
        prev = p


def test_tail_large_population_log_path():
    # beyond the exact range the log-gamma path must agree with exact arithmetic
    N, N_A, n, k = 12000, 3000, 2000, 560
    num = sum(math.comb(N_A, i) * math.comb(N - N_A, n - i) for i in range(k, n + 1))
    exact = num / math.comb(N, n)
    assert hypergeometric_tail(N, N_A, n, k) == pytest.approx(exact, rel=1e-9)


@pytest.mark.parametrize("args", [(5, 6, 1, 0), (5, 2, 6, 0), (5, 2, 3, 3), (-1, 0, 0, 0), (5, 2, 2, 1.5)])
def test_tail_domain(args):
    with pytest.raises(DomainError):
        hypergeometric_tail(*args)


# -- reports ---------------------------------------------------------------------------


def firm_snapshot(sectors: dict[str, str]):
    recs = [("B1", f, 1.0) for f in sectors]
    return snap(recs, attrs=attrs(sectors=sectors))


def test_planted_sector_flagged():
    sectors = {f"F{i:02d}": ("S" if i < 10 else "T" if i < 20 else "U") for i in range(30)}
    s = firm_snapshot(sectors)
    subnet = {EntityId.firm(f"F{i:02d}") for i in range(5)}
    rep = overexpression_report(s, subnet, Side.FIRM, AttributeClass.SECTOR)
    assert rep.bonferroni_threshold == pytest.approx(0.01 / 3)
    by_value = {t.value: (t, flag) for t, flag in rep.tests}
    t, flag = by_value["S"]
    assert (t.N, t.N_A, t.n, t.k_obs) == (30, 10, 5, 5)
    assert t.p == pytest.approx(math.comb(10, 5) / math.comb(30, 5), rel=1e-14)
    assert t.p == pytest.approx(1.77e-3, abs=1e-5)
    assert flag
    assert by_value["T"][0].p == 1.0 and not by_value["T"][1]
    assert rep.over_expressed == ["S"]


def test_full_subset_never_flags():
    sectors = {f"F{i:02d}": ("S" if i < 3 else "T") for i in range(30)}
    s = firm_snapshot(sectors)
    rep = overexpression_report(s, s.entities(Side.FIRM), Side.FIRM, AttributeClass.SECTOR)
    for t, flag in rep.tests:
        assert t.k_obs == t.N_A and t.n == t.N
        assert t.p == 1.0 and not flag


def test_empty_subnet():
    sectors = {f"F{i}": "S" for i in range(5)}
    rep = overexpression_report(firm_snapshot(sectors), set(), Side.FIRM, AttributeClass.SECTOR)
    assert all(t.n == 0 and t.p == 1.0 and not flag for t, flag in rep.tests)


def test_frequency_is_not_over_expression():
    sectors = {}
    for i in range(100):
        sectors[f"F{i:03d}"] = "Rare" if i < 5 else "Big" if i < 65 else "Other"
    s = firm_snapshot(sectors)
    chosen = [f"F{i:03d}" for i in range(5)] + [f"F{i:03d}" for i in range(5, 16)] + \
             [f"F{i:03d}" for i in range(65, 69)]
    rep = overexpression_report(s, {EntityId.firm(c) for c in chosen}, Side.FIRM, AttributeClass.SECTOR)
    by = {t.value: (t, flag) for t, flag in rep.tests}
    assert by["Big"][0].k_obs > by["Rare"][0].k_obs
    assert by["Rare"][1] and not by["Big"][1]


def test_unlabelled_entities_excluded():
    recs = [("B1", f"F{i}", 1.0) for i in range(6)]
    s = snap(recs, attrs=attrs(sectors={"F0": "S", "F1": "S", "F2": "T"}))
    subnet = {EntityId.firm("F0"), EntityId.firm("F5")}
    rep = overexpression_report(s, subnet, "firm", "sector")
    for t, _ in rep.tests:
        assert t.N == 3 and t.n == 1


def test_relabeling_invariance():
    sectors = {f"F{i:02d}": ("S" if i < 10 else "T" if i < 20 else "U") for i in range(30)}
    relabel = {"S": "zz", "T": "aa", "U": "mm"}
    subnet = {EntityId.firm(f"F{i:02d}") for i in (0, 1, 2, 3, 12, 25)}
    a = overexpression_report(firm_snapshot(sectors), subnet, "firm", "sector")
    b = overexpression_report(firm_snapshot({k: relabel[v] for k, v in sectors.items()}), subnet,
                              "firm", "sector")
    fa = {relabel[t.value]: (t.p, flag) for t, flag in a.tests}
    fb = {t.value: (t.p, flag) for t, flag in b.tests}
    assert fa == fb


def test_bank_type_report_and_side_checks():
    s = snap([("B1", "F1", 1.0), ("B2", "F1", 1.0), ("B3", "F2", 1.0)],
             attrs=attrs(banks={"B1": "City", "B2": "City", "B3": "Regional"}))
    rep = overexpression_report(s, {EntityId.bank("B1"), EntityId.firm("F1")}, "bank", "bank_type")
    assert {t.value for t, _ in rep.tests} == {"City", "Regional"}
    assert all(t.n == 1 for t, _ in rep.tests)
    with pytest.raises(DomainError):
        overexpression_report(s, set(), "bank", "sector")
    with pytest.raises(DomainError):
        overexpression_report(s, {EntityId.bank("B9")}, "bank", "bank_type")
