from fractions import Fraction

import pytest

from oracles import expectation_by_permutations
from wordmaps.quotients import INF, closed_trail, enumerate_quotients, fold_closure
from wordmaps.ratfn import RationalFn
from wordmaps.series import (
    beta3_tail_check,
    expectation_rational,
    factorial_moments,
    factorial_to_raw,
    phi_and_series,
    phi_series_from_summary,
    psi_eval,
    psi_eval_direct,
    quotient_summary,
    realization_count,
    tail_bound_check,
)
from wordmaps.words import parse_word

P = parse_word


def test_realization_count_examples():
    qs = enumerate_quotients(closed_trail(P("abAB")))
    c4 = qs.quotients[0]
    assert realization_count(c4, 4) == 96
    assert realization_count(c4, 3) == 0
    eight = [q for q in qs if q.v == 1][0]
    assert realization_count(eight, 2) == 2


def test_realization_counts_sum_to_fixed_point_total():
    # sum over quotients of realizations = (n!)^k * E(fixed points), for every n
    from math import factorial

    for word in ["abAB", "aabb", "aaBaB"]:
        w = P(word)
        qs = enumerate_quotients(closed_trail(w))
        for n in range(1, 5):
            total = sum(realization_count(q, n) for q in qs)
            assert Fraction(total, factorial(n) ** 2) == expectation_by_permutations(w.letters, 2, n)


def test_expectation_examples():
    assert expectation_rational(P("abAB")) == RationalFn((0, 1), (-1, 1))
    assert expectation_rational(P("a")) == 1
    f = expectation_rational(P("aa"))
    assert f == 2 and f.validity_threshold == 2
    assert str(expectation_rational(P("abAB"))) == "n/(n - 1)"


def test_below_threshold_uses_exact_sum():
    f = expectation_rational(P("aa"))
    # sigma^2 of the single permutation of [1] has one fixed point
    assert f(1) == 1
    assert f(2) == 2 and f(3) == 2


@pytest.mark.parametrize(
    "word, L, r, n",
    [
        ("abAB", 1, 1, 3), ("abAB", 1, 1, 4), ("aa", 1, 1, 4), ("aabb", 1, 2, 3), ("abab", 2, 1, 3),
        ("aab", 1, 2, 4), ("aaa", 3, 1, 5), ("aB", 1, 3, 3), ("ab", 2, 2, 4), ("aaaa", 2, 1, 5),
        ("abABab", 1, 1, 3), ("aA", 1, 1, 3), ("aAbb", 1, 2, 3), ("", 1, 1, 3),
    ],
)
def test_expectation_matches_permutation_oracle(word, L, r, n):
    w = P(word, 2)
    assert expectation_rational(w, L, r)(n) == expectation_by_permutations(w.letters, 2, n, L, r)


def test_series_examples():
    a = phi_and_series(P("abAB"))
    assert a.a_coeffs.coefficients[:4] == (0, 0, 1, 1) and a.phi == 2
    assert phi_and_series(P("")).phi == 0
    single = phi_and_series(P("a"))
    assert single.phi == INF and single.expectation == 1
    assert phi_and_series(P("aa")).a_coeffs[1] == 1


def test_series_truncation_default_and_extension():
    assert phi_and_series(P("abAB")).a_coeffs.order == 4
    assert phi_and_series(P("abAB"), 7).a_coeffs.coefficients == (0, 0, 1, 1, 1, 1, 1, 1)


def test_low_characteristic_determines_coefficients():
    for word in ["abAB", "aabAB", "abaBB", "aabb"]:
        s = quotient_summary(P(word), classify=True)
        full = phi_series_from_summary(s, 6)
        for i in range(7):
            assert phi_series_from_summary(s, i, max_chi=i)[i] == full[i]


def test_psi_examples():
    assert psi_eval(P("abAB"), 1, 1, Fraction(1, 4)) == Fraction(4, 3)
    assert psi_eval(P("ab"), 2, 3, 0) == Fraction(1, 8)
    assert psi_eval(P("aab"), 3, 2, 0) == Fraction(1, 9)
    with pytest.raises(ValueError):
        psi_eval(P("abAB"), 1, 1, 1)


def test_psi_matches_termwise_sum():
    for word, L, r in [("abAB", 1, 1), ("aa", 2, 2), ("abab", 1, 2)]:
        for x in (Fraction(1, 11), Fraction(1, 20), Fraction(-1, 3)):
            assert psi_eval(P(word), L, r, x) == psi_eval_direct(P(word), L, r, x)
        assert psi_eval(P(word), L, r, 0) == psi_eval_direct(P(word), L, r, 0)


def test_psi_relates_to_phi():
    for word in ["abAB", "aabb", "aaBaB"]:
        E = expectation_rational(P(word))
        Phi = (E - 1) / RationalFn((0, 1))
        for n in (5, 9):
            assert psi_eval(P(word), 1, 1, Fraction(1, n)) == n * Phi(n) + 1


def test_factorial_to_raw():
    fm = factorial_moments(P("abAB"), 1, 3)
    raw = factorial_to_raw(fm)
    assert raw[0] == fm[0]
    assert raw[1] == fm[1] + fm[0]
    assert raw[0](3) == Fraction(3, 2)
    assert raw[2] == fm[2] + 3 * fm[1] + fm[0]


def test_raw_moments_match_oracle():
    w = P("aabb")
    raw = factorial_to_raw(factorial_moments(w, 1, 3))
    for n in (3, 4):
        first = expectation_by_permutations(w.letters, 2, n)
        second = expectation_by_permutations(w.letters, 2, n, 1, 2) + first
        assert raw[0](n) == first and raw[1](n) == second


def test_tail_bound_examples():
    assert tail_bound_check(P("abAB"), 100, 2)
    assert tail_bound_check(P("aa"), 50, 1)
    assert tail_bound_check(P("abAB"), 48)
    with pytest.raises(ValueError):
        tail_bound_check(P("abAB"), 47)


def test_beta3_tail_bound():
    w = P("aabbcc")
    analysis = phi_and_series(w)
    assert analysis.beta >= 3
    assert beta3_tail_check(w, 3 * 36)
    with pytest.raises(ValueError):
        beta3_tail_check(P("abAB"), 100)


def test_report_json():
    js = phi_and_series(P("abAB")).to_json()
    assert js["beta"] == 2 and js["phi"] == 2
    assert js["expectation"]["num"] == [0, 1] and js["expectation"]["den"] == [-1, 1]
    assert phi_and_series(P("a")).to_json()["phi"] == "inf"


def test_figure_eight_realizations_by_hand():
    g = fold_closure(closed_trail(P("abAB")), [(0, 1), (0, 2)])
    assert g.v == 1
    assert realization_count(g, 3) == 3 * 2 * 2
