from fractions import Fraction

import numpy as np
import pytest

from oracles import expectation_by_permutations
from wordmaps.errors import BudgetExceeded
from wordmaps.perms import (
    Permutation,
    count_L_cycles,
    cycle_type,
    evaluate_word,
    exact_expectation_bruteforce,
    exact_histogram,
    mc_estimate,
)
from wordmaps.words import free_reduce, parse_word

P = parse_word


def test_evaluate_examples():
    s = Permutation.from_one_based([2, 3, 1])
    img = evaluate_word(P("aa"), [s])
    assert img.one_based() == [3, 1, 2]
    assert count_L_cycles(img, 1) == 0
    assert evaluate_word(P(""), [s]) == Permutation.identity(3)
    assert evaluate_word(P("aA"), [s]) == Permutation.identity(3)


def test_composition_is_left_to_right():
    a = Permutation.from_one_based([2, 1, 3])
    b = Permutation.from_one_based([1, 3, 2])
    # 1 -a-> 2 -b-> 3
    assert evaluate_word(P("ab"), [a, b]).one_based()[0] == 3


def test_mismatched_degrees():
    with pytest.raises(ValueError):
        evaluate_word(P("ab"), [Permutation.identity(3), Permutation.identity(4)])
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_count_cycles_examples():
    assert count_L_cycles(Permutation.identity(5), 1) == 5
    c3 = Permutation.from_one_based([2, 3, 1])
    assert count_L_cycles(c3, 3) == 1 and count_L_cycles(c3, 1) == 0
    p = Permutation.from_one_based([2, 1, 4, 3, 5])
    assert count_L_cycles(p, 2) == 2


def test_cycle_lengths_partition_n():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = Permutation(tuple(int(x) for x in rng.permutation(11)))
        assert sum(L * count_L_cycles(p, L) for L in range(1, 12)) == 11
        assert cycle_type(p) == {L: count_L_cycles(p, L) for L in range(1, 12) if count_L_cycles(p, L)}


def test_reduction_does_not_change_image():
    rng = np.random.default_rng(1)
    perms = [Permutation(tuple(int(x) for x in rng.permutation(7))) for _ in range(3)]
    for text in ["abBAcCa", "aAbB", "cabCBAab"]:
        w = P(text, 3)
        assert evaluate_word(w, perms) == evaluate_word(free_reduce(w), perms)


def test_bruteforce_examples():
    assert exact_expectation_bruteforce(P("abAB"), 1, 1, 3) == Fraction(3, 2)
    assert exact_expectation_bruteforce(P("aa"), 1, 1, 4) == 2
    assert exact_expectation_bruteforce(P("a"), 2, 1, 4) == Fraction(1, 2)
    assert exact_expectation_bruteforce(P(""), 1, 1, 4) == 4
    assert exact_expectation_bruteforce(P(""), 2, 1, 4) == 0


def test_bruteforce_matches_slow_oracle():
    for text, L, r, n in [("abAB", 1, 2, 3), ("aabAb", 2, 1, 3), ("aBab", 1, 1, 4)]:
        w = P(text)
        assert exact_expectation_bruteforce(w, L, r, n) == expectation_by_permutations(w.letters, 2, n, L, r)


def test_bruteforce_ignores_unused_generators():
    # c is declared but never used, so only 3! tuples are enumerated
    w = P("aa", 3)
    assert sum(exact_histogram(w, 1, 3)) == 6


def test_bruteforce_workers_agree():
    w = P("abAB")
    assert exact_histogram(w, 1, 4, workers=2) == exact_histogram(w, 1, 4)


def test_bruteforce_limit():
    with pytest.raises(BudgetExceeded):
        exact_expectation_bruteforce(P("abc"), 1, 1, 6)


def test_mc_determinism_and_accuracy():
    r1 = mc_estimate(P("abAB"), 1, 4, 20000, seed=11)
    r2 = mc_estimate(P("abAB"), 1, 4, 20000, seed=11)
    assert r1.to_json() == r2.to_json()
    assert abs(r1.empirical_mean - 4 / 3) < 5 * r1.mean_stderr
    assert sum(r1.empirical_pmf) == pytest.approx(1.0)
    r3 = mc_estimate(P("abAB"), 1, 4, 20000, seed=12)
    assert r3.histogram != r1.histogram


def test_mc_single_letter_mean():
    rep = mc_estimate(P("a"), 1, 200, 100_000, seed=3)
    assert abs(rep.empirical_mean - 1) < 5 * rep.mean_stderr
