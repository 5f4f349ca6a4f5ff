from collections import Counter
from math import comb

import pytest

from oracles import all_quotients, canon, stats, type_by_generating_sets
from wordmaps.errors import BudgetExceeded
from wordmaps.quotients import (
    INF,
    TYPE_A,
    TYPE_B,
    beta,
    build_upsilon,
    classify_type,
    closed_trail,
    count_cycle_unions,
    edge_traversal_check,
    enumerate_quotients,
    fold_closure,
    open_trail,
    universal_graph,
)
from wordmaps.words import parse_word

P = parse_word


def census(word):
    qs = enumerate_quotients(closed_trail(P(word)))
    return len(qs), Counter((q.chi, q.type) for q in qs)


def test_universal_graph_examples():
    u = universal_graph(closed_trail(P("abAB")))
    assert (u.v, u.e, u.chi) == (4, 4, 1)
    spec = closed_trail(P("abAB"), 3, 4)
    u = universal_graph(spec)
    assert (u.v, u.e) == (48, 48) and len(spec.marked_labels) == 12
    assert u.cycle_lengths() == [12, 12, 12, 12]
    u = universal_graph(open_trail(P("aA")))
    assert (u.v, u.e) == (2, 1)
    assert u.partition[0] == u.partition[2]


def test_fold_closure_examples():
    spec = open_trail(P("abAB"))
    g = fold_closure(spec, [(0, 4)])
    assert (g.v, g.e) == (4, 4)
    g2 = fold_closure(spec, [(0, 4), (0, 1)])
    assert g2.partition == (0, 0, 1, 1, 0) and g2.chi == 2
    assert fold_closure(closed_trail(P("abAB"), 1, 2), [(0, 4)]) is None


def test_commutator_census():
    size, table = census("abAB")
    assert size == 7
    assert table == Counter({(1, TYPE_A): 1, (2, TYPE_A): 4, (3, TYPE_A): 1, (2, TYPE_B): 1})


def test_single_letter_has_one_quotient():
    qs = enumerate_quotients(closed_trail(P("a")))
    assert len(qs) == 1 and qs.quotients[0].type == TYPE_A


def test_empty_word_quotient():
    qs = enumerate_quotients(closed_trail(P("")))
    assert len(qs) == 1
    q = qs.quotients[0]
    assert (q.v, q.e, q.chi, q.type) == (1, 0, 0, TYPE_B)


def test_figure_eight_types():
    qs = enumerate_quotients(closed_trail(P("abAB")))
    eight = [q for q in qs if q.v == 1]
    assert len(eight) == 1 and eight[0].type == TYPE_B and eight[0].chi == 2
    assert classify_type(eight[0]) == TYPE_B
    assert edge_traversal_check(eight[0])
    assert all(m == 2 for m in eight[0].traversals.values())
    g = fold_closure(open_trail(P("ababa")), [(0, 2), (0, 5)])
    assert (g.v, g.e) == (1, 2)
    assert classify_type(g) == TYPE_A
    # type A with every edge traversed at least twice: the converse fails
    assert min(g.traversals.values()) >= 2


@pytest.mark.parametrize("word", ["abAB", "aabb", "abab", "aab", "aaBaB", "abABab", "aabAB", "abcABC", "aaa", "aA", "aAbb"])
def test_enumeration_matches_partition_scan(word):
    w = P(word)
    qs = enumerate_quotients(closed_trail(w))
    parts, steps = all_quotients(w.letters)
    assert {q.partition for q in qs} == {canon(p) for p in parts}
    for q in qs:
        assert q.is_realizable()
        assert (q.v, q.e) == stats(q.partition, steps)


@pytest.mark.parametrize("word, L, r", [("ab", 2, 2), ("aa", 2, 2), ("abAB", 1, 2), ("aab", 2, 1), ("ab", 3, 1), ("aB", 1, 3)])
def test_multi_cycle_enumeration_matches_scan(word, L, r):
    w = P(word)
    qs = enumerate_quotients(closed_trail(w, L, r))
    parts, _ = all_quotients(w.letters, True, L, r)
    assert {q.partition for q in qs} == {canon(p) for p in parts}


@pytest.mark.parametrize("word", ["abAB", "aabb", "abab", "aab", "aaBaB", "ababa", "aabAB", "abABab", "aaa", "abaB"])
def test_types_match_generating_set_search(word):
    w = P(word)
    for q in enumerate_quotients(closed_trail(w)):
        expected = type_by_generating_sets(w.letters, q.partition)
        assert q.type == expected
        assert classify_type(q) == expected


@pytest.mark.parametrize("word, expected", [("abAB", 2), ("aa", 1), ("a", INF), ("", 0), ("aA", 0), ("abab", 1), ("abA", INF)])
def test_beta_examples(word, expected):
    assert beta(P(word)) == expected


def test_beta_raw_word_agrees():
    for word in ["baaB", "bAaabB", "cabACbc"]:
        assert beta(P(word), reduce_first=False) == beta(P(word))


def test_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_quotients(closed_trail(P("abababab")), max_labels=6)
    with pytest.raises(BudgetExceeded):
        enumerate_quotients(closed_trail(P("abAB")), max_quotients=3)


def test_classify_rejects_foreign_quotient():
    q = enumerate_quotients(closed_trail(P("abAB"))).quotients[0]
    with pytest.raises(ValueError):
        classify_type(q, closed_trail(P("aabb")))
    with pytest.raises(ValueError):
        classify_type(universal_graph(closed_trail(P("ab"), 1, 2)))


def test_json_shape():
    q = enumerate_quotients(closed_trail(P("abAB"))).quotients[-1]
    js = q.to_json()
    assert all(lbl.startswith("c1:p") for blk in js["blocks"] for lbl in blk)
    assert sum(e[3] for e in js["edges"]) == 4


def test_upsilon_example():
    w = P("aababAb")
    ups = build_upsilon(w)
    u = universal_graph(closed_trail(w))
    assert len(ups.vertices) == comb(u.v, 2)
    assert len(ups.edges) == sum(comb(e, 2) for e in u.e_by_color)
    assert ups.is_forest()
    assert ups.n_components == comb(u.v, 2) - sum(comb(e, 2) for e in u.e_by_color)
    with pytest.raises(ValueError):
        build_upsilon(P("abab"))
    with pytest.raises(ValueError):
        build_upsilon(P("baaB"))


def test_upsilon_component_count_bounds_type_a():
    for word in ["aabAB", "aababAb", "abaBB", "aabbAB"]:
        w = P(word)
        comps = build_upsilon(w).n_components
        typeA2 = sum(1 for q in enumerate_quotients(closed_trail(w)) if q.type == TYPE_A and q.chi == 2)
        assert typeA2 <= comps


@pytest.mark.parametrize("word", ["ab", "aab", "abAB", "abaBB"])
def test_primitive_cycle_unions(word):
    for L, r in [(1, 1), (2, 1), (1, 3), (3, 2)]:
        assert count_cycle_unions(P(word), L, r).total == 1


def test_power_cycle_unions():
    assert count_cycle_unions(P("aaaa"), 1, 1).total == 3
    # one cycle-union quotient per divisor of d
    assert count_cycle_unions(P("abababab"), 1, 1).total == 3
    assert count_cycle_unions(P("ababab"), 1, 1).total == 2
    assert count_cycle_unions(P("aaaaaa"), 1, 1).total == 4


@pytest.mark.parametrize("word, L, r", [("aa", 2, 2), ("abab", 1, 2), ("aaa", 1, 3), ("aaaa", 2, 1), ("abAB", 1, 2), ("aabaab", 1, 2)])
def test_cycle_union_search_matches_full_filter(word, L, r):
    fast = count_cycle_unions(P(word), L, r)
    full = count_cycle_unions(P(word), L, r, exhaustive=True)
    assert fast.total == full.total and fast.by_profile == full.by_profile


def test_cycle_unions_depend_only_on_exponent():
    for L, r in [(1, 2), (2, 2), (3, 1)]:
        a = count_cycle_unions(P("abab"), L, r)
        b = count_cycle_unions(P("aBBaBB"), L, r)
        c = count_cycle_unions(P("aa"), L, r)
        assert a.by_profile == b.by_profile == c.by_profile


def test_chi_one_quotients_are_cycle_unions():
    for word, L, r in [("aa", 2, 2), ("abab", 1, 2), ("aab", 1, 2)]:
        for q in enumerate_quotients(closed_trail(P(word), L, r)):
            assert (q.chi == 1) == q.is_cycle_union()
            assert q.chi >= 1
