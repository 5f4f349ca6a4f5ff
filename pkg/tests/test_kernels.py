"""The compiled and pure-Python kernels must agree exactly."""
import numpy as np
import pytest

from wordmaps import kernels
from wordmaps.quotients import closed_trail, open_trail
from wordmaps.words import parse_word

py = kernels.backend_module("python")
try:
    cy = kernels.backend_module("cython")
except ImportError:  # extension not built
    cy = None

needs_cython = pytest.mark.skipif(cy is None, reason="compiled kernels not available")

SPECS = [
    closed_trail(parse_word("abAB")),
    closed_trail(parse_word("aabab")),
    closed_trail(parse_word("abAB"), 2, 2),
    closed_trail(parse_word("aaBB"), 1, 3),
    open_trail(parse_word("abABaB")),
    closed_trail(parse_word("aAbB")),
]


def _args(spec):
    colors, tails, heads = spec.steps
    return spec.n_labels, max(spec.k, 1), colors, tails, heads


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_cython
@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_fold_and_children_agree(spec):
    n, k, colors, tails, heads = _args(spec)
    rng = np.random.default_rng(3)
    for _ in range(30):
        part = tuple(range(n))
        a, b = (int(x) for x in rng.choice(n, 2, replace=False))
        r1 = py.fold(n, k, colors, tails, heads, part, a, b, spec.marked_labels)
        r2 = cy.fold(n, k, colors, tails, heads, part, a, b, spec.marked_labels)
        assert r1 == r2
        if r1 is None:
            continue
        c1 = py.children(n, k, colors, tails, heads, r1[0], spec.marked_labels)
        c2 = cy.children(n, k, colors, tails, heads, r1[0], spec.marked_labels)
        assert c1 == c2
        t1 = py.children(n, k, colors, tails, heads, part, spec.marked_labels, r1[0])
        t2 = cy.children(n, k, colors, tails, heads, part, spec.marked_labels, r1[0])
        assert t1 == t2


@needs_cython
def test_cycle_counts_agree():
    rng = np.random.default_rng(5)
    imgs = np.array([rng.permutation(9) for _ in range(200)], dtype=np.intc)
    for L in range(1, 10):
        assert np.array_equal(py.count_cycles_batch(imgs, L), cy.count_cycles_batch(imgs, L))


@needs_cython
def test_bruteforce_histograms_agree():
    import itertools

    perms = np.array(list(itertools.permutations(range(4))), dtype=np.intc)
    invs = np.argsort(perms, axis=1).astype(np.intc)
    gens = np.array([0, 1, 0, 1], dtype=np.intc)
    signs = np.array([1, 1, -1, -1], dtype=np.intc)
    for L in (1, 2):
        for lo, hi in ((0, 24), (5, 11), (7, 7)):
            h1 = py.bruteforce_histogram(perms, invs, gens, signs, 2, L, lo, hi)
            h2 = cy.bruteforce_histogram(perms, invs, gens, signs, 2, L, lo, hi)
            assert np.array_equal(h1, h2)
            assert h1.sum() == (hi - lo) * 24


def test_fold_marks_collision():
    spec = closed_trail(parse_word("abAB"), 1, 2)
    n, k, colors, tails, heads = _args(spec)
    assert py.fold(n, k, colors, tails, heads, tuple(range(n)), 0, 4, spec.marked_labels) is None
