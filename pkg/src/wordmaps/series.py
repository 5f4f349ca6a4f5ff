"""Exact expectations, factorial moments and 1/n expansions of word-map statistics.

For a word ``w`` and a uniformly random tuple of permutations of ``[n]``,
``X_{w,L}`` counts the ``L``-cycles of ``w(sigma_1, ..., sigma_k)``.  Every
quantity here is a finite sum over realizable quotients, computed exactly.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import factorial, prod
from threading import Lock

from sympy.functions.combinatorial.numbers import stirling

from .errors import InvariantViolation
from .quotients import (
    DEFAULT_MAX_LABELS,
    DEFAULT_MAX_QUOTIENTS,
    INF,
    TYPE_B,
    QuotientGraph,
    closed_trail,
    count_cycle_unions,
    enumerate_quotients,
)
from .ratfn import RationalFn, falling_poly
from .words import Word, canonical_class, free_reduce

Signature = tuple[int, tuple[int, ...]]  # (v, e per color)


def falling(n: int, m: int) -> int:
    """``n (n-1) ... (n-m+1)``."""
    out = 1
    for i in range(m):
        out *= n - i
    return out


def realization_count(gamma: QuotientGraph, n: int) -> int:
    """Number of permutation tuples of ``[n]`` together with injective vertex labelings realizing ``gamma``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n < gamma.v:
        return 0
    return falling(n, gamma.v) * prod(factorial(n - e) for e in gamma.e_by_color)


@dataclass(frozen=True)
class QuotientSummary:
    """Quotient multiset of a spec reduced to what the moment formulas need."""

    signatures: dict[Signature, int]
    universal_e: tuple[int, ...]
    L: int
    r: int
    typeB_by_chi: dict[int, int] = field(default_factory=dict)
    classified: bool = False

    @property
    def threshold(self) -> int:
        return max(self.universal_e, default=0)


_cache: dict[tuple, QuotientSummary] = {}
_cache_lock = Lock()


def quotient_summary(
    w: Word,
    L: int = 1,
    r: int = 1,
    max_labels: int = DEFAULT_MAX_LABELS,
    max_quotients: int = DEFAULT_MAX_QUOTIENTS,
    classify: bool = False,
) -> QuotientSummary:
    # the moments are conjugation and inversion invariant, so the class
    # representative gives the same functions as w itself
    key_word = canonical_class(w)
    key = (key_word, L, r)
    classify = classify and (L, r) == (1, 1)
    cached = _cache.get(key)
    if cached is not None and (cached.classified or not classify):
        return cached
    spec = closed_trail(key_word, L, r)
    qs = enumerate_quotients(spec, max_labels, max_quotients, classify=classify)
    sigs = Counter((q.v, q.e_by_color) for q in qs)
    typeB = Counter(q.chi for q in qs if q.type == TYPE_B)
    summary = QuotientSummary(dict(sigs), qs.quotients[0].e_by_color, L, r, dict(typeB), classify)
    with _cache_lock:
        _cache[key] = summary
    return summary


def _exact_sum(summary: QuotientSummary, n: int) -> Fraction:
    total = Fraction(0)
    for (v, es), c in summary.signatures.items():
        if n < v:
            continue
        total += Fraction(c * falling(n, v), prod(falling(n, e) for e in es))
    return total / summary.L**summary.r


def _identity_l_cycles(w: Word, L: int) -> bool:
    return L > 1 and not free_reduce(w).letters


def expectation_rational(
    w: Word,
    L: int = 1,
    r: int = 1,
    max_labels: int = DEFAULT_MAX_LABELS,
    max_quotients: int = DEFAULT_MAX_QUOTIENTS,
) -> RationalFn:
    """``E([X_{w,L}]_r)`` as a rational function of ``n``.

    ``r = 1`` gives the expected number of ``L``-cycles; ``L = r = 1`` the
    expected number of fixed points.
    """
    if _identity_l_cycles(w, L):
        return RationalFn((0,))
    s = quotient_summary(w, L, r, max_labels, max_quotients)
    E = s.universal_e
    den = falling_poly(0, 0) * (L**r)
    for e in E:
        den = den * falling_poly(0, e)
    num = falling_poly(0, 0) * 0
    for (v, es), c in s.signatures.items():
        term = falling_poly(0, v) * c
        for e, emax in zip(es, E):
            term = term * falling_poly(e, emax - e)
        num = num + term
    return RationalFn(num, den, s.threshold, lambda n: _exact_sum(s, n))


def factorial_moments(w: Word, L: int, r_max: int, **budget) -> list[RationalFn]:
    return [expectation_rational(w, L, r, **budget) for r in range(1, r_max + 1)]


def factorial_to_raw(factorial_moments: list[RationalFn]) -> list[RationalFn]:
    """Raw moments ``E[X^r] = sum_s S(r, s) E[[X]_s]`` (Stirling numbers of the second kind)."""
    out = []
    for r in range(1, len(factorial_moments) + 1):
        out.append(reduce(lambda a, b: a + b, (
            factorial_moments[s - 1] * int(stirling(r, s, kind=2)) for s in range(1, r + 1)
        )))
    return out


def _series_inverse_product(lengths: list[int], order: int) -> list[int]:
    """Coefficients of ``prod_l 1/(1 - l x)`` over the given ``l`` values, up to ``x^order``."""
    coeffs = [1] + [0] * order
    for l in lengths:
        if l == 0:
            continue
        for i in range(1, order + 1):
            coeffs[i] += l * coeffs[i - 1]
    return coeffs


def _series_product(lengths: list[int], order: int) -> list[int]:
    coeffs = [1] + [0] * order
    for l in lengths:
        if l == 0:
            continue
        for i in range(order, 0, -1):
            coeffs[i] -= l * coeffs[i - 1]
    return coeffs


def _term_series(v: int, es: tuple[int, ...], order: int) -> list[int]:
    """``prod_{l<v}(1 - l x) / prod_j prod_{l<e_j}(1 - l x)`` up to ``x^order``."""
    if order < 0:
        return []
    p = _series_product(list(range(v)), order)
    q = _series_inverse_product([l for e in es for l in range(e)], order)
    return [sum(p[j] * q[i - j] for j in range(i + 1)) for i in range(order + 1)]


def phi_series_from_summary(summary: QuotientSummary, order: int, max_chi: int | None = None) -> list[int]:
    """``a_0 .. a_order`` of ``Phi = (E - 1)/n`` in powers of ``1/n``, optionally from quotients with chi <= max_chi."""
    a = [0] * (order + 1)
    for (v, es), c in summary.signatures.items():
        chi = sum(es) - v + 1
        if chi < 0:
            raise InvariantViolation("negative characteristic in a single-trail quotient")
        if max_chi is not None and chi > max_chi:
            continue
        for i, t in enumerate(_term_series(v, es, order - chi)):
            a[chi + i] += c * t
    if order >= 1:
        a[1] -= 1
    return a


@dataclass(frozen=True)
class SeriesExpansion:
    """``a_0 .. a_I`` with ``Phi(n) = sum_i a_i n^-i``."""

    coefficients: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, i):
        return self.coefficients[i]

    def evaluate_truncated(self, n) -> Fraction:
        return sum(Fraction(a, n**i) for i, a in enumerate(self.coefficients))


def _series_at_infinity(f: RationalFn, order: int) -> list[Fraction]:
    """Coefficients of ``f(1/x)`` around ``x = 0`` (``f`` must vanish or be finite at infinity)."""
    shift = f.order_at_infinity()
    out = [Fraction(0)] * (order + 1)
    if shift == INF:
        return out
    if shift < 0:
        raise ValueError("function has a pole at infinity")
    num = list(reversed(f.num))  # num(1/x) * x^deg
    den = list(reversed(f.den))
    q = []
    rem = [Fraction(c) for c in num] + [Fraction(0)] * (order + 1)
    for i in range(order + 1 - shift):
        c = rem[i] / den[0]
        q.append(c)
        for j, d in enumerate(den):
            if i + j < len(rem):
                rem[i + j] -= c * d
    for i, c in enumerate(q):
        out[shift + i] = c
    return out


@dataclass
class WordAnalysis:
    word: Word
    beta: int | float
    phi: int | float
    a_coeffs: SeriesExpansion
    expectation: RationalFn
    typeB_count_at_phi: int | None

    @property
    def conjecture_verdict(self) -> str:
        """Whether phi = beta and a_phi equals the type-B count at chi = phi."""
        if self.phi != self.beta:
            return "VIOLATED"
        if self.phi == INF:
            return "CONFIRMED"
        return "CONFIRMED" if self.a_coeffs[int(self.phi)] == self.typeB_count_at_phi else "VIOLATED"

    def to_json(self) -> dict:
        def num(x):
            return "inf" if x == INF else x

        return {
            "word": str(self.word),
            "beta": num(self.beta),
            "phi": num(self.phi),
            "a": list(self.a_coeffs.coefficients),
            "expectation": self.expectation.to_json(),
            "typeB_count_at_phi": self.typeB_count_at_phi,
            "verdicts": {"phi_equals_beta_and_leading_coefficient": self.conjecture_verdict},
        }


def phi_rational(w: Word, **budget) -> RationalFn:
    """``Phi_w(n) = (E(X_w) - 1)/n``."""
    E = expectation_rational(w, 1, 1, **budget)
    return (E - 1) / RationalFn((0, 1))


def phi_and_series(
    w: Word,
    I: int | None = None,
    max_labels: int = DEFAULT_MAX_LABELS,
    max_quotients: int = DEFAULT_MAX_QUOTIENTS,
) -> WordAnalysis:
    budget = dict(max_labels=max_labels, max_quotients=max_quotients)
    summary = quotient_summary(w, 1, 1, classify=True, **budget)
    E = expectation_rational(w, 1, 1, **budget)
    Phi = (E - 1) / RationalFn((0, 1))
    phi = Phi.order_at_infinity()
    if I is None:
        I = len(w)
    if phi != INF:
        I = max(I, int(phi))
    a = phi_series_from_summary(summary, I)
    # two independent routes to the same expansion
    if [Fraction(x) for x in a] != _series_at_infinity(Phi, I):
        raise InvariantViolation(f"series expansions of Phi disagree for {w}")
    if not free_reduce(w).letters:
        beta = 0
    else:
        chis = list(summary.typeB_by_chi)
        beta = min(chis) if chis else INF
    typeB = summary.typeB_by_chi.get(int(phi), 0) if phi != INF else None
    return WordAnalysis(w, beta, phi, SeriesExpansion(tuple(a)), E, typeB)


def psi_eval(
    w: Word,
    L: int,
    r: int,
    x,
    max_labels: int = DEFAULT_MAX_LABELS,
    max_quotients: int = DEFAULT_MAX_QUOTIENTS,
) -> Fraction:
    """``psi_{w,L,r}(x)``: the r-th factorial moment of ``X_{w,L}`` written in ``x = 1/n``.

    ``x = 0`` is the large-``n`` limit and only needs the cycle-union quotients.
    """
    x = Fraction(x)
    if _identity_l_cycles(w, L):
        return Fraction(0)
    if x == 0:
        if not free_reduce(w).letters:
            raise ValueError("pole at x = 0")
        census = count_cycle_unions(w, L, r, max_states=max_quotients)
        return Fraction(census.total, L**r)
    E = expectation_rational(w, L, r, max_labels, max_quotients)
    try:
        return E.evaluate(1 / x)
    except ZeroDivisionError:
        raise ValueError(f"pole at x = {x}") from None


def psi_eval_direct(w: Word, L: int, r: int, x, **budget) -> Fraction:
    """Termwise quotient sum for ``psi`` (an independent check of ``psi_eval``)."""
    x = Fraction(x)
    s = quotient_summary(w, L, r, **budget)
    total = Fraction(0)
    for (v, es), c in s.signatures.items():
        chi = sum(es) - v + 1
        num = prod(1 - l * x for l in range(v))
        den = prod(1 - l * x for e in es for l in range(e))
        if den == 0 or (x == 0 and chi < 1):
            raise ValueError(f"pole at x = {x}")
        total += c * x ** (chi - 1) * num / den
    return total / L**r


def tail_bound_check(w: Word, n: int, i: int | None = None) -> bool:
    """``Phi_w(n) <= n^-i (a_i + |w|^(2i+4) / n)`` with ``i = phi(w)`` by default."""
    m = len(w)
    if n < max(3 * m * m, 1):
        raise ValueError(f"need n >= 3|w|^2 = {3 * m * m}")
    analysis = phi_and_series(w, None if i is None else max(i, len(w)))
    if i is None:
        if analysis.phi == INF:
            return True
        i = int(analysis.phi)
    Phi = phi_rational(w)
    bound = Fraction(1, n**i) * (analysis.a_coeffs[i] + Fraction(m ** (2 * i + 4), n))
    return Phi(n) <= bound


def beta3_tail_check(w: Word, n: int) -> bool:
    """For ``beta(w) >= 3``: ``Phi_w(n) <= n^-3 (a_3 + |w|^10 / n)``."""
    m = len(w)
    if n < max(3 * m * m, 1):
        raise ValueError(f"need n >= 3|w|^2 = {3 * m * m}")
    analysis = phi_and_series(w, max(3, m))
    if analysis.beta < 3:
        raise ValueError(f"beta({w}) = {analysis.beta} < 3")
    Phi = phi_rational(w)
    return Phi(n) <= Fraction(1, n**3) * (analysis.a_coeffs[3] + Fraction(m**10, n))
