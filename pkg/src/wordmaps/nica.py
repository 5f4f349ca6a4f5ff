"""Limit laws of L-cycle counts of word maps.

For ``w = u^d`` with ``u`` primitive, the number of ``L``-cycles of ``w``
evaluated at random permutations converges to ``sum_h h * Z_{1/(L h)}`` over
``h`` in ``H(d, L)``, with independent Poisson variables ``Z``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

import numpy as np
from scipy.stats import poisson

PMF_TAIL_TARGET = 1e-12


@dataclass(frozen=True)
class HSet:
    d: int
    L: int
    members: tuple[int, ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, h):
        return h in self.members


def h_set(d: int, L: int) -> HSet:
    """Divisors ``h`` of ``d`` with ``gcd(d/h, L) = 1``."""
    if d < 1 or L < 1:
        raise ValueError("d and L must be positive")
    members = tuple(h for h in range(1, d + 1) if d % h == 0 and gcd(d // h, L) == 1)
    return HSet(d, L, members)


def limit_mean(d: int, L: int) -> Fraction:
    return Fraction(len(h_set(d, L)), L)


@dataclass(frozen=True)
class PolynomialQ:
    """Polynomial in ``t`` with exact rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = list(self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in cs) or (Fraction(0),))

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        return sum((c * t**i for i, c in enumerate(self.coeffs)), Fraction(0))

    def __getitem__(self, i) -> Fraction:
        return self.coeffs[i] if i < len(self.coeffs) else Fraction(0)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self) -> "PolynomialQ":
        return PolynomialQ(tuple(i * c for i, c in enumerate(self.coeffs))[1:] or (0,))

    def shift_scale(self, power: int, scale) -> "PolynomialQ":
        """``scale * t^power * self``."""
        return PolynomialQ((Fraction(0),) * power + tuple(scale * c for c in self.coeffs))

    def __add__(self, other: "PolynomialQ") -> "PolynomialQ":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolynomialQ(tuple(self[i] + other[i] for i in range(n)))

    def as_dict(self) -> dict[int, Fraction]:
        return {i: c for i, c in enumerate(self.coeffs) if c}


def q_polynomial(h: int, L: int, r: int) -> PolynomialQ:
    """``q_r`` with ``f^(r) = q_r f`` for ``f(t) = exp((t^h - 1)/(L h))``, the PGF of ``h Z_{1/(L h)}``."""
    q = PolynomialQ((1,))
    for _ in range(r):
        q = q.derivative() + q.shift_scale(h - 1, Fraction(1, L))
    return q


def free_spot_gf(h: int, L: int, r: int) -> PolynomialQ:
    """``g_{r+1} = L g_r' + t^(h-1) g_r`` with ``g_0 = 1``.

    The coefficient of ``t^j`` counts the cycle-union quotients of ``r``
    marked ``L``-cycles whose cycles all have length ``L h |u|`` and that have
    ``j`` free spots (unmarked copies of ``u^L``).
    """
    if h < 1 or L < 1 or r < 0:
        raise ValueError("need h, L >= 1 and r >= 0")
    g = PolynomialQ((1,))
    for _ in range(r):
        g = g.derivative().shift_scale(0, L) + g.shift_scale(h - 1, 1)
    return g


@dataclass(frozen=True)
class PoissonMixture:
    """``sum_h h * Z_h`` with independent ``Z_h ~ Poisson(1/(L h))``."""

    d: int
    L: int
    components: tuple[tuple[int, Fraction], ...]

    @classmethod
    def for_power(cls, d: int, L: int) -> "PoissonMixture":
        return cls(d, L, tuple((h, Fraction(1, L * h)) for h in h_set(d, L)))

    @property
    def total_rate(self) -> float:
        return float(sum(rate for _, rate in self.components))


def mixture_factorial_moment(mix: PoissonMixture, r: int) -> Fraction:
    """``E[[Y]_r]``, the r-th derivative of the product PGF at ``t = 1`` (Leibniz rule)."""
    if r < 0:
        raise ValueError("r must be non-negative")
    # per-component derivative values f_h^(j)(1) = q_j(1)
    values = [[q_polynomial(h, mix.L, j)(1) for j in range(r + 1)] for h, _ in mix.components]
    # fold components one at a time: (fg)^(s) = sum_j C(s, j) f^(j) g^(s-j)
    acc = [Fraction(1)] + [Fraction(0)] * r
    for vals in values:
        acc = [sum((comb(s, j) * acc[j] * vals[s - j] for j in range(s + 1)), Fraction(0)) for s in range(r + 1)]
    return acc[r]


def tail_bound(mix: PoissonMixture, max_value: int) -> float:
    """Upper bound on ``P(Y > max_value)``.

    ``Y <= d * sum_h Z_h`` and the sum is ``Poisson(sum_h 1/(L h))``.
    """
    d = max(h for h, _ in mix.components)
    return float(poisson.sf(max_value // d, mix.total_rate))


def default_max_value(mix: PoissonMixture, target: float = PMF_TAIL_TARGET) -> int:
    m = 0
    while tail_bound(mix, m) >= target:
        m += 1
    return m


@dataclass
class PmfTable:
    pmf: np.ndarray
    max_value: int
    tail_bound: float

    @property
    def mass(self) -> float:
        return float(self.pmf.sum())

    def to_json(self) -> dict:
        return {
            "pmf": [float(x) for x in self.pmf],
            "max_value": self.max_value,
            "tail_bound": self.tail_bound,
            "tail_bound_formula": "P(Y > M) <= P(Poisson(sum_h 1/(L h)) > floor(M / d))",
        }


def mixture_pmf(mix: PoissonMixture, max_value: int | None = None) -> PmfTable:
    if max_value is None:
        max_value = default_max_value(mix)
    if max_value < 0:
        raise ValueError("max_value must be non-negative")
    out = np.zeros(max_value + 1)
    out[0] = 1.0
    for h, rate in mix.components:
        comp = np.zeros(max_value + 1)
        ks = np.arange(max_value // h + 1)
        comp[ks * h] = poisson.pmf(ks, float(rate))
        out = np.convolve(out, comp)[: max_value + 1]
    return PmfTable(out, max_value, tail_bound(mix, max_value))


def nica_report(d: int, L: int, r_max: int, max_value: int | None = None) -> dict:
    mix = PoissonMixture.for_power(d, L)
    table = mixture_pmf(mix, max_value)
    moments = [mixture_factorial_moment(mix, r) for r in range(1, r_max + 1)]
    return {
        "d": d,
        "L": L,
        "H": list(h_set(d, L)),
        "mean": str(limit_mean(d, L)),
        "factorial_moments": [str(m) for m in moments],
        **table.to_json(),
    }
