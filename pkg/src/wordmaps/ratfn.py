"""Exact rational functions of one variable ``n`` with integer coefficients."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

import sympy

_N = sympy.Symbol("n")


def _poly(coeffs: Sequence[int]) -> sympy.Poly:
    # coefficients are stored lowest degree first
    return sympy.Poly(list(reversed([int(c) for c in coeffs])) or [0], _N, domain="ZZ")


def _coeffs(p: sympy.Poly) -> tuple[int, ...]:
    cs = [int(c) for c in reversed(p.all_coeffs())]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def falling_poly(shift: int, length: int) -> sympy.Poly:
    """``(n - shift)(n - shift - 1) ... (n - shift - length + 1)``."""
    p = sympy.Poly(1, _N, domain="ZZ")
    for i in range(length):
        p = p * sympy.Poly(_N - (shift + i), _N, domain="ZZ")
    return p


class RationalFn:
    """``numerator(n) / denominator(n)`` in lowest terms.

    Coefficient tuples are lowest degree first, have joint content 1, and the
    denominator has a positive leading coefficient.  ``validity_threshold`` is
    the smallest ``n`` at which the function is known to equal the quantity it
    was built from; below it, ``exact`` (when given) is used for evaluation.
    """

    __slots__ = ("num", "den", "validity_threshold", "_exact")

    def __init__(
        self,
        num: Sequence[int] | sympy.Poly,
        den: Sequence[int] | sympy.Poly = (1,),
        validity_threshold: int = 0,
        exact: Callable[[int], Fraction] | None = None,
    ):
        p = num if isinstance(num, sympy.Poly) else _poly(num)
        q = den if isinstance(den, sympy.Poly) else _poly(den)
        if q.is_zero:
            raise ZeroDivisionError("zero denominator")
        if p.is_zero:
            q = sympy.Poly(1, _N, domain="ZZ")
        else:
            g = sympy.gcd(p, q)
            p, q = p.exquo(g), q.exquo(g)
            c = sympy.gcd(p.content(), q.content())
            if q.LC() < 0:
                c = -c
            p, q = p.exquo_ground(c), q.exquo_ground(c)
        self.num = _coeffs(p)
        self.den = _coeffs(q)
        self.validity_threshold = validity_threshold
        self._exact = exact

    @classmethod
    def constant(cls, value) -> "RationalFn":
        value = Fraction(value)
        return cls((value.numerator,), (value.denominator,))

    @property
    def num_poly(self) -> sympy.Poly:
        return _poly(self.num)

    @property
    def den_poly(self) -> sympy.Poly:
        return _poly(self.den)

    def is_constant(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1

    def is_zero(self) -> bool:
        return self.num == (0,)

    def evaluate(self, n) -> Fraction:
        """Value of the reduced function at ``n`` (raises ZeroDivisionError at a pole)."""
        n = Fraction(n)
        num = sum(Fraction(c) * n**i for i, c in enumerate(self.num))
        den = sum(Fraction(c) * n**i for i, c in enumerate(self.den))
        if den == 0:
            raise ZeroDivisionError(f"pole at n={n}")
        return num / den

    def __call__(self, n) -> Fraction:
        """Value at an integer ``n``, routed to the exact fallback below the threshold."""
        if self._exact is not None and n < self.validity_threshold:
            return self._exact(n)
        return self.evaluate(n)

    def order_at_infinity(self) -> float:
        """``deg(den) - deg(num)``; ``inf`` for the zero function."""
        if self.is_zero():
            return float("inf")
        return (len(self.den) - 1) - (len(self.num) - 1)

    def _combine(self, other, op, exact_op) -> "RationalFn":
        if not isinstance(other, RationalFn):
            other = RationalFn.constant(other)
        p, q = op(self.num_poly, self.den_poly, other.num_poly, other.den_poly)
        fa, fb = self._exact_or_eval(), other._exact_or_eval()
        return RationalFn(
            p,
            q,
            max(self.validity_threshold, other.validity_threshold),
            lambda n: exact_op(fa(n), fb(n)),
        )

    def _exact_or_eval(self):
        return self.__call__

    def __add__(self, other):
        return self._combine(other, lambda a, b, c, d: (a * d + b * c, b * d), lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b, c, d: (a * d - b * c, b * d), lambda x, y: x - y)

    def __rsub__(self, other):
        return RationalFn.constant(other) - self

    def __mul__(self, other):
        return self._combine(other, lambda a, b, c, d: (a * c, b * d), lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(other, lambda a, b, c, d: (a * d, b * c), lambda x, y: x / y)

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            try:
                other = RationalFn.constant(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFn({self})"

    def __str__(self):
        expr = sympy.factor(self.num_poly.as_expr() / self.den_poly.as_expr())
        return str(expr)

    def to_json(self) -> dict:
        return {
            "num": list(self.num),
            "den": list(self.den),
            "validity_threshold": self.validity_threshold,
            "text": str(self),
        }
