"""Words in free groups: parsing, free and cyclic reduction, roots, Nielsen moves.

Letters are stored as signed integers: generator ``g`` (1-based) is ``+g`` and
its inverse is ``-g``.  The text syntax writes ``a`` for g1, ``b`` for g2, ...,
and the uppercase letter for the inverse, so ``"abAB"`` is the commutator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "Letter",
    "Word",
    "PowerDecomposition",
    "NielsenMove",
    "parse_word",
    "free_reduce",
    "cyclic_reduce",
    "power_decompose",
    "apply_nielsen",
    "has_single_occurrence_letter",
    "canonical_form",
    "canonical_class",
]

_MAX_K = 26


class Letter(NamedTuple):
    generator: int
    sign: int


@dataclass(frozen=True)
class Word:
    """An unreduced word over ``k`` generators; immutable."""

    letters: tuple[int, ...]
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= _MAX_K:
            raise ValueError(f"alphabet size must be in 1..{_MAX_K}, got {self.k}")
        for x in self.letters:
            if x == 0 or abs(x) > self.k:
                raise ValueError(f"letter {x} outside alphabet of size {self.k}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(_letter_char(x) for x in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, k={self.k})"

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters, max(self.k, other.k))

    def __pow__(self, d: int) -> "Word":
        if d < 0:
            return self.inverse() ** (-d)
        return Word(self.letters * d, self.k)

    @property
    def as_letters(self) -> list[Letter]:
        return [Letter(abs(x), 1 if x > 0 else -1) for x in self.letters]

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)), self.k)

    def shift(self, j: int) -> "Word":
        """Cyclic rotation moving the first ``j`` letters to the end."""
        if not self.letters:
            return self
        j %= len(self.letters)
        return Word(self.letters[j:] + self.letters[:j], self.k)

    def generators_used(self) -> list[int]:
        return sorted({abs(x) for x in self.letters})

    def is_identity(self) -> bool:
        return not free_reduce(self).letters


def _letter_char(x: int) -> str:
    c = chr(ord("a") + abs(x) - 1)
    return c if x > 0 else c.upper()


def parse_word(text: str, k: int | None = None) -> Word:
    """Parse ``text`` (lowercase generators, uppercase inverses) without reducing.

    ``k`` defaults to the highest generator used (at least 1).
    """
    letters = []
    for ch in text:
        if not ("a" <= ch.lower() <= "z") or not ch.isascii():
            raise ValueError(f"invalid letter {ch!r} in word {text!r}")
        g = ord(ch.lower()) - ord("a") + 1
        letters.append(g if ch.islower() else -g)
    top = max((abs(x) for x in letters), default=1)
    if k is None:
        k = top
    elif top > k:
        raise ValueError(f"word {text!r} uses generator {top} but k={k}")
    return Word(tuple(letters), k)


def _as_word(w: Word | str) -> Word:
    return parse_word(w) if isinstance(w, str) else w


def free_reduce(w: Word) -> Word:
    out: list[int] = []
    for x in w.letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return Word(tuple(out), w.k)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w = conjugator * core * conjugator^-1``."""
    letters = free_reduce(w).letters
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return Word(letters[i:j], w.k), Word(letters[:i], w.k)


class PowerDecomposition(NamedTuple):
    root: Word
    exponent: int
    conjugator: Word


def _smallest_period(seq: Sequence[int]) -> int:
    """Smallest p dividing len(seq) with seq == seq[:p] * (len/p), via the prefix function."""
    m = len(seq)
    fail = [0] * m
    for i in range(1, m):
        j = fail[i - 1]
        while j and seq[i] != seq[j]:
            j = fail[j - 1]
        if seq[i] == seq[j]:
            j += 1
        fail[i] = j
    p = m - fail[-1]
    return p if m % p == 0 else m


def power_decompose(w: Word) -> PowerDecomposition:
    """Write ``w = x u^d x^-1`` with ``u`` cyclically reduced and primitive, ``d`` maximal."""
    core, conj = cyclic_reduce(w)
    if not core.letters:
        raise ValueError("the identity element has no primitive root")
    p = _smallest_period(core.letters)
    return PowerDecomposition(Word(core.letters[:p], w.k), len(core) // p, conj)


class NielsenMove(NamedTuple):
    """One elementary Nielsen automorphism.

    ``kind`` is ``"swap"`` (g_i <-> g_j), ``"invert"`` (g_i -> g_i^-1) or
    ``"right_multiply"`` (g_i -> g_i g_j).
    """

    kind: str
    i: int
    j: int | None = None

    @classmethod
    def swap(cls, i: int, j: int) -> "NielsenMove":
        return cls("swap", i, j)

    @classmethod
    def invert(cls, i: int) -> "NielsenMove":
        return cls("invert", i)

    @classmethod
    def right_multiply(cls, i: int, j: int) -> "NielsenMove":
        return cls("right_multiply", i, j)


def apply_nielsen(w: Word, move: NielsenMove) -> Word:
    kind, i, j = move
    if kind not in ("swap", "invert", "right_multiply"):
        raise ValueError(f"unknown Nielsen move {kind!r}")
    if not 1 <= i <= w.k or (kind != "invert" and not (j is not None and 1 <= j <= w.k)):
        raise ValueError(f"generator index out of range for k={w.k}: {move}")
    if kind != "invert" and i == j:
        raise ValueError(f"{kind} needs two distinct generators, got i=j={i}")

    def image(x: int) -> tuple[int, ...]:
        g, s = abs(x), (1 if x > 0 else -1)
        if kind == "swap":
            if g == i:
                return (s * j,)
            if g == j:
                return (s * i,)
            return (x,)
        if g != i:
            return (x,)
        if kind == "invert":
            return (-x,)
        return (i, j) if s > 0 else (-j, -i)

    out = tuple(y for x in w.letters for y in image(x))
    return free_reduce(Word(out, w.k))


def has_single_occurrence_letter(w: Word) -> bool:
    counts: dict[int, int] = {}
    for x in w.letters:
        counts[abs(x)] = counts.get(abs(x), 0) + 1
    return 1 in counts.values()


def _letter_key(x: int) -> tuple[int, int]:
    # a < A < b < B < ...
    return (abs(x), 0 if x > 0 else 1)


def _least_rotation(letters: tuple[int, ...]) -> tuple[int, ...]:
    if not letters:
        return letters
    keys = [_letter_key(x) for x in letters]
    best = min(range(len(letters)), key=lambda s: keys[s:] + keys[:s])
    return letters[best:] + letters[:best]


def canonical_form(w: Word) -> Word:
    """Least cyclic rotation of the cyclically reduced core (conjugacy-class key)."""
    core, _ = cyclic_reduce(w)
    return Word(_least_rotation(core.letters), w.k)


def canonical_class(w: Word) -> Word:
    """Canonical representative of the class of ``w`` under conjugation and inversion."""
    a = canonical_form(w)
    b = canonical_form(a.inverse())
    ka = [_letter_key(x) for x in a.letters]
    kb = [_letter_key(x) for x in b.letters]
    return a if ka <= kb else b


def cyclically_reduced_words(k: int, length: int) -> Iterable[Word]:
    """All cyclically reduced words of exactly ``length`` letters over ``k`` generators."""
    alphabet = [g for g in range(1, k + 1)] + [-g for g in range(1, k + 1)]

    def extend(prefix: list[int]):
        if len(prefix) == length:
            if length < 2 or prefix[0] != -prefix[-1]:
                yield Word(tuple(prefix), k)
            return
        for x in alphabet:
            if prefix and prefix[-1] == -x:
                continue
            prefix.append(x)
            yield from extend(prefix)
            prefix.pop()

    if length == 0:
        yield Word((), k)
        return
    yield from extend([])
