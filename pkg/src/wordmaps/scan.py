"""Batch scan of short words: compare the quotient invariant beta with the series order phi."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetExceeded
from .quotients import (
    DEFAULT_MAX_LABELS,
    DEFAULT_MAX_QUOTIENTS,
    INF,
    TYPE_A,
    build_upsilon,
    closed_trail,
    enumerate_quotients,
)
from .series import phi_and_series
from .words import Word, canonical_class, cyclically_reduced_words, has_single_occurrence_letter, power_decompose

CONFIRMED = "CONFIRMED"
CONFIRMED_INF = "CONFIRMED-inf"
VIOLATED = "VIOLATED"
UNDECIDED = "UNDECIDED"


@dataclass
class ScanRow:
    word: Word
    beta: int | float | None
    phi: int | float | None
    a_phi: int | None
    typeB_at_phi: int | None
    verdict: str
    upsilon: dict | None = None

    def to_json(self) -> dict:
        def num(x):
            return "inf" if x == INF else x

        out = {
            "word": str(self.word),
            "beta": num(self.beta),
            "phi": num(self.phi),
            "a_phi": self.a_phi,
            "typeB_at_phi": self.typeB_at_phi,
            "verdict": self.verdict,
        }
        if self.upsilon is not None:
            out["upsilon"] = self.upsilon
        return out


def class_representatives(k: int, max_len: int, min_len: int = 1) -> list[Word]:
    """One word per conjugacy-and-inversion class of cyclically reduced words, by length."""
    reps: list[Word] = []
    for length in range(min_len, max_len + 1):
        seen = set()
        for w in cyclically_reduced_words(k, length):
            c = canonical_class(w)
            if c not in seen:
                seen.add(c)
                reps.append(c)
    return reps


def upsilon_report(w: Word, max_labels: int = DEFAULT_MAX_LABELS) -> dict | None:
    """Component count of the pair graph against the number of chi = 2 type-A quotients.

    Only reported: the injectivity relating the two is not assumed.
    """
    if not w.letters or power_decompose(w).exponent != 1:
        return None
    ups = build_upsilon(w)
    qs = enumerate_quotients(closed_trail(w), max_labels)
    typeA2 = sum(1 for q in qs if q.type == TYPE_A and q.chi == 2)
    comps = ups.n_components
    return {
        "forest": ups.is_forest(),
        "components": comps,
        "typeA_chi2": typeA2,
        "bound_holds": typeA2 <= comps,
    }


def scan_word(w: Word, max_labels: int = DEFAULT_MAX_LABELS, max_quotients: int = DEFAULT_MAX_QUOTIENTS,
              upsilon: bool = False) -> ScanRow:
    if has_single_occurrence_letter(w):
        # a letter used once makes w part of a free basis: beta = phi = inf
        return ScanRow(w, INF, INF, None, None, CONFIRMED_INF)
    try:
        a = phi_and_series(w, max_labels=max_labels, max_quotients=max_quotients)
        ups = upsilon_report(w, max_labels) if upsilon else None
    except BudgetExceeded:
        return ScanRow(w, None, None, None, None, UNDECIDED)
    a_phi = a.a_coeffs[int(a.phi)] if a.phi != INF else None
    return ScanRow(w, a.beta, a.phi, a_phi, a.typeB_count_at_phi, a.conjecture_verdict, ups)


def scan(k: int, max_len: int, min_len: int = 1, **kw) -> list[ScanRow]:
    return [scan_word(w, **kw) for w in class_representatives(k, max_len, min_len)]


def summarize(rows: list[ScanRow]) -> dict[str, int]:
    out = {CONFIRMED: 0, CONFIRMED_INF: 0, VIOLATED: 0, UNDECIDED: 0}
    for r in rows:
        out[r.verdict] += 1
    return out
