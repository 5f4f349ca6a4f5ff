"""Word maps on symmetric groups: evaluation, cycle counts, sampling and exact enumeration.

Permutations are stored 0-based; words are composed left to right, so the
first letter acts first.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, sqrt

import numpy as np

from . import kernels
from .errors import BudgetExceeded
from .words import Word

DEFAULT_BRUTEFORCE_LIMIT = 10**7
GENERATOR_ID = f"numpy.random.Philox (SeedSequence((seed, batch))), numpy {np.__version__}"
_BATCH_ENTRIES = 1 << 20


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("not a permutation of 0..n-1")

    @classmethod
    def from_one_based(cls, images) -> "Permutation":
        return cls(tuple(int(x) - 1 for x in images))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.images)

    def one_based(self) -> list[int]:
        return [x + 1 for x in self.images]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(tuple(inv))

    def __call__(self, x: int) -> int:
        return self.images[x]


def evaluate_word(w: Word, perms) -> Permutation:
    """``w(sigma_1, ..., sigma_k)``, the first letter applied first."""
    perms = [p if isinstance(p, Permutation) else Permutation(tuple(p)) for p in perms]
    if len(perms) < w.k:
        raise ValueError(f"need {w.k} permutations, got {len(perms)}")
    sizes = {p.n for p in perms}
    if len(sizes) > 1:
        raise ValueError(f"permutations of different degrees {sorted(sizes)}")
    n = perms[0].n if perms else 0
    invs = {}
    img = list(range(n))
    for x in w.letters:
        g = abs(x) - 1
        if x > 0:
            p = perms[g].images
        else:
            if g not in invs:
                invs[g] = perms[g].inverse().images
            p = invs[g]
        img = [p[y] for y in img]
    return Permutation(tuple(img))


def count_L_cycles(p: Permutation, L: int) -> int:
    if L < 1:
        raise ValueError("L must be positive")
    return int(kernels.count_cycles_batch(np.array([p.images], dtype=np.intc), L)[0]) if p.n else 0


def cycle_type(p: Permutation) -> dict[int, int]:
    seen = [False] * p.n
    out: dict[int, int] = {}
    for x in range(p.n):
        length = 0
        while not seen[x]:
            seen[x] = True
            x = p.images[x]
            length += 1
        if length:
            out[length] = out.get(length, 0) + 1
    return out


def _evaluate_batch(w: Word, perms: np.ndarray, invs: np.ndarray) -> np.ndarray:
    """Row-wise word images; ``perms[g]`` has shape (batch, n)."""
    batch, n = perms.shape[1], perms.shape[2]
    img = np.broadcast_to(np.arange(n), (batch, n)).copy()
    for x in w.letters:
        src = perms[x - 1] if x > 0 else invs[-x - 1]
        img = np.take_along_axis(src, img, axis=1)
    return img


def _inverse_batch(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    rows = np.arange(p.shape[0])[:, None]
    inv[rows, p] = np.arange(p.shape[1])
    return inv


def sample_permutations(rng: np.random.Generator, k: int, batch: int, n: int) -> np.ndarray:
    """``k`` stacks of ``batch`` independent uniform permutations of degree ``n``."""
    base = np.broadcast_to(np.arange(n, dtype=np.int64), (batch, n))
    return np.stack([rng.permuted(base, axis=1) for _ in range(k)]) if k else np.empty((0, batch, n), np.int64)


def batch_rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, batch))))


def sample_counts(w: Word, L: int, n: int, samples: int, seed: int) -> np.ndarray:
    """L-cycle counts of ``w`` at ``samples`` i.i.d. uniform permutation tuples."""
    batch = max(1, _BATCH_ENTRIES // max(n * max(w.k, 1), 1))
    out = np.empty(samples, dtype=np.int64)
    done = 0
    b = 0
    while done < samples:
        size = min(batch, samples - done)
        rng = batch_rng(seed, b)
        perms = sample_permutations(rng, w.k, size, n)
        invs = np.stack([_inverse_batch(p) for p in perms]) if w.k else perms
        img = _evaluate_batch(w, perms, invs)
        out[done : done + size] = kernels.count_cycles_batch(img.astype(np.intc), L)
        done += size
        b += 1
    return out


def empirical_factorial_moment(counts: np.ndarray, r: int) -> tuple[float, float]:
    """Mean of ``[X]_r`` over the sample and its standard error."""
    vals = np.ones(len(counts), dtype=float)
    for i in range(r):
        vals *= counts - i
    se = vals.std(ddof=1) / sqrt(len(vals)) if len(vals) > 1 else float("nan")
    return float(vals.mean()), float(se)


@dataclass
class SampleReport:
    word: Word
    L: int
    n: int
    sample_count: int
    seed: int
    empirical_pmf: list[float]
    empirical_mean: float
    mean_stderr: float
    empirical_factorial_moments: list[float]
    factorial_moment_stderr: list[float]
    generator: str = GENERATOR_ID
    histogram: list[int] = field(default_factory=list)

    def pmf_stderr(self) -> list[float]:
        N = self.sample_count
        return [sqrt(p * (1 - p) / N) for p in self.empirical_pmf]

    def to_json(self) -> dict:
        return {
            "word": str(self.word),
            "L": self.L,
            "n": self.n,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "generator": self.generator,
            "histogram": self.histogram,
            "empirical_pmf": self.empirical_pmf,
            "empirical_mean": self.empirical_mean,
            "mean_stderr": self.mean_stderr,
            "empirical_factorial_moments": self.empirical_factorial_moments,
            "factorial_moment_stderr": self.factorial_moment_stderr,
        }


def mc_estimate(w: Word, L: int, n: int, samples: int, seed: int, r_max: int = 4) -> SampleReport:
    if samples < 1 or n < 1:
        raise ValueError("need samples >= 1 and n >= 1")
    counts = sample_counts(w, L, n, samples, seed)
    hist = np.bincount(counts, minlength=n // L + 1)
    moments = [empirical_factorial_moment(counts, r) for r in range(1, r_max + 1)]
    return SampleReport(
        word=w,
        L=L,
        n=n,
        sample_count=samples,
        seed=seed,
        empirical_pmf=(hist / samples).tolist(),
        empirical_mean=moments[0][0],
        mean_stderr=moments[0][1],
        empirical_factorial_moments=[m for m, _ in moments],
        factorial_moment_stderr=[s for _, s in moments],
        histogram=hist.tolist(),
    )


def compare_pmf(report: SampleReport, reference, sigmas: float = 5.0, floor: float | None = None) -> dict:
    """Per-bin comparison of an empirical pmf with a reference pmf.

    A bin passes when ``|p_emp - p_ref| <= sigmas * se + floor``, where ``se``
    uses the reference probability (and ``floor`` defaults to ``sigmas/N``
    so zero-probability bins are not flagged for a single observation).
    """
    N = report.sample_count
    floor = sigmas / N if floor is None else floor
    ref = list(reference)
    size = max(len(ref), len(report.empirical_pmf))
    worst = 0.0
    failures = []
    tv = 0.0
    for v in range(size):
        p = report.empirical_pmf[v] if v < len(report.empirical_pmf) else 0.0
        q = ref[v] if v < len(ref) else 0.0
        tv += abs(p - q)
        se = sqrt(max(q * (1 - q), 0.0) / N)
        gap = abs(p - q)
        worst = max(worst, gap / (sigmas * se + floor))
        if gap > sigmas * se + floor:
            failures.append(v)
    return {"tv_distance": tv / 2, "worst_ratio": worst, "failing_bins": failures}


def _all_permutations(n: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intc).reshape(-1, n)
    invs = np.argsort(perms, axis=1).astype(np.intc)
    return perms, invs


def _histogram_chunk(args):
    perms, invs, gens, signs, k_used, L, lo, hi = args
    return kernels.bruteforce_histogram(perms, invs, gens, signs, k_used, L, lo, hi)


def exact_histogram(w: Word, L: int, n: int, limit: int = DEFAULT_BRUTEFORCE_LIMIT, workers: int = 1) -> list[int]:
    """Counts of ``X_{w,L}`` over all tuples of permutations of the generators ``w`` uses."""
    used = w.generators_used()
    total = factorial(n) ** len(used)
    if total > limit:
        raise BudgetExceeded(f"(n!)^k = {total} exceeds brute-force limit {limit}")
    size = n // L + 1
    if not used:
        hist = [0] * size
        hist[n // L if L == 1 else 0] = 1
        return hist
    pos = {g: i for i, g in enumerate(used)}
    gens = np.array([pos[abs(x)] for x in w.letters], dtype=np.intc)
    signs = np.array([1 if x > 0 else -1 for x in w.letters], dtype=np.intc)
    perms, invs = _all_permutations(n)
    n_perm = len(perms)
    chunks = max(1, min(n_perm, workers * 4))
    bounds = [n_perm * i // chunks for i in range(chunks + 1)]
    jobs = [(perms, invs, gens, signs, len(used), L, bounds[i], bounds[i + 1]) for i in range(chunks)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_histogram_chunk, jobs))
    else:
        parts = [_histogram_chunk(j) for j in jobs]
    hist = np.sum(parts, axis=0)
    return [int(x) for x in hist]


def exact_expectation_bruteforce(
    w: Word, L: int, r: int, n: int, limit: int = DEFAULT_BRUTEFORCE_LIMIT, workers: int = 1
) -> Fraction:
    """``E([X_{w,L}]_r)`` at degree ``n`` by enumerating every permutation tuple."""
    if n < 1:
        raise ValueError("n must be positive")
    hist = exact_histogram(w, L, n, limit, workers)
    total = sum(hist)
    acc = 0
    for x, c in enumerate(hist):
        ff = 1
        for i in range(r):
            ff *= x - i
        acc += c * ff
    return Fraction(acc, total)
