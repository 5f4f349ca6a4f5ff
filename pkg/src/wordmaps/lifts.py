"""Random n-lifts of a labeled base graph, their spectra, and the universal-cover radius.

A base edge ``g = (u, v)`` lifts to the edges ``(u, j) -> (v, sigma_g(j))``.
Adjacency matrices count both directions of every edge, so a loop adds 2 to
its diagonal entry and ``tr(A^t)`` counts closed walks of length ``t``.
"""
from __future__ import annotations

import itertools
import string
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, sqrt
from pathlib import Path

import numpy as np

from .errors import BudgetExceeded, InvariantViolation
from .perms import DEFAULT_BRUTEFORCE_LIMIT, _all_permutations, batch_rng
from .quotients import INF, beta
from .series import expectation_rational, phi_rational
from .words import Word, canonical_class

DEFAULT_EIG_BUDGET = 4000
DEFAULT_PATH_BUDGET = 10**7
DEFAULT_BALL_BUDGET = 200_000
MATCH_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BaseGraph:
    """Connected multigraph with oriented edges ``(tail, head)``; edge ``i`` carries label ``g_{i+1}``."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("a base graph needs a vertex")
        for t, h in self.edges:
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise ValueError(f"edge ({t}, {h}) leaves the vertex range")
        if not self._connected():
            raise ValueError("base graph is disconnected")

    def _connected(self) -> bool:
        adj: dict[int, set] = {v: set() for v in range(self.vertex_count)}
        for t, h in self.edges:
            adj[t].add(h)
            adj[h].add(t)
        seen, stack = {0}, [0]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.vertex_count

    @property
    def k(self) -> int:
        return len(self.edges)

    @classmethod
    def bouquet(cls, k: int) -> "BaseGraph":
        return cls(1, tuple((0, 0) for _ in range(k)))

    @classmethod
    def cycle(cls, length: int) -> "BaseGraph":
        return cls(length, tuple((i, (i + 1) % length) for i in range(length)))

    def darts(self) -> list[tuple[int, int, int]]:
        """``(start, end, signed label)`` for both traversal directions of every edge."""
        out = []
        for i, (t, h) in enumerate(self.edges):
            out.append((t, h, i + 1))
            out.append((h, t, -(i + 1)))
        return out

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        for t, h in self.edges:
            A[t, h] += 1
            A[h, t] += 1
        return A

    def degrees(self) -> list[int]:
        return self.adjacency().sum(axis=1).tolist()

    def regular_degree(self) -> int | None:
        ds = set(self.degrees())
        return ds.pop() if len(ds) == 1 else None


def _label_index(token: str) -> int:
    if token.isdigit():
        return int(token)
    if len(token) == 1 and token in string.ascii_lowercase:
        return ord(token) - ord("a") + 1
    if token.startswith("g") and token[1:].isdigit():
        return int(token[1:])
    raise ValueError(f"bad edge label {token!r}")


def parse_base_graph(text: str) -> BaseGraph:
    """Lines ``tail head label`` (1-based vertices, labels a, b, ... or g1, g2, ...); ``#`` comments."""
    edges: dict[int, tuple[int, int]] = {}
    vertices = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'tail head label'")
        try:
            t, h = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: vertices must be integers") from None
        if t < 1 or h < 1:
            raise ValueError(f"line {lineno}: vertices are 1-based")
        label = _label_index(parts[2])
        if label in edges:
            raise ValueError(f"line {lineno}: duplicate label {parts[2]}")
        edges[label] = (t - 1, h - 1)
        vertices = max(vertices, t, h)
    if not edges:
        raise ValueError("no edges")
    if sorted(edges) != list(range(1, len(edges) + 1)):
        raise ValueError("labels must be 1..k without gaps")
    return BaseGraph(vertices, tuple(edges[i] for i in range(1, len(edges) + 1)))


def load_base_graph(path) -> BaseGraph:
    return parse_base_graph(Path(path).read_text())


def lambda1(G: BaseGraph) -> float:
    return float(np.linalg.eigvalsh(G.adjacency().astype(float))[-1])


@dataclass
class LiftSample:
    base: BaseGraph
    n: int
    permutations: list[np.ndarray]
    seed: int | None = None

    def adjacency(self) -> np.ndarray:
        return lift_adjacency(self.base, self.permutations)


def lift_adjacency(G: BaseGraph, perms) -> np.ndarray:
    n = len(perms[0]) if len(perms) else 1
    N = G.vertex_count * n
    A = np.zeros((N, N), dtype=np.int64)
    j = np.arange(n)
    for (t, h), sigma in zip(G.edges, perms):
        rows = t * n + j
        cols = h * n + np.asarray(sigma)
        np.add.at(A, (rows, cols), 1)
        np.add.at(A, (cols, rows), 1)
    return A


def sample_lift(G: BaseGraph, n: int, seed: int) -> LiftSample:
    if n < 1:
        raise ValueError("n must be positive")
    rng = batch_rng(seed, 0)
    perms = [rng.permutation(n) for _ in range(G.k)]
    return LiftSample(G, n, perms, seed)


@dataclass
class SpectrumReport:
    old_eigenvalues: list[float]
    new_eigenvalues: list[float]
    mu_max: float
    lambda1: float
    matching_tolerance: float
    max_residual: float
    all_eigenvalues: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "mu_max": "none" if self.mu_max == -INF else self.mu_max,
            "old_eigenvalues": self.old_eigenvalues,
            "new_eigenvalue_count": len(self.new_eigenvalues),
            "matching_tolerance": self.matching_tolerance,
            "max_matching_residual": self.max_residual,
        }


def spectrum_report(H: LiftSample, tolerance: float = MATCH_TOLERANCE, budget: int = DEFAULT_EIG_BUDGET) -> SpectrumReport:
    N = H.n * H.base.vertex_count
    if N > budget:
        raise BudgetExceeded(f"lift has {N} vertices, eigensolve budget is {budget}")
    lift = np.linalg.eigvalsh(H.adjacency().astype(float))
    base = np.linalg.eigvalsh(H.base.adjacency().astype(float))
    free = np.ones(len(lift), dtype=bool)
    residual = 0.0
    for lam in base[::-1]:
        gaps = np.where(free, np.abs(lift - lam), np.inf)
        i = int(np.argmin(gaps))
        residual = max(residual, float(gaps[i]))
        free[i] = False
    if residual > tolerance:
        raise InvariantViolation(f"base eigenvalue unmatched in lift spectrum (residual {residual:.3g})")
    new = lift[free]
    mu = float(np.max(np.abs(new))) if len(new) else -INF
    return SpectrumReport(
        old_eigenvalues=sorted(base.tolist(), reverse=True),
        new_eigenvalues=sorted(new.tolist(), reverse=True),
        mu_max=mu,
        lambda1=float(base[-1]),
        matching_tolerance=tolerance,
        max_residual=residual,
        all_eigenvalues=sorted(lift.tolist(), reverse=True),
    )


# -- universal cover ---------------------------------------------------------


def _dart_children(G: BaseGraph):
    """For each dart, the darts continuing it without backtracking."""
    darts = G.darts()
    out = []
    for i, (_, end, _) in enumerate(darts):
        rev = i ^ 1  # darts come in (forward, backward) pairs
        out.append([j for j, (s, _, _) in enumerate(darts) if s == end and j != rev])
    roots = {v: [j for j, (s, _, _) in enumerate(darts) if s == v] for v in range(G.vertex_count)}
    return darts, out, roots


def ball_is_below(G: BaseGraph, root: int, radius: int, lam: float) -> bool:
    """Whether ``lam`` exceeds the top eigenvalue of the radius-``radius`` ball of the cover.

    Eliminates the tree from the leaves: ``lam I - A`` is positive definite
    iff every pivot ``c = lam - sum(1/c_child)`` is positive.  Vertices at the
    same depth entered by the same dart share their pivot.
    """
    _, children, roots = _dart_children(G)
    c = [lam] * len(children)
    for _ in range(radius - 1):
        nxt = []
        for ch in children:
            s = 0.0
            for j in ch:
                if c[j] <= 0:
                    return False
                s += 1.0 / c[j]
            nxt.append(lam - s)
        c = nxt
    if radius == 0:
        return lam > 0
    s = 0.0
    for j in roots[root]:
        if c[j] <= 0:
            return False
        s += 1.0 / c[j]
    return lam - s > 0


def ball_top_eigenvalue(G: BaseGraph, root: int, radius: int, tol: float = 1e-13) -> float:
    """Largest adjacency eigenvalue of the ball, by bisection on the pivot test."""
    lo, hi = 0.0, float(max(G.degrees())) + 1.0
    while hi - lo > tol * max(1.0, hi):
        mid = (lo + hi) / 2
        if ball_is_below(G, root, radius, mid):
            hi = mid
        else:
            lo = mid
    return lo


def ball_adjacency(G: BaseGraph, root: int, radius: int, budget: int = DEFAULT_BALL_BUDGET) -> np.ndarray:
    """Explicit adjacency of the cover's ball (vertices = non-backtracking dart paths from ``root``)."""
    darts, children, roots = _dart_children(G)
    parents = [-1]
    frontier = [(0, j) for j in roots[root]]
    edges = []
    for _ in range(radius):
        nxt = []
        for parent, d in frontier:
            idx = len(parents)
            if idx >= budget:
                raise BudgetExceeded(f"ball exceeds {budget} vertices")
            parents.append(parent)
            edges.append((parent, idx))
            nxt.extend((idx, j) for j in children[d])
        frontier = nxt
    A = np.zeros((len(parents), len(parents)))
    for a, b in edges:
        A[a, b] = A[b, a] = 1
    return A


def closed_walk_counts(G: BaseGraph, root: int, s_max: int) -> list[int]:
    """``t_s(root)`` for ``s = 0..s_max``: closed walks of length ``s`` at a lift of ``root`` in the cover.

    Excursion series: ``F_e = x^2 / (1 - sum_{e' child of e} F_e')`` truncated
    at depth ``ceil(s_max/2)``, then ``1 / (1 - sum_{e at root} F_e)``.
    """
    _, children, roots = _dart_children(G)

    def inv_one_minus(series):
        # 1 / (1 - series), series has zero constant term
        out = [1] + [0] * s_max
        for i in range(1, s_max + 1):
            out[i] = sum(series[j] * out[i - j] for j in range(1, i + 1))
        return out

    zero = [0] * (s_max + 1)
    F = [zero] * len(children)
    for _ in range(ceil(s_max / 2)):
        nxt = []
        for ch in children:
            tot = [sum(F[j][i] for j in ch) for i in range(s_max + 1)]
            g = inv_one_minus(tot)
            nxt.append([0, 0] + g[: s_max - 1] if s_max >= 1 else [0])
        F = [f[: s_max + 1] for f in nxt]
    tot = [sum(F[j][i] for j in roots[root]) for i in range(s_max + 1)]
    return inv_one_minus(tot)


@dataclass
class RhoEstimate:
    lower_bound: float
    upper_bound: float
    t_s_sequence: list[tuple[int, int, float]]
    closed_form: float | None
    radius: int

    def to_json(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "closed_form": self.closed_form,
            "radius": self.radius,
            "t_s": [{"s": s, "t_s": t, "t_s^(1/s)": r} for s, t, r in self.t_s_sequence],
        }


def rho(G: BaseGraph, radius: int, s_max: int | None = None) -> RhoEstimate:
    """Spectral radius of the universal cover: closed form for regular bases, else a bracket.

    The lower bound is the top eigenvalue of the radius ball (a finite
    subgraph of the cover), maximised over roots.
    """
    if radius < 1:
        raise ValueError("radius must be positive")
    lower = max(ball_top_eigenvalue(G, v, radius) for v in range(G.vertex_count))
    d = G.regular_degree()
    closed = 2 * sqrt(d - 1) if d is not None and d >= 1 else None
    if s_max is None:
        s_max = 2 * radius
    walks = closed_walk_counts(G, 0, s_max)
    seq = [(s, t, t ** (1 / s)) for s, t in enumerate(walks) if s > 0 and t > 0]
    upper = closed if closed is not None else lambda1(G)
    return RhoEstimate(lower, upper, seq, closed, radius)


def theorem_bound(lam1: float, rho_value: float) -> float:
    """``max(1, 3 (rho/lambda1)^(2/3)) * lambda1^(1/3) * rho^(2/3)``."""
    if rho_value <= 0:
        raise ValueError("rho must be positive")
    if rho_value > lam1 * (1 + 1e-12):
        raise ValueError(f"rho = {rho_value} exceeds lambda1 = {lam1}")
    return max(1.0, 3 * (rho_value / lam1) ** (2 / 3)) * lam1 ** (1 / 3) * rho_value ** (2 / 3)


# -- closed paths -----------------------------------------------------------


def trace_power(A: np.ndarray, t: int) -> int:
    """Exact ``tr(A^t)`` with Python integers."""
    M = [[int(x) for x in row] for row in A]
    n = len(M)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    base = M
    while t:
        if t & 1:
            R = _matmul(R, base)
        t >>= 1
        if t:
            base = _matmul(base, base)
    return sum(R[i][i] for i in range(n))


def _matmul(X, Y):
    Yt = list(zip(*Y))
    return [[sum(a * b for a, b in zip(row, col)) for col in Yt] for row in X]


def enumerate_closed_paths(G: BaseGraph, t: int, budget: int = DEFAULT_PATH_BUDGET) -> list[tuple[Word, int]]:
    """Every closed path of length ``t`` as (label word, start vertex)."""
    total = trace_power(G.adjacency(), t)
    if total > budget:
        raise BudgetExceeded(f"{total} closed paths exceed budget {budget}")
    by_start: dict[int, list] = {v: [] for v in range(G.vertex_count)}
    for s, e, x in G.darts():
        by_start[s].append((e, x))
    out = []
    path: list[int] = []

    def walk(start, v, depth):
        if depth == t:
            if v == start:
                out.append((Word(tuple(path), G.k), start))
            return
        for e, x in by_start[v]:
            path.append(x)
            walk(start, e, depth + 1)
            path.pop()

    for v in range(G.vertex_count):
        walk(v, v, 0)
    if len(out) != total:
        raise InvariantViolation(f"{len(out)} closed paths but tr(A^{t}) = {total}")
    return out


def _beta_class(b) -> str:
    return str(b) if b in (0, 1, 2) else ">=3"


def table_phi_bound(beta_class: str, t: int, n: int) -> Fraction:
    """Upper bound on ``Phi_w(n)`` for closed paths of length ``t`` by beta class."""
    n = Fraction(n)
    if beta_class == "0":
        return 1 + t**4 / n
    if beta_class == "1":
        return (t**2 + t**6 / n) / n
    if beta_class == "2":
        return (t**4 + t**8 / n) / n**2
    return (3 * t**6 + t**10 / n) / n**3


def census_beta(G: BaseGraph, t: int, n: int | None = None, budget: int = DEFAULT_PATH_BUDGET, **qbudget) -> dict:
    """Closed paths of length ``t`` grouped by beta, with the counting bounds for each group."""
    paths = enumerate_closed_paths(G, t, budget)
    cache: dict[Word, object] = {}
    counts = Counter()
    phi_max: dict[str, Fraction] = {}
    phi_cache: dict[Word, Fraction] = {}
    for w, _ in paths:
        key = canonical_class(w)
        if key not in cache:
            cache[key] = beta(key, reduce_first=False, **qbudget)
        cls = _beta_class(cache[key])
        counts[cls] += 1
        if n is not None:
            if key not in phi_cache:
                phi_cache[key] = phi_rational(key, **qbudget)(n)
            phi_max[cls] = max(phi_max.get(cls, phi_cache[key]), phi_cache[key])
    est = rho(G, radius=max(t, 4))
    lam = lambda1(G)
    V = G.vertex_count
    classes = ["0", "1", "2", ">=3"]

    def size_bounds(r):
        return {"0": V * r**t, "1": V * t**4 * r**t, "2": V * t**7 * 3**t * r**t, ">=3": V * lam**t}

    hi = size_bounds(est.upper_bound)
    lo = size_bounds(est.lower_bound)
    report = {
        "t": t,
        "total": len(paths),
        "classes_computed": len(cache),
        "counts": {c: counts.get(c, 0) for c in classes},
        "rho": est.to_json(),
        "lambda1": lam,
        "size_bound": hi,
        "size_bound_at_rho_lower": lo,
        "beta0_exact": sum(closed_walk_counts(G, v, t)[t] for v in range(V)),
    }
    if n is not None:
        if n < 3 * t * t:
            report["phi_bound_note"] = "n < 3 t^2: the Phi bounds are only claimed for n >= 3 t^2"
        report["n"] = n
        report["phi_max"] = {c: str(phi_max[c]) for c in classes if c in phi_max}
        report["phi_bound"] = {c: str(table_phi_bound(c, t, n)) for c in classes}
        report["phi_within_bound"] = {
            c: phi_max[c] <= table_phi_bound(c, t, n) for c in classes if c in phi_max
        }
    return report


def trace_identity_check(
    G: BaseGraph, t: int, n: int, limit: int = DEFAULT_BRUTEFORCE_LIMIT, **qbudget
) -> tuple[Fraction, Fraction]:
    """Average of ``tr(A_H^t) - tr(A_G^t)`` over every n-lift, and the word-sum formula for it."""
    from math import factorial

    total = factorial(n) ** G.k
    if total > limit:
        raise BudgetExceeded(f"{total} lifts exceed brute-force limit {limit}")
    base_trace = trace_power(G.adjacency(), t)
    perms, _ = _all_permutations(n)
    acc = 0
    for combo in itertools.product(range(len(perms)), repeat=G.k):
        A = lift_adjacency(G, [perms[i] for i in combo])
        acc += trace_power(A, t) - base_trace
    lhs = Fraction(acc, total)
    rhs = Fraction(0)
    cache: dict[Word, Fraction] = {}
    for w, _ in enumerate_closed_paths(G, t):
        key = canonical_class(w)
        if key not in cache:
            cache[key] = expectation_rational(key, 1, 1, **qbudget)(n) - 1
        rhs += cache[key]
    return lhs, rhs
