"""Trail graphs and their realizable quotients.

A *trail* follows a word letter by letter through abstract points (labels).
Each step is an oriented colored edge: letter ``g_j`` goes tail -> head with
color ``j``, letter ``g_j^-1`` is a ``j``-edge pointing backwards.  A partition
of the labels is realizable when no two distinct same-colored edges share a
tail or a head; the fold closure of a set of merges is the finest realizable
partition containing them (Stallings folding over a union-find).

Partitions are canonical tuples (block ids in order of first appearance), so a
quotient is identified with its partition.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable

from . import kernels
from .errors import BudgetExceeded, InvariantViolation
from .words import Word, cyclic_reduce, free_reduce, power_decompose

DEFAULT_MAX_LABELS = 14
DEFAULT_MAX_QUOTIENTS = 2_000_000

TYPE_A = "A"
TYPE_B = "B"


@dataclass(frozen=True)
class TrailSpec:
    """The universal trail of a word.

    ``closed=False`` is the open trail ``s_0 -> ... -> s_|w|``.  ``closed=True``
    is ``r`` disjoint cycles of ``L*|w|`` labels each; the labels
    ``s^i_{j|w|}`` (start of each copy of the word) are marked and must stay
    in distinct blocks.
    """

    word: Word
    L: int = 1
    r: int = 1
    closed: bool = True

    def __post_init__(self):
        if self.L < 1 or self.r < 1:
            raise ValueError("L and r must be positive")
        if not self.closed and (self.L, self.r) != (1, 1):
            raise ValueError("open trails have L = r = 1")
        if self.closed and not self.word.letters and self.L != 1:
            raise ValueError("the empty word has no L-cycles for L > 1")

    @property
    def m(self) -> int:
        return len(self.word)

    @property
    def k(self) -> int:
        return self.word.k

    @cached_property
    def cycle_length(self) -> int:
        return max(self.L * self.m, 1)

    @cached_property
    def n_labels(self) -> int:
        if not self.closed:
            return self.m + 1
        return self.r * self.cycle_length

    @property
    def component_labels(self) -> int:
        return self.n_labels if not self.closed else self.cycle_length

    @cached_property
    def steps(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        """``(colors, tails, heads)`` of every trail step, colors 0-based."""
        colors, tails, heads = [], [], []
        w = self.word.letters
        if not self.closed:
            pairs = [(i, i + 1, w[i]) for i in range(self.m)]
        elif not w:
            pairs = []
        else:
            Lm = self.cycle_length
            pairs = [
                (c * Lm + p, c * Lm + (p + 1) % Lm, w[p % self.m])
                for c in range(self.r)
                for p in range(Lm)
            ]
        for a, b, x in pairs:
            colors.append(abs(x) - 1)
            if x > 0:
                tails.append(a)
                heads.append(b)
            else:
                tails.append(b)
                heads.append(a)
        return tuple(colors), tuple(tails), tuple(heads)

    @cached_property
    def marked_labels(self) -> tuple[int, ...]:
        if not self.closed:
            return ()
        if not self.word.letters:
            return tuple(range(self.r))
        return tuple(
            c * self.cycle_length + j * self.m for c in range(self.r) for j in range(self.L)
        )

    def label_name(self, i: int) -> str:
        if not self.closed:
            return f"c1:p{i}"
        c, p = divmod(i, self.cycle_length)
        return f"c{c + 1}:p{p}"


def open_trail(w: Word) -> TrailSpec:
    return TrailSpec(w, closed=False)


def closed_trail(w: Word, L: int = 1, r: int = 1) -> TrailSpec:
    return TrailSpec(w, L, r, closed=True)


@dataclass(frozen=True, eq=False)
class QuotientGraph:
    """A realizable partition of a trail's labels and its edge-colored multigraph."""

    spec: TrailSpec
    partition: tuple[int, ...]
    v: int
    e: int
    type: str | None = field(default=None, compare=False)

    def __eq__(self, other):
        return (
            isinstance(other, QuotientGraph)
            and self.spec == other.spec
            and self.partition == other.partition
        )

    def __hash__(self):
        return hash(self.partition)

    @property
    def chi(self) -> int:
        return self.e - self.v + 1

    @cached_property
    def traversals(self) -> Counter:
        """Map ``(color, tail_block, head_block)`` -> number of trail steps on that edge."""
        colors, tails, heads = self.spec.steps
        p = self.partition
        return Counter((c, p[t], p[h]) for c, t, h in zip(colors, tails, heads))

    @cached_property
    def e_by_color(self) -> tuple[int, ...]:
        counts = [0] * self.spec.k
        for c, _, _ in self.traversals:
            counts[c] += 1
        return tuple(counts)

    def edges(self) -> list[tuple[int, int, int, int]]:
        """``(color, tail_block, head_block, multiplicity)``; colors 1-based."""
        return sorted((c + 1, t, h, m) for (c, t, h), m in self.traversals.items())

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.v)]
        for label, blk in enumerate(self.partition):
            out[blk].append(label)
        return out

    def is_realizable(self) -> bool:
        seen_out, seen_in = {}, {}
        for c, t, h in self.traversals:
            if seen_out.setdefault((c, t), h) != h or seen_in.setdefault((c, h), t) != t:
                return False
        return True

    def is_cycle_union(self) -> bool:
        """Every vertex has degree exactly two (a disjoint union of cycles)."""
        deg = [0] * self.v
        for _, t, h in self.traversals:
            deg[t] += 1
            deg[h] += 1
        return all(x == 2 for x in deg)

    def cycle_lengths(self) -> list[int]:
        """Vertex counts of the connected components."""
        parent = list(range(self.v))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for _, t, h in self.traversals:
            parent[find(t)] = find(h)
        return sorted(Counter(find(x) for x in range(self.v)).values())

    def to_json(self) -> dict:
        return {
            "blocks": [[self.spec.label_name(i) for i in blk] for blk in self.blocks()],
            # (color, head block, tail block, multiplicity)
            "edges": [[c, h, t, m] for c, t, h, m in self.edges()],
            "v": self.v,
            "e": self.e,
            "chi": self.chi,
            "type": self.type,
        }


def _kernel_args(spec: TrailSpec):
    colors, tails, heads = spec.steps
    return spec.n_labels, max(spec.k, 1), colors, tails, heads


def fold_closure(spec: TrailSpec, seed_pairs: Iterable[tuple[int, int]] = ()) -> QuotientGraph | None:
    """Finest realizable partition merging every seed pair; ``None`` on a marked collision."""
    n, k, colors, tails, heads = _kernel_args(spec)
    part = tuple(range(n))
    res = kernels.fold(n, k, colors, tails, heads, part, -1, -1, spec.marked_labels)
    for a, b in seed_pairs:
        if res is None:
            return None
        res = kernels.fold(n, k, colors, tails, heads, res[0], a, b, spec.marked_labels)
    if res is None:
        return None
    return QuotientGraph(spec, *res)


def universal_graph(spec: TrailSpec) -> QuotientGraph:
    g = fold_closure(spec)
    if g is None:
        raise ValueError("marked labels collide already in the universal graph")
    return g


def _check_budget(spec: TrailSpec, max_labels: int):
    if spec.component_labels > max_labels:
        raise BudgetExceeded(
            f"{spec.component_labels} trail labels per component exceeds budget {max_labels}"
        )


@dataclass
class QuotientSet:
    """All realizable quotients of a trail spec, with the one-merge transitions."""

    spec: TrailSpec
    quotients: list[QuotientGraph]
    # index -> indices of one-merge coarsenings whose chi is exactly one larger
    raises_chi: list[list[int]]

    def __iter__(self):
        return iter(self.quotients)

    def __len__(self):
        return len(self.quotients)

    def census(self) -> dict[tuple[int, str | None], int]:
        return dict(Counter((q.chi, q.type) for q in self.quotients))


def enumerate_quotients(
    spec: TrailSpec,
    max_labels: int = DEFAULT_MAX_LABELS,
    max_quotients: int = DEFAULT_MAX_QUOTIENTS,
    classify: bool | None = None,
) -> QuotientSet:
    """Breadth-first search over all realizable quotients of ``spec``.

    Every realizable quotient is reached: from any finer realizable partition,
    merging two of its blocks that lie in one target block and folding stays
    finer than the target.  For closed single trails the quotients are typed
    A/B unless ``classify=False``.
    """
    _check_budget(spec, max_labels)
    n, k, colors, tails, heads = _kernel_args(spec)
    root = universal_graph(spec)
    index = {root.partition: 0}
    records = [(root.partition, root.v, root.e)]
    raises: list[list[int]] = [[]]
    queue = deque([0])
    marked = spec.marked_labels
    while queue:
        i = queue.popleft()
        part, v, e = records[i]
        chi = e - v + 1
        for cpart, cv, ce in kernels.children(n, k, colors, tails, heads, part, marked):
            j = index.get(cpart)
            if j is None:
                j = len(records)
                if j >= max_quotients:
                    raise BudgetExceeded(f"more than {max_quotients} quotients")
                index[cpart] = j
                records.append((cpart, cv, ce))
                raises.append([])
                queue.append(j)
            if ce - cv + 1 == chi + 1 and j not in raises[i]:
                raises[i].append(j)
    types = [None] * len(records)
    if classify is None:
        classify = spec.closed and (spec.L, spec.r) == (1, 1)
    if classify:
        types = _classify_all(spec, records, raises)
    quotients = [QuotientGraph(spec, p, v, e, t) for (p, v, e), t in zip(records, types)]
    return QuotientSet(spec, quotients, raises)


def _classify_all(spec, records, raises) -> list[str]:
    """Type A iff reachable from the universal graph by merges that each raise chi by one.

    A generating set of size chi builds its quotient one pair at a time, and
    no single pair raises chi by more than one, so every step of a smallest
    generating set raises chi by exactly one.  The pair {s_0, s_|w|} is the
    first such step exactly when the word is not trivial.
    """
    types = [TYPE_B] * len(records)
    if not free_reduce(spec.word).letters:
        return types
    part, v, e = records[0]
    if e - v + 1 != 1:
        raise InvariantViolation(f"universal graph of {spec.word} has chi {e - v + 1} != 1")
    types[0] = TYPE_A
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in raises[i]:
            if types[j] != TYPE_A:
                types[j] = TYPE_A
                queue.append(j)
    return types


def classify_type(gamma: QuotientGraph, spec: TrailSpec | None = None) -> str:
    """Type of a single quotient of a closed single trail, by a targeted search.

    Depth-first from the universal graph, merging only blocks inside a common
    block of ``gamma`` and keeping only merges that raise chi by exactly one.
    """
    spec = spec or gamma.spec
    if not spec.closed and gamma.spec == spec:
        gamma = close_open_quotient(gamma)
        spec = gamma.spec
    if not spec.closed or (spec.L, spec.r) != (1, 1):
        raise ValueError("types are defined for quotients of a single closed trail")
    if gamma.spec != spec:
        raise ValueError("gamma is not a quotient of this trail")
    if not free_reduce(spec.word).letters:
        return TYPE_B
    n, k, colors, tails, heads = _kernel_args(spec)
    root = universal_graph(spec)
    target = gamma.partition
    if any(target[i] != target[j] for i, j in _same_block_pairs(root.partition)):
        raise ValueError("gamma is not a quotient of this trail")
    dead: set[tuple[int, ...]] = set()

    def search(part, chi) -> bool:
        if part == target:
            return True
        if chi >= gamma.chi or part in dead:
            return False
        for cpart, cv, ce in kernels.children(n, k, colors, tails, heads, part, (), target):
            if ce - cv + 1 == chi + 1 and search(cpart, chi + 1):
                return True
        dead.add(part)
        return False

    return TYPE_A if search(root.partition, root.chi) else TYPE_B


def close_open_quotient(gamma: QuotientGraph) -> QuotientGraph:
    """Re-express a quotient of the open trail that merges ``s_0`` and ``s_|w|`` on the closed trail."""
    spec = gamma.spec
    m = spec.m
    if spec.closed:
        return gamma
    if gamma.partition[0] != gamma.partition[m]:
        raise ValueError("quotient does not merge s_0 with s_|w|")
    closed = closed_trail(spec.word)
    ids: dict[int, int] = {}
    part = tuple(ids.setdefault(b, len(ids)) for b in gamma.partition[: max(m, 1)])
    return QuotientGraph(closed, part, gamma.v, gamma.e, gamma.type)


def _same_block_pairs(part):
    first = {}
    for i, b in enumerate(part):
        if b in first:
            yield first[b], i
        else:
            first[b] = i


def edge_traversal_check(gamma: QuotientGraph) -> bool:
    """Type B implies every edge is traversed at least twice."""
    if gamma.type is None:
        raise ValueError("quotient is not classified")
    if gamma.type != TYPE_B:
        return True
    return all(m >= 2 for m in gamma.traversals.values())


INF = float("inf")


def beta(
    w: Word,
    reduce_first: bool = True,
    max_labels: int = DEFAULT_MAX_LABELS,
    max_quotients: int = DEFAULT_MAX_QUOTIENTS,
) -> int | float:
    """Smallest chi of a type-B quotient of the closed trail of ``w`` (``inf`` if none).

    With ``reduce_first`` the cyclically reduced core is analysed, which has
    the same value; pass ``False`` to work on the literal word.
    """
    if reduce_first:
        w, _ = cyclic_reduce(w)
    if not free_reduce(w).letters:
        return 0
    qs = enumerate_quotients(closed_trail(w), max_labels, max_quotients, classify=True)
    chis = [q.chi for q in qs if q.type == TYPE_B]
    return min(chis) if chis else INF


@dataclass
class UpsilonGraph:
    """Pair-dependency graph over the vertices of a cyclically reduced word's cycle."""

    n_vertices: int
    vertices: list[tuple[int, int]]
    edges: list[tuple[int, tuple[int, int], tuple[int, int]]]

    def _components(self) -> tuple[int, bool]:
        parent = {p: p for p in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        comps = len(self.vertices)
        for _, a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                acyclic = False
            else:
                parent[ra] = rb
                comps -= 1
        return comps, acyclic

    @property
    def n_components(self) -> int:
        return self._components()[0]

    def is_forest(self) -> bool:
        return self._components()[1]


def build_upsilon(w: Word) -> UpsilonGraph:
    core, _ = cyclic_reduce(w)
    if core.letters != w.letters or not w.letters:
        raise ValueError(f"{w} is not a non-trivial cyclically reduced word")
    if power_decompose(w).exponent != 1:
        raise ValueError(f"{w} is imprimitive")
    m = len(w)
    colors, tails, heads = closed_trail(w).steps
    by_color: dict[int, list[tuple[int, int]]] = {}
    for c, t, h in zip(colors, tails, heads):
        by_color.setdefault(c, []).append((t, h))
    vertices = [(x, y) for x in range(m) for y in range(x + 1, m)]
    edges = []
    for c, es in sorted(by_color.items()):
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                (t1, h1), (t2, h2) = es[i], es[j]
                edges.append((c + 1, tuple(sorted((h1, h2))), tuple(sorted((t1, t2)))))
    g = UpsilonGraph(m, vertices, edges)
    expected = comb(m, 2)
    if len(vertices) != expected or len(edges) != sum(comb(len(es), 2) for es in by_color.values()):
        raise InvariantViolation("upsilon graph has the wrong size")
    return g


@dataclass
class CycleUnionCensus:
    """Quotients of ``r`` marked ``L``-cycles of ``w`` that are disjoint unions of cycles."""

    word: Word
    L: int
    r: int
    root: Word
    d: int
    total: int
    by_profile: dict[tuple[int, ...], int]
    # h -> number of quotients whose cycles all have that h
    pure: dict[int, int]
    # h -> {free spots: number of pure-h quotients}
    free_spots: dict[int, dict[int, int]]


def _h_allowed(h: int, d: int, L: int) -> bool:
    from math import gcd

    return d % h == 0 and gcd(d // h, L) == 1


def count_cycle_unions(
    w: Word,
    L: int,
    r: int,
    max_states: int = DEFAULT_MAX_QUOTIENTS,
    exhaustive: bool = False,
    max_labels: int = DEFAULT_MAX_LABELS,
) -> CycleUnionCensus:
    """Census of the cycle-union quotients in the ``(w, L, r)`` quotient set.

    By default the search only walks through cycle unions: any realizable
    quotient finer than a cycle union immerses into it, so each of its
    components carries a cyclic fundamental group and is itself a cycle.
    ``exhaustive=True`` instead filters the full enumeration (small cases).
    """
    core, _ = cyclic_reduce(w)
    if not core.letters:
        raise ValueError("the trivial word has no primitive root")
    root_word, d, _ = power_decompose(core)
    spec = closed_trail(core, L, r)
    if exhaustive:
        states = [q for q in enumerate_quotients(spec, max_labels) if q.chi == 1]
        for q in states:
            if not q.is_cycle_union():
                raise InvariantViolation(f"chi=1 quotient of {w} is not a union of cycles")
    else:
        states = _cycle_union_search(spec, max_states)

    ulen = len(root_word)
    by_profile: Counter = Counter()
    pure: Counter = Counter()
    free: dict[int, Counter] = {}
    for q in states:
        hs = []
        for length in q.cycle_lengths():
            h, rem = divmod(length, L * ulen)
            if rem or not _h_allowed(h, d, L):
                raise InvariantViolation(
                    f"cycle of length {length} for {w} (L={L}) has h outside H(d, L)"
                )
            hs.append(h)
        hs.sort()
        by_profile[tuple(hs)] += 1
        if hs and hs[0] == hs[-1]:
            h = hs[0]
            pure[h] += 1
            free.setdefault(h, Counter())[h * len(hs) - r] += 1
    return CycleUnionCensus(
        word=w,
        L=L,
        r=r,
        root=root_word,
        d=d,
        total=len(states),
        by_profile=dict(by_profile),
        pure=dict(pure),
        free_spots={h: dict(c) for h, c in free.items()},
    )


def _cycle_union_search(spec: TrailSpec, max_states: int) -> list[QuotientGraph]:
    n, k, colors, tails, heads = _kernel_args(spec)
    root = universal_graph(spec)
    if root.e != root.v:
        raise InvariantViolation("universal graph of a cyclically reduced word is not a cycle union")
    seen = {root.partition: root}
    queue = deque([root])
    while queue:
        q = queue.popleft()
        for cpart, cv, ce in kernels.children(n, k, colors, tails, heads, q.partition, spec.marked_labels):
            if ce != cv or cpart in seen:
                continue
            if len(seen) >= max_states:
                raise BudgetExceeded(f"more than {max_states} cycle-union quotients")
            child = QuotientGraph(spec, cpart, cv, ce)
            seen[cpart] = child
            queue.append(child)
    return list(seen.values())
