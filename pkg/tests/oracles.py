"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package's quotient or kernel code: trails are built
from scratch, partitions are scanned exhaustively and folding is a naive
fixpoint loop.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial


def trail_steps(letters, closed=True, L=1, r=1):
    """(color, tail, head) per step; labels c*L*m + p (closed) or 0..m (open)."""
    m = len(letters)
    steps = []
    if closed:
        Lm = L * m
        for c in range(r):
            for p in range(Lm):
                a, b = c * Lm + p, c * Lm + (p + 1) % Lm
                x = letters[p % m]
                steps.append((abs(x), a, b) if x > 0 else (abs(x), b, a))
        n_labels = r * Lm
        marked = [c * Lm + j * m for c in range(r) for j in range(L)]
    else:
        for i, x in enumerate(letters):
            steps.append((abs(x), i, i + 1) if x > 0 else (abs(x), i + 1, i))
        n_labels = m + 1
        marked = []
    return n_labels, steps, marked


def set_partitions(n):
    """All set partitions of range(n) as restricted growth strings."""
    if n == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from rec(prefix, max(top, b))
            prefix.pop()

    yield from rec([0], 0)


def realizable(part, steps):
    out, inn = {}, {}
    for c, t, h in steps:
        if out.setdefault((c, part[t]), part[h]) != part[h]:
            return False
        if inn.setdefault((c, part[h]), part[t]) != part[t]:
            return False
    return True


def canon(part):
    ids = {}
    return tuple(ids.setdefault(b, len(ids)) for b in part)


def all_quotients(letters, closed=True, L=1, r=1):
    """Every realizable partition with marked labels apart (exhaustive scan)."""
    n, steps, marked = trail_steps(letters, closed, L, r)
    out = []
    for part in set_partitions(n):
        if len({part[x] for x in marked}) != len(marked):
            continue
        if realizable(part, steps):
            out.append(part)
    return out, steps


def stats(part, steps):
    v = len(set(part))
    edges = {(c, part[t], part[h]) for c, t, h in steps}
    return v, len(edges)


def naive_fold(n, steps, pairs):
    part = list(range(n))

    def merge(a, b):
        pa, pb = part[a], part[b]
        if pa != pb:
            for i in range(n):
                if part[i] == pb:
                    part[i] = pa
            return True
        return False

    for a, b in pairs:
        merge(a, b)
    changed = True
    while changed:
        changed = False
        for (c1, t1, h1), (c2, t2, h2) in itertools.combinations(steps, 2):
            if c1 != c2:
                continue
            if part[t1] == part[t2] and merge(h1, h2):
                changed = True
            if part[h1] == part[h2] and merge(t1, t2):
                changed = True
    return canon(part)


def type_by_generating_sets(letters, closed_part):
    """Type of a closed-trail quotient by searching generating sets on the open trail.

    A: some generating set of size chi contains the pair {s_0, s_m}.
    """
    m = len(letters)
    n, steps, _ = trail_steps(letters, closed=False)
    target = canon(list(closed_part) + [closed_part[0]])
    v, e = stats(target, steps)
    chi = e - v + 1
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if target[i] == target[j] and (i, j) != (0, m)]
    for extra in itertools.combinations(pairs, chi - 1):
        if naive_fold(n, steps, [(0, m), *extra]) == target:
            return "A"
    return "B"


def expectation_by_permutations(letters, k, n, L=1, r=1):
    """E([X_{w,L}]_r) at degree n over all k-tuples of permutations (left-to-right composition)."""
    perms = list(itertools.permutations(range(n)))
    total = Fraction(0)
    for tup in itertools.product(perms, repeat=k):
        inv = [None] * k
        for g in range(k):
            iv = [0] * n
            for i, x in enumerate(tup[g]):
                iv[x] = i
            inv[g] = iv
        img = list(range(n))
        for x in letters:
            p = tup[x - 1] if x > 0 else inv[-x - 1]
            img = [p[y] for y in img]
        seen = [False] * n
        cnt = 0
        for s in range(n):
            length = 0
            y = s
            while not seen[y]:
                seen[y] = True
                y = img[y]
                length += 1
            if length == L:
                cnt += 1
        ff = 1
        for i in range(r):
            ff *= cnt - i
        total += ff
    return total / factorial(n) ** k
