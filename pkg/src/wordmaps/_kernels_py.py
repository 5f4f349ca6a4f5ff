"""Pure-Python versions of the hot kernels.

Same signatures and results as the compiled ``_kernels`` extension; selected
by :mod:`wordmaps.kernels` when the extension is unavailable.

Partitions are tuples giving each label its block id, block ids assigned in
order of first appearance, so equal partitions are equal tuples.
"""
import numpy as np


def fold(n_labels, k, colors, tails, heads, part, a, b, marked):
    """Finest realizable coarsening of ``part`` that also merges labels ``a`` and ``b``.

    Returns ``(partition, v, e)``, or ``None`` when two marked labels collide.
    Pass ``a = -1`` to only close ``part`` under folding.
    """
    parent = list(range(n_labels))
    first = {}
    for i, blk in enumerate(part):
        if blk in first:
            parent[i] = first[blk]
        else:
            first[blk] = i
    out_nb = [-1] * (n_labels * k)
    in_nb = [-1] * (n_labels * k)
    stack = []

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for c, t, h in zip(colors, tails, heads):
        rt, rh = find(t), find(h)
        slot = rt * k + c
        if out_nb[slot] < 0:
            out_nb[slot] = h
        else:
            stack.append((out_nb[slot], h))
        slot = rh * k + c
        if in_nb[slot] < 0:
            in_nb[slot] = t
        else:
            stack.append((in_nb[slot], t))
    if a >= 0:
        stack.append((a, b))

    while stack:
        x, y = stack.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        if ry < rx:
            rx, ry = ry, rx
        parent[ry] = rx
        for c in range(k):
            for nb in (out_nb, in_nb):
                src = nb[ry * k + c]
                if src < 0:
                    continue
                dst = nb[rx * k + c]
                if dst < 0:
                    nb[rx * k + c] = src
                else:
                    stack.append((dst, src))

    seen = set()
    for m in marked:
        r = find(m)
        if r in seen:
            return None
        seen.add(r)

    ids = {}
    labels = []
    e = 0
    for i in range(n_labels):
        r = find(i)
        if r not in ids:
            ids[r] = len(ids)
            for c in range(k):
                if out_nb[r * k + c] >= 0:
                    e += 1
        labels.append(ids[r])
    return tuple(labels), len(ids), e


def children(n_labels, k, colors, tails, heads, part, marked, target=None):
    """All one-merge coarsenings of ``part``: list of ``(partition, v, e)``.

    With ``target`` given, only blocks lying inside a common ``target`` block
    are merged.
    """
    reps = []
    seen = set()
    for i, blk in enumerate(part):
        if blk not in seen:
            seen.add(blk)
            reps.append(i)
    out = []
    for ia in range(len(reps)):
        for ib in range(ia + 1, len(reps)):
            a, b = reps[ia], reps[ib]
            if target is not None and target[a] != target[b]:
                continue
            res = fold(n_labels, k, colors, tails, heads, part, a, b, marked)
            if res is not None:
                out.append(res)
    return out


def _count_cycles(img, L):
    n = len(img)
    visited = [False] * n
    count = 0
    for x in range(n):
        if visited[x]:
            continue
        length = 0
        y = x
        while not visited[y]:
            visited[y] = True
            y = img[y]
            length += 1
        if length == L:
            count += 1
    return count


def count_cycles_batch(imgs, L):
    """Number of ``L``-cycles of each row permutation of ``imgs``."""
    imgs = np.asarray(imgs)
    return np.array([_count_cycles(row.tolist(), L) for row in imgs], dtype=np.int64)


def bruteforce_histogram(perms, invs, gens, signs, k_used, L, lo, hi):
    """Histogram of the ``L``-cycle count over every tuple of permutations.

    ``perms``/``invs`` list all permutations of degree n and their inverses;
    the first generator ranges over indices ``lo:hi`` and the others over all.
    """
    perms = np.asarray(perms).tolist()
    invs = np.asarray(invs).tolist()
    n_perm = len(perms)
    n = len(perms[0])
    hist = [0] * (n // L + 1)
    idx = [0] * k_used
    idx[0] = lo
    if lo >= hi:
        return np.array(hist, dtype=np.int64)
    tables = [(gens[i], signs[i]) for i in range(len(gens))]
    while True:
        chosen = [(perms[idx[g]] if s > 0 else invs[idx[g]]) for g, s in tables]
        img = list(range(n))
        for p in chosen:
            img = [p[y] for y in img]
        hist[_count_cycles(img, L)] += 1
        j = k_used - 1
        while j >= 0:
            idx[j] += 1
            limit = hi if j == 0 else n_perm
            if idx[j] < limit:
                break
            if j == 0:
                return np.array(hist, dtype=np.int64)
            idx[j] = 0
            j -= 1
