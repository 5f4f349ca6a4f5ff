# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_kernels_py`` for the contracts."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline int _find(int* parent, int x) noexcept nogil:
    cdef int root = x
    cdef int nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef object _fold(int n, int k, int[::1] colors, int[::1] tails, int[::1] heads,
                  int[::1] part, int a, int b, int[::1] marked,
                  int* parent, int* out_nb, int* in_nb, int* stack, int* first,
                  int* ids):
    cdef int n_steps = colors.shape[0]
    cdef int i, c, t, h, rt, rh, slot, x, y, rx, ry, tmp, src, dst, sp = 0
    cdef int v = 0, e = 0, r, side
    cdef int* nb

    for i in range(n):
        first[i] = -1
    for i in range(n):
        if first[part[i]] < 0:
            first[part[i]] = i
            parent[i] = i
        else:
            parent[i] = first[part[i]]
    for i in range(n * k):
        out_nb[i] = -1
        in_nb[i] = -1

    for i in range(n_steps):
        c = colors[i]
        t = tails[i]
        h = heads[i]
        rt = _find(parent, t)
        rh = _find(parent, h)
        slot = rt * k + c
        if out_nb[slot] < 0:
            out_nb[slot] = h
        else:
            stack[sp] = out_nb[slot]
            stack[sp + 1] = h
            sp += 2
        slot = rh * k + c
        if in_nb[slot] < 0:
            in_nb[slot] = t
        else:
            stack[sp] = in_nb[slot]
            stack[sp + 1] = t
            sp += 2
    if a >= 0:
        stack[sp] = a
        stack[sp + 1] = b
        sp += 2

    while sp > 0:
        sp -= 2
        rx = _find(parent, stack[sp])
        ry = _find(parent, stack[sp + 1])
        if rx == ry:
            continue
        if ry < rx:
            tmp = rx
            rx = ry
            ry = tmp
        parent[ry] = rx
        for c in range(k):
            for side in range(2):
                nb = out_nb if side == 0 else in_nb
                src = nb[ry * k + c]
                if src < 0:
                    continue
                dst = nb[rx * k + c]
                if dst < 0:
                    nb[rx * k + c] = src
                else:
                    stack[sp] = dst
                    stack[sp + 1] = src
                    sp += 2

    for i in range(n):
        ids[i] = -1
    for i in range(marked.shape[0]):
        r = _find(parent, marked[i])
        if ids[r] == -2:
            return None
        ids[r] = -2
    for i in range(n):
        ids[i] = -1

    labels = [0] * n
    for i in range(n):
        r = _find(parent, i)
        if ids[r] < 0:
            ids[r] = v
            v += 1
            for c in range(k):
                if out_nb[r * k + c] >= 0:
                    e += 1
        labels[i] = ids[r]
    return tuple(labels), v, e


cdef class _Scratch:
    cdef int* parent
    cdef int* out_nb
    cdef int* in_nb
    cdef int* stack
    cdef int* first
    cdef int* ids

    def __cinit__(self, int n, int k, int n_steps):
        self.parent = <int*> malloc(n * sizeof(int))
        self.out_nb = <int*> malloc(n * k * sizeof(int))
        self.in_nb = <int*> malloc(n * k * sizeof(int))
        # each union pushes at most 2k pairs; initial scan at most 2 per step
        self.stack = <int*> malloc((4 * k * n + 4 * n_steps + 4) * sizeof(int))
        self.first = <int*> malloc(n * sizeof(int))
        self.ids = <int*> malloc(n * sizeof(int))
        if not (self.parent and self.out_nb and self.in_nb and self.stack
                and self.first and self.ids):
            raise MemoryError()

    def __dealloc__(self):
        free(self.parent)
        free(self.out_nb)
        free(self.in_nb)
        free(self.stack)
        free(self.first)
        free(self.ids)


def _as_int(arr):
    return np.ascontiguousarray(arr, dtype=np.intc)


def fold(int n_labels, int k, colors, tails, heads, part, int a, int b, marked):
    cdef _Scratch s = _Scratch(max(n_labels, 1), k, len(colors))
    return _fold(n_labels, k, _as_int(colors), _as_int(tails), _as_int(heads),
                 _as_int(part), a, b, _as_int(marked),
                 s.parent, s.out_nb, s.in_nb, s.stack, s.first, s.ids)


def children(int n_labels, int k, colors, tails, heads, part, marked, target=None):
    cdef _Scratch s = _Scratch(max(n_labels, 1), k, len(colors))
    cdef int[::1] cc = _as_int(colors)
    cdef int[::1] tt = _as_int(tails)
    cdef int[::1] hh = _as_int(heads)
    cdef int[::1] pp = _as_int(part)
    cdef int[::1] mm = _as_int(marked)
    cdef int[::1] tg
    cdef bint use_target = target is not None
    if use_target:
        tg = _as_int(target)
    cdef list reps = []
    cdef int i, ia, ib, ra, rb, nrep, seen_max = -1
    for i in range(n_labels):
        if pp[i] > seen_max:
            seen_max = pp[i]
            reps.append(i)
    nrep = len(reps)
    out = []
    for ia in range(nrep):
        ra = reps[ia]
        for ib in range(ia + 1, nrep):
            rb = reps[ib]
            if use_target and tg[ra] != tg[rb]:
                continue
            res = _fold(n_labels, k, cc, tt, hh, pp, ra, rb, mm,
                        s.parent, s.out_nb, s.in_nb, s.stack, s.first, s.ids)
            if res is not None:
                out.append(res)
    return out


cdef int _count_cycles(int* img, char* visited, int n, int L) noexcept nogil:
    cdef int x, y, length, count = 0
    for x in range(n):
        visited[x] = 0
    for x in range(n):
        if visited[x]:
            continue
        length = 0
        y = x
        while not visited[y]:
            visited[y] = 1
            y = img[y]
            length += 1
        if length == L:
            count += 1
    return count


def count_cycles_batch(imgs, int L):
    cdef int[:, ::1] m = np.ascontiguousarray(imgs, dtype=np.intc)
    cdef Py_ssize_t rows = m.shape[0]
    cdef int n = m.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] res = np.zeros(rows, dtype=np.int64)
    cdef char* visited = <char*> malloc(max(n, 1))
    cdef Py_ssize_t i
    if not visited:
        raise MemoryError()
    try:
        for i in range(rows):
            res[i] = _count_cycles(&m[i, 0], visited, n, L)
    finally:
        free(visited)
    return res


def bruteforce_histogram(perms, invs, gens, signs, int k_used, int L, int lo, int hi):
    cdef int[:, ::1] P = np.ascontiguousarray(perms, dtype=np.intc)
    cdef int[:, ::1] Q = np.ascontiguousarray(invs, dtype=np.intc)
    cdef int[::1] G = _as_int(gens)
    cdef int[::1] S = _as_int(signs)
    cdef int n_perm = P.shape[0]
    cdef int n = P.shape[1]
    cdef int m = G.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist = np.zeros(n // L + 1, dtype=np.int64)
    if lo >= hi:
        return hist
    cdef int* idx = <int*> malloc(k_used * sizeof(int))
    cdef int* img = <int*> malloc(n * sizeof(int))
    cdef char* visited = <char*> malloc(n)
    cdef int j, x, y, li, limit
    if not (idx and img and visited):
        raise MemoryError()
    try:
        for j in range(k_used):
            idx[j] = 0
        idx[0] = lo
        while True:
            for x in range(n):
                y = x
                for li in range(m):
                    if S[li] > 0:
                        y = P[idx[G[li]], y]
                    else:
                        y = Q[idx[G[li]], y]
                img[x] = y
            hist[_count_cycles(img, visited, n, L)] += 1
            j = k_used - 1
            while j >= 0:
                idx[j] += 1
                limit = hi if j == 0 else n_perm
                if idx[j] < limit:
                    break
                if j == 0:
                    return hist
                idx[j] = 0
                j -= 1
    finally:
        free(idx)
        free(img)
        free(visited)
