"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each workload runs once per backend with the kernel functions swapped in
place, so everything above the kernels (enumeration, sampling) is shared.
Results must agree; the script exits non-zero if they do not.
"""
import argparse
import sys
import time
from contextlib import contextmanager

import numpy as np

from wordmaps import kernels
from wordmaps.perms import exact_histogram, sample_counts
from wordmaps.quotients import closed_trail, enumerate_quotients, open_trail
from wordmaps.words import parse_word

NAMES = ("fold", "children", "count_cycles_batch", "bruteforce_histogram")


@contextmanager
def backend(name):
    mod = kernels.backend_module(name)
    saved = {n: getattr(kernels, n) for n in NAMES}
    for n in NAMES:
        setattr(kernels, n, getattr(mod, n))
    try:
        yield
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)


def enumerate_closed():
    return len(enumerate_quotients(closed_trail(parse_word("abAB"), 1, 3)))


def enumerate_classified():
    return len(enumerate_quotients(closed_trail(parse_word("abABaBBAb")), classify=True))


def enumerate_open():
    return len(enumerate_quotients(open_trail(parse_word("abABabAB"))))


def cycle_counts():
    return int(sample_counts(parse_word("abAB"), 1, 200, 20_000, seed=1).sum())


def bruteforce():
    return tuple(exact_histogram(parse_word("abAB"), 1, 5))


WORKLOADS = {
    "enumerate abAB, 3 trails (3223 quotients)": enumerate_closed,
    "enumerate + classify abABaBBAb": enumerate_classified,
    "enumerate abABabAB (open trail)": enumerate_open,
    "cycle counts, 20k samples at n=200": cycle_counts,
    "brute force abAB at n=5 (14400 tuples)": bruteforce,
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        kernels.backend_module("cython")
    except ImportError:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'workload':42s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    status = 0
    for label, fn in WORKLOADS.items():
        with backend("python"):
            tp, rp = best_of(fn, args.repeat)
        with backend("cython"):
            tc, rc = best_of(fn, args.repeat)
        if isinstance(rp, np.ndarray):
            rp, rc = rp.tolist(), rc.tolist()
        flag = "" if rp == rc else "  MISMATCH"
        status |= rp != rc
        print(f"{label:42s} {tp:11.4f} {tc:11.4f} {tp / tc:7.1f}x{flag}")
    return int(status)


if __name__ == "__main__":
    sys.exit(main())
