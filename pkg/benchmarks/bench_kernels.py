#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot paths on realistic workloads: batch similarity ratios
(eval harness shape) and fuzzy window alignment over a long note body
(interactive QA shape). Outputs one table row per workload and verifies
both paths agree before timing.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import random
import string
import time

from noteqa.kernels import encode, jit, pyref


def _random_text(rng: random.Random, length: int, alphabet: str) -> str:
    return "".join(rng.choice(alphabet) for _ in range(length))


def make_ratio_workload(n_pairs: int = 400, seed: int = 1):
    rng = random.Random(seed)
    alphabet = string.ascii_lowercase + " .,"
    pairs = []
    for _ in range(n_pairs):
        a = _random_text(rng, rng.randrange(20, 120), alphabet)
        b = _random_text(rng, rng.randrange(20, 120), alphabet)
        pairs.append((a, b))
    return pairs


def make_alignment_workload(seed: int = 2):
    rng = random.Random(seed)
    alphabet = string.ascii_lowercase + "     "
    sentences = []
    for i in range(120):
        sentences.append(_random_text(rng, rng.randrange(25, 60), alphabet).strip())
    body = ". ".join(sentences)
    # answer: a body slice with small perturbations, so stage 3 does real work
    start = len(body) // 2
    answer = list(body[start : start + 60])
    for _ in range(6):
        answer[rng.randrange(len(answer))] = rng.choice(string.ascii_uppercase)
    return "".join(answer), body


def ratio_jit(pairs):
    return [jit.ratio(encode(a), encode(b)) for a, b in pairs]


def ratio_py(pairs):
    return [pyref.ratio_str(a, b) for a, b in pairs]


def window_jit(text, body, wmin, wmax):
    from noteqa.kernels import _remap

    t = encode(text)
    b = encode(body)
    tm, bm, k = _remap(t, b)
    return jit.best_window(t, tm, b, bm, k, wmin, wmax, 0.75)


def window_py(text, body, wmin, wmax):
    return pyref.best_window_str(text, body, wmin, wmax, 0.75)


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    pairs = make_ratio_workload()
    text, body = make_alignment_workload()
    wmin = max(1, (3 * len(text)) // 4)
    wmax = min(len(body), (5 * len(text) + 3) // 4)

    # warm up compilation and check agreement
    assert ratio_jit(pairs[:20]) == ratio_py(pairs[:20]), "ratio paths disagree"
    jit_hit = window_jit(text, body, wmin, wmax)
    py_hit = window_py(text, body, wmin, wmax)
    assert tuple(jit_hit)[1:] == tuple(py_hit)[1:] and bool(jit_hit[0]) == bool(py_hit[0]), (
        f"window paths disagree: {jit_hit} vs {py_hit}"
    )

    rows = []
    t_jit, _ = timeit(lambda: ratio_jit(pairs), args.repeat)
    t_py, _ = timeit(lambda: ratio_py(pairs), args.repeat)
    rows.append((f"similarity ratio x{len(pairs)}", t_jit, t_py))

    t_jit, _ = timeit(lambda: window_jit(text, body, wmin, wmax), args.repeat)
    t_py, _ = timeit(lambda: window_py(text, body, wmin, wmax), args.repeat)
    rows.append((f"fuzzy window (body {len(body)} chars)", t_jit, t_py))

    print(f"{'workload':<38} {'numba':>10} {'python':>10} {'speedup':>8}")
    for name, tj, tp in rows:
        print(f"{name:<38} {tj * 1e3:>8.1f}ms {tp * 1e3:>8.1f}ms {tp / tj:>7.1f}x")


if __name__ == "__main__":
    main()
