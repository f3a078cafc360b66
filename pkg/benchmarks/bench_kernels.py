#!/usr/bin/env python3
"""Benchmark the compiled evaluation kernels against the numpy fallback.

Measures the two hot paths (exhaustive input enumeration and corpus
evaluation) on realistic workloads and checks both backends agree
bit-for-bit. Run from the repository root:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from acnmap import _kernels_py  # noqa: E402
from acnmap.mapper import conditional_map  # noqa: E402
from acnmap.model import NeuronSpec  # noqa: E402
from acnmap.simulator import dense_netlist  # noqa: E402

try:
    from acnmap import _kernels as _compiled
except ImportError:
    _compiled = None


def _workload(rng, n, neurons):
    cases = []
    for i in range(neurons):
        spec = NeuronSpec(weights=tuple(rng.standard_normal(n) * 0.1),
                          bias=0.05, name=f"b{i}")
        m = conditional_map(spec, 100.0)
        cap_pos, cap_neg = dense_netlist(m)
        weights = np.asarray(spec.weights, dtype=np.float64)
        cases.append((cap_pos, cap_neg, m.cb_pos, m.cb_neg,
                      m.ca_pos, m.ca_neg, weights, spec.bias, 1.0))
    return cases


def _time(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_exhaustive(backend, cases, n):
    def run():
        acc = 0.0
        for args in cases:
            delta, margin = backend.exhaustive_eval(*args, 0, 1 << n)
            acc += float(delta[-1]) + float(margin[0])
        return acc

    return _time(run)


def bench_corpus(backend, cases, x):
    def run():
        acc = 0.0
        for args in cases:
            delta, margin = backend.corpus_eval(*args, x)
            acc += float(delta[-1]) + float(margin[0])
        return acc

    return _time(run)


def main():
    rng = np.random.default_rng(7)
    rows = []
    for label, n, neurons, corpus_rows in (
        ("n=8,  2000 neurons, 256 inputs", 8, 2000, 256),
        ("n=16,  200 neurons, 65536 inputs", 16, 200, None),
        ("n=784, 200 neurons, 1000 inputs", 784, 200, 1000),
    ):
        cases = _workload(rng, n, neurons)
        if corpus_rows is None:
            t_py, r_py = bench_exhaustive(_kernels_py, cases, n)
            t_c, r_c = (bench_exhaustive(_compiled, cases, n)
                        if _compiled else (float("nan"), r_py))
        else:
            x = (rng.random((corpus_rows, n)) < 0.5).astype(np.uint8)
            t_py, r_py = bench_corpus(_kernels_py, cases, x)
            t_c, r_c = (bench_corpus(_compiled, cases, x)
                        if _compiled else (float("nan"), r_py))
        assert r_py == r_c, "backends disagree"
        rows.append((label, t_c, t_py))

    print(f"{'workload':38s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for label, t_c, t_py in rows:
        speed = f"{t_py / t_c:7.1f}x" if t_c == t_c else "     n/a"
        tc = f"{t_c * 1e3:8.1f} ms" if t_c == t_c else "       n/a"
        print(f"{label:38s} {tc} {t_py * 1e3:7.1f} ms {speed}")
    if _compiled is None:
        print("\ncompiled kernels unavailable; showing fallback only")


if __name__ == "__main__":
    main()
