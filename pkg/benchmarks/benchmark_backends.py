"""Timing comparison of the numba and numpy backends.

Measures the section evaluator at several family sizes under both summation
modes, plus one end-to-end Newton polish, and prints a small table. Run as:

    python3 benchmarks/benchmark_backends.py [--repeats 20]

The numba rows need numba installed; without it only the numpy rows print.
The two backends must agree to ~1e-11 relative on every probe; the benchmark
asserts that while it times.
"""

import argparse
import time

import numpy as np

from hardyz import CoefficientVector, EvalConfig, Method, Summation, use_backend
from hardyz.backends import available_backends, get_backend
from hardyz.engine import section_eval
from hardyz.zeros import newton_solve


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(repeats: int):
    sizes = [1_000, 30_000, 225_306]
    t_for = {1_000: 2_000.0, 30_000: 60_000.0, 225_306: 450_613.8}
    probes = {}

    rows = []
    for backend in available_backends():
        use_backend(backend)
        get_backend().warmup()
        for mode in (Summation.SEQUENTIAL_COMPENSATED, Summation.FIXED_CHUNK_PARALLEL):
            cfg = EvalConfig(method=Method.SECTION, summation=mode)
            for n in sizes:
                ones = CoefficientVector.ones(n)
                t = t_for[n]
                val = section_eval(t, ones, cfg)
                key = (n,)
                if key in probes:
                    ref = probes[key]
                    rel = abs(val - ref) / max(1.0, abs(ref))
                    assert rel < 1e-11, (backend, mode, n, val, ref)
                else:
                    probes[key] = val
                dt = _time(lambda: section_eval(t, ones, cfg), repeats)
                rows.append((backend, mode.name, n, dt * 1e3, val))
    use_backend(None)

    print(f"{'backend':8} {'summation':24} {'terms':>8} {'ms/eval':>9}  value")
    for backend, mode, n, ms, val in rows:
        print(f"{backend:8} {mode:24} {n:8d} {ms:9.3f}  {val:+.12e}")

    print()
    for backend in available_backends():
        use_backend(backend)
        cfg = EvalConfig(method=Method.EM_ORACLE)
        t0 = time.perf_counter()
        rep = newton_solve(cfg, 7004.950343)
        dt = time.perf_counter() - t0
        print(f"{backend:8} newton em t~7005: {len(rep.iterates) - 1} steps "
              f"in {dt * 1e3:.1f} ms -> {rep.limit:.9f}")
    use_backend(None)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=20)
    run(ap.parse_args().repeats)
