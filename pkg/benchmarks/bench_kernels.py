#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback path.

Runs each hot kernel on a representative workload through both
implementations, checks they agree, and prints timings.  With
``ABASOLVE_NO_NUMBA=1`` (or numba missing) only the numpy path runs.
"""

import time

import numpy as np

from abasolve import _kernels
from abasolve.core import marginals_and_conditionals
from abasolve.instances import xor_instance


def _time(fn, *args, repeats=3):
    best = np.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def _report(name, numpy_time, numba_time=None):
    if numba_time is None:
        print(f"{name:<28} numpy {numpy_time * 1e3:9.2f} ms")
    else:
        speedup = numpy_time / numba_time if numba_time > 0 else float("inf")
        print(f"{name:<28} numpy {numpy_time * 1e3:9.2f} ms   "
              f"numba {numba_time * 1e3:9.2f} ms   {speedup:6.1f}x")


def bench_compositions(k=2_000_000, d=2):
    t_np, a = _time(_kernels.compositions_np, k, d)
    if _kernels.NUMBA_ENABLED:
        t_nb, b = _time(_kernels.compositions_nb, k, d)
        assert np.array_equal(a, b)
        _report(f"compositions d={d} K={k}", t_np, t_nb)
    else:
        _report(f"compositions d={d} K={k}", t_np)


def bench_ub_grid(n=2_000_000):
    _, prior = xor_instance()
    t = marginals_and_conditionals(prior).zero_filled()
    w = _kernels.compositions_np(n - 1, 2).astype(float) / (n - 1)
    args = (w, t.b_given_a, t.e_given_ab, t.e_given_a,
            _kernels.KIND_QUADRATIC, np.zeros((0, 2)), np.zeros(0), 0.0)
    t_np, a = _time(_kernels.ub_grid_wa_np, *args)
    if _kernels.NUMBA_ENABLED:
        t_nb, b = _time(_kernels.ub_grid_wa_nb, *args)
        assert np.allclose(a, b, atol=1e-12)
        _report(f"u_B grid over A, n={n}", t_np, t_nb)
    else:
        _report(f"u_B grid over A, n={n}", t_np)


def _slack_tableau(m=4, n=300_000, seed=0):
    rng = np.random.default_rng(seed)
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = rng.uniform(0.0, 1.0, size=(m, n))
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = rng.uniform(0.5, 2.0, size=m)
    t[m, :n] = -rng.uniform(0.0, 1.0, size=n)
    basis = np.arange(n, n + m, dtype=np.int64)
    allowed = np.ones(n + m, dtype=np.bool_)
    return t, basis, allowed


def bench_simplex(n_cols=300_000):
    t, basis, allowed = _slack_tableau(n=n_cols)
    t_np, a = _time(lambda: _kernels.simplex_iterate_np(
        t.copy(), basis.copy(), allowed, 1e-9, 10_000, 100), repeats=1)
    if _kernels.NUMBA_ENABLED:
        t_nb, b = _time(lambda: _kernels.simplex_iterate_nb(
            t.copy(), basis.copy(), allowed, 1e-9, 10_000, 100), repeats=1)
        assert a == b
        _report(f"simplex pivots 4x{n_cols}", t_np, t_nb)
    else:
        _report(f"simplex pivots 4x{n_cols}", t_np)


def bench_oracle(step_den=40):
    _, prior = xor_instance()
    comps = _kernels.compositions_np(step_den, 3).astype(float) / step_den
    mu_ae = np.ascontiguousarray(prior.p.sum(axis=2).T)
    mu_aeb = np.ascontiguousarray(np.transpose(prior.p, (1, 0, 2)))
    n_cand = comps.shape[0] ** 2
    args = (comps, 2, 0, n_cand, mu_ae, mu_aeb, _kernels.KIND_QUADRATIC,
            np.zeros((0, 2)), np.zeros(0), 0.0)
    t_np, a = _time(_kernels.oracle_scan_np, *args, repeats=1)
    if _kernels.NUMBA_ENABLED:
        t_nb, b = _time(_kernels.oracle_scan_nb, *args, repeats=1)
        # tied optima may resolve to different indices across paths
        assert abs(a[0] - b[0]) < 1e-9
        _report(f"oracle scan, {n_cand} cands", t_np, t_nb)
    else:
        _report(f"oracle scan, {n_cand} cands", t_np)


def main():
    print(f"numba path enabled: {_kernels.NUMBA_ENABLED}")
    if _kernels.NUMBA_ENABLED:
        # warm the JIT cache outside the timed region
        bench_small = _kernels.compositions_nb(4, 2)
        _kernels.ub_grid_wa_nb(
            bench_small.astype(float) / 4, np.full((2, 2), 0.5),
            np.full((2, 2, 2), 0.5), np.full((2, 2), 0.5),
            _kernels.KIND_QUADRATIC, np.zeros((0, 2)), np.zeros(0), 0.0)
    bench_compositions()
    bench_ub_grid()
    bench_simplex()
    bench_oracle()


if __name__ == "__main__":
    main()
