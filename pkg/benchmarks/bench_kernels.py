"""Time the compiled and pure-Python kernels on the reference generators.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from ganphotocell.kinetics import PopulationState, build_generator
from ganphotocell.model import DeviceParams, ModelKind, derive_rates
from ganphotocell.numerics import integrate
from ganphotocell.numerics.backend import compiled_kernels, python_kernels


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(repeat=5):
    params = DeviceParams()
    checkpoints = np.logspace(-6, np.log10(200.0), 20)
    backends = {"python": python_kernels}
    if compiled_kernels is not None:
        backends["cython"] = compiled_kernels
    rng = np.random.default_rng(0)
    M = rng.standard_normal((15, 15)) + 15 * np.eye(15)
    rows = []
    for kind in ModelKind:
        g = build_generator(derive_rates(params, kind), kind)
        rho0 = PopulationState.ground(kind)
        ref = None
        for name in backends:
            t = _best_of(lambda: integrate(g, rho0, (0.0, 200.0), checkpoints=checkpoints, backend=name), repeat)
            tr = integrate(g, rho0, (0.0, 200.0), checkpoints=checkpoints, backend=name)
            diff = 0.0 if ref is None else float(np.max(np.abs(tr.values - ref)))
            ref = tr.values if ref is None else ref
            rows.append((f"radau {kind.value}", name, t, tr.stats.steps, diff))
    for name, mod in backends.items():
        t = _best_of(lambda: mod.lu_factor(M), repeat * 20)
        rows.append(("lu_factor 15x15", name, t, 1, 0.0))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = bench(args.repeat)
    print(f"{'case':22s} {'backend':8s} {'best [ms]':>10s} {'steps':>6s} {'max |diff|':>11s}")
    for case, name, t, steps, diff in rows:
        print(f"{case:22s} {name:8s} {1e3 * t:10.3f} {steps:6d} {diff:11.2e}")
    by_case = {}
    for case, name, t, *_ in rows:
        by_case.setdefault(case, {})[name] = t
    for case, times in by_case.items():
        if "cython" in times:
            print(f"speedup {case}: {times['python'] / times['cython']:.1f}x")


if __name__ == "__main__":
    main()
