"""Compare the compiled kernels against the pure Python twins.

Run from the repository root:

    python3 benchmarks/bench_backends.py

The two backends produce bit-identical output (enforced by the test
suite), so the only thing measured here is speed. Expect two to three
orders of magnitude between them on the inner loops.
"""

import time

import numpy as np

import hopfknot._kernels_py as pk

try:
    import hopfknot._kernels as ck
except ImportError:
    ck = None


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_field_eval(mod, n=20000):
    rng = np.random.Generator(np.random.PCG64(5))
    xyz = rng.uniform(-3.0, 3.0, size=(n, 3))
    t = rng.uniform(0.0, 3.0, size=n)

    def run():
        for i in range(n):
            mod.field_eval(xyz[i, 0], xyz[i, 1], xyz[i, 2], t[i])

    return timeit(run), n


def bench_particle_push(mod, n=20):
    y0 = np.array([0.0, 0.5, 0.0, 0.0, 0.0, 0.0])
    empty = np.empty(0)

    def run():
        for _ in range(n):
            mod.particle_push(y0, 0.0, 1.5, 10.0, 1e-9, 1e-11, 1e-3,
                              np.inf, empty, 1, 262144)

    return timeit(run), n


def bench_trace_line(mod, n=3):
    start = np.array([0.3, 0.0, 0.0])

    def run():
        for _ in range(n):
            mod.trace_line(start, 0.0, 0, 1e-10, 1e-12, 1e-3, 200.0,
                           0.1, 1e-3, 2000)

    return timeit(run), n


def bench_linking_sum(mod, n=1, m=1200):
    th = 2.0 * np.pi * np.arange(m) / m
    c1 = np.stack([np.cos(th), np.sin(th), np.zeros_like(th)], axis=1)
    c2 = np.stack([1.0 + np.cos(th), np.zeros_like(th), np.sin(th)], axis=1)

    def run():
        for _ in range(n):
            mod.linking_sum(c1, c2)

    return timeit(run), n


BENCHES = [
    ("field_eval (scalar calls)", bench_field_eval),
    ("particle_push (g=10, full span)", bench_particle_push),
    ("trace_line (2000-point fiber)", bench_trace_line),
    ("linking_sum (1200x1200)", bench_linking_sum),
]


def main():
    if ck is None:
        print("compiled backend not built; showing pure Python only")
    print("%-34s %12s %12s %9s" % ("kernel", "python", "compiled", "ratio"))
    for name, bench in BENCHES:
        t_py, n = bench(pk)
        row = "%-34s %9.4f ms" % (name, 1e3 * t_py / n)
        if ck is not None:
            t_c, _ = bench(ck)
            row += " %9.4f ms %8.0fx" % (1e3 * t_c / n, t_py / t_c)
        print(row)


if __name__ == "__main__":
    main()
