"""Benchmark the compiled kernels against the pure numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--repeat 5]

Covers the three hot paths: single measurement-objective evaluations (the
multi-start simplex inner loop), batched grid evaluations (the Bloch-sphere
oracle), and the two-branch entropy sweep (partial-information plots).
"""

import argparse
import time

import numpy as np

import darwinbounds._kernels._pure as pure

try:
    import darwinbounds._kernels._core as core
except ImportError:
    core = None


def random_problem(d, m, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((d * m, d * m)) + 1j * rng.standard_normal((d * m, d * m))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    return np.ascontiguousarray(rho.reshape(d, m, d, m))


def random_bases(m, count, seed):
    rng = np.random.default_rng(seed)
    out = np.empty((count, m, m), dtype=complex)
    for i in range(count):
        q, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
        out[i] = q
    return out


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench(name, make_pure, make_core, repeat):
    t_pure = best_time(make_pure, repeat)
    if core is None:
        print(f"{name:<42} pure {t_pure * 1e3:8.2f} ms   compiled    n/a")
        return
    t_core = best_time(make_core, repeat)
    print(
        f"{name:<42} pure {t_pure * 1e3:8.2f} ms   "
        f"compiled {t_core * 1e3:8.2f} ms   speedup {t_pure / t_core:5.1f}x"
    )


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if core is None:
        print("compiled backend not built; showing pure timings only")

    for d, m, calls in [(2, 2, 2000), (2, 4, 2000), (2, 8, 500)]:
        rho4 = random_problem(d, m, seed=1)
        bases = random_bases(m, calls, seed=2)

        def one_by_one(impl):
            def run():
                for b in bases:
                    impl.measured_mutual_info(rho4, b)
            return run

        bench(
            f"measurement objective d={d} m={m} x{calls}",
            one_by_one(pure),
            one_by_one(core) if core else None,
            args.repeat,
        )

    rho4 = random_problem(2, 2, seed=3)
    grid = random_bases(2, 4096, seed=4)
    bench(
        "grid batch d=2 m=2 x4096",
        lambda: pure.measured_mutual_info_batch(rho4, grid),
        (lambda: core.measured_mutual_info_batch(rho4, grid)) if core else None,
        args.repeat,
    )

    rng = np.random.default_rng(5)
    size = 100_000
    gin = rng.uniform(0.0, 1.0, size).astype(complex)
    gout = rng.uniform(0.0, 1.0, size).astype(complex)
    w = 1.0 / np.sqrt(2.0)
    bench(
        f"two-branch entropies x{size}",
        lambda: pure.rank_two_entropy_batch(w, w, gin, gout),
        (lambda: core.rank_two_entropy_batch(w, w, gin, gout)) if core else None,
        args.repeat,
    )


if __name__ == "__main__":
    main()
