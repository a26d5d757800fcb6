"""Compare the compiled and numpy kernel backends on the hot enumeration loops.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Prints one row per workload with the best wall time for each backend and the
speed-up, and checks that both backends return identical results.
"""

from __future__ import annotations

import argparse
import time

from oddforms import kernels
from oddforms.counting import CountQuery, almost_prime_count
from oddforms.forms import parse_system

CUBIC5 = parse_system("form deg=3: x1^3 + x2^3 + x3^3 + x4^3 + x5^3\nform deg=1: x1 + x2 + x3 + x4 + x5")
MIXED = parse_system("form deg=3: x1^2*x2 + x3^3 - x1*x2*x4 + x4^3")
AP3 = parse_system("form deg=1: x1 + x2 - 2*x3")
CUBIC3 = parse_system("form deg=3: x1^3 + x2^3 - 2*x3^3")


def workloads(quick: bool):
    p = 11 if quick else 17
    N = 2000 if quick else 10**4
    return [
        (f"scan_fp cubic+linear s=5 p={p}",
         lambda: kernels.scan_fp(CUBIC5.forms, 5, p).total),
        (f"deficient_count s=4 p={p}",
         lambda: kernels.deficient_count(MIXED.forms, 4, p)),
        (f"value_counts s=5 p={p}",
         lambda: tuple(kernels.value_counts(CUBIC5.forms[0].terms, 5, p))),
        (f"3AP count N={N} (solve last)",
         lambda: almost_prime_count(CountQuery(AP3, N)).count),
        (f"cubic count N={N // 20} (full box)",
         lambda: almost_prime_count(CountQuery(CUBIC3, N // 20)).count),
    ]


def best_time(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the numpy fallback is available")
    print(f"{'workload':<38}" + "".join(f"{b:>12}" for b in backends) + f"{'speed-up':>10}")
    for name, fn in workloads(args.quick):
        times, outs = {}, {}
        for b in backends:
            with kernels.use_backend(b):
                times[b], outs[b] = best_time(fn, args.repeat)
        if len({repr(v) for v in outs.values()}) != 1:
            raise SystemExit(f"backends disagree on {name}: {outs}")
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<38}" + "".join(f"{times[b]:>11.4f}s" for b in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
