"""Compiled-core vs pure-numpy backend timings for the hot kernels.

Runs every kernel twice on the same workload — once with the compiled
extension, once with the numpy fallback — checks that the results agree,
and prints a timing table.  The switch is the module-level HAVE_CORE flag,
which every kernel consults at call time; CUBEARC_FORCE_FALLBACK=1 pins the
fallback at import instead.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--skip-headline]
"""

import argparse
import time

import numpy as np

from cubearc import kernels
from cubearc.errors import Budget
from cubearc.expsums import BoxRegion
from cubearc.forms import CubicForm, make_mordell_block, make_mordell_form
from cubearc.search import count_zeros_box


def timed(fn, repeat: int):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return result, best


def agree(a, b, tol: float) -> bool:
    if isinstance(a, np.ndarray):
        return bool(np.array_equal(a, b))
    if isinstance(a, complex):
        return abs(a - b) <= tol * max(1.0, abs(a))
    return a == b


def compare(name: str, fn, repeat: int, rows: list,
            tol: float = 1e-9) -> None:
    if not kernels.HAVE_CORE:
        raise SystemExit("compiled core unavailable; nothing to compare "
                         "(unset CUBEARC_FORCE_FALLBACK)")
    compiled_result, compiled_t = timed(fn, repeat)
    kernels.HAVE_CORE = False
    try:
        fallback_result, fallback_t = timed(fn, repeat)
    finally:
        kernels.HAVE_CORE = True
    ok = agree(compiled_result, fallback_result, tol)
    rows.append((name, compiled_t, fallback_t,
                 fallback_t / compiled_t if compiled_t else float("inf"),
                 "agree" if ok else "MISMATCH"))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3,
                        help="best-of-N timing (default 3)")
    parser.add_argument("--skip-headline", action="store_true",
                        help="skip the slow direct-enumeration headline")
    args = parser.parse_args()

    budget = Budget(eval_limit=10 ** 11)
    rows: list = []

    three = CubicForm.diagonal([1, 2, 3])
    lo3, hi3 = np.full(3, -40), np.full(3, 40)
    compare("box_values        3 vars, box 81^3",
            lambda: kernels.box_values(three, lo3, hi3, budget=budget),
            args.repeat, rows)

    cubes = CubicForm.diagonal([1, 1, 1])
    lo6, hi6 = np.full(3, -60), np.full(3, 60)
    compare("zero_count_box    3 vars, box 121^3",
            lambda: kernels.zero_count_box(cubes, lo6, hi6, budget=budget),
            args.repeat, rows)

    block = make_mordell_block()
    compare("residue_histogram 3 vars, mod 125",
            lambda: kernels.residue_histogram(block, 125, budget=budget),
            args.repeat, rows)

    two = CubicForm.diagonal([1, 2])
    lo2, hi2 = np.full(2, -300), np.full(2, 300)
    # phase arguments reach alpha * max|C| ~ 3e7, so the mod-1 reduction
    # differs between backends at ~4e-9 per term; accumulated over 361k
    # terms the sums drift apart by ~1e-6 relative, far above the 1e-9
    # used for the exact-integer kernels
    compare("phase_sum_box     2 vars, box 601^2",
            lambda: kernels.phase_sum_box(two, lo2, hi2, 0.3670508,
                                          budget=budget),
            args.repeat, rows, tol=1e-4)

    pair_values = kernels.box_values(CubicForm.diagonal([1, 1]),
                                     np.array([1, 1]), np.array([150, 150]),
                                     budget=budget)
    vals, cnts = np.unique(pair_values, return_counts=True)
    compare(f"convolve_square   {len(vals)} distinct values, self",
            lambda: kernels.convolve_square_sum(vals, cnts, vals, cnts,
                                                budget=budget),
            args.repeat, rows)

    print(f"backend available: {kernels.backend_name()}")
    print(f"{'kernel':<42} {'compiled':>11} {'fallback':>11} "
          f"{'speedup':>8}  check")
    for name, ct, ft, speedup, check in rows:
        print(f"{name:<42} {ct * 1e3:>8.1f} ms {ft * 1e3:>8.1f} ms "
              f"{speedup:>7.1f}x  {check}")

    if not args.skip_headline:
        form = make_mordell_form()
        box = BoxRegion((0,) * 9, 1, 4)   # lattice cube [-3, 3]^9
        mim, mim_t = timed(
            lambda: count_zeros_box(form, box, method="meet-in-middle",
                                    budget=Budget(eval_limit=10 ** 11)),
            args.repeat)
        direct, direct_t = timed(
            lambda: count_zeros_box(form, box, method="direct",
                                    budget=Budget(eval_limit=10 ** 11)), 1)
        print()
        print("headline: 9-variable split form, box 7^9 "
              f"({7 ** 9:,} points)")
        print(f"  meet-in-the-middle: count={mim.count} "
              f"in {mim_t * 1e3:.1f} ms")
        print(f"  direct enumeration: count={direct.count} "
              f"in {direct_t * 1e3:.1f} ms "
              f"({direct_t / mim_t:,.0f}x slower)")


if __name__ == "__main__":
    main()
