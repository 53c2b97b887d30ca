"""Compare the compiled and pure-Python distillation kernels.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""
from __future__ import annotations

import time

from amdiqkd._kernels import IMPL, _pure

try:
    from amdiqkd._kernels import _core
except ImportError:
    _core = None

CASES = [
    (0.02, 0.18, 0.01, 0.12, b) for b in (1, 2, 3, 4)
] + [
    (0.0, 0.45, 0.0, 0.35, b) for b in (1, 4)
]


def time_inner_min(mod, repeats: int = 20) -> float:
    start = time.perf_counter()
    for _ in range(repeats):
        for phi_lo, phi_hi, e_lo, e_hi, b in CASES:
            mod.inner_min(phi_lo, phi_hi, e_lo, e_hi, b)
    return (time.perf_counter() - start) / (repeats * len(CASES))


def main() -> None:
    print(f"active kernel implementation: {IMPL}")
    t_pure = time_inner_min(_pure)
    print(f"pure     inner_min: {t_pure * 1e3:8.3f} ms/call")
    if _core is None:
        print("compiled kernel not built; install with Cython to compare")
        return
    t_core = time_inner_min(_core)
    print(f"compiled inner_min: {t_core * 1e3:8.3f} ms/call")
    print(f"speedup: {t_pure / t_core:.1f}x")
    for case in CASES:
        a = _pure.inner_min(*case)
        b = _core.inner_min(*case)
        if abs(a[0] - b[0]) > 1e-9:
            print(f"WARNING: kernels disagree on {case}: {a[0]} vs {b[0]}")
            break
    else:
        print("kernel objectives agree to 1e-9 on all benchmark cases")


if __name__ == "__main__":
    main()
