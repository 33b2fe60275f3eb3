"""Timing comparison of the compiled stepper kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--modes N] [--steps M] [--repeat K]
"""

import argparse
import time

import numpy as np

from viscowave._kernels import HAVE_COMPILED, _fallback
from viscowave.model import canonical_params

if HAVE_COMPILED:
    from viscowave._kernels import _core


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, default=50)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--signals", type=int, default=40)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    p = canonical_params()
    rng = np.random.default_rng(0)
    lams = (p.gamma * np.arange(1.0, args.modes + 1.0)) ** 2
    u0 = rng.uniform(-1.0, 1.0, size=args.modes)
    u1 = rng.uniform(-1.0, 1.0, size=args.modes)
    T = 10.0
    cvec = rng.uniform(-1.0, 1.0, size=args.modes)
    f_half = rng.uniform(-1.0, 1.0, size=(args.signals, 2 * args.steps + 1))

    rows = []

    def free_fallback():
        _fallback.volterra_free(lams, u0, u1, p.b1, p.b2, p.r1, p.r2, T, args.steps)

    rows.append(("volterra_free", "fallback", _time(free_fallback, args.repeat)))
    if HAVE_COMPILED:

        def free_core():
            _core.volterra_free(lams, u0, u1, p.b1, p.b2, p.r1, p.r2, T, args.steps)

        rows.append(("volterra_free", "compiled", _time(free_core, args.repeat)))

    def forced_fallback():
        _fallback.forced_modes(lams, cvec, p.b1, p.b2, p.r1, p.r2, T, args.steps, f_half)

    rows.append(("forced_modes", "fallback", _time(forced_fallback, args.repeat)))
    if HAVE_COMPILED:

        def forced_core():
            _core.forced_modes(lams, cvec, p.b1, p.b2, p.r1, p.r2, T, args.steps, f_half)

        rows.append(("forced_modes", "compiled", _time(forced_core, args.repeat)))

    print(
        f"modes={args.modes} steps={args.steps} signals={args.signals} "
        f"(best of {args.repeat})"
    )
    base = {}
    for name, kind, secs in rows:
        base.setdefault(name, secs)
        speedup = base[name] / secs
        print(f"{name:14s} {kind:9s} {secs * 1e3:9.2f} ms  ({speedup:5.2f}x vs fallback)")
    if not HAVE_COMPILED:
        print("compiled extension not available; fallback only")


if __name__ == "__main__":
    main()
