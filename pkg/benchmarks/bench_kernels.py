"""Compare the compiled and numpy classification kernels on preset grids.

    python3 benchmarks/bench_kernels.py [--n 300] [--repeat 3]
"""
import argparse
import time

import numpy as np

from entiredyn.dynamics import classify_points, detect_cycles
from entiredyn.kernels import BACKENDS
from entiredyn.presets import PRESETS, preset_function
from entiredyn.render import Viewport
from entiredyn.zoo import singular_set


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-iter", type=int, default=1000)
    ap.add_argument("--presets", nargs="*", default=["fig1a", "fig2a", "fig2d", "cossqrt", "mv-g0"])
    args = ap.parse_args()
    names = sorted(BACKENDS)
    print(f"{'preset':<12}" + "".join(f"{b + ' [s]':>14}" for b in names) + f"{'speedup':>10}  agree")
    for name in args.presets:
        f = preset_function(name)
        cyc = detect_cycles(f, singular_set(f).values)
        _, center, width = PRESETS[name]
        z = Viewport.square(center, width, args.n).grid()
        res = {b: best_of(lambda b=b: classify_points(f, cyc, z, args.max_iter, backend=b), args.repeat) for b in names}
        outs = [r[1] for r in res.values()]
        agree = all(np.array_equal(a, b) for o in outs[1:] for a, b in zip(outs[0], o))
        speed = res["python"][0] / res["cython"][0] if "cython" in res else float("nan")
        print(f"{name:<12}" + "".join(f"{res[b][0]:>14.3f}" for b in names) + f"{speed:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
