"""Compiled vs numpy flooding decoder on the simulator's inner loop.

    python benchmarks/bench_decode.py [--n 801] [--t 20] [--trials 200]

Each trial samples a (2,3) or (3,6) graph and decodes one shared set of
uniforms at several channel levels, exactly as the simulator does.
"""
import argparse
import time

import numpy as np

from ldpc_alpha import kernels
from ldpc_alpha.ensemble import Ensemble
from ldpc_alpha.simulator import _Layout, trial_rng


def bench(impl, lay, eps, t, trials):
    inputs = []
    for k in range(trials):
        rng = trial_rng(0, k)
        inputs.append((lay.check_sockets[rng.permutation(lay.E)], rng.random(lay.n)))
    total = np.zeros((len(eps), t + 1), dtype=np.int64)
    t0 = time.perf_counter()
    for ec, u in inputs:
        total += impl.bp_grid(lay.var_sockets, ec, u, eps, lay.n, lay.m, t)
    return time.perf_counter() - t0, total


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=801)
    ap.add_argument("--t", type=int, default=20)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()
    impls = kernels.backends()
    eps = np.linspace(0.1, 0.9, 9)
    for l, r in ((2, 3), (3, 6)):
        n = args.n if args.n * l % r == 0 else args.n - args.n % r
        lay = _Layout(Ensemble.regular(l, r), n)
        times, outs = {}, []
        for name, impl in impls.items():
            times[name], out = bench(impl, lay, eps, args.t, args.trials)
            outs.append(out)
        same = all(np.array_equal(outs[0], o) for o in outs[1:])
        line = "  ".join(f"{k} {1e3 * v / args.trials:8.3f} ms/trial" for k, v in times.items())
        if "compiled" in times:
            line += f"  speedup x{times['python'] / times['compiled']:.1f}"
        print(f"({l},{r}) n={n} t={args.t} grid=9: {line}  identical={same}")


if __name__ == "__main__":
    main()
