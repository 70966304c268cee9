#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the batched evaluation entry points on identical inputs and a dense
torus-grid scan, which dominate the runtime of the grid oracles and the
multistart census.  Run after building the extension:

    python3 benchmarks/bench_kernels.py [--batch 2000000] [--grid 128]
"""

import argparse
import time

import numpy as np

from hingechain import _kernels_py
from hingechain.chain import ChainSpec
from hingechain.geom import AffineSubspace

try:
    from hingechain import _speedups
except ImportError:
    _speedups = None


def demo_chain():
    h1 = AffineSubspace([1.0, 0.2, 0.0], [[0.0, 1.0, 0.0]])
    h2 = AffineSubspace([2.0, 0.0, 0.3], [[0.0, 0.0, 1.0]])
    h3 = AffineSubspace([2.5, 1.0, 0.3], [[1.0, 0.0, 0.0]])
    return ChainSpec(3, [h1, h2, h3], [3.0, 0.5, 0.2])


def packed(chain):
    return chain.feet, chain.plane_u, chain.plane_w, chain.endpoint


def run(label, fn, repeats=3):
    best = np.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def grid_scan(impl, chain, resolution, chunk=1 << 16):
    args = packed(chain)
    axis = np.arange(resolution) * (2.0 * np.pi / resolution)
    total = resolution**chain.n
    shape = (resolution,) * chain.n
    best = -np.inf
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        thetas = axis[np.stack(np.unravel_index(idx, shape), axis=1)]
        best = max(best, float(impl.f_batch(*args, np.ascontiguousarray(thetas)).max()))
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=2_000_000)
    parser.add_argument("--grid", type=int, default=128)
    args = parser.parse_args()

    chain = demo_chain()
    rng = np.random.default_rng(0)
    thetas = np.ascontiguousarray(rng.uniform(0, 2 * np.pi, size=(args.batch, chain.n)))
    pk = packed(chain)

    backends = [("numpy", _kernels_py)]
    if _speedups is not None:
        backends.append(("compiled", _speedups))
    else:
        print("note: compiled extension not built; timing the fallback only")

    rows = []
    reference = {}
    for name, impl in backends:
        t_f, f = run(f"{name} f_batch", lambda: impl.f_batch(*pk, thetas))
        t_g, fg = run(f"{name} fgrad_batch", lambda: impl.fgrad_batch(*pk, thetas))
        t_s, gmax = run(f"{name} grid", lambda: grid_scan(impl, chain, args.grid))
        rows.append((name, t_f, t_g, t_s))
        reference[name] = (f, fg, gmax)

    if len(backends) == 2:
        f_np, fg_np, gmax_np = reference["numpy"]
        f_c, fg_c, gmax_c = reference["compiled"]
        assert np.allclose(f_np, f_c, atol=1e-12)
        assert np.allclose(fg_np[1], fg_c[1], atol=1e-12)
        assert abs(gmax_np - gmax_c) < 1e-12
        print("backends agree to 1e-12 on all outputs\n")

    header = f"{'backend':>10} {'f_batch':>12} {'fgrad_batch':>12} {f'grid {args.grid}^3':>12}"
    print(header)
    print("-" * len(header))
    for name, t_f, t_g, t_s in rows:
        print(f"{name:>10} {t_f:>11.3f}s {t_g:>11.3f}s {t_s:>11.3f}s")
    if len(rows) == 2:
        print("-" * len(header))
        speed = [rows[0][i] / rows[1][i] for i in (1, 2, 3)]
        print(
            f"{'speedup':>10} {speed[0]:>11.2f}x {speed[1]:>11.2f}x {speed[2]:>11.2f}x"
        )


if __name__ == "__main__":
    main()
