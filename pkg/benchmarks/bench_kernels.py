"""Time the compiled and numpy round kernels.

Usage: python benchmarks/bench_kernels.py [--preset table1] [--repeats 5]

Reports per-round kernel time on a preset's graph and the wall time of a
full run with each backend.
"""

import argparse
import time

import numpy as np

from affectsim import engine, kernels, rng as rngs
from affectsim.config import load_preset


def time_kernel(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="table1")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    cfg = load_preset(args.preset)
    graph, schedule = engine.build_graph(cfg), engine.build_schedule(cfg)
    state = engine.seed_initial(graph, engine.initial_codes(cfg), schedule, cfg)
    gamma, beta = engine.rates(state.codes, graph, schedule[0].etv, 0, cfg)
    draws = engine.draw_round(rngs.round_stream(cfg.seed, 0), len(graph.indices), state.n, cfg.m)
    kargs = (state.codes, state.spreader, graph.indptr, graph.indices, beta,
             np.floor(gamma * cfg.m).astype(np.int64), schedule[0].code.to_array(),
             draws["u_edge"], draws["u_start"], draws["u_forget"], draws["mut_len"], draws["u_mut"],
             cfg.gamma_forget, cfg.mutation.rate)

    backends = {"python": kernels.python_apply_round}
    if kernels.compiled_apply_round is not None:
        backends["compiled"] = kernels.compiled_apply_round
    else:
        print("compiled kernel not built; timing the numpy kernel only")

    print(f"preset={args.preset} N={cfg.num_all} edges={len(graph.indices) // 2} T={cfg.total_rounds}")
    print(f"{'backend':<10}{'kernel/round (ms)':>20}{'full run (s)':>15}")
    results = {}
    for name, fn in backends.items():
        k = time_kernel(fn, kargs, args.repeats)
        t0 = time.perf_counter()
        results[name] = engine.run(cfg, kernel=fn)
        full = time.perf_counter() - t0
        print(f"{name:<10}{1e3 * k:>20.3f}{full:>15.3f}")
    if len(results) == 2:
        same = np.array_equal(results["python"].etv_matrix, results["compiled"].etv_matrix)
        print(f"identical trajectories: {same}")


if __name__ == "__main__":
    main()
