"""Compiled vs pure-Python kernels: SSA throughput and reachability exploration.

    python benchmarks/bench_kernels.py [--repeat 3]

Both kernels consume the same random stream, so each pair of runs must end
in the same configuration; the script asserts that before timing anything.
"""

import argparse
import time
import warnings

import numpy as np

from leaderless_crn import corpus
from leaderless_crn.checker import build_graph
from leaderless_crn.compiler import compile_spec
from leaderless_crn.kernels import compiled_available
from leaderless_crn.kinetics import StopRule, simulate


def best_of(repeat, fn):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def ssa_cases():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inc = compile_spec(corpus.load_spec("increment"))
        mx = compile_spec(corpus.load_spec("max_2x1_minus_x2"))
    yield "leader_election n=2000", corpus.load_crn("leader_election"), {"L": 2000}, 2000.0
    yield "intro x=2000", corpus.load_crn("intro"), {"X": 2000}, 2000.0
    yield "compiled x+1 x=500", inc.crn, inc.initial((500,)), inc.volume((500,))
    yield "compiled max x=(150,300)", mx.crn, mx.initial((150, 300)), mx.volume((150, 300))


def explore_cases():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mx = compile_spec(corpus.load_spec("max_2x1_minus_x2"))
        inc = compile_spec(corpus.load_spec("increment"))
    yield "intro x=60", corpus.load_crn("intro"), {"X": 60}
    yield "compiled max x=(1,1)", mx.crn, mx.initial((1, 1))
    yield "compiled x+1 x=4", inc.crn, inc.initial((4,))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not compiled_available():
        raise SystemExit("compiled kernels are not built; run `pip install -e .` with Cython present")

    print(f"{'SSA case':32s} {'events':>9s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, crn, init, vol in ssa_cases():
        runs = {}
        for kernel in ("python", "compiled"):
            runs[kernel] = best_of(args.repeat, lambda: simulate(
                crn, init, vol, StopRule(), seed=1, record=False, kernel=kernel))
        (tp, a), (tc, b) = runs["python"], runs["compiled"]
        assert a.final == b.final and a.n_events == b.n_events, name
        print(f"{name:32s} {a.n_events:9d} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x")

    print()
    print(f"{'exploration case':32s} {'nodes':>9s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, crn, init in explore_cases():
        tp, gp = best_of(args.repeat, lambda: build_graph(crn, init, kernel="python"))
        tc, gc = best_of(args.repeat, lambda: build_graph(crn, init, kernel="compiled"))
        assert np.array_equal(gp.configs, gc.configs) and np.array_equal(gp.dst, gc.dst), name
        print(f"{name:32s} {gp.n_nodes:9d} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
