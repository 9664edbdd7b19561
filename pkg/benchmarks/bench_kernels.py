"""Time the compiled kernels against the numpy/pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]
"""
import argparse
import time

import numpy as np

from trekcalc import _pykernels
from trekcalc.dag import PcQuery, complete_dag, topological_sort
from trekcalc.treks import _mask, _treks

try:
    from trekcalc import _ckernels
except ImportError:
    _ckernels = None


def corr_args(n: int, q: PcQuery, samples: int):
    dag = complete_dag(n)
    order = {v: k for k, v in enumerate(topological_sort(dag))}
    edges = sorted(dag.edges, key=lambda e: (order[e[1]], order[e[0]]))
    src = np.array([dag.position(i) for i, _ in edges], dtype=np.intc)
    dst = np.array([dag.position(j) for _, j in edges], dtype=np.intc)
    s = dag.sort_vertices(q.s)
    rows = np.array([dag.position(v) for v in (q.i0, *s)], dtype=np.intc)
    cols = np.array([dag.position(v) for v in (q.j0, *s)], dtype=np.intc)
    pts = np.random.default_rng(0).uniform(-2, 2, size=(samples, len(edges)))
    return pts, src, dst, dag.n, rows, cols


def trek_args(n: int, k: int):
    dag = complete_dag(n)
    src, tgt = dag.vertices[:k], dag.vertices[-k:]
    offsets, targets, ups, downs = [0], [], [], []
    for i in src:
        for t_idx, j in enumerate(tgt):
            for t in _treks(dag, i, j):
                targets.append(t_idx)
                ups.append(_mask(dag, t.up))
                downs.append(_mask(dag, t.down))
        offsets.append(len(targets))
    return offsets, targets, ups, downs


def best_of(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = [
        ("partial_corr_batch K4 (1,4|2,3)", "partial_corr_batch",
         corr_args(4, PcQuery(1, 4, frozenset({2, 3})), args.samples)),
        ("partial_corr_batch K6 (1,6|2..5)", "partial_corr_batch",
         corr_args(6, PcQuery(1, 6, frozenset({2, 3, 4, 5})), args.samples)),
        ("sided_free_assignments K7 3x3", "sided_free_assignments", trek_args(7, 3)),
        ("sided_free_assignments K8 3x3", "sided_free_assignments", trek_args(8, 3)),
    ]
    print(f"{'kernel':36s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for label, name, fargs in cases:
        py = best_of(getattr(_pykernels, name), fargs, args.repeat)
        if _ckernels is None:
            print(f"{label:36s} {py:11.4f} {'n/a':>11s} {'n/a':>8s}")
            continue
        cy = best_of(getattr(_ckernels, name), fargs, args.repeat)
        print(f"{label:36s} {py:11.4f} {cy:11.4f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
