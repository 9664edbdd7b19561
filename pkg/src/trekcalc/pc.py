"""Simulation, the edge-removal phase of the PC algorithm, and Monte Carlo Tube(lambda) volumes."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .covariance import SymbolicSigma, minor_det, partial_corr_float
from .dag import Dag, PcQuery, topological_sort
from .errors import NonPositiveDefiniteError, TooFewSamplesError, ZeroPolynomialError

STANDARD = "standard"
INTERSECTION_FIRST = "intersection_first"
HEURISTICS = (STANDARD, INTERSECTION_FIRST)


def simulate_data(dag: Dag, weights: dict[tuple[int, int], float], n: int, seed: int) -> np.ndarray:
    """Draw ``n`` rows of X_j = sum_i a_ij X_i + eps_j with eps ~ N(0, I).

    Columns follow ``dag.vertices``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((n, dag.n))
    x = np.zeros((n, dag.n))
    for v in topological_sort(dag):
        c = dag.position(v)
        x[:, c] = eps[:, c]
        for p in dag.parents(v):
            x[:, c] += float(weights[(p, v)]) * x[:, dag.position(p)]
    return x


def sample_covariance(data) -> np.ndarray:
    """Unbiased (n - 1) sample covariance of the columns of ``data``."""
    data = np.asarray(data, dtype=float)
    if data.shape[0] < 2:
        raise TooFewSamplesError("need at least two samples")
    centered = data - data.mean(axis=0)
    return centered.T @ centered / (data.shape[0] - 1)


def population_covariance(dag: Dag, weights: dict[tuple[int, int], float],
                          omega: dict[int, float] | None = None) -> np.ndarray:
    """(I - A)^{-T} Omega (I - A)^{-1} in floating point (Omega = I by default)."""
    a = np.zeros((dag.n, dag.n))
    for (i, j), x in weights.items():
        a[dag.position(i), dag.position(j)] = float(x)
    b = np.linalg.inv(np.eye(dag.n) - a)
    if omega is None:
        return b.T @ b
    return b.T @ np.diag([float(omega[m]) for m in dag.vertices]) @ b


@dataclass
class Removal:
    edge: tuple[int, int]
    sepset: tuple[int, ...]
    corr: float
    level: int


@dataclass
class PcState:
    vertices: tuple[int, ...]
    edges: set[frozenset[int]]
    log: list[Removal] = field(default_factory=list)

    def neighbours(self, v: int) -> set[int]:
        return {u for e in self.edges if v in e for u in e if u != v}

    def has_edge(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        pos = {v: k for k, v in enumerate(self.vertices)}
        return sorted((tuple(sorted(e, key=pos.__getitem__)) for e in self.edges),
                      key=lambda e: (pos[e[0]], pos[e[1]]))


def _candidate_sets(state: PcState, i: int, j: int, level: int, heuristic: str) -> list[tuple[int, ...]]:
    pos = {v: k for k, v in enumerate(state.vertices)}

    def combos(pool: Iterable[int]) -> list[tuple[int, ...]]:
        return sorted((tuple(sorted(c, key=pos.__getitem__))
                       for c in itertools.combinations(pool, level)),
                      key=lambda c: [pos[v] for v in c])

    ni = state.neighbours(i) - {j}
    nj = state.neighbours(j) - {i}
    every = sorted(set(combos(ni)) | set(combos(nj)), key=lambda c: [pos[v] for v in c])
    if heuristic == STANDARD:
        return every
    first = combos(ni & nj)
    return first + [c for c in every if c not in set(first)]


def pc_edge_removal(cov, vertices: Sequence[int], lam: float, heuristic: str = STANDARD,
                    max_level: int | None = None) -> PcState:
    """Levelwise edge removal starting from the complete undirected graph.

    At level l every surviving edge i-j is tested against conditioning sets of
    size l drawn from the current neighbourhood of i or of j; the edge is
    removed at the first set with |corr(i, j | S)| <= lam.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"heuristic must be one of {HEURISTICS}")
    cov = np.asarray(cov, dtype=float)
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise NonPositiveDefiniteError("covariance matrix is not positive definite") from None
    vertices = tuple(vertices)
    state = PcState(vertices, {frozenset(p) for p in itertools.combinations(vertices, 2)})
    if max_level is None:
        max_level = len(vertices) - 2
    for level in range(max_level + 1):
        if all(len(state.neighbours(v)) - 1 < level for v in vertices):
            break
        for i, j in state.sorted_edges():
            if not state.has_edge(i, j):
                continue
            for s in _candidate_sets(state, i, j, level, heuristic):
                r = partial_corr_float(cov, PcQuery(i, j, frozenset(s)), vertices)
                if abs(r) <= lam:
                    state.edges.discard(frozenset((i, j)))
                    state.log.append(Removal((i, j), s, r, level))
                    break
    return state


@dataclass(frozen=True)
class TubeQuery:
    """Monte Carlo setup for the volume of {a : |corr(i0, j0 | S)| <= lambda}.

    ``measure`` is ``"uniform"`` on the box ``[low, high]^D`` or ``"gaussian"``
    (independent standard normal edge weights; ``box`` is then ignored).
    """

    query: PcQuery
    lam: float
    samples: int = 100_000
    seed: int = 0
    box: tuple[float, float] = (-2.0, 2.0)
    measure: str = "uniform"
    workers: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.samples < 1 or self.workers < 1:
            raise ValueError("samples and workers must be positive")
        lo, hi = self.box
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("box bounds must be finite with low < high")
        if self.measure not in ("uniform", "gaussian"):
            raise ValueError("measure must be 'uniform' or 'gaussian'")


def _worker_sizes(samples: int, workers: int) -> list[int]:
    base, extra = divmod(samples, workers)
    return [base + (w < extra) for w in range(workers)]


def sample_abs_corr(sigma: SymbolicSigma, tq: TubeQuery) -> np.ndarray:
    """|corr(i0, j0 | S)| at every sampled parameter point.

    Worker ``w`` draws its share of the samples from seed ``tq.seed + w``, so
    the result depends only on (seed, samples, workers).
    """
    dag = sigma.dag
    q = tq.query
    q.validate_for(dag)
    if not minor_det(sigma, q.s | {q.i0}, q.s | {q.j0}):
        raise ZeroPolynomialError(f"f vanishes identically for {q}")
    order = {v: k for k, v in enumerate(topological_sort(dag))}
    edges = sorted(dag.edges, key=lambda e: (order[e[1]], order[e[0]]))
    src = np.array([dag.position(i) for i, _ in edges], dtype=np.intc)
    dst = np.array([dag.position(j) for _, j in edges], dtype=np.intc)
    s = dag.sort_vertices(q.s)
    rows = np.array([dag.position(v) for v in (q.i0, *s)], dtype=np.intc)
    cols = np.array([dag.position(v) for v in (q.j0, *s)], dtype=np.intc)
    chunks = []
    for w, size in enumerate(_worker_sizes(tq.samples, tq.workers)):
        rng = np.random.default_rng(tq.seed + w)
        if tq.measure == "uniform":
            pts = rng.uniform(tq.box[0], tq.box[1], size=(size, len(edges)))
        else:
            pts = rng.standard_normal((size, len(edges)))
        chunks.append(np.abs(kernels.partial_corr_batch(pts, src, dst, dag.n, rows, cols)))
    return np.concatenate(chunks)


def tube_fraction(abs_corr: np.ndarray, lam: float) -> tuple[float, float]:
    """Fraction of samples with |corr| <= lam and its binomial standard error."""
    n = abs_corr.size
    p = float(np.count_nonzero(abs_corr <= lam)) / n
    return p, math.sqrt(p * (1 - p) / n)


def tube_volume_mc(sigma: SymbolicSigma, tq: TubeQuery) -> tuple[float, float]:
    """Monte Carlo estimate of the Tube(lambda) volume: (fraction, standard error)."""
    return tube_fraction(sample_abs_corr(sigma, tq), tq.lam)


def tube_scan(sigma: SymbolicSigma, tq: TubeQuery, lams: Sequence[float]) -> list[tuple[float, float, float]]:
    """(lambda, fraction, stderr) for several thresholds on one sample stream."""
    vals = sample_abs_corr(sigma, tq)
    return [(lam, *tube_fraction(vals, lam)) for lam in lams]


CSV_COLUMNS = ("lambda", "fraction", "stderr", "samples", "seed")


def tube_csv(rows: Iterable[tuple[float, float, float]], samples: int, seed: int, header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for lam, frac, err in rows:
        writer.writerow((f"{lam:.12g}", f"{frac:.12g}", f"{err:.12g}", samples, seed))
    return buf.getvalue()
