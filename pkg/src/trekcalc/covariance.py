"""Symbolic covariance matrix of a Gaussian DAG model, its minors, and partial correlations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dag import Dag, PcQuery
from .determinant import poly_det, rational_det
from .errors import DegenerateDenominatorError, NonPositiveDefiniteError, SizeMismatchError
from .poly import ONE, ZERO, Poly, Var, edge_var, omega_var

IDENTITY = "identity"
SYMBOLIC = "symbolic"
OMEGA_MODES = (IDENTITY, SYMBOLIC)

# largest minor size expanded by cofactors; Bareiss above
COFACTOR_MAX = 6


@dataclass(frozen=True)
class SymbolicSigma:
    """Sigma = (I - A)^{-T} Omega (I - A)^{-1} with Poly entries, indexed by vertex position."""

    dag: Dag
    entries: tuple[tuple[Poly, ...], ...]
    omega_mode: str = IDENTITY
    _minors: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def entry(self, i: int, j: int) -> Poly:
        return self.entries[self.dag.position(i)][self.dag.position(j)]


@dataclass
class ParamPoint:
    """Edge weights (and optionally error variances) at which to evaluate the model.

    Values may be exact (``int``/``Fraction``) or floats.
    """

    edges: dict[tuple[int, int], object]
    omega: dict[int, object] | None = None

    def validate_for(self, dag: Dag) -> None:
        if set(self.edges) != set(dag.edges):
            raise ValueError("parameter point must assign exactly the edges of the dag")
        if self.omega is not None:
            if set(self.omega) != set(dag.vertices):
                raise ValueError("omega must be given for every vertex")
            if any(v <= 0 for v in self.omega.values()):
                raise ValueError("omega values must be positive")

    def assignment(self, dag: Dag, omega_mode: str = IDENTITY) -> dict[Var, object]:
        values: dict[Var, object] = {edge_var(i, j): x for (i, j), x in self.edges.items()}
        if omega_mode == SYMBOLIC:
            for m in dag.vertices:
                values[omega_var(m)] = 1 if self.omega is None else self.omega[m]
        return values


def _matmul(x, y, n):
    out = []
    for r in range(n):
        row = []
        for c in range(n):
            acc = ZERO
            for k in range(n):
                if x[r][k] and y[k][c]:
                    acc = acc + x[r][k] * y[k][c]
            row.append(acc)
        out.append(row)
    return out


def build_sigma(dag: Dag, omega_mode: str = IDENTITY) -> SymbolicSigma:
    """Sigma via the geometric series B = I + A + A^2 + ... (A is nilpotent)."""
    if omega_mode not in OMEGA_MODES:
        raise ValueError(f"omega_mode must be one of {OMEGA_MODES}")
    n = dag.n
    pos = dag.position
    amat = [[ZERO] * n for _ in range(n)]
    for i, j in dag.edges:
        amat[pos(i)][pos(j)] = Poly.variable(edge_var(i, j))
    b = [[ONE if r == c else ZERO for c in range(n)] for r in range(n)]
    power = amat
    while any(x for row in power for x in row):
        b = [[b[r][c] + power[r][c] for c in range(n)] for r in range(n)]
        power = _matmul(power, amat, n)
    if omega_mode == IDENTITY:
        omega = [ONE] * n
    else:
        omega = [Poly.variable(omega_var(m)) for m in dag.vertices]
    entries = [[ZERO] * n for _ in range(n)]
    for r in range(n):
        for c in range(r, n):
            acc = ZERO
            for m in range(n):
                if b[m][r] and b[m][c]:
                    acc = acc + b[m][r] * omega[m] * b[m][c]
            entries[r][c] = entries[c][r] = acc
    return SymbolicSigma(dag, tuple(tuple(row) for row in entries), omega_mode)


def minor_det(sigma: SymbolicSigma, rows: Iterable[int], cols: Iterable[int]) -> Poly:
    """det Sigma[I, J] with rows and columns sorted by the vertex order."""
    dag = sigma.dag
    r = dag.sort_vertices(set(rows))
    c = dag.sort_vertices(set(cols))
    if len(r) != len(c):
        raise SizeMismatchError(f"|I| = {len(r)} but |J| = {len(c)}")
    key = (r, c)
    cached = sigma._minors.get(key)
    if cached is None:
        cached = sigma._minors.get((c, r))
    if cached is None:
        mat = [[sigma.entry(i, j) for j in c] for i in r]
        cached = poly_det(mat, COFACTOR_MAX)
        sigma._minors[key] = cached
    return cached


def corr_numerator(sigma: SymbolicSigma, q: PcQuery) -> Poly:
    """det Sigma[(i0, S), (j0, S)]: the numerator of corr(i0, j0 | S) with its sign.

    Equals ``minor_det(S+i0, S+j0)`` up to a sign fixed by where i0 and j0 fall
    in the vertex order.
    """
    s = sigma.dag.sort_vertices(q.s)
    return poly_det([[sigma.entry(i, j) for j in (q.j0, *s)] for i in (q.i0, *s)], COFACTOR_MAX)


def evaluate_sigma(sigma: SymbolicSigma, point: ParamPoint) -> list[list]:
    """Numeric Sigma at a point; exact when the point is rational."""
    point.validate_for(sigma.dag)
    values = point.assignment(sigma.dag, sigma.omega_mode)
    n = sigma.dag.n
    out = [[None] * n for _ in range(n)]
    for r in range(n):
        for c in range(r, n):
            out[r][c] = out[c][r] = sigma.entries[r][c].evaluate(values)
    return out


def _sub(mat, dag: Dag, rows: Sequence[int], cols: Sequence[int]):
    return [[mat[dag.position(i)][dag.position(j)] for j in cols] for i in rows]


def partial_corr_exact(sigma: SymbolicSigma, q: PcQuery, point: ParamPoint) -> tuple[Fraction, int]:
    """(corr(i0, j0 | S)^2, sign of the numerator) as exact rationals."""
    dag = sigma.dag
    q.validate_for(dag)
    vals = evaluate_sigma(sigma, point)
    s = dag.sort_vertices(q.s)
    ri, cj = (q.i0, *s), (q.j0, *s)
    num = rational_det(_sub(vals, dag, ri, cj))
    den = rational_det(_sub(vals, dag, ri, ri)) * rational_det(_sub(vals, dag, cj, cj))
    if den <= 0:
        raise DegenerateDenominatorError(f"principal minors multiply to {den}")
    sign = (num > 0) - (num < 0)
    return num * num / den, sign


def partial_corr_float(cov, q: PcQuery, vertices: Sequence[int]) -> float:
    """corr(i0, j0 | S) in floating point for any covariance matrix.

    ``vertices[k]`` names the variable in row/column ``k`` of ``cov``.
    """
    cov = np.asarray(cov, dtype=float)
    idx = {v: k for k, v in enumerate(vertices)}
    s = [idx[v] for v in sorted(q.s, key=idx.__getitem__)]
    ri, cj = [idx[q.i0], *s], [idx[q.j0], *s]
    num = np.linalg.det(cov[np.ix_(ri, cj)])
    d1 = np.linalg.det(cov[np.ix_(ri, ri)])
    d2 = np.linalg.det(cov[np.ix_(cj, cj)])
    if d1 <= 0 or d2 <= 0:
        raise NonPositiveDefiniteError(f"non-positive principal minor ({d1}, {d2})")
    return float(num / math.sqrt(d1 * d2))


def scale_by_diagonal(point: ParamPoint, d: Mapping[int, object]) -> ParamPoint:
    """Action of a positive diagonal d: a_ij -> a_ij d_j / d_i, omega_m -> omega_m d_m^2."""
    if any(x <= 0 for x in d.values()):
        raise ValueError("diagonal entries must be positive")

    def q(x, y):
        return Fraction(x) / y if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)) else x / y

    edges = {(i, j): q(x * d[j], d[i]) for (i, j), x in point.edges.items()}
    omega = {m: (1 if point.omega is None else point.omega[m]) * d[m] * d[m] for m in d}
    return ParamPoint(edges, omega)
