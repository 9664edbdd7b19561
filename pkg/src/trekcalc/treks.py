"""Treks, trek systems, and the expansion of covariance minors as signed sums over trek systems."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from . import kernels
from .covariance import IDENTITY, SYMBOLIC
from .dag import Dag, Path, _paths
from .errors import CancellationError, SizeMismatchError, TailSwapError
from .poly import EDGE, Monomial, Poly, edge_var, omega_var


@dataclass(frozen=True)
class Trek:
    """Up and down paths, both stored top-first."""

    up: Path
    down: Path

    def __post_init__(self):
        if not self.up or not self.down or self.up[0] != self.down[0]:
            raise ValueError("up and down parts must start at the same top")

    @property
    def top(self) -> int:
        return self.up[0]

    @property
    def source(self) -> int:
        return self.up[-1]

    @property
    def target(self) -> int:
        return self.down[-1]

    def validate_for(self, dag: Dag) -> None:
        for part in (self.up, self.down):
            for u, v in zip(part, part[1:]):
                if not dag.has_edge(u, v):
                    raise ValueError(f"{u}->{v} is not an edge")

    def __str__(self) -> str:
        up = "<-".join(str(v) for v in reversed(self.up))
        return f"{up}->{'->'.join(str(v) for v in self.down[1:])}" if len(self.down) > 1 else up


@dataclass(frozen=True)
class TrekSystem:
    treks: tuple[Trek, ...]

    def __post_init__(self):
        srcs = [t.source for t in self.treks]
        tgts = [t.target for t in self.treks]
        if len(set(srcs)) != len(srcs) or len(set(tgts)) != len(tgts):
            raise ValueError("trek system must induce a bijection")

    @property
    def sources(self) -> frozenset[int]:
        return frozenset(t.source for t in self.treks)

    @property
    def targets(self) -> frozenset[int]:
        return frozenset(t.target for t in self.treks)

    def mapping(self) -> dict[int, int]:
        return {t.source: t.target for t in self.treks}

    def tops(self) -> set[int]:
        return {t.top for t in self.treks}


def _path_mono(path: Path, acc: dict) -> None:
    for u, v in zip(path, path[1:]):
        x = edge_var(u, v)
        acc[x] = acc.get(x, 0) + 1


def trek_monomial(t: Trek, omega_mode: str = IDENTITY) -> Monomial:
    acc: dict = {}
    _path_mono(t.up, acc)
    _path_mono(t.down, acc)
    if omega_mode == SYMBOLIC:
        acc[omega_var(t.top)] = 1
    return tuple(sorted(acc.items()))


def trek_weight(t: Trek, omega_mode: str = IDENTITY) -> Poly:
    """Product of up-edge weights, omega of the top (symbolic mode only), and down-edge weights."""
    return Poly.monomial(trek_monomial(t, omega_mode))


def has_sided_intersection(t: Trek, u: Trek) -> bool:
    """True iff the up parts share a vertex or the down parts share a vertex."""
    return bool(set(t.up) & set(u.up)) or bool(set(t.down) & set(u.down))


def system_sign(ts: TrekSystem, dag: Dag | None = None) -> int:
    """(-1)^(number of crossings of source -> target) in the vertex order of ``dag``."""
    key = dag.position if dag is not None else (lambda v: v)
    pairs = sorted(((key(t.source), key(t.target)) for t in ts.treks))
    crossings = sum(1 for (_, b), (_, d) in itertools.combinations(pairs, 2) if b > d)
    return -1 if crossings % 2 else 1


@lru_cache(maxsize=65536)
def _treks(dag: Dag, i: int, j: int) -> tuple[Trek, ...]:
    tops = dag.ancestors([i]) & dag.ancestors([j])
    out = []
    for m in dag.sort_vertices(tops):
        for up in _paths(dag, m, i):
            for down in _paths(dag, m, j):
                out.append(Trek(up, down))
    return tuple(out)


def enumerate_treks(dag: Dag, i: int, j: int) -> list[Trek]:
    """All treks from ``i`` to ``j``."""
    dag.position(i)
    dag.position(j)
    return list(_treks(dag, i, j))


def _mask(dag: Dag, part: Path) -> int:
    m = 0
    for v in part:
        m |= 1 << dag.position(v)
    return m


def enumerate_trek_systems(
    dag: Dag, rows: Iterable[int], cols: Iterable[int], require_no_sided: bool = True
) -> list[TrekSystem]:
    """All trek systems from ``rows`` to ``cols``, optionally only those without sided intersections."""
    src = dag.sort_vertices(set(rows))
    tgt = dag.sort_vertices(set(cols))
    if len(src) != len(tgt):
        raise SizeMismatchError(f"|I| = {len(src)} but |J| = {len(tgt)}")
    if not src:
        return [TrekSystem(())]
    if not require_no_sided:
        out = []
        for perm in itertools.permutations(tgt):
            choices = [_treks(dag, i, j) for i, j in zip(src, perm)]
            out.extend(TrekSystem(combo) for combo in itertools.product(*choices))
        return out
    # flatten per-source options for the backtracking kernel
    offsets = [0]
    options: list[Trek] = []
    targets, ups, downs = [], [], []
    tpos = {v: k for k, v in enumerate(tgt)}
    for i in src:
        for j in tgt:
            for t in _treks(dag, i, j):
                options.append(t)
                targets.append(tpos[j])
                ups.append(_mask(dag, t.up))
                downs.append(_mask(dag, t.down))
        offsets.append(len(options))
    chosen = kernels.sided_free_assignments(offsets, targets, ups, downs)
    return [TrekSystem(tuple(options[o] for o in combo)) for combo in chosen]


def system_monomial(ts: TrekSystem, omega_mode: str = IDENTITY) -> Monomial:
    acc: dict = {}
    for t in ts.treks:
        for v, e in trek_monomial(t, omega_mode):
            acc[v] = acc.get(v, 0) + e
    return tuple(sorted(acc.items()))


def expansion_det(dag: Dag, rows: Iterable[int], cols: Iterable[int], omega_mode: str = IDENTITY) -> Poly:
    """Sum of sgn(T) w(T) over trek systems rows -> cols without sided intersections.

    Raises CancellationError if two systems of equal weight carry opposite signs.
    """
    coeffs: dict[Monomial, int] = {}
    signs: dict[Monomial, int] = {}
    for ts in enumerate_trek_systems(dag, rows, cols, require_no_sided=True):
        m = system_monomial(ts, omega_mode)
        sg = system_sign(ts, dag)
        prev = signs.setdefault(m, sg)
        if prev != sg:
            raise CancellationError(f"systems with weight {Poly.monomial(m)} have opposite signs")
        coeffs[m] = coeffs.get(m, 0) + sg
    return Poly(coeffs)


def recover_tops(m: Monomial, rows: Iterable[int], cols: Iterable[int]) -> set[int]:
    """Tops of a sided-intersection-free system, read off its Omega = I weight monomial."""
    has_out = {v.i for v, _ in m if v.kind == EDGE}
    has_in = {v.j for v, _ in m if v.kind == EDGE}
    tops = has_out - has_in
    for x in set(rows) & set(cols):
        if x not in has_out and x not in has_in:
            tops.add(x)
    return tops


def tail_swap(t: Trek, u: Trek, k: int) -> tuple[Trek, Trek]:
    """Exchange the parts of the down paths of ``t`` and ``u`` strictly below ``k``."""
    if k not in t.down or k not in u.down:
        raise TailSwapError(f"vertex {k} is not on both down parts")
    a = t.down.index(k)
    b = u.down.index(k)
    return Trek(t.up, t.down[: a + 1] + u.down[b + 1:]), Trek(u.up, u.down[: b + 1] + t.down[a + 1:])
