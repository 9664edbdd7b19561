"""Directed acyclic graphs with a fixed linear vertex order.

The declaration order of ``Dag.vertices`` is the linear order used for every
sign computation (crossing counts, sorted minors).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import CycleError, InvalidQueryError, UnknownVertexError

Edge = tuple[int, int]
Path = tuple[int, ...]


@dataclass(frozen=True)
class Dag:
    """A DAG on integer vertex ids.

    ``vertices`` fixes the linear order; ``edges`` is a set of ordered pairs.
    Construction validates acyclicity, so a ``Dag`` instance is always a
    genuine DAG.
    """

    vertices: tuple[int, ...]
    edges: frozenset[Edge]
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)
    _children: dict = field(init=False, repr=False, compare=False, hash=False)
    _parents: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, vertices: Iterable[int], edges: Iterable[Edge] = ()):
        vertices = tuple(int(v) for v in vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError(f"duplicate vertex in {vertices}")
        edge_list = [(int(i), int(j)) for i, j in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            raise ValueError("duplicate edge")
        pos = {v: k for k, v in enumerate(vertices)}
        for i, j in edge_set:
            if i == j:
                raise ValueError(f"self-loop at {i}")
            for v in (i, j):
                if v not in pos:
                    raise UnknownVertexError(v)
        children: dict[int, list[int]] = {v: [] for v in vertices}
        parents: dict[int, list[int]] = {v: [] for v in vertices}
        for i, j in sorted(edge_set, key=lambda e: (pos[e[0]], pos[e[1]])):
            children[i].append(j)
            parents[j].append(i)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edge_set)
        object.__setattr__(self, "_pos", pos)
        object.__setattr__(self, "_children", {v: tuple(c) for v, c in children.items()})
        object.__setattr__(self, "_parents", {v: tuple(p) for v, p in parents.items()})
        topological_sort(self)

    def __repr__(self) -> str:
        edges = ", ".join(f"{i}->{j}" for i, j in self.sorted_edges())
        return f"Dag(vertices={list(self.vertices)}, edges=[{edges}])"

    @property
    def n(self) -> int:
        return len(self.vertices)

    def position(self, v: int) -> int:
        try:
            return self._pos[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def has_vertex(self, v: int) -> bool:
        return v in self._pos

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def children(self, v: int) -> tuple[int, ...]:
        self.position(v)
        return self._children[v]

    def parents(self, v: int) -> tuple[int, ...]:
        self.position(v)
        return self._parents[v]

    def sort_vertices(self, vs: Iterable[int]) -> tuple[int, ...]:
        """Sort vertex ids by the linear order of this graph."""
        return tuple(sorted(vs, key=self.position))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: (self._pos[e[0]], self._pos[e[1]]))

    def with_edges(self, edges: Iterable[Edge]) -> Dag:
        return Dag(self.vertices, edges)

    def ancestors(self, vs: Iterable[int]) -> set[int]:
        """Ancestors of ``vs`` including ``vs`` themselves."""
        seen = set()
        stack = list(vs)
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(self.parents(v))
        return seen

    def descendants(self, v: int) -> set[int]:
        """Vertices reachable from ``v`` by a path of length >= 0."""
        seen = set()
        stack = [v]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(self.children(u))
        return seen


@dataclass(frozen=True)
class PcQuery:
    """A partial correlation ``corr(i0, j0 | s)``."""

    i0: int
    j0: int
    s: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "s", frozenset(self.s))
        if self.i0 == self.j0:
            raise InvalidQueryError("i0 and j0 must be distinct")
        if self.i0 in self.s or self.j0 in self.s:
            raise InvalidQueryError("i0 and j0 must not lie in the conditioning set")

    def validate_for(self, dag: Dag) -> None:
        for v in (self.i0, self.j0, *self.s):
            dag.position(v)

    def __str__(self) -> str:
        s = ",".join(str(v) for v in sorted(self.s))
        return f"i0={self.i0} j0={self.j0} S={{{s}}}"


def topological_sort(dag: Dag) -> tuple[int, ...]:
    """Kahn's algorithm with ties broken by the vertex linear order."""
    indeg = {v: len(dag._parents[v]) for v in dag.vertices}
    ready = [v for v in dag.vertices if indeg[v] == 0]
    order = []
    while ready:
        ready.sort(key=dag._pos.__getitem__)
        v = ready.pop(0)
        order.append(v)
        for c in dag._children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(order) != len(dag.vertices):
        raise CycleError("edge set contains a directed cycle")
    return tuple(order)


def is_below(dag: Dag, i: int, j: int) -> bool:
    """True iff there is a directed path of length >= 1 from ``i`` to ``j``."""
    dag.position(j)
    if i == j:
        dag.position(i)
        return False
    return j in dag.descendants(i)


def enumerate_paths(dag: Dag, i: int, j: int) -> list[Path]:
    """All directed paths from ``i`` to ``j``, including ``(i,)`` when i == j."""
    dag.position(i)
    dag.position(j)
    return list(_paths(dag, i, j))


@lru_cache(maxsize=65536)
def _paths(dag: Dag, i: int, j: int) -> tuple[Path, ...]:
    if i == j:
        return ((i,),)
    out = []
    for c in dag._children[i]:
        for tail in _paths(dag, c, j):
            out.append((i,) + tail)
    return tuple(out)


def d_separates(dag: Dag, q: PcQuery) -> bool:
    """d-separation via the moralized ancestral graph."""
    q.validate_for(dag)
    keep = dag.ancestors({q.i0, q.j0, *q.s})
    adj: dict[int, set[int]] = {v: set() for v in keep}
    for v in keep:
        pa = [p for p in dag.parents(v) if p in keep]
        for p in pa:
            adj[p].add(v)
            adj[v].add(p)
        for p, r in itertools.combinations(pa, 2):
            adj[p].add(r)
            adj[r].add(p)
    blocked = set(q.s)
    seen = {q.i0}
    todo = deque([q.i0])
    while todo:
        v = todo.popleft()
        for u in adj[v]:
            if u == q.j0:
                return False
            if u not in seen and u not in blocked:
                seen.add(u)
                todo.append(u)
    return True


def theorem_condition(dag: Dag, q: PcQuery) -> bool:
    """i0 -> j0 is an edge and i0 -> s for every s in S below j0."""
    q.validate_for(dag)
    if not dag.has_edge(q.i0, q.j0):
        return False
    below = dag.descendants(q.j0)
    return all(dag.has_edge(q.i0, s) for s in q.s if s in below and s != q.j0)


def complete_dag(n: int) -> Dag:
    """The DAG on 1..n with i -> j iff i < j."""
    vs = range(1, n + 1)
    return Dag(vs, [(i, j) for i in vs for j in vs if i < j])


def all_dags(n: int) -> Iterator[Dag]:
    """Every labeled DAG on vertices 1..n (25 for n=3, 543 for n=4)."""
    vs = tuple(range(1, n + 1))
    pairs = [(i, j) for i in vs for j in vs if i != j]
    for mask in range(1 << len(pairs)):
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        if any(mask >> pairs.index((j, i)) & 1 for i, j in edges if i < j):
            continue
        try:
            yield Dag(vs, edges)
        except CycleError:
            continue


def random_dag(rng, n: int, p: float = 0.5) -> Dag:
    """Random DAG: a random topological order with each forward edge kept w.p. ``p``.

    ``rng`` is a ``numpy.random.Generator``.
    """
    vs = tuple(range(1, n + 1))
    perm = [int(v) for v in rng.permutation(vs)]
    edges = [(perm[a], perm[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return Dag(vs, edges)


def valid_queries(dag: Dag, ordered: bool = True) -> Iterator[PcQuery]:
    """All queries (i0, j0, S); with ``ordered=False`` only i0 before j0."""
    vs = dag.vertices
    for i0 in vs:
        for j0 in vs:
            if i0 == j0 or (not ordered and dag.position(i0) > dag.position(j0)):
                continue
            rest = [v for v in vs if v not in (i0, j0)]
            for k in range(len(rest) + 1):
                for s in itertools.combinations(rest, k):
                    yield PcQuery(i0, j0, frozenset(s))
