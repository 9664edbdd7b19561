import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trekcalc.covariance import IDENTITY, SYMBOLIC, build_sigma, minor_det
from trekcalc.dag import Dag, all_dags, random_dag
from trekcalc.errors import SizeMismatchError, TailSwapError
from trekcalc.poly import ONE, ZERO, Poly, a, omega_var, w
from trekcalc.treks import (
    Trek,
    TrekSystem,
    enumerate_trek_systems,
    enumerate_treks,
    expansion_det,
    has_sided_intersection,
    recover_tops,
    system_monomial,
    system_sign,
    tail_swap,
    trek_monomial,
    trek_weight,
)


def test_trek_weight_examples():
    assert trek_weight(Trek((4,), (4,)), SYMBOLIC) == w(4)
    assert trek_weight(Trek((1,), (1, 2, 3)), IDENTITY) == a(1, 2) * a(2, 3)
    assert trek_weight(Trek((1, 2), (1, 2)), IDENTITY) == a(1, 2) ** 2
    assert trek_weight(Trek((1, 2), (1, 2)), SYMBOLIC) == a(1, 2) ** 2 * w(1)


def test_trek_endpoints():
    t = Trek((1, 2), (1, 3, 4))
    assert (t.top, t.source, t.target) == (1, 2, 4)
    with pytest.raises(ValueError):
        Trek((1,), (2,))


def test_sided_intersection_examples():
    assert has_sided_intersection(Trek((1, 2), (1,)), Trek((1, 3), (1, 3)))
    assert not has_sided_intersection(Trek((1,), (1,)), Trek((2,), (2, 3)))
    assert not has_sided_intersection(Trek((1, 2), (1,)), Trek((3,), (3, 2)))


def test_system_sign_examples():
    ident = TrekSystem((Trek((1,), (1,)), Trek((2,), (2,))))
    assert system_sign(ident) == 1
    swap = TrekSystem((Trek((9, 1), (9, 2)), Trek((8, 2), (8, 1))))
    assert system_sign(swap) == -1
    cyc = TrekSystem((Trek((7, 1), (7, 2)), Trek((8, 2), (8, 3)), Trek((9, 3), (9, 1))))
    assert system_sign(cyc) == 1


def test_sign_uses_dag_order():
    ts = TrekSystem((Trek((1,), (1, 3)), Trek((2,), (2, 4))))
    assert system_sign(ts, Dag([1, 2, 3, 4], [(1, 3), (2, 4)])) == 1
    assert system_sign(ts, Dag([1, 2, 4, 3], [(1, 3), (2, 4)])) == -1


def test_trek_systems_examples(chain, collider):
    systems = enumerate_trek_systems(chain, {3}, {3}, require_no_sided=False)
    assert sorted(t.treks[0].top for t in systems) == [1, 2, 3]
    # the three systems reproduce the three terms of sigma_33
    assert sum((trek_weight(t.treks[0]) for t in systems), ZERO) == build_sigma(chain).entry(3, 3)
    (only,) = enumerate_trek_systems(collider, {1, 3}, {2, 3})
    assert system_monomial(only) == trek_monomial(Trek((1,), (1, 3))) + trek_monomial(Trek((2, 3), (2,)))
    assert enumerate_trek_systems(Dag([1, 2]), {1}, {2}, require_no_sided=False) == []
    with pytest.raises(SizeMismatchError):
        enumerate_trek_systems(chain, {1}, {2, 3})


def test_filtered_systems_are_pairwise_free():
    d = Dag([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4), (1, 4)])
    everything = enumerate_trek_systems(d, {2, 4}, {3, 4}, require_no_sided=False)
    free = enumerate_trek_systems(d, {2, 4}, {3, 4}, require_no_sided=True)
    brute = [ts for ts in everything
             if not any(has_sided_intersection(t, u) for t, u in itertools.combinations(ts.treks, 2))]
    assert sorted(map(repr, free)) == sorted(map(repr, brute))
    assert len(free) == len(set(free))


def test_expansion_examples(chain):
    assert expansion_det(chain, {1, 2}, {2, 3}) == ZERO
    assert expansion_det(chain, {2}, {2}) == 1 + a(1, 2) ** 2
    assert expansion_det(chain, set(), set()) == ONE


def _is_power_of_two(c):
    c = abs(c)
    return c >= 1 and int(c) == c and int(c) & (int(c) - 1) == 0


@pytest.mark.parametrize("seed", range(6))
def test_expansion_matches_minor_on_random_five_vertex_dags(seed):
    rng = np.random.default_rng(seed)
    d = random_dag(rng, 5, 0.6)
    for mode in (IDENTITY, SYMBOLIC):
        s = build_sigma(d, mode)
        for k in (1, 2, 3):
            for rows in itertools.combinations(d.vertices, k):
                cols = tuple(rng.choice(d.vertices, size=k, replace=False).tolist())
                e = expansion_det(d, rows, cols, mode)
                assert e == minor_det(s, rows, cols)
                assert all(_is_power_of_two(c) for c in e.terms.values())


def _perm_sign(seq, key):
    keys = [key(v) for v in seq]
    inv = sum(1 for x, y in itertools.combinations(range(len(keys)), 2) if keys[x] > keys[y])
    return -1 if inv % 2 else 1


def test_vertex_order_changes_only_the_row_column_sort_sign():
    base = Dag([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4), (1, 4)])
    for order in itertools.permutations(base.vertices):
        rel = Dag(order, base.edges)
        for rows, cols in [((1, 2), (3, 4)), ((1, 4), (2, 3)), ((1, 2, 3), (2, 3, 4))]:
            new = expansion_det(rel, rows, cols)
            assert new == minor_det(build_sigma(rel), rows, cols)
            flip = _perm_sign(rows, rel.position) * _perm_sign(cols, rel.position)
            assert new == expansion_det(base, rows, cols) * flip


def test_recover_tops_examples(collider):
    assert recover_tops(trek_monomial(Trek((1,), (1, 2, 3))), {1}, {3}) == {1}
    assert recover_tops((), {2}, {2}) == {2}
    (only,) = enumerate_trek_systems(collider, {1, 3}, {2, 3})
    assert recover_tops(system_monomial(only), {1, 3}, {2, 3}) == only.tops() == {1, 2}


def test_recover_tops_exhaustive():
    for n in (2, 3, 4):
        for d in all_dags(n):
            for k in range(1, n + 1):
                for rows in itertools.combinations(d.vertices, k):
                    for cols in itertools.combinations(d.vertices, k):
                        for ts in enumerate_trek_systems(d, rows, cols):
                            assert recover_tops(system_monomial(ts), rows, cols) == ts.tops()


def test_tail_swap_examples():
    t, u = Trek((1,), (1, 2, 3)), Trek((4,), (4, 2, 5))
    t2, u2 = tail_swap(t, u, 2)
    assert t2.down == (1, 2, 5) and u2.down == (4, 2, 3)
    assert tail_swap(t2, u2, 2) == (t, u)
    x, y = Trek((1,), (1, 2)), Trek((4,), (4, 2))
    assert tail_swap(x, y, 2) == (x, y)
    with pytest.raises(TailSwapError):
        tail_swap(t, u, 3)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tail_swap_involution_preserves_weight(seed):
    rng = np.random.default_rng(seed)
    d = random_dag(rng, 5, 0.7)
    treks = [t for i in d.vertices for j in d.vertices for t in enumerate_treks(d, i, j)]
    pairs = [(t, u) for t, u in itertools.combinations(treks, 2) if set(t.down) & set(u.down)]
    if not pairs:
        return
    t, u = pairs[int(rng.integers(len(pairs)))]
    k = sorted(set(t.down) & set(u.down))[0]
    t2, u2 = tail_swap(t, u, k)
    t2.validate_for(d)
    u2.validate_for(d)
    assert (t2.source, u2.source, t2.top, u2.top) == (t.source, u.source, t.top, u.top)
    assert (t2.target, u2.target) == (u.target, t.target)
    assert trek_weight(t2) * trek_weight(u2) == trek_weight(t) * trek_weight(u)
    assert tail_swap(t2, u2, k) == (t, u)
