from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trekcalc.errors import DegreeTooHighError, NotDivisibleError
from trekcalc.poly import ONE, ZERO, Poly, a, edge_var, format_poly, omega_var, parse_poly, w

A12, A23, A13 = edge_var(1, 2), edge_var(2, 3), edge_var(1, 3)


def test_add_mul_examples():
    assert a(1, 2) + (-a(1, 2)) == ZERO
    assert (a(1, 2) * a(2, 3)).terms == {((A12, 1), (A23, 1)): 1}
    assert (1 + a(1, 2)) * (1 - a(1, 2)) == 1 - a(1, 2) ** 2


def test_coefficients_are_reduced():
    p = Poly.constant(Fraction(4, 2)) * a(1, 2)
    (c,) = p.terms.values()
    assert type(c) is int and c == 2
    q = a(1, 2) * Fraction(1, 3) + a(1, 2) * Fraction(2, 3)
    assert q == a(1, 2) and type(next(iter(q.terms.values()))) is int


def test_partial_derivative_examples():
    assert (a(1, 2) ** 2 * a(2, 3)).derivative(A12) == 2 * a(1, 2) * a(2, 3)
    assert a(2, 3).derivative(A12) == ZERO
    assert (1 + a(1, 2) ** 2).derivative(A12) == 2 * a(1, 2)


def test_substitute_examples():
    assert (w(1) * a(1, 2)).substitute({omega_var(1): 1}) == a(1, 2)
    assert (a(1, 2) ** 2).substitute({A12: -3}) == 9
    assert (a(1, 2) * a(2, 3)).substitute({A12: 0}) == ZERO
    assert (a(1, 2) + a(2, 3)).substitute({A12: Fraction(1, 2)}) == a(2, 3) + Fraction(1, 2)


def test_coefficient_of_linear():
    assert (a(1, 3) * a(2, 3) + a(1, 2)).coefficient_of_linear(A13) == a(2, 3)
    assert (a(1, 2) ** 2).coefficient_of_linear(A23) == ZERO
    with pytest.raises(DegreeTooHighError):
        (a(1, 2) ** 2).coefficient_of_linear(A12)


def test_uses_var_and_degree():
    assert (a(1, 2) + 1).uses_var(A12)
    assert not (a(1, 2) + 1).uses_var(A23)
    assert (a(1, 2) ** 2 * a(2, 3)).degree_in(A12) == 2
    assert ZERO.degree_in(A12) == -1


def test_format_examples():
    assert format_poly(ZERO) == "0"
    assert format_poly(1 + a(1, 2) ** 2) == "1 + a[1,2]^2"
    assert format_poly(-a(1, 3) * a(2, 3)) == "- a[1,3]*a[2,3]"
    assert format_poly(Fraction(3, 2) * w(2) - 2) == "- 2 + 3/2*w[2]"


def test_exact_division():
    p = (a(1, 2) + a(2, 3) * 2) * (1 - a(1, 3) ** 2)
    assert p.exact_div(1 - a(1, 3) ** 2) == a(1, 2) + 2 * a(2, 3)
    with pytest.raises(NotDivisibleError):
        (a(1, 2) + 1).exact_div(a(2, 3))


VARS = [edge_var(1, 2), edge_var(1, 3), edge_var(2, 3), omega_var(1), omega_var(3)]


@st.composite
def polys(draw, max_terms=5):
    terms = []
    for _ in range(draw(st.integers(0, max_terms))):
        mono = {}
        for v in draw(st.lists(st.sampled_from(VARS), max_size=3)):
            mono[v] = mono.get(v, 0) + draw(st.integers(1, 2))
        coeff = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        terms.append((tuple(sorted(mono.items())), coeff))
    return Poly(terms)


@settings(max_examples=150, deadline=None)
@given(polys(), polys(), polys())
def test_ring_laws(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == ZERO
    assert p * ONE == p


@settings(max_examples=150, deadline=None)
@given(polys(), polys(), st.sampled_from(VARS))
def test_leibniz_rule(p, q, v):
    assert (p * q).derivative(v) == p.derivative(v) * q + p * q.derivative(v)


@settings(max_examples=200, deadline=None)
@given(polys(8))
def test_text_round_trip(p):
    assert parse_poly(format_poly(p)) == p


@settings(max_examples=100, deadline=None)
@given(polys(4), polys(3))
def test_exact_division_inverts_multiplication(p, q):
    if q:
        assert (p * q).exact_div(q) == p


@settings(max_examples=100, deadline=None)
@given(polys(), st.dictionaries(st.sampled_from(VARS), st.fractions(max_denominator=5).filter(lambda x: abs(x) < 5)))
def test_substitution_is_a_ring_map_at_full_assignment(p, partial):
    full = {v: partial.get(v, Fraction(1, 3)) for v in VARS}
    assert p.substitute(partial).evaluate(full) == p.evaluate(full)
