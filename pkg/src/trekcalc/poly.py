"""Sparse multivariate polynomials with exact rational coefficients.

Variables are edge parameters ``a[i,j]`` and error variances ``w[m]``.  A
monomial is a tuple of ``(Var, exponent)`` pairs sorted by variable; a
polynomial maps monomials to nonzero ``int``/``Fraction`` coefficients.
Integral coefficients are always stored as ``int``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import DegreeTooHighError, NotDivisibleError

EDGE = 0
OMEGA = 1


class Var(NamedTuple):
    """``kind`` is EDGE (an ``a[i,j]``) or OMEGA (a ``w[m]``, stored as i == j == m).

    Tuple order gives the canonical variable order: edges by (i, j), then omegas.
    """

    kind: int
    i: int
    j: int

    def __str__(self) -> str:
        if self.kind == EDGE:
            return f"a[{self.i},{self.j}]"
        return f"w[{self.i}]"


def edge_var(i: int, j: int) -> Var:
    return Var(EDGE, i, j)


def omega_var(m: int) -> Var:
    return Var(OMEGA, m, m)


Monomial = tuple[tuple[Var, int], ...]
Coeff = Union[int, Fraction]
ONE_MONO: Monomial = ()


def _norm(c) -> Coeff:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c))
    raise TypeError(f"coefficients must be rational, got {type(c).__name__}")


@lru_cache(maxsize=1 << 18)
def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    a = b = 0
    la, lb = len(m1), len(m2)
    while a < la and b < lb:
        va, ea = m1[a]
        vb, eb = m2[b]
        if va == vb:
            out.append((va, ea + eb))
            a += 1
            b += 1
        elif va < vb:
            out.append(m1[a])
            a += 1
        else:
            out.append(m2[b])
            b += 1
    out.extend(m1[a:])
    out.extend(m2[b:])
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_exponent(m: Monomial, v: Var) -> int:
    for w, e in m:
        if w == v:
            return e
    return 0


def mono_remove(m: Monomial, v: Var) -> Monomial:
    return tuple(p for p in m if p[0] != v)


def mono_divide(m: Monomial, d: Monomial) -> Monomial | None:
    """``m / d`` if ``d`` divides ``m``, else None."""
    exps = dict(m)
    for v, e in d:
        have = exps.get(v, 0)
        if have < e:
            return None
        if have == e:
            del exps[v]
        else:
            exps[v] = have - e
    return tuple(sorted(exps.items()))


def _lex_key(m: Monomial):
    # lex order with the canonical variable order: smaller Var is the more significant variable
    return tuple(((-v.kind, -v.i, -v.j), e) for v, e in m)


def _print_key(m: Monomial):
    return (mono_degree(m), m)


class Poly:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Coeff] | Iterable[tuple[Monomial, Coeff]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Coeff] = {}
        for m, c in items:
            m = tuple(sorted(m))
            acc[m] = acc.get(m, 0) + _norm(c)
        self._terms = {m: _norm(c) for m, c in acc.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> Poly:
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c) -> Poly:
        c = _norm(c)
        return cls._raw({ONE_MONO: c} if c != 0 else {})

    @classmethod
    def variable(cls, v: Var) -> Poly:
        return cls._raw({((v, 1),): 1})

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> Poly:
        c = _norm(c)
        return cls._raw({m: c} if c != 0 else {})

    @property
    def terms(self) -> Mapping[Monomial, Coeff]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ONE_MONO in self._terms)

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get(ONE_MONO, 0)

    def variables(self) -> set[Var]:
        return {v for m in self._terms for v, _ in m}

    def degree(self) -> int:
        return max((mono_degree(m) for m in self._terms), default=-1)

    # arithmetic

    @staticmethod
    def _coerce(other) -> Poly:
        if isinstance(other, Poly):
            return other
        return Poly.constant(other)

    def __add__(self, other) -> Poly:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = _norm(s)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> Poly:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            try:
                c = _norm(other)
            except TypeError:
                return NotImplemented
            if c == 0:
                return Poly._raw({})
            return Poly._raw({m: _norm(v * c) for m, v in self._terms.items()})
        if not self._terms or not other._terms:
            return Poly._raw({})
        out: dict[Monomial, Coeff] = {}
        get = out.get
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = mono_mul(m1, m2)
                out[m] = get(m, 0) + c1 * c2
        return Poly._raw({m: _norm(c) for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Poly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        try:
            return self._terms == Poly.constant(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # calculus and substitution

    def derivative(self, v: Var) -> Poly:
        out: dict[Monomial, Coeff] = {}
        for m, c in self._terms.items():
            e = mono_exponent(m, v)
            if e == 0:
                continue
            if e == 1:
                nm = mono_remove(m, v)
            else:
                nm = tuple((w, f - 1) if w == v else (w, f) for w, f in m)
            out[nm] = out.get(nm, 0) + c * e
        return Poly._raw({m: _norm(c) for m, c in out.items() if c != 0})

    def uses_var(self, v: Var) -> bool:
        return any(w == v for m in self._terms for w, _ in m)

    def degree_in(self, v: Var) -> int:
        """Degree in ``v``; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(mono_exponent(m, v) for m in self._terms)

    def coefficient_of_linear(self, v: Var) -> Poly:
        """The ``c`` with ``self == c*v + (terms free of v)``."""
        out = {}
        for m, c in self._terms.items():
            e = mono_exponent(m, v)
            if e >= 2:
                raise DegreeTooHighError(f"{v} occurs with exponent {e}")
            if e == 1:
                out[mono_remove(m, v)] = c
        return Poly._raw(out)

    def substitute(self, assignment: Mapping[Var, Coeff]) -> Poly:
        """Exact substitution of rational values; unassigned variables stay symbolic."""
        vals = {v: _norm(x) for v, x in assignment.items()}
        out: dict[Monomial, Coeff] = {}
        for m, c in self._terms.items():
            rest = []
            for v, e in m:
                if v in vals:
                    c = c * vals[v] ** e
                else:
                    rest.append((v, e))
            if c == 0:
                continue
            nm = tuple(rest)
            out[nm] = out.get(nm, 0) + c
        return Poly._raw({m: _norm(c) for m, c in out.items() if c != 0})

    def evaluate(self, assignment: Mapping[Var, object]):
        """Evaluate at a full assignment.  Works with Fractions or floats."""
        total = 0
        for m, c in self._terms.items():
            t = c
            for v, e in m:
                t = t * assignment[v] ** e
            total = total + t
        return _norm(total) if isinstance(total, (int, Fraction)) else total

    def leading_term(self) -> tuple[Monomial, Coeff]:
        m = max(self._terms, key=_lex_key)
        return m, self._terms[m]

    def exact_div(self, divisor: Poly) -> Poly:
        """Quotient of an exact division; raises NotDivisibleError otherwise."""
        if not divisor:
            raise ZeroDivisionError("division by the zero polynomial")
        if divisor.is_constant():
            c = divisor.constant_value()
            return Poly._raw({m: _norm(Fraction(v) / c) for m, v in self._terms.items()})
        lm, lc = divisor.leading_term()
        rem = self
        quot: dict[Monomial, Coeff] = {}
        while rem:
            m, c = rem.leading_term()
            qm = mono_divide(m, lm)
            if qm is None:
                raise NotDivisibleError("polynomial division leaves a remainder")
            qc = _norm(Fraction(c) / lc)
            quot[qm] = qc
            rem = rem - divisor * Poly._raw({qm: qc})
        return Poly._raw(quot)

    # text form

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def a(i: int, j: int) -> Poly:
    return Poly.variable(edge_var(i, j))


def w(m: int) -> Poly:
    return Poly.variable(omega_var(m))


ZERO = Poly()
ONE = Poly.constant(1)


def _format_mono(m: Monomial) -> str:
    return "*".join(f"{v}^{e}" if e != 1 else str(v) for v, e in m)


def format_poly(p: Poly) -> str:
    """Deterministic rendering, terms ordered by degree then variable order."""
    if not p._terms:
        return "0"
    parts = []
    for k, m in enumerate(sorted(p._terms, key=_print_key)):
        c = p._terms[m]
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if not m:
            body = str(mag)
        elif mag == 1:
            body = _format_mono(m)
        else:
            body = f"{mag}*{_format_mono(m)}"
        if k == 0:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[aw])\[(?P<i>\d+)(?:,(?P<j>\d+))?\]|(?P<op>[-+*^]))"
)


def parse_poly(text: str) -> Poly:
    """Inverse of :func:`format_poly` (also accepts extra whitespace)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        pos = mt.end()
        if mt["num"]:
            tokens.append(("num", Fraction(mt["num"])))
        elif mt["var"]:
            if mt["var"] == "a":
                if mt["j"] is None:
                    raise ValueError("edge variable needs two indices")
                tokens.append(("var", edge_var(int(mt["i"]), int(mt["j"]))))
            else:
                tokens.append(("var", omega_var(int(mt["i"]))))
        else:
            tokens.append(("op", mt["op"]))
    if tokens == [("num", Fraction(0))]:
        return ZERO
    result = ZERO
    k = 0
    sign = 1
    if tokens and tokens[0] == ("op", "-"):
        sign, k = -1, 1
    while k < len(tokens):
        coeff = Fraction(sign)
        mono: dict[Var, int] = {}
        expect_factor = True
        while k < len(tokens) and expect_factor:
            kind, val = tokens[k]
            if kind == "num":
                coeff *= val
                k += 1
            elif kind == "var":
                e = 1
                k += 1
                if k < len(tokens) and tokens[k] == ("op", "^"):
                    e = int(tokens[k + 1][1])
                    k += 2
                mono[val] = mono.get(val, 0) + e
            else:
                raise ValueError(f"unexpected operator {val!r}")
            if k < len(tokens) and tokens[k] == ("op", "*"):
                k += 1
            else:
                expect_factor = False
        result = result + Poly.monomial(tuple(sorted(mono.items())), coeff)
        if k < len(tokens):
            kind, val = tokens[k]
            if kind != "op" or val not in "+-":
                raise ValueError(f"expected + or -, got {val!r}")
            sign = 1 if val == "+" else -1
            k += 1
    return result
