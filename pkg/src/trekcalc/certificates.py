"""Polynomial-identity certificates that a partial correlation hypersurface is nonsingular.

For a query (i0, j0, S) with i0 -> j0 and i0 -> s for every s in S below j0,
the principal minor det Sigma[S+i0, S+i0] is written explicitly as a
combination of the partial derivatives of f = det Sigma[S+i0, S+j0] with
respect to a_{i0 j0} and the a_{i0 s}.  The principal minor is positive at
every real point, so f and its derivatives cannot vanish simultaneously.

Each intermediate identity (the four lemma checks) is verified by exact
polynomial arithmetic rather than trusted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .covariance import IDENTITY, SYMBOLIC, ParamPoint, build_sigma, minor_det
from .dag import Dag, PcQuery, _paths, is_below, theorem_condition
from .errors import (
    ConditionUnmetError,
    HypothesisUnmetError,
    NegativeOmegaError,
    VerificationFailedError,
    ZeroPolynomialError,
)
from .poly import ONE, ZERO, Poly, Var, edge_var
from .treks import enumerate_trek_systems, system_monomial, system_sign

HOLDS = "holds"
VIOLATED = "violated"
NOT_APPLICABLE = "not-applicable"


@dataclass
class LemmaReport:
    lemma: str
    query: PcQuery
    status: str
    witness: tuple[Poly, Poly] | None = None
    signs: dict = field(default_factory=dict)
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def render(self) -> str:
        line = f"lemma {self.lemma}: {self.status}"
        if self.signs:
            line += " signs " + " ".join(f"{k}={v:+d}" for k, v in self.signs.items())
        if self.note:
            line += f" ({self.note})"
        if self.witness is not None:
            line += f"\n  lhs: {self.witness[0]}\n  rhs: {self.witness[1]}"
        return line


@dataclass
class CertificateTerm:
    var: Var
    sign: int
    multiplier: Poly


@dataclass
class Certificate:
    """``lhs == sum(sign * multiplier * d f / d var)`` on ``pruned_dag``."""

    query: PcQuery
    pruned_dag: Dag
    lhs: Poly
    f: Poly
    terms: list[CertificateTerm]
    verified: bool = False

    def rhs(self) -> Poly:
        total = ZERO
        for t in self.terms:
            total = total + t.multiplier * self.f.derivative(t.var) * t.sign
        return total

    def render(self) -> str:
        lines = [
            f"query: {self.query}",
            "pruned edges: " + " ".join(f"{i}->{j}" for i, j in self.pruned_dag.sorted_edges()),
            f"f: {self.f}",
            f"lhs: {self.lhs}",
        ]
        for t in self.terms:
            lines.append(f"term: var={t.var} sign={t.sign:+d} multiplier={t.multiplier}")
        lines.append(f"status: {'VERIFIED' if self.verified else 'FAILED'}")
        return "\n".join(lines)


def prune_outgoing_from_S(dag: Dag, q: PcQuery) -> Dag:
    """Drop every edge leaving a conditioning vertex."""
    return dag.with_edges(e for e in dag.edges if e[0] not in q.s)


def _f(dag: Dag, q: PcQuery) -> Poly:
    return minor_det(_sigma(dag), q.s | {q.i0}, q.s | {q.j0})


_SIGMA_CACHE: dict = {}


def _sigma(dag: Dag):
    sigma = _SIGMA_CACHE.get(dag)
    if sigma is None:
        if len(_SIGMA_CACHE) > 4096:
            _SIGMA_CACHE.clear()
        sigma = _SIGMA_CACHE[dag] = build_sigma(dag, IDENTITY)
    return sigma


def _crossing_sign(dag: Dag, mapping: Mapping[int, int]) -> int:
    pairs = sorted((dag.position(a), dag.position(b)) for a, b in mapping.items())
    n = sum(1 for x in range(len(pairs)) for y in range(x + 1, len(pairs)) if pairs[x][1] > pairs[y][1])
    return -1 if n % 2 else 1


def _match_sign(actual: Poly, expected: Poly) -> int | None:
    if actual == expected:
        return 1
    if actual == -expected:
        return -1
    return None


def check_lemma_sj(dag: Dag, q: PcQuery) -> LemmaReport:
    """Edges leaving S do not occur in f, and pruning them leaves f unchanged."""
    q.validate_for(dag)
    f = _f(dag, q)
    for s in sorted(q.s):
        for j in dag.children(s):
            v = edge_var(s, j)
            if f.uses_var(v):
                return LemmaReport("sj", q, VIOLATED, (f, f.substitute({v: 0})), note=f"{v} occurs in f")
    pruned = _f(prune_outgoing_from_S(dag, q), q)
    if pruned != f:
        return LemmaReport("sj", q, VIOLATED, (f, pruned), note="pruning changed f")
    return LemmaReport("sj", q, HOLDS)


def path_weight_poly(dag: Dag, j0: int, s: int) -> Poly:
    """Sum over directed paths j0 -> s of the product of their edge variables."""
    dag.position(j0)
    dag.position(s)
    total = ZERO
    for path in _paths(dag, j0, s):
        term = ONE
        for u, v in zip(path, path[1:]):
            term = term * Poly.variable(edge_var(u, v))
        total = total + term
    return total


def _require_pruned(dag: Dag, q: PcQuery) -> None:
    if any(e[0] in q.s for e in dag.edges):
        raise HypothesisUnmetError("edges leaving S must be pruned first")


def check_lemma_i0s(dag: Dag, q: PcQuery, s: int | None = None) -> LemmaReport:
    """a_{i0 s} occurs at most linearly in f with coefficient +-det Sigma[S+i0, S+j0-s+i0].

    With ``s=None`` every s in S with i0 -> s is checked and the signs are
    collected into one report.
    """
    q.validate_for(dag)
    _require_pruned(dag, q)
    if s is None:
        targets = [x for x in dag.sort_vertices(q.s) if dag.has_edge(q.i0, x)]
    else:
        if s not in q.s or not dag.has_edge(q.i0, s):
            raise HypothesisUnmetError(f"need s in S and {q.i0}->{s}")
        targets = [s]
    f = _f(dag, q)
    sigma = _sigma(dag)
    signs = {}
    for x in targets:
        v = edge_var(q.i0, x)
        if f.degree_in(v) > 1:
            return LemmaReport("i0s", q, VIOLATED, (f, ZERO), signs, note=f"{v} occurs nonlinearly")
        coeff = f.coefficient_of_linear(v)
        minor = minor_det(sigma, q.s | {q.i0}, (q.s | {q.j0, q.i0}) - {x})
        eps = _match_sign(coeff, minor)
        if eps is None:
            return LemmaReport("i0s", q, VIOLATED, (coeff, minor), signs, note=f"s={x}")
        signs[str(v)] = eps
    return LemmaReport("i0s", q, HOLDS, signs=signs, note="" if targets else "no s in S with i0->s")


def _g_by_enumeration(dag: Dag, q: PcQuery) -> Poly:
    rows = q.s | {q.i0}
    coeffs: dict = {}
    for ts in enumerate_trek_systems(dag, rows, rows, require_no_sided=True):
        if sum(1 for t in ts.treks if q.j0 in t.down) != 1:
            continue
        m = system_monomial(ts, IDENTITY)
        coeffs[m] = coeffs.get(m, 0) + system_sign(ts, dag)
    return Poly(coeffs)


def check_lemma_i0j0(dag: Dag, q: PcQuery) -> tuple[LemmaReport, Poly]:
    """a_{i0 j0} occurs at most linearly in f with coefficient +-(det Sigma[S+i0, S+i0] - g).

    g sums the sided-intersection-free systems S+i0 -> S+i0 in which exactly
    one trek passes through j0 on its down part.
    """
    q.validate_for(dag)
    _require_pruned(dag, q)
    if not dag.has_edge(q.i0, q.j0):
        raise HypothesisUnmetError(f"{q.i0}->{q.j0} is not an edge")
    g = _g_by_enumeration(dag, q)
    f = _f(dag, q)
    v = edge_var(q.i0, q.j0)
    if f.degree_in(v) > 1:
        return LemmaReport("i0j0", q, VIOLATED, (f, ZERO), note=f"{v} occurs nonlinearly"), g
    coeff = f.coefficient_of_linear(v)
    expected = minor_det(_sigma(dag), q.s | {q.i0}, q.s | {q.i0}) - g
    eps = _match_sign(coeff, expected)
    if eps is None:
        return LemmaReport("i0j0", q, VIOLATED, (coeff, expected)), g
    return LemmaReport("i0j0", q, HOLDS, signs={str(v): eps}), g


def _below_j0(dag: Dag, q: PcQuery) -> list[int]:
    return [s for s in dag.sort_vertices(q.s) if is_below(dag, q.j0, s)]


def lemma_id_sum(dag: Dag, q: PcQuery) -> Poly:
    """sum over s in S below j0 of sgn(pi_s) det Sigma[S+i0, S+i0-s+j0] p_{j0,s}."""
    sigma = _sigma(dag)
    rows = q.s | {q.i0}
    total = ZERO
    for s in _below_j0(dag, q):
        cols = (rows - {s}) | {q.j0}
        pi = {v: v for v in rows - {s}}
        pi[q.j0] = s
        term = minor_det(sigma, rows, cols) * path_weight_poly(dag, q.j0, s)
        total = total + term * _crossing_sign(dag, pi)
    return total


def check_lemma_id(dag: Dag, q: PcQuery, g: Poly) -> LemmaReport:
    """g equals the signed sum of minors times path-weight polynomials."""
    q.validate_for(dag)
    _require_pruned(dag, q)
    if not dag.has_edge(q.i0, q.j0):
        raise HypothesisUnmetError(f"{q.i0}->{q.j0} is not an edge")
    rhs = lemma_id_sum(dag, q)
    if rhs != g:
        return LemmaReport("id", q, VIOLATED, (g, rhs))
    return LemmaReport("id", q, HOLDS)


def run_lemmas(dag: Dag, q: PcQuery) -> list[LemmaReport]:
    """All four lemma checks; the last three run on the pruned graph."""
    reports = [check_lemma_sj(dag, q)]
    pruned = prune_outgoing_from_S(dag, q)
    reports.append(check_lemma_i0s(pruned, q))
    if pruned.has_edge(q.i0, q.j0):
        rep, g = check_lemma_i0j0(pruned, q)
        reports.append(rep)
        reports.append(check_lemma_id(pruned, q, g))
    else:
        note = f"{q.i0}->{q.j0} is not an edge"
        reports.append(LemmaReport("i0j0", q, NOT_APPLICABLE, note=note))
        reports.append(LemmaReport("id", q, NOT_APPLICABLE, note=note))
    return reports


def certify_nonsingular(dag: Dag, q: PcQuery) -> Certificate:
    """Build and verify det Sigma[S+i0,S+i0] = e0 df/da_{i0j0} + sum_s e_s p_{j0,s} df/da_{i0s}."""
    q.validate_for(dag)
    if not theorem_condition(dag, q):
        raise ConditionUnmetError(f"condition fails for {q}")
    f_full = _f(dag, q)
    if not f_full:
        raise ZeroPolynomialError(f"f vanishes identically for {q}")
    sj = check_lemma_sj(dag, q)
    if not sj.holds:
        raise VerificationFailedError(sj.render())
    pruned = prune_outgoing_from_S(dag, q)
    f = _f(pruned, q)
    rep, g = check_lemma_i0j0(pruned, q)
    if not rep.holds:
        raise VerificationFailedError(rep.render())
    rep_id = check_lemma_id(pruned, q, g)
    if not rep_id.holds:
        raise VerificationFailedError(rep_id.render())
    v0 = edge_var(q.i0, q.j0)
    terms = [CertificateTerm(v0, rep.signs[str(v0)], ONE)]
    rows = q.s | {q.i0}
    for s in _below_j0(pruned, q):
        rs = check_lemma_i0s(pruned, q, s)
        if not rs.holds:
            raise VerificationFailedError(rs.render())
        v = edge_var(q.i0, s)
        pi = {x: x for x in rows - {s}}
        pi[q.j0] = s
        terms.append(CertificateTerm(v, rs.signs[str(v)] * _crossing_sign(pruned, pi),
                                     path_weight_poly(pruned, q.j0, s)))
    lhs = minor_det(_sigma(pruned), rows, rows)
    cert = Certificate(q, pruned, lhs, f, terms)
    if cert.rhs() != lhs:
        raise VerificationFailedError(cert.render())
    cert.verified = True
    return cert


# Unequal error variances: (a, d) <-> (a', omega) with omega = d^2.

def _exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _ratio(x, y):
    return Fraction(x) / y if _exact(x) and _exact(y) else x / y


def _sqrt(x):
    if x <= 0:
        raise NegativeOmegaError(f"omega must be positive, got {x}")
    if _exact(x):
        x = Fraction(x)
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
        return math.sqrt(x)
    return math.sqrt(x)


def unequal_variance_forward(point: ParamPoint, d: Mapping[int, object]) -> ParamPoint:
    """(a, d) -> ((a_ij d_j / d_i), (d_m^2))."""
    if any(x <= 0 for x in d.values()):
        raise ValueError("d must be positive")
    edges = {(i, j): _ratio(x * d[j], d[i]) for (i, j), x in point.edges.items()}
    return ParamPoint(edges, {m: d[m] * d[m] for m in d})


def unequal_variance_inverse(point: ParamPoint) -> tuple[ParamPoint, dict[int, object]]:
    """(a', omega) -> ((a'_ij sqrt(omega_i) / sqrt(omega_j)), (sqrt(omega_m)))."""
    if point.omega is None:
        raise ValueError("point carries no omega values")
    d = {m: _sqrt(x) for m, x in point.omega.items()}
    edges = {(i, j): _ratio(x * d[i], d[j]) for (i, j), x in point.edges.items()}
    return ParamPoint(edges), d


def f_omega(dag: Dag, q: PcQuery) -> Poly:
    """f with symbolic error variances."""
    return minor_det(build_sigma(dag, SYMBOLIC), q.s | {q.i0}, q.s | {q.j0})
