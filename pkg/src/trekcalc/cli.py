"""Command-line front end.

Model files hold one statement per line::

    vertex <id>
    edge <i> <j>
    param <i> <j> <rational>
    omega <m> <rational>

``#`` starts a comment.  Vertices are declared by ``vertex`` lines or, failing
that, by first appearance in ``edge`` lines; the resulting order is the
vertex order used for all signs.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import certificates, covariance, pc, treks
from .dag import Dag, PcQuery, d_separates
from .errors import (
    ConditionUnmetError,
    ModelParseError,
    TrekCalcError,
    VerificationFailedError,
    ZeroPolynomialError,
)
from .poly import format_poly


@dataclass
class ModelFile:
    dag: Dag
    params: dict[tuple[int, int], Fraction] = field(default_factory=dict)
    omega: dict[int, Fraction] = field(default_factory=dict)

    def point(self) -> covariance.ParamPoint:
        missing = self.dag.edges - set(self.params)
        if missing:
            raise ModelParseError("no param for edge(s) " + ", ".join(f"{i}->{j}" for i, j in sorted(missing)))
        return covariance.ParamPoint(dict(self.params), dict(self.omega) or None)


def _rational(tok: str, line: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ModelParseError(f"bad number {tok!r}", line) from None


def _int(tok: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ModelParseError(f"bad vertex id {tok!r}", line) from None


def parse_model(text: str) -> ModelFile:
    declared: list[int] = []
    seen_order: list[int] = []
    edges: list[tuple[int, int]] = []
    params: dict[tuple[int, int], Fraction] = {}
    omega: dict[int, Fraction] = {}
    param_lines: dict[tuple[int, int], int] = {}

    def note(v: int) -> None:
        if v not in seen_order:
            seen_order.append(v)

    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        kw, args = toks[0], toks[1:]
        if kw == "vertex" and len(args) == 1:
            v = _int(args[0], lineno)
            if v in declared:
                raise ModelParseError(f"duplicate vertex {v}", lineno)
            declared.append(v)
            note(v)
        elif kw == "edge" and len(args) == 2:
            e = (_int(args[0], lineno), _int(args[1], lineno))
            if e in edges:
                raise ModelParseError(f"duplicate edge {e[0]}->{e[1]}", lineno)
            if e[0] == e[1]:
                raise ModelParseError(f"self-loop at {e[0]}", lineno)
            edges.append(e)
            note(e[0])
            note(e[1])
        elif kw == "param" and len(args) == 3:
            e = (_int(args[0], lineno), _int(args[1], lineno))
            params[e] = _rational(args[2], lineno)
            param_lines[e] = lineno
        elif kw == "omega" and len(args) == 2:
            m = _int(args[0], lineno)
            val = _rational(args[1], lineno)
            if val <= 0:
                raise ModelParseError("omega must be positive", lineno)
            omega[m] = val
        else:
            raise ModelParseError(f"cannot parse {raw.strip()!r}", lineno)
    if declared:
        extra = [v for v in seen_order if v not in declared]
        if extra:
            raise ModelParseError(f"undeclared vertex {extra[0]}")
        order = declared
    else:
        order = seen_order
    for e, lineno in param_lines.items():
        if e not in edges:
            raise ModelParseError(f"param for undeclared edge {e[0]}->{e[1]}", lineno)
    for m in omega:
        if m not in order:
            raise ModelParseError(f"omega for undeclared vertex {m}")
    return ModelFile(Dag(order, edges), params, omega)


def _vertex_list(text: str | None) -> frozenset[int]:
    if text is None or text.strip() == "":
        return frozenset()
    return frozenset(int(t) for t in text.split(",") if t.strip())


def _query(args) -> PcQuery:
    return PcQuery(args.i0, args.j0, _vertex_list(args.S))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _cmd_sigma(model: ModelFile, args) -> int:
    sigma = covariance.build_sigma(model.dag, args.omega)
    vs = model.dag.vertices
    for a_ in range(len(vs)):
        for b in range(a_, len(vs)):
            print(f"sigma[{vs[a_]},{vs[b]}] = {format_poly(sigma.entries[a_][b])}")
    return 0


def _cmd_minor(model: ModelFile, args) -> int:
    sigma = covariance.build_sigma(model.dag, args.omega)
    print(format_poly(covariance.minor_det(sigma, _vertex_list(args.rows), _vertex_list(args.cols))))
    return 0


def _cmd_expand(model: ModelFile, args) -> int:
    print(format_poly(treks.expansion_det(model.dag, _vertex_list(args.rows), _vertex_list(args.cols), args.omega)))
    return 0


def _cmd_dsep(model: ModelFile, args) -> int:
    print("true" if d_separates(model.dag, _query(args)) else "false")
    return 0


def _cmd_corr(model: ModelFile, args) -> int:
    q = _query(args)
    point = model.point()
    if args.exact:
        mode = covariance.SYMBOLIC if model.omega else covariance.IDENTITY
        sigma = covariance.build_sigma(model.dag, mode)
        corr2, sign = covariance.partial_corr_exact(sigma, q, point)
        print(f"corr2 = {corr2}")
        print(f"sign = {sign:+d}" if sign else "sign = 0")
    else:
        weights = {e: float(x) for e, x in point.edges.items()}
        omega = {m: float(x) for m, x in model.omega.items()} or None
        cov = pc.population_covariance(model.dag, weights, omega)
        print(f"corr = {_fmt(covariance.partial_corr_float(cov, q, model.dag.vertices))}")
    return 0


def _cmd_certify(model: ModelFile, args) -> int:
    q = _query(args)
    try:
        cert = certificates.certify_nonsingular(model.dag, q)
    except ConditionUnmetError:
        print(f"query: {q}")
        print("status: NO CERTIFICATE (condition not satisfied; this does not imply singularity)")
        return 1
    except ZeroPolynomialError:
        print(f"query: {q}")
        print("status: NO CERTIFICATE (f is identically zero)")
        return 1
    except VerificationFailedError as exc:
        print(f"query: {q}")
        print("status: FAILED")
        print(exc, file=sys.stderr)
        return 1
    print(cert.render())
    return 0


def _cmd_lemmas(model: ModelFile, args) -> int:
    reports = certificates.run_lemmas(model.dag, _query(args))
    for r in reports:
        print(r.render())
    return 1 if any(r.status == certificates.VIOLATED for r in reports) else 0


def _cmd_pc(model: ModelFile, args) -> int:
    weights = {e: float(x) for e, x in model.point().edges.items()}
    if args.samples:
        data = pc.simulate_data(model.dag, weights, args.samples, args.seed)
        cov = pc.sample_covariance(data)
    else:
        cov = pc.population_covariance(model.dag, weights)
    state = pc.pc_edge_removal(cov, model.dag.vertices, args.lam, args.heuristic)
    for r in state.log:
        s = ",".join(str(v) for v in r.sepset)
        print(f"remove {r.edge[0]}-{r.edge[1]} level={r.level} S={{{s}}} corr={_fmt(r.corr)}")
    print("remaining: " + " ".join(f"{i}-{j}" for i, j in state.sorted_edges()))
    return 0


def _cmd_tube(model: ModelFile, args) -> int:
    lams = [float(x) for x in args.lam.split(",")]
    lo, hi = (float(x) for x in args.box.split(","))
    tq = pc.TubeQuery(_query(args), min(lams), args.samples, args.seed, (lo, hi), args.measure, args.workers)
    sigma = covariance.build_sigma(model.dag)
    rows = pc.tube_scan(sigma, tq, lams)
    sys.stdout.write(pc.tube_csv(rows, args.samples, args.seed))
    return 0


def _add_query(p: argparse.ArgumentParser) -> None:
    p.add_argument("--i0", type=int, required=True)
    p.add_argument("--j0", type=int, required=True)
    p.add_argument("--S", default=None, help="comma-separated conditioning set (omit for empty)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trekcalc", description="Trek-system algebra for Gaussian DAG models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("model", help="model file ('-' for stdin)")
        p.set_defaults(func=func)
        return p

    p = add("sigma", _cmd_sigma, "print the symbolic covariance matrix")
    p.add_argument("--omega", choices=covariance.OMEGA_MODES, default=covariance.IDENTITY)
    for name, func, help_ in (("minor", _cmd_minor, "determinant of a covariance minor"),
                              ("expand", _cmd_expand, "the same minor summed over trek systems")):
        p = add(name, func, help_)
        p.add_argument("--rows", default="")
        p.add_argument("--cols", default="")
        p.add_argument("--omega", choices=covariance.OMEGA_MODES, default=covariance.IDENTITY)
    _add_query(add("dsep", _cmd_dsep, "test d-separation"))
    p = add("corr", _cmd_corr, "partial correlation at the model's parameters")
    _add_query(p)
    p.add_argument("--exact", action="store_true")
    _add_query(add("certify", _cmd_certify, "build a nonsingularity certificate"))
    _add_query(add("lemmas", _cmd_lemmas, "run the four lemma checks"))
    p = add("pc", _cmd_pc, "PC edge-removal phase")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--heuristic", choices=pc.HEURISTICS, default=pc.STANDARD)
    p.add_argument("--samples", type=int, default=0, help="simulate this many rows (default: population covariance)")
    p.add_argument("--seed", type=int, default=0)
    p = add("tube", _cmd_tube, "Monte Carlo Tube(lambda) volume")
    _add_query(p)
    p.add_argument("--lambda", dest="lam", required=True, help="threshold(s), comma-separated")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", default="-2,2")
    p.add_argument("--measure", choices=("uniform", "gaussian"), default="uniform")
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.model == "-":
            text = sys.stdin.read()
        else:
            with open(args.model) as fh:
                text = fh.read()
        model = parse_model(text)
        return args.func(model, args)
    except VerificationFailedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, TrekCalcError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
