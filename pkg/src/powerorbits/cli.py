"""Command-line front end.

Every command prints line-delimited JSON objects carrying a "schema" field.
Exit status: 0 on success, 2 on usage or parse errors, 3 when a resource
budget is exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from . import families
from .arith import BudgetError
from .genus import dichotomy_report, genus_table, rho_n
from .orbits import DEFAULT_MAX_BITS, certify_progressions, fewest_progressions, is_power_point, orbit
from .portrait import (
    classify_mu_type,
    classify_polynomial,
    exceptional_points,
    orbifold_weights,
    postcritical_graph,
)
from .powerclass import default_gap_bound, find_relation, power_part, reduce_class
from .qpoly import UniPoly
from .ratmap import DEFAULT_DEGREE_BUDGET, RationalMap, format_map, iterate_map, make_map, parse_point, ramification

SCHEMA = "powerorbits/1"


# ---------------------------------------------------------------------------
# expression parser


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message, self.position = message, position


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "x", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> List[_Tok]:
    toks, i = [], 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(_Tok("num", text[i:j], i))
            i = j
        elif ch == "x":
            toks.append(_Tok("x", ch, i))
            i += 1
        elif ch in "+-*/^()":
            toks.append(_Tok("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(_Tok("end", "", len(text)))
    return toks


Frac = Tuple[UniPoly, UniPoly]


def _div(a: Frac, b: Frac, pos: int) -> Frac:
    if b[0].is_zero():
        raise ParseError("division by zero", pos)
    return a[0] * b[1], a[1] * b[0]


class _Parser:
    """expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
    unary := '-' unary | power; power := atom ('^' integer)?; atom := integer | 'x' | '(' expr ')'."""

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        t = self.take()
        if t.text != text:
            raise ParseError(f"expected {text!r}", t.pos)

    def parse(self) -> Frac:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0)
        v = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", t.pos)
        return v

    def expr(self) -> Frac:
        v = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            w = self.term()
            n = v[0] * w[1] + w[0] * v[1] if op == "+" else v[0] * w[1] - w[0] * v[1]
            v = (n, v[1] * w[1])
        return v

    def term(self) -> Frac:
        v = self.unary()
        while self.peek().text in ("*", "/"):
            t = self.take()
            w = self.unary()
            v = (v[0] * w[0], v[1] * w[1]) if t.text == "*" else _div(v, w, t.pos)
        return v

    def unary(self) -> Frac:
        if self.peek().text == "-":
            self.take()
            v = self.unary()
            return -v[0], v[1]
        if self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Frac:
        v = self.atom()
        if self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "num":
                raise ParseError("exponent must be a non-negative integer", t.pos)
            k = int(t.text)
            v = (v[0] ** k, v[1] ** k)
        return v

    def atom(self) -> Frac:
        t = self.take()
        one = UniPoly.const(1)
        if t.kind == "num":
            return UniPoly.const(int(t.text)), one
        if t.kind == "x":
            return UniPoly.x(), one
        if t.text == "(":
            v = self.expr()
            self.expect(")")
            return v
        raise ParseError("expected a number, 'x' or '('" if t.kind != "end" else "unexpected end of input", t.pos)


def parse_function(text: str) -> Frac:
    """Parse an expression to (numerator, denominator) without cancelling."""
    return _Parser(text).parse()


def parse_map(text: str) -> RationalMap:
    """Parse an expression in x to a canonical RationalMap."""
    num, den = parse_function(text)
    return make_map(num, den)


def parse_range(text: str) -> List[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        a, b = int(lo), int(hi)
        if a > b:
            raise ValueError(f"empty range {text}")
        return list(range(a, b + 1))
    return [int(text)]


# ---------------------------------------------------------------------------
# output


def _compact(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


class Emitter:
    def __init__(self, pretty: bool, stream=None):
        self.pretty = pretty
        self.stream = stream or sys.stdout

    def __call__(self, command: str, payload: dict) -> None:
        obj = {"schema": SCHEMA, "command": command, **payload}
        if self.pretty:
            text = json.dumps(obj, indent=2, sort_keys=True, default=str)
        else:
            text = _compact(obj)
        self.stream.write(text + "\n")


def _require_dynamic(phi: RationalMap) -> RationalMap:
    if phi.degree < 1:
        raise ParseError("constant maps are not allowed here", 0)
    return phi


def _require_degree2(phi: RationalMap) -> RationalMap:
    if phi.degree < 2:
        raise ParseError("this command needs a map of degree at least 2", 0)
    return phi


def _sig_json(sig) -> Optional[list]:
    if sig is None:
        return None
    return ["inf" if v == float("inf") else int(v) for v in sig]


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args, emit: Emitter) -> None:
    phi = _require_dynamic(parse_map(args.map))
    P = parse_point(args.at)
    for _ in range(args.n):
        P = phi(P)
    emit("eval", {"map": format_map(phi), "at": args.at, "n": args.n, "value": str(P)})


def cmd_iterate(args, emit: Emitter) -> None:
    phi = _require_dynamic(parse_map(args.map))
    for n in parse_range(args.n):
        f = iterate_map(phi, n, args.budget_degree)
        emit("iterate", {"map": format_map(phi), "n": n, "degree": f.degree, "iterate": format_map(f)})


def cmd_critical(args, emit: Emitter) -> None:
    phi = _require_degree2(parse_map(args.map))
    rd = ramification(phi)
    graph = postcritical_graph(phi)
    w = orbifold_weights(phi, graph)
    emit(
        "critical",
        {
            "map": format_map(phi),
            "degree": phi.degree,
            "ramification": [{"e": e, "points": str(f)} for e, f in rd.layers()],
            "e_infinity": rd.e_infinity,
            "riemann_hurwitz_total": rd.total(),
            "exceptional_points": [str(P) for P in exceptional_points(phi)],
            "graph": graph.to_json(),
            "signature": _sig_json(w.signature) if w else None,
            "lattes": bool(w and w.is_lattes()),
        },
    )


def cmd_genus(args, emit: Emitter) -> None:
    phi = _require_degree2(parse_map(args.map))
    ns = parse_range(args.n)
    N = max(ns)
    rows = genus_table(phi, args.m, N, degree_budget=args.budget_degree)
    for row in rows:
        if row.n in ns:
            emit("genus", {"map": format_map(phi), "m": args.m, **row.to_json()})
    if args.dichotomy:
        rep = dichotomy_report(phi, args.m, max(N, 2), degree_budget=args.budget_degree)
        emit("genus-summary", {"map": format_map(phi), **rep.to_json()})


def cmd_rho(args, emit: Emitter) -> None:
    phi = _require_degree2(parse_map(args.map))
    for n in parse_range(args.n):
        r = rho_n(phi, args.m, n, degree_budget=args.budget_degree)
        emit(
            "rho",
            {
                "map": format_map(phi),
                "m": args.m,
                "n": n,
                "rho": r.total,
                "finite": [{"exponent": e, "count": c} for e, c in r.finite],
                "infinity": r.infinity,
            },
        )


def cmd_classify(args, emit: Emitter) -> None:
    phi = _require_degree2(parse_map(args.map))
    mt = classify_mu_type(phi, args.m)
    w = orbifold_weights(phi)
    out = {
        "map": format_map(phi),
        "mu_type": mt.to_json(),
        "signature": _sig_json(w.signature) if w else None,
        "lattes": bool(w and w.is_lattes()),
    }
    if phi.is_polynomial():
        out["polynomial"] = classify_polynomial(phi, args.m).to_json()
    emit("classify", out)


def cmd_powerpart(args, emit: Emitter) -> None:
    num, den = parse_function(args.map)
    if num.is_zero():
        raise ParseError("zero has no power part", 0)
    fn, gn = power_part(num, args.m)
    fd, gd = power_part(den, args.m)
    emit(
        "powerpart",
        {"m": args.m, "numerator": {"f": str(fn), "g": str(gn)}, "denominator": {"f": str(fd), "g": str(gd)}},
    )


def cmd_reduce_class(args, emit: Emitter) -> None:
    num, den = parse_function(args.map)
    if num.is_zero():
        raise ParseError("zero has no class", 0)
    cls, (pn, pd) = reduce_class(num, den, args.m)
    emit("reduce-class", {"m": args.m, "class": cls.to_json(), "psi": {"num": str(pn), "den": str(pd)}})


def cmd_find_relation(args, emit: Emitter) -> None:
    phi = _require_degree2(parse_map(args.map))
    rel = find_relation(phi, args.m, max_s=args.max_s, max_gap=args.max_gap, degree_budget=args.budget_degree)
    emit("find-relation", {"map": format_map(phi), "m": args.m, "relation": rel.to_json() if rel else None})


def cmd_orbit(args, emit: Emitter) -> None:
    phi = _require_dynamic(parse_map(args.map))
    rec = orbit(phi, parse_point(args.start), args.N, args.budget_bits)
    for n, P in enumerate(rec.points):
        row = {"n": n, "point": str(P)}
        if args.m:
            row["power"] = is_power_point(P, args.m)
        emit("orbit", row)
    emit("orbit-summary", {"map": format_map(phi), "preperiod": rec.preperiod, "truncated": rec.truncated, "reason": rec.reason})
    if args.certify:
        if not args.m:
            raise ParseError("--certify needs --m", 0)
        _emit_certify(phi, args, emit)


def _emit_certify(phi: RationalMap, args, emit: Emitter) -> None:
    _require_degree2(phi)
    cert = certify_progressions(phi, parse_point(args.start), args.m, args.N, max_bits=args.budget_bits)
    out = {"map": format_map(phi), "m": args.m, "start": args.start, **cert.to_json()}
    if cert.certified is not None:
        gap = cert.relation.r - cert.relation.s if cert.relation else default_gap_bound(args.m)
        rep = fewest_progressions(cert.certified, max(gap, *cert.certified.moduli(), 1))
        out["fewest_progressions"] = None if rep is None else [{"offset": l, "modulus": M} for l, M in rep]
        out["needs_more_than_two"] = rep is None
    emit("certify", out)


def cmd_certify(args, emit: Emitter) -> None:
    phi = _require_degree2(parse_map(args.map))
    _emit_certify(phi, args, emit)


def _family_instance(name: str, params: Sequence[str]):
    vals = [Fraction(p) for p in params]
    ctors: dict = {
        "lattes_244": families.lattes_244,
        "lattes_333_fixed2cycle": families.lattes_333_fixed2cycle,
        "lattes_333_3cycle": families.lattes_333_3cycle,
        "lattes_333_deg9": families.lattes_333_deg9,
        "type3": families.family_type3,
        "type76": families.family_type76,
        "mu8": families.family_mu8,
    }
    if name == "chebyshev_exception":
        if len(vals) != 1:
            raise ParseError("chebyshev_exception takes one parameter d", 0)
        phi = families.chebyshev_exception(int(vals[0]))
        return families.FamilyInstance("chebyshev_exception", phi, 2, "chebyshev", None, None, None, {"d": int(vals[0])})
    if name == "remark":
        if len(vals) != 2:
            raise ParseError("remark takes parameters c m", 0)
        return families.remark_family(vals[0], int(vals[1]))
    if name not in ctors:
        raise ParseError(f"unknown family {name!r}", 0)
    try:
        return ctors[name](*vals)
    except TypeError:
        raise ParseError(f"wrong number of parameters for {name}", 0)


FAMILY_NAMES = (
    "chebyshev_exception",
    "lattes_244",
    "lattes_333_fixed2cycle",
    "lattes_333_3cycle",
    "lattes_333_deg9",
    "type3",
    "type76",
    "mu8",
    "remark",
)


def cmd_family(args, emit: Emitter) -> None:
    inst = _family_instance(args.name, args.params)
    out = {"family": inst.to_json()}
    if args.check:
        phi = inst.map
        if inst.tag == "chebyshev":
            out["observed_tag"] = classify_polynomial(phi, 2).kind
        else:
            out["observed_tag"] = classify_mu_type(phi, inst.m).tag
        w = orbifold_weights(phi)
        out["observed_signature"] = _sig_json(w.signature) if w else None
        if inst.seed is not None:
            cert = certify_progressions(phi, inst.seed, inst.m, args.N, max_bits=args.budget_bits)
            out["observed_index_set"] = cert.certified.to_json() if cert.certified else None
    emit("family", out)


def cmd_check_rh(args, emit: Emitter) -> None:
    phi = _require_degree2(parse_map(args.map))
    rd = ramification(phi)
    emit(
        "check-rh",
        {"map": format_map(phi), "degree": phi.degree, "total": rd.total(), "expected": 2 * phi.degree - 2, "ok": rd.total() == 2 * phi.degree - 2},
    )


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powerorbits", description="m-th powers in orbits of rational maps over Q")
    out = parser.add_mutually_exclusive_group()
    out.add_argument("--json", dest="pretty", action="store_false", help="compact JSON lines (default)")
    out.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    parser.set_defaults(pretty=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help_text: str, m=False, m_required=True, n=None, budgets=False):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if m:
            p.add_argument("--m", type=int, required=m_required, default=None, help="exponent m >= 2")
        if n is not None:
            p.add_argument("--n", default=n, help="index or range a..b")
        if budgets:
            p.add_argument("--budget-bits", type=int, default=DEFAULT_MAX_BITS)
            p.add_argument("--budget-degree", type=int, default=DEFAULT_DEGREE_BUDGET)
        return p

    p = add("eval", cmd_eval, "evaluate phi^n at a point")
    p.add_argument("--map", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--n", type=int, default=1)

    p = add("iterate", cmd_iterate, "print phi^n", n="2", budgets=True)
    p.add_argument("--map", required=True)

    p = add("critical", cmd_critical, "critical points, post-critical graph and signature")
    p.add_argument("--map", required=True)

    p = add("genus", cmd_genus, "genus of y^m = phi^n(x)", m=True, n="1..5", budgets=True)
    p.add_argument("--map", required=True)
    p.add_argument("--dichotomy", action="store_true", help="also print the bounded/growing verdict")

    p = add("rho", cmd_rho, "count of non-divisible preimages of {0, inf}", m=True, n="1..5", budgets=True)
    p.add_argument("--map", required=True)

    p = add("classify", cmd_classify, "type of phi with respect to {0, inf}", m=True)
    p.add_argument("--map", required=True)

    p = add("powerpart", cmd_powerpart, "split numerator and denominator as f g^m", m=True)
    p.add_argument("--map", required=True)

    p = add("reduce-class", cmd_reduce_class, "class of a function modulo m-th powers", m=True)
    p.add_argument("--map", required=True)

    p = add("find-relation", cmd_find_relation, "least (r, s) with class(phi^r) = class(phi^s)", m=True, budgets=True)
    p.add_argument("--map", required=True)
    p.add_argument("--max-s", type=int, default=None)
    p.add_argument("--max-gap", type=int, default=None)

    p = add("orbit", cmd_orbit, "orbit of a point", m=True, m_required=False, budgets=True)
    p.add_argument("--map", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--certify", action="store_true")

    p = add("certify", cmd_certify, "certified index set of m-th powers along an orbit", m=True, budgets=True)
    p.add_argument("--map", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--N", type=int, default=12)

    p = add("family", cmd_family, "construct a named family", budgets=True)
    p.add_argument("name", choices=FAMILY_NAMES)
    p.add_argument("params", nargs="*")
    p.add_argument("--check", action="store_true", help="classify and certify the instance")
    p.add_argument("--N", type=int, default=9)

    p = add("check-rh", cmd_check_rh, "check the ramification total 2d - 2")
    p.add_argument("--map", required=True)
    return parser


VALUE_FLAGS = ("--map", "--start", "--at")


def _join_values(argv: Sequence[str]) -> List[str]:
    """Glue '--map -x^2' into '--map=-x^2' so values may begin with a minus sign."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _join_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "m", None) is not None and args.m < 2:
        parser.print_usage(sys.stderr)
        sys.stderr.write("powerorbits: error: --m must be at least 2\n")
        return 2
    emit = Emitter(args.pretty)
    try:
        args.func(args, emit)
    except BudgetError as e:
        sys.stdout.write(
            _compact({"schema": SCHEMA, "error": "budget", "kind": type(e).__name__, "message": str(e)}) + "\n"
        )
        return 3
    except (ValueError, ZeroDivisionError) as e:
        payload = {"schema": SCHEMA, "error": "usage", "message": str(e)}
        if isinstance(e, ParseError):
            payload["position"] = e.position
        sys.stderr.write(_compact(payload) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
