"""Critical and post-critical structure, trivial-map detection and type classification.

Classification of a map with respect to the pair {0, inf} works on the finite
set N of points reached from 0 or inf by taking preimages whose accumulated
multiplicity stays nonzero modulo m. Each point of N has an image and a local
multiplicity; the resulting small functional graph is matched against a catalog
of shapes, one per type, trying both orientations of the pair.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import DEFAULT_BUDGET, FactorBudget, mth_root_rational
from .families import chebyshev_exception_poly
from .powerclass import PowerClass, iterate_classes, mth_root_function, reduce_class
from .qpoly import UniPoly, coprime_basis, ip_hom_compose, poly_gcd, rational_roots, squarefree_part, yun_decompose
from .ratmap import (
    INFINITY,
    RECIPROCAL,
    PointSet,
    ProjectivePoint,
    RationalMap,
    conjugate,
    iterate_map,
    make_map,
    preimage_layers,
    pushforward,
    ram_index_at,
    ramification,
    wronskian,
)

ZERO = ProjectivePoint(0, 1)

# ---------------------------------------------------------------------------
# trivial maps


@dataclass(frozen=True)
class TrivialForm:
    """phi = c * x^j * psi^m with 0 <= j < m."""

    c: Fraction
    j: int
    psi_num: UniPoly
    psi_den: UniPoly

    def to_json(self) -> dict:
        return {"c": str(self.c), "j": self.j, "psi": f"({self.psi_num})/({self.psi_den})"}


def _order_at_zero(coeffs) -> int:
    k = 0
    while coeffs[k] == 0:
        k += 1
    return k


def is_trivial(phi: RationalMap, m: int, budget: FactorBudget = DEFAULT_BUDGET) -> Optional[TrivialForm]:
    """Decompose phi = c x^j psi^m when every zero or pole off {0, inf} has multiplicity divisible by m."""
    ord0 = _order_at_zero(phi.num) - _order_at_zero(phi.den)
    j = ord0 % m
    xj = UniPoly.x() ** j
    cls, (pn, pd) = reduce_class(phi.p, phi.q * xj, m, budget)
    if cls.factors:
        return None
    c = cls.const
    if phi.p * pd**m != phi.q * xj * pn**m * c:
        raise AssertionError("trivial decomposition failed verification")
    return TrivialForm(c, j, pn, pd)


# ---------------------------------------------------------------------------
# exceptional points


def exceptional_points(phi: RationalMap) -> List[ProjectivePoint]:
    """Rational totally ramified fixed points and 2-cycles (at most two points)."""
    d = phi.degree
    if d < 2:
        raise ValueError("degree must be at least 2")
    cands = []
    rd = ramification(phi)
    for e, f in rd.finite.factors:
        if e == d - 1:
            cands.extend(ProjectivePoint.of(r) for r, _ in rational_roots(f))
    if rd.e_infinity == d:
        cands.append(INFINITY)
    cset = set(cands)
    out = []
    for z in cands:
        w = phi(z)
        if w == z or (w in cset and phi(w) == z):
            out.append(z)
    out = sorted(set(out), key=lambda P: (P.is_infinity(), P.value() if not P.is_infinity() else 0))
    if len(out) > 2:
        raise AssertionError("more than two exceptional points")
    return out


# ---------------------------------------------------------------------------
# post-critical graph and orbifold signature


def critical_set(phi: RationalMap) -> PointSet:
    rd = ramification(phi)
    poly = rd.critical_polynomial().monic() if rd.finite.factors else UniPoly.const(1)
    return PointSet(poly, rd.e_infinity > 1)


@dataclass(frozen=True)
class PortraitGraph:
    """Nodes partition postcrit(phi) union crit(phi); node i maps onto node image[i] with index e[i]."""

    nodes: Tuple[PointSet, ...]
    e: Tuple[int, ...]
    image: Tuple[int, ...]
    critical: PointSet
    postcritical: PointSet
    pcf: bool
    reason: str = ""

    def node_of(self, point) -> Optional[int]:
        for i, n in enumerate(self.nodes):
            if n.contains(point):
                return i
        return None

    def to_json(self) -> dict:
        return {
            "pcf": self.pcf,
            "reason": self.reason,
            "critical": str(self.critical),
            "postcritical": str(self.postcritical),
            "nodes": [
                {"points": str(n), "size": n.size(), "e": self.e[i], "image": self.image[i]}
                for i, n in enumerate(self.nodes)
            ],
        }


def _max_bits(p: UniPoly) -> int:
    if p.is_zero():
        return 0
    _, ints = p.primitive()
    return max(abs(c).bit_length() for c in ints)


def _difference(a: PointSet, b: PointSet) -> PointSet:
    g = poly_gcd(a.poly, b.poly)
    return PointSet(a.poly.exact_div(g).monic(), a.infinity and not b.infinity)


def _split_parts(parts: List[UniPoly], cutters: Sequence[UniPoly]) -> List[UniPoly]:
    for c in cutters:
        if c.is_constant():
            continue
        nxt = []
        for part in parts:
            g = poly_gcd(part, c)
            if g.is_constant() or g.degree == part.degree:
                nxt.append(part)
            else:
                nxt.append(g)
                nxt.append(part.exact_div(g).monic())
        parts = nxt
    return parts


def postcritical_graph(
    phi: RationalMap, max_degree: int = 64, max_depth: int = 32, max_bits: int = 4096
) -> PortraitGraph:
    """Push critical values forward until the union stabilizes, then refine to an (e, image) partition."""
    if phi.degree < 2:
        raise ValueError("degree must be at least 2")
    crit = critical_set(phi)
    P = pushforward(phi, crit)
    frontier = P
    pcf = False
    reason = ""
    for _ in range(max_depth):
        nxt = pushforward(phi, frontier)
        new = _difference(nxt, P)
        if new.is_empty():
            pcf = True
            break
        P = P.union(new)
        frontier = new
        if P.size() > max_degree:
            reason = f"post-critical set exceeds {max_degree} points"
            break
        if _max_bits(P.poly) > max_bits:
            reason = f"post-critical coefficients exceed {max_bits} bits"
            break
    else:
        reason = f"not stable after {max_depth} steps"
    if not pcf:
        return PortraitGraph((), (), (), crit, P, False, reason)

    rd = ramification(phi)
    w_layers = [f for _, f in rd.finite.factors]
    finite = coprime_basis([f for f in (P.poly, crit.poly) if not f.is_constant()])
    has_inf = P.infinity or crit.infinity
    while True:
        targets = [
            UniPoly(ip_hom_compose(t.primitive()[1], phi.num, phi.den, t.degree)) for t in finite
        ]
        if has_inf:
            targets.append(phi.q)
        refined = _split_parts(_split_parts(list(finite), w_layers), targets)
        refined = sorted(refined, key=UniPoly.sort_key)
        if len(refined) == len(finite):
            finite = refined
            break
        finite = refined
    nodes = [PointSet(f, False) for f in finite] + ([PointSet(UniPoly.const(1), True)] if has_inf else [])
    e_list, img = [], []
    targets = [
        UniPoly(ip_hom_compose(t.primitive()[1], phi.num, phi.den, t.degree)) for t in finite
    ] + ([phi.q] if has_inf else [])
    for node in nodes:
        if node.infinity:
            e_list.append(rd.e_infinity)
            w = phi(INFINITY)
            idx = next(i for i, n in enumerate(nodes) if n.contains(w))
            img.append(idx)
            continue
        e = 1
        for k, f in rd.finite.factors:
            if not poly_gcd(node.poly, f).is_constant():
                e = k + 1
        e_list.append(e)
        idx = None
        for i, t in enumerate(targets):
            if poly_gcd(node.poly, t).degree == node.poly.degree:
                idx = i
                break
        if idx is None:
            raise AssertionError("node image not found in the refined partition")
        img.append(idx)
    return PortraitGraph(tuple(nodes), tuple(e_list), tuple(img), crit, P, True)


INF_WEIGHT = math.inf

LATTES_SIGNATURES = {(2, 2, 2, 2), (3, 3, 3), (2, 4, 4), (2, 3, 6)}


@dataclass(frozen=True)
class OrbifoldWeights:
    graph: PortraitGraph
    nu: Tuple[float, ...]
    signature: Tuple

    def is_lattes(self) -> bool:
        return self.signature in LATTES_SIGNATURES

    def signature_json(self) -> list:
        return ["inf" if v == INF_WEIGHT else int(v) for v in self.signature]


def orbifold_weights(phi: RationalMap, graph: Optional[PortraitGraph] = None) -> Optional[OrbifoldWeights]:
    """Least weights with nu(phi(z)) = e(z) nu(z); None when not PCF or inconsistent."""
    g = graph or postcritical_graph(phi)
    if not g.pcf:
        return None
    n = len(g.nodes)
    # nodes carried into a cycle that contains a critical node get infinite weight
    inf = [False] * n
    for start in range(n):
        seen = []
        cur = start
        while cur not in seen:
            seen.append(cur)
            cur = g.image[cur]
        cycle = seen[seen.index(cur):]
        if start in cycle and any(g.e[c] > 1 for c in cycle):
            inf[start] = True
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if inf[i] and not inf[g.image[i]]:
                inf[g.image[i]] = True
                changed = True
    nu = [INF_WEIGHT if inf[i] else 1 for i in range(n)]
    for _ in range(4 * n + 8):
        new = list(nu)
        for y in range(n):
            if inf[y]:
                continue
            v = 1
            for z in range(n):
                if g.image[z] == y:
                    v = math.lcm(v, g.e[z] * int(nu[z]))
            new[y] = v
        if new == nu:
            break
        nu = new
    else:
        return None
    d = phi.degree
    for z in range(n):
        y = g.image[z]
        lhs = nu[y]
        rhs = g.e[z] * nu[z]
        if lhs != rhs:
            return None
    for y in range(n):
        if nu[y] == 1:
            continue
        mass = sum(g.nodes[z].size() * g.e[z] for z in range(n) if g.image[z] == y)
        if mass != d * g.nodes[y].size():
            return None
    sig = []
    for i, node in enumerate(g.nodes):
        if nu[i] != 1:
            sig.extend([nu[i]] * node.size())
    sig.sort()
    return OrbifoldWeights(g, tuple(nu), tuple(sig))


def orbifold_signature(phi: RationalMap) -> Optional[Tuple]:
    w = orbifold_weights(phi)
    return None if w is None else w.signature


# ---------------------------------------------------------------------------
# backward closure from {0, inf}


@dataclass(frozen=True)
class ClosureEdge:
    source: ProjectivePoint
    target: ProjectivePoint
    e: int
    acc: int
    depth: int


@dataclass(frozen=True)
class Closure:
    """Points reached backward with accumulated multiplicity nonzero mod m."""

    m: int
    roots: Tuple[ProjectivePoint, ...]
    edges: Tuple[ClosureEdge, ...]
    irrational: Tuple[Tuple[int, int, str], ...]
    complete: bool
    reason: str

    def named_points(self) -> List[ProjectivePoint]:
        pts = set(self.roots)
        pts.update(e.source for e in self.edges)
        return sorted(pts, key=_point_key)


def _point_key(P: ProjectivePoint):
    return (1, 0) if P.is_infinity() else (0, P.value())


def _rational_preimages(phi: RationalMap, w: ProjectivePoint):
    """[(z, e)] rational preimages of w, plus leftover (e, poly) layers without rational roots."""
    pl = preimage_layers(phi, w)
    out, leftover = [], []
    for e, f in pl.layers:
        roots = rational_roots(f)
        for r, _ in roots:
            out.append((ProjectivePoint.of(r), e))
        if len(roots) < f.degree:
            rest = f
            for r, _ in roots:
                rest = rest.exact_div(UniPoly((-r, 1)))
            leftover.append((e, rest))
    if pl.e_infinity:
        out.append((INFINITY, pl.e_infinity))
    return out, leftover


def backward_closure(
    phi: RationalMap, m: int, roots=(ZERO, INFINITY), max_states: int = 64, max_depth: Optional[int] = None
) -> Closure:
    roots = tuple(ProjectivePoint.of(r) for r in roots)
    states = {(r, 1): 0 for r in roots}
    queue = [(r, 1, 0) for r in roots]
    edges: List[ClosureEdge] = []
    irr: List[Tuple[int, int, str]] = []
    complete, reason = True, ""
    while queue:
        w, acc, depth = queue.pop(0)
        if max_depth is not None and depth >= max_depth:
            continue
        pre, leftover = _rational_preimages(phi, w)
        for e, f in leftover:
            if (e * acc) % m:
                irr.append((e, (e * acc) % m, f"{f} over {w}"))
        for z, e in pre:
            a = (e * acc) % m
            if a == 0:
                continue
            edges.append(ClosureEdge(z, w, e, a, depth + 1))
            if (z, a) not in states:
                states[(z, a)] = depth + 1
                queue.append((z, a, depth + 1))
                if len(states) > max_states:
                    return Closure(m, roots, tuple(edges), tuple(irr), False, f"more than {max_states} states")
    if irr:
        complete, reason = False, "non-rational points with nonzero multiplicity mod m"
    return Closure(m, roots, tuple(edges), tuple(irr), complete, reason)


def preimage_structure(phi: RationalMap, m: int, depth: int = 4) -> dict:
    """Backward layers over 0 and inf up to the given depth, with multiplicities mod m."""
    out = {}
    for root in (ZERO, INFINITY):
        cl = backward_closure(phi, m, roots=(root,), max_states=256, max_depth=depth)
        layers = [
            {"depth": e.depth, "point": str(e.source), "maps_to": str(e.target), "e": e.e, "acc_mod_m": e.acc}
            for e in cl.edges
        ]
        out[str(root)] = {
            "layers": layers,
            "algebraic": [{"e": e, "acc_mod_m": a, "points": s} for e, a, s in cl.irrational],
            "complete": cl.complete,
        }
    return out


# ---------------------------------------------------------------------------
# catalog of shapes

ANY = None


@dataclass(frozen=True)
class Shape:
    tag: str
    m: int
    roles: Tuple[Tuple[str, Optional[str], str], ...]  # (role, image role or ANY, constraint)
    relation: Tuple[int, int]
    lattes: str


def _shape(tag, m, pattern, relation, lattes="") -> Shape:
    roles = []
    for item in pattern.split(";"):
        item = item.strip()
        src, rest = item.split("->")
        tgt, _, cons = rest.strip().partition(" ")
        tgt = tgt.strip()
        roles.append((src.strip(), None if tgt == "*" else tgt, cons.strip() or "u"))
    return Shape(tag, m, tuple(roles), relation, lattes)


CATALOG: Tuple[Shape, ...] = (
    _shape("(13)", 4, "A1->A1; A2->A1; B->A2 2", (3, 1), "(2,4,4)"),
    _shape("(14)", 4, "A1->A1; A2->A1; B->A1 2", (3, 1), "(2,4,4)"),
    _shape("(4)", 3, "A2->A1; A1->X; X->A2", (3, 0), "(3,3,3)"),
    _shape("(2,1)", 3, "A1->X; X->A1; A2->A2", (2, 0), "(3,3,3)"),
    _shape("(9)", 3, "A1->A1; A2->A1; B->A1", (2, 1), "(3,3,3)"),
    _shape("(5a)", 2, "A2->A1; A1->X; X->Y; Y->A2", (4, 0), "(2,2,2,2)"),
    _shape("(5b)", 2, "A2->G; G->A1; A1->X; X->A2", (4, 0), "(2,2,2,2)"),
    _shape("(3,1)", 2, "A1->X; X->Y; Y->A1; A2->A2", (3, 0), "(2,2,2,2)"),
    _shape("(3)", 2, "A2->A1; A1->X; X->A2", (3, 0)),
    _shape("(2,2)", 2, "A1->X; X->A1; A2->Y; Y->A2", (2, 0), "(2,2,2,2)"),
    _shape("(2,1)", 2, "A1->X; X->A1; A2->A2", (2, 0)),
    _shape("(12)", 2, "A1->A1; A2->A1; B1->A1; B2->A1", (3, 1), "(2,2,2,2)"),
    _shape("(11a)", 2, "A1->A2; A2->A1; B->A1; G->A2", (2, 1), "(2,2,2,2)"),
    _shape("(11b)", 2, "A2->A1; A1->B; B->A1; G->B", (5, 1), "(2,2,2,2)"),
    _shape("(11c)", 2, "A1->B; B->A1; A2->B; G->A1", (2, 0), "(2,2,2,2)"),
    _shape("(10a)", 2, "A1->A1; A2->A1; G1->A2; G2->A2", (3, 1), "(2,2,2,2)"),
    _shape("(10b)", 2, "A1->A1; B->A1; A2->B; G->B", (4, 2), "(2,2,2,2)"),
    _shape("(8)", 2, "A1->*; A2->A1; B->A1", (3, 2)),
    _shape("(7,7)", 2, "A1->A1; B1->A1; A2->A2; B2->A2", (2, 1), "(2,2,2,2)"),
    _shape("(7,6)", 2, "A1->A1; B->A1; A2->*", (3, 1)),
)

TAGS_BY_M: Dict[int, List[str]] = {}
for _s in CATALOG:
    TAGS_BY_M.setdefault(_s.m, []).append(_s.tag)


def shape_for(tag: str, m: int) -> Shape:
    for s in CATALOG:
        if s.tag == tag and s.m == m:
            return s
    raise KeyError(f"no shape {tag} for m = {m}")


def _edge_ok(e: int, m: int, cons: str) -> bool:
    if cons == "2":
        return e % 4 == 2
    return math.gcd(e, m) == 1


def match_shape(
    shape: Shape,
    named: Sequence[ProjectivePoint],
    image: Dict[ProjectivePoint, ProjectivePoint],
    eidx: Dict[ProjectivePoint, int],
    a1: ProjectivePoint,
    a2: ProjectivePoint,
) -> Optional[Dict[str, ProjectivePoint]]:
    """Assign roles of a shape to named points; A1, A2 are fixed in advance."""
    roles = [r for r, _, _ in shape.roles]
    if len(roles) != len(named):
        return None
    others = [r for r in roles if r not in ("A1", "A2")]
    rest = [p for p in named if p not in (a1, a2)]
    if len(rest) != len(others):
        return None
    nset = set(named)
    for perm in itertools.permutations(rest):
        assign = {"A1": a1, "A2": a2, **dict(zip(others, perm))}
        ok = True
        for role, tgt, cons in shape.roles:
            z = assign[role]
            w, e = image[z], eidx[z]
            if tgt is ANY:
                if w in nset and e % shape.m:
                    ok = False
                    break
            elif w != assign[tgt] or not _edge_ok(e, shape.m, cons):
                ok = False
                break
        if ok:
            return assign
    return None


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class MuType:
    """Classification of phi with respect to {0, inf} for modulus m."""

    tag: str
    m: int
    named: Tuple[Tuple[str, str], ...] = ()
    orientation: str = ""
    trivial: Optional[TrivialForm] = None
    report: str = ""
    table_relation: Optional[Tuple[int, int]] = None
    lattes: str = ""
    case5: Optional["Case5Form"] = None

    @property
    def is_trivial(self) -> bool:
        return self.tag == "trivial"

    @property
    def is_classified(self) -> bool:
        return self.tag != "unclassified"

    def point(self, role: str) -> ProjectivePoint:
        return ProjectivePoint.of(dict(self.named)[role])

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "m": self.m,
            "named": dict(self.named),
            "orientation": self.orientation,
            "trivial": self.trivial.to_json() if self.trivial else None,
            "table_relation": list(self.table_relation) if self.table_relation else None,
            "lattes_signature": self.lattes or None,
            "case5": self.case5.to_json() if self.case5 else None,
            "report": self.report,
        }


# types whose maps must satisfy one of the quadratic normal form identities
CASE5_TAGS = ("(3)", "(2,1)", "(8)", "(7,6)")


def classify_mu_type(
    phi: RationalMap, m: int, max_states: int = 64, budget: FactorBudget = DEFAULT_BUDGET
) -> MuType:
    if phi.degree < 2 or m < 2:
        raise ValueError("need degree >= 2 and m >= 2")
    triv = is_trivial(phi, m, budget)
    if triv is not None:
        return MuType("trivial", m, trivial=triv)
    if m >= 5:
        return MuType("unclassified", m, report="non-trivial maps have no abundant pair {0, inf} for m >= 5")
    cl = backward_closure(phi, m, max_states=max_states)
    if not cl.complete:
        return MuType("unclassified", m, report=cl.reason)
    named = cl.named_points()
    image = {z: phi(z) for z in named}
    eidx = {z: ram_index_at(phi, z) for z in named}
    for a1, a2, orient in ((ZERO, INFINITY, "A1=0, A2=inf"), (INFINITY, ZERO, "A1=inf, A2=0")):
        for shape in CATALOG:
            if shape.m != m:
                continue
            assign = match_shape(shape, named, image, eidx, a1, a2)
            if assign is not None:
                named_out = tuple(sorted((r, str(p)) for r, p in assign.items()))
                case5, report = None, ""
                if m == 2 and shape.tag in CASE5_TAGS:
                    case5 = verify_case5_form(phi)
                    if case5 is None:
                        report = "no quadratic normal form identity found"
                return MuType(shape.tag, m, named_out, orient, None, report, shape.relation, shape.lattes, case5)
    desc = ", ".join(f"{z} -> {image[z]} (e={eidx[z]})" for z in named)
    return MuType("unclassified", m, report=f"no catalog shape matches: {desc}")


# ---------------------------------------------------------------------------
# normal forms for m = 2


@dataclass(frozen=True)
class Case5Form:
    case: str
    B: Fraction
    C: Fraction
    f: UniPoly
    g: UniPoly
    h: UniPoly
    conjugated: bool

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "B": str(self.B),
            "C": str(self.C),
            "f": str(self.f),
            "g": str(self.g),
            "h": str(self.h),
            "conjugated_by_reciprocal": self.conjugated,
        }


def _odd_even_parts(p: UniPoly) -> Tuple[Fraction, UniPoly, UniPoly]:
    """p = c * odd * sq^2 with odd squarefree monic and sq monic."""
    dec = yun_decompose(p)
    odd, sq = UniPoly.const(1), UniPoly.const(1)
    for e, f in dec.factors:
        if e % 2:
            odd = odd * f
        sq = sq * f ** (e // 2)
    return dec.content, odd, sq


def _sqrt_poly(p: UniPoly) -> Optional[UniPoly]:
    if p.is_zero():
        return None
    r = mth_root_function(p, None, 2)
    if r is None:
        return None
    a, b = r
    if not b.is_constant():
        return None
    return a * (1 / b[0])


def _h_from(lhs: UniPoly, scale: UniPoly) -> Optional[UniPoly]:
    """h with lhs = scale * h^2, or None."""
    quo, rem = divmod(lhs, scale)
    if not rem.is_zero():
        return None
    return _sqrt_poly(quo)


def _try_case5(phi: RationalMap, conjugated: bool) -> Optional[Case5Form]:
    x = UniPoly.x()
    cp, oddp, sp = _odd_even_parts(phi.p)
    cq, oddq, sq = _odd_even_parts(phi.q)
    k = cp / cq
    root = mth_root_rational(-k, 2)
    if oddp.is_constant() and oddq.degree == 1 and root is not None:
        # (a) phi = -f^2 / ((x - C) g^2) with f^2 + C(x - C)g^2 = C x h^2
        C = -oddq[0]
        f, g = sp * root, sq
        if C != 0 and g.degree >= f.degree:
            h = _h_from(f * f + g * g * (x - C) * C, x * C)
            if h is not None:
                return Case5Form("5a", Fraction(-1), C, f, g, h, conjugated)
    if oddq.is_constant() and oddp.degree == 1:
        C = -oddp[0]
        if C != 0 and root is not None:
            # (b) phi = -(x - C) f^2 / g^2 with (x - C) f^2 + C g^2 = x h^2
            f, g = sp * root, sq
            h = _h_from((x - C) * f * f + g * g * C, x)
            if h is not None:
                return Case5Form("5b", Fraction(-1), C, f, g, h, conjugated)
        if C != 0:
            # (c) phi = B (x - C) f^2 / g^2 with B(x - C) f^2 - C g^2 = -C h^2
            f, g = sp, sq
            h = _h_from((x - C) * f * f * k - g * g * C, UniPoly.const(-C))
            if h is not None and g.degree > f.degree:
                return Case5Form("5c", k, C, f, g, h, conjugated)
    if oddq.is_constant() and oddp.degree == 2 and oddp[0] == 0:
        C = -oddp[1]
        if C != 0:
            # (d) phi = B x (x - C) f^2 / g^2 with B x (x - C) f^2 - C g^2 = -C h^2
            f, g = sp, sq
            h = _h_from(x * (x - C) * f * f * k - g * g * C, UniPoly.const(-C))
            if h is not None:
                return Case5Form("5d", k, C, f, g, h, conjugated)
    return None


def verify_case5_form(phi: RationalMap) -> Optional[Case5Form]:
    """Match phi or 1/phi(1/x) against the four quadratic normal forms, verifying each identity."""
    out = _try_case5(phi, False)
    if out is None:
        out = _try_case5(conjugate(phi, RECIPROCAL), True)
    return out


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class PolyClassification:
    kind: str  # "case1", "chebyshev" or "neither"
    trivial: Optional[TrivialForm] = None
    c: Optional[Fraction] = None
    d: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "trivial": self.trivial.to_json() if self.trivial else None,
            "c": None if self.c is None else str(self.c),
            "d": self.d,
        }


def classify_polynomial(phi: RationalMap, m: int, budget: FactorBudget = DEFAULT_BUDGET) -> PolyClassification:
    if not phi.is_polynomial() or phi.degree < 2:
        raise ValueError("expected a polynomial of degree at least 2")
    triv = is_trivial(phi, m, budget)
    if triv is not None:
        return PolyClassification("case1", trivial=triv)
    if m == 2:
        d = phi.degree
        E = chebyshev_exception_poly(d)
        p = phi.p * (1 / Fraction(phi.den[0]))
        # E''(0) = (-1)^d T_d''(2) = (-1)^d (d^4 - d^2) / 6
        c = (-1) ** d * 6 * (2 * p[2]) / (d**4 - d**2)
        if c != 0:
            scaled = E.compose(UniPoly((0, c))) * (1 / c)
            if scaled == p:
                return PolyClassification("chebyshev", c=c, d=d)
    return PolyClassification("neither")


# ---------------------------------------------------------------------------
# abundance


@dataclass(frozen=True)
class AbundanceCertificate:
    point: ProjectivePoint
    abundant: bool
    size: int
    reason: str

    def to_json(self) -> dict:
        return {"point": str(self.point), "abundant": self.abundant, "closure_size": self.size, "reason": self.reason}


def _set_closure(phi: RationalMap, m: int, alpha: ProjectivePoint, max_points: int) -> Tuple[bool, int, str]:
    """Backward closure of alpha over Galois-stable sets, split by accumulated multiplicity mod m."""
    seen: Dict[int, PointSet] = {1: PointSet.of_point(alpha)}
    frontier: Dict[int, PointSet] = {1: PointSet.of_point(alpha)}
    while frontier:
        nxt: Dict[int, PointSet] = {}
        for acc, S in frontier.items():
            pl = preimage_layers(phi, S)
            pieces = [(e, PointSet(f, False)) for e, f in pl.layers]
            if pl.e_infinity:
                pieces.append((pl.e_infinity, PointSet(UniPoly.const(1), True)))
            for e, T in pieces:
                a = (e * acc) % m
                if a == 0:
                    continue
                old = seen.get(a, PointSet.empty())
                new = _difference(T, old)
                if new.is_empty():
                    continue
                seen[a] = old.union(new)
                nxt[a] = nxt.get(a, PointSet.empty()).union(new)
        frontier = nxt
        total = PointSet.empty()
        for S in seen.values():
            total = total.union(S)
        if total.size() > max_points:
            return False, total.size(), f"closure exceeds {max_points} points"
    total = PointSet.empty()
    for S in seen.values():
        total = total.union(S)
    return True, total.size(), "finite backward closure"


def count_branch_abundant(
    phi: RationalMap, m: int, candidates, max_points: int = 64
) -> List[AbundanceCertificate]:
    """Decide m-branch abundance for each rational candidate by a finite backward closure."""
    out = []
    for c in candidates:
        P = ProjectivePoint.of(c)
        ok, size, reason = _set_closure(phi, m, P, max_points)
        out.append(AbundanceCertificate(P, ok, size, reason))
    found = [c for c in out if c.abundant]
    if len(found) > 4:
        raise AssertionError("more than four abundant points")
    if len(found) == 4 and m != 2:
        raise AssertionError("four abundant points require m = 2")
    if len(found) == 3 and m not in (2, 3):
        raise AssertionError("three abundant points require m in {2, 3}")
    return out
