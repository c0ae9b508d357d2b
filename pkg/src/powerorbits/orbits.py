"""Orbits on P^1(Q), m-th power membership along an orbit, and certified index sets.

A relation class(phi^r) = class(phi^s) gives phi^r = phi^s * psi^m, so away from
a finite bad set D of points the membership of phi^n(a) in Q^m depends only on
n mod (r - s) once n >= s. A height bound of the form H(phi(P)) >= H(P)^d / c
shows that once an orbit point is taller than both c^(1/(d-1)) and every point of
D, the orbit never meets D again; from that index on the periodic pattern is
certified for all n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import BudgetError, iroot, is_mth_power, multiplicative_order, order_mod_power
from .powerclass import IterateRelation, default_gap_bound, find_relation
from .qpoly import UniPoly, rational_roots
from .ratmap import ProjectivePoint, RationalMap, iterate_map

DEFAULT_MAX_BITS = 100_000


class OrbitBudgetError(BudgetError):
    def __init__(self, index: int, bits: int, budget: int):
        super().__init__(f"orbit point {index} needs {bits} bits, budget {budget}")
        self.index, self.bits, self.budget = index, bits, budget


def is_power_point(P: ProjectivePoint, m: int) -> bool:
    """Membership in P^1(Q)^m = Q^m together with infinity."""
    return P.is_infinity() or is_mth_power(P.value(), m)


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitRecord:
    """points[n] = phi^n(a); preperiod = (tail, period) when a repeat was seen."""

    points: Tuple[ProjectivePoint, ...]
    preperiod: Optional[Tuple[int, int]]
    truncated: bool
    reason: str = ""

    def point(self, n: int) -> ProjectivePoint:
        if n < len(self.points):
            return self.points[n]
        if self.preperiod is None:
            raise IndexError(f"orbit index {n} was not computed")
        tail, period = self.preperiod
        return self.points[tail + (n - tail) % period]

    def known_upto(self, n: int) -> bool:
        return self.preperiod is not None or n < len(self.points)

    def to_json(self) -> dict:
        return {
            "points": [str(P) for P in self.points],
            "preperiod": list(self.preperiod) if self.preperiod else None,
            "truncated": self.truncated,
            "reason": self.reason,
        }


def _bits(P: ProjectivePoint) -> int:
    return max(abs(P.a).bit_length(), P.b.bit_length())


def orbit(phi: RationalMap, a, N: int, max_bits: int = DEFAULT_MAX_BITS) -> OrbitRecord:
    """phi^n(a) for n = 0..N, stopping early at a repeat or when a coordinate outgrows max_bits."""
    P = ProjectivePoint.of(a)
    pts = [P]
    seen = {P: 0}
    for n in range(1, N + 1):
        P = phi(P)
        if P in seen:
            return OrbitRecord(tuple(pts), (seen[P], n - seen[P]), False)
        if _bits(P) > max_bits:
            return OrbitRecord(tuple(pts), None, True, f"point {n} exceeds {max_bits} bits")
        seen[P] = n
        pts.append(P)
    return OrbitRecord(tuple(pts), None, False)


def power_indices(phi: RationalMap, a, m: int, N: int, max_bits: int = DEFAULT_MAX_BITS) -> List[int]:
    """Indices n <= N with phi^n(a) in P^1(Q)^m."""
    rec = orbit(phi, a, N, max_bits)
    if not rec.known_upto(N):
        raise OrbitBudgetError(len(rec.points), max_bits + 1, max_bits)
    return [n for n in range(N + 1) if is_power_point(rec.point(n), m)]


# ---------------------------------------------------------------------------
# index sets


@dataclass(frozen=True)
class ProgressionSet:
    """exceptional indices plus progressions {offset + modulus*k : k >= 0}; verified exactly up to horizon."""

    exceptional: Tuple[int, ...]
    progressions: Tuple[Tuple[int, int], ...]
    horizon: int

    def contains(self, n: int) -> bool:
        if n in self.exceptional:
            return True
        return any(n >= l and (n - l) % M == 0 for l, M in self.progressions)

    def members_upto(self, N: int) -> List[int]:
        return [n for n in range(N + 1) if self.contains(n)]

    def moduli(self) -> Tuple[int, ...]:
        return tuple(M for _, M in self.progressions)

    def pieces(self) -> int:
        return len(self.exceptional) + len(self.progressions)

    def describe(self) -> str:
        parts = [f"{{{n}}}" for n in self.exceptional]
        for l, M in self.progressions:
            step = "k" if M == 1 else f"{M}k"
            parts.append(f"{{{step}+{l}}}" if l else f"{{{step}}}")
        return " u ".join(parts) if parts else "{}"

    def to_json(self) -> dict:
        return {
            "exceptional": list(self.exceptional),
            "progressions": [{"offset": l, "modulus": M} for l, M in self.progressions],
            "horizon": self.horizon,
            "describe": self.describe(),
        }


def _minimal_period(pattern: Sequence[bool]) -> int:
    g = len(pattern)
    for p in range(1, g + 1):
        if g % p == 0 and all(pattern[i] == pattern[i % p] for i in range(g)):
            return p
    return g


def progression_set_from_pattern(direct: Sequence[bool], start: int, pattern: Sequence[bool], horizon: int) -> ProgressionSet:
    """Membership is direct[n] for n < start and pattern[(n - start) % len(pattern)] from start on."""
    p = _minimal_period(pattern)
    pattern = list(pattern[:p])

    def member(n: int) -> bool:
        return direct[n] if n < start else pattern[(n - start) % p]

    progs = []
    covered = set()
    for i, hit in enumerate(pattern):
        if not hit:
            continue
        first = start + i
        while first - p >= 0 and member(first - p):
            first -= p
        progs.append((first, p))
        covered.update(range(first, start + p, p))
    exceptional = tuple(n for n in range(start) if direct[n] and n not in covered)
    return ProgressionSet(exceptional, tuple(sorted(progs)), horizon)


# ---------------------------------------------------------------------------
# escape certificate


def _solve(matrix: List[List[Fraction]], rhs: List[Fraction]) -> Tuple[List[Fraction], Fraction]:
    """Gaussian elimination over Q; returns (solution, determinant)."""
    n = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular Sylvester system")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)], det


def height_constant(phi: RationalMap) -> Fraction:
    """c with H(phi(P)) >= H(P)^d / c for every P in P^1(Q).

    Solves A F + B G = X^(2d-1) and = Y^(2d-1) for the homogenized F, G; then
    max(|F|, |G|) >= H^d / (|A| + |B|), and gcd(F(x, y), G(x, y)) divides Res(F, G).
    """
    d = phi.degree
    F = list(phi.num) + [0] * (d + 1 - len(phi.num))
    G = list(phi.den) + [0] * (d + 1 - len(phi.den))
    size = 2 * d
    # column k < d: alpha_k X^k Y^(d-1-k) times F; column d + k: beta_k times G
    mat = [[Fraction(0)] * size for _ in range(size)]
    for k in range(d):
        for i in range(d + 1):
            mat[k + i][k] += F[i]
            mat[k + i][d + k] += G[i]
    best = Fraction(0)
    det = None
    for target in (size - 1, 0):
        rhs = [Fraction(int(i == target)) for i in range(size)]
        sol, det = _solve(mat, rhs)
        best = max(best, sum(abs(v) for v in sol))
    return best * abs(det)


@dataclass(frozen=True)
class EscapeCertificate:
    index: int
    threshold: int
    constant: Fraction

    def to_json(self) -> dict:
        return {"index": self.index, "height_threshold": self.threshold, "constant": str(self.constant)}


def escape_threshold(phi: RationalMap, bad_heights: Sequence[int]) -> Tuple[int, Fraction]:
    """T such that H(P) >= T forces strictly increasing heights beyond every bad point."""
    c = height_constant(phi)
    ceil_c = -((-c.numerator) // c.denominator)
    T = iroot(ceil_c, phi.degree - 1) + 1
    return max([T] + [h + 1 for h in bad_heights]), c


def bad_points(phi: RationalMap, rel: IterateRelation) -> List[ProjectivePoint]:
    """Rational points where phi^r = phi^s psi^m cannot be evaluated termwise."""
    fr = iterate_map(phi, rel.r)
    fs = iterate_map(phi, rel.s)
    polys = [fr.p, fr.q, fs.p, fs.q, rel.psi_num, rel.psi_den]
    pts = {ProjectivePoint(1, 0)}
    for f in polys:
        if not f.is_constant():
            pts.update(ProjectivePoint.of(r) for r, _ in rational_roots(f))
    return sorted(pts, key=lambda P: (P.b == 0, Fraction(P.a, P.b) if P.b else 0))


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class Certification:
    """Certified index set, or the raw indices up to the horizon when no certificate exists."""

    certified: Optional[ProgressionSet]
    raw: Tuple[int, ...]
    horizon: int
    mode: str
    relation: Optional[IterateRelation] = None
    escape: Optional[EscapeCertificate] = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "certified": self.certified.to_json() if self.certified else None,
            "raw": list(self.raw),
            "horizon": self.horizon,
            "mode": self.mode,
            "relation": self.relation.to_json() if self.relation else None,
            "escape": self.escape.to_json() if self.escape else None,
            "reason": self.reason,
        }


def _extend(phi: RationalMap, pts: List[ProjectivePoint], n: int, max_bits: int) -> None:
    while len(pts) <= n:
        P = phi(pts[-1])
        if _bits(P) > max_bits:
            raise OrbitBudgetError(len(pts), _bits(P), max_bits)
        pts.append(P)


def _cross_check(ps: ProgressionSet, phi: RationalMap, a, m: int, horizon: int, max_bits: int) -> Tuple[int, Tuple[int, ...]]:
    """Compare the certified set with direct evaluation; returns the horizon reached and the raw hits."""
    rec = orbit(phi, a, horizon, max_bits)
    reach = horizon if rec.known_upto(horizon) else len(rec.points) - 1
    raw = tuple(n for n in range(reach + 1) if is_power_point(rec.point(n), m))
    if list(raw) != ps.members_upto(reach):
        raise AssertionError(f"certified set {ps.describe()} disagrees with direct evaluation {raw}")
    return reach, raw


def certify_progressions(
    phi: RationalMap,
    a,
    m: int,
    horizon: int = 12,
    max_steps: int = 64,
    max_bits: int = DEFAULT_MAX_BITS,
    relation: Optional[IterateRelation] = None,
) -> Certification:
    """{n >= 0 : phi^n(a) in P^1(Q)^m} as a ProgressionSet valid for every n, cross-checked up to horizon."""
    if phi.degree < 2:
        raise ValueError("degree must be at least 2")
    a = ProjectivePoint.of(a)
    rec = orbit(phi, a, max_steps, max_bits)
    if rec.preperiod is not None:
        tail, period = rec.preperiod
        direct = [is_power_point(rec.point(n), m) for n in range(tail)]
        pattern = [is_power_point(rec.point(n), m) for n in range(tail, tail + period)]
        ps = progression_set_from_pattern(direct, tail, pattern, horizon)
        reach, raw = _cross_check(ps, phi, a, m, horizon, max_bits)
        ps = ProgressionSet(ps.exceptional, ps.progressions, reach)
        return Certification(ps, raw, reach, "preperiodic")

    rel = relation or find_relation(phi, m)
    if rel is None:
        rec = orbit(phi, a, horizon, max_bits)
        reach = horizon if rec.known_upto(horizon) else len(rec.points) - 1
        raw = tuple(n for n in range(reach + 1) if is_power_point(rec.point(n), m))
        return Certification(None, raw, reach, "uncertified", reason="no class relation within the search bounds")

    bad = bad_points(phi, rel)
    T, c = escape_threshold(phi, [P.height() for P in bad])
    n0 = next((n for n, P in enumerate(rec.points) if P.height() >= T), None)
    if n0 is None:
        rec2 = orbit(phi, a, horizon, max_bits)
        reach = horizon if rec2.known_upto(horizon) else len(rec2.points) - 1
        raw = tuple(n for n in range(reach + 1) if is_power_point(rec2.point(n), m))
        return Certification(
            None, raw, reach, "uncertified", rel, reason=f"orbit did not pass height {T} within {len(rec.points)} points"
        )
    g = rel.r - rel.s
    limit = default_gap_bound(m)
    if g > limit:
        raise AssertionError(f"relation gap {g} exceeds {limit}")
    pts = list(rec.points)
    start = n0 + rel.s
    _extend(phi, pts, start + g - 1, max_bits)
    direct = [is_power_point(P, m) for P in pts[:start]]
    pattern = [is_power_point(pts[n], m) for n in range(start, start + g)]
    ps = progression_set_from_pattern(direct, start, pattern, horizon)
    spot = rel.s + 3 * g
    reach, raw = _cross_check(ps, phi, a, m, max(horizon, spot), max_bits)
    ps = ProgressionSet(ps.exceptional, ps.progressions, reach)
    return Certification(ps, raw, reach, "relation", rel, EscapeCertificate(n0, T, c))


# ---------------------------------------------------------------------------
# sharpness of the number of progressions


def _candidate_sets(window: int, max_modulus: int):
    for l in range(window):
        yield frozenset([l]), (l, 0)
        for M in range(1, max_modulus + 1):
            yield frozenset(range(l, 2 * window, M)), (l, M)


def fewest_progressions(ps: ProgressionSet, max_modulus: int, max_count: int = 2) -> Optional[List[Tuple[int, int]]]:
    """A representation by at most max_count progressions {l + Mk} (M = 0 meaning {l}), or None.

    Both sides are periodic past their largest offset with period dividing
    L = lcm(1..max_modulus, moduli of ps), so agreement on [0, W + L) with W past
    every offset decides equality of the infinite sets.
    """
    L = math.lcm(*range(1, max_modulus + 1), *ps.moduli()) if max_modulus or ps.moduli() else 1
    offsets = list(ps.exceptional) + [l for l, _ in ps.progressions]
    W = (max(offsets) if offsets else 0) + 2 * L
    end = W + L
    target = frozenset(ps.members_upto(end - 1))
    cands = [(frozenset(n for n in s if n < end), lab) for s, lab in _candidate_sets(W, max_modulus)]
    cands = [(s, lab) for s, lab in cands if s <= target]
    if not target:
        return []
    for k in range(1, max_count + 1):
        for combo in itertools.combinations(cands, k):
            if frozenset().union(*(s for s, _ in combo)) == target:
                return [lab for _, lab in combo]
    return None


# ---------------------------------------------------------------------------
# trivial maps


@dataclass(frozen=True)
class TrivialModulus:
    t: int
    M: Optional[int]
    reason: str = ""

    def to_json(self) -> dict:
        return {"t": self.t, "M": self.M, "reason": self.reason}


def trivial_modulus(c, j: int, m: int) -> TrivialModulus:
    """Progression modulus for phi = c x^j psi^m; M is None when only finitely many members can occur."""
    if not 0 <= j < m:
        raise ValueError("need 0 <= j < m")
    c = Fraction(c)
    if c == 0:
        raise ValueError("c must be nonzero")
    t = order_mod_power(c, m)
    if j == 0:
        if t > 1:
            return TrivialModulus(t, None, "c is not an m-th power")
        return TrivialModulus(t, 1)
    if math.gcd(t, j) != 1:
        return TrivialModulus(t, None, "gcd(t, j) > 1")
    M = t if j == 1 else multiplicative_order(j, t * (j - 1))
    if M > m:
        raise AssertionError(f"modulus {M} exceeds m = {m}")
    return TrivialModulus(t, M)
