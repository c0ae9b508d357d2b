import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from powerorbits import families as fam
from powerorbits.portrait import (
    LATTES_SIGNATURES,
    CATALOG,
    classify_mu_type,
    classify_polynomial,
    count_branch_abundant,
    critical_set,
    exceptional_points,
    is_trivial,
    match_shape,
    orbifold_signature,
    orbifold_weights,
    postcritical_graph,
    preimage_structure,
    shape_for,
    verify_case5_form,
)
from powerorbits.powerclass import PowerClass, iterate_classes, reduce_class
from powerorbits.qpoly import UniPoly, poly_gcd
from powerorbits.ratmap import INFINITY, RECIPROCAL, PointSet, ProjectivePoint, conjugate, make_map, pushforward, ramification

X = UniPoly.x()
ONE = UniPoly.const(1)
PHI1 = make_map(-((X + 3) ** 2), 4 * X)
PHI3 = make_map(-9 * (X - 4) ** 2, (X - 3) * (3 * X - 4) ** 2)
MU8 = make_map(-4 * (X - 1), (X - 2) ** 2)
T76 = make_map(144 * X * (X + 3), (X - 9) ** 2)
P = ProjectivePoint.of


# ---------------------------------------------------------------------------
# trivial maps and exceptional points


def test_trivial_decompositions():
    t = is_trivial(make_map(X**3, ONE), 3)
    assert (t.c, t.j) == (1, 0)
    assert make_map(t.c * X**t.j * t.psi_num**3, t.psi_den**3) == make_map(X**3, ONE)
    t = is_trivial(make_map(2 * X * (X + 1) ** 2, ONE), 2)
    assert (t.c, t.j) == (2, 1)
    assert t.psi_num * (1 / t.psi_num.lc) == X + 1
    assert is_trivial(PHI1, 4) is None


def test_exceptional_points():
    assert exceptional_points(make_map(X**3, ONE)) == [P(0), INFINITY]
    assert exceptional_points(make_map(ONE, X**2)) == [P(0), INFINITY]
    assert INFINITY in exceptional_points(make_map(X**2 + 1, ONE))
    assert exceptional_points(PHI1) == []


# ---------------------------------------------------------------------------
# post-critical graph and signatures


def test_postcritical_set_of_lattes_map():
    g = postcritical_graph(PHI1)
    assert g.pcf
    assert g.postcritical == PointSet.of_points([0, -3, INFINITY])
    assert g.critical == PointSet.of_points([3, -3])


@pytest.mark.parametrize(
    "phi, sig",
    [
        (make_map(X**2 - 2, ONE), (2, 2, math.inf)),
        (PHI1, (2, 4, 4)),
        (fam.lattes_333_deg9(3).map, (3, 3, 3)),
        (fam.lattes_333_3cycle(1).map, (3, 3, 3)),
        (fam.lattes_333_fixed2cycle(1).map, (3, 3, 3)),
        (make_map(X**2, ONE), (math.inf, math.inf)),
    ],
)
def test_orbifold_signatures(phi, sig):
    assert orbifold_signature(phi) == sig


def test_non_pcf_map_has_no_signature():
    g = postcritical_graph(make_map(X**2 + 1, ONE))
    assert not g.pcf and g.reason
    assert orbifold_signature(make_map(X**2 + 1, ONE)) is None


def _check_graph(phi):
    g = postcritical_graph(phi)
    rd = ramification(phi)
    layers = dict(rd.layers())
    for i, node in enumerate(g.nodes):
        # image lies inside a single node
        img = pushforward(phi, node)
        target = g.nodes[g.image[i]]
        assert poly_gcd(img.poly, target.poly) == img.poly
        assert not img.infinity or target.infinity
        # uniform ramification index across the node
        e = g.e[i]
        if not node.poly.is_constant():
            if e == 1:
                assert poly_gcd(node.poly, rd.critical_polynomial()).is_constant()
            else:
                assert poly_gcd(node.poly, layers[e]) == node.poly
        if node.infinity:
            assert rd.e_infinity == e
    return g


@pytest.mark.parametrize("name", ["lattes_244", "lattes_333_fixed2cycle", "lattes_333_3cycle", "lattes_333_deg9"])
def test_partition_is_refined_and_weights_consistent(name):
    phi = getattr(fam, name)().map
    g = _check_graph(phi)
    w = orbifold_weights(phi, g)
    for i in range(len(g.nodes)):
        assert w.nu[g.image[i]] == g.e[i] * w.nu[i]


# ---------------------------------------------------------------------------
# classification


@pytest.mark.parametrize(
    "phi, m, tag",
    [
        (PHI1, 4, "(13)"),
        (fam.family_type3(3).map, 2, "(3)"),
        (T76, 2, "(7,6)"),
        (MU8, 2, "(8)"),
        (fam.lattes_333_deg9(3).map, 3, "(9)"),
        (fam.lattes_333_3cycle(1).map, 3, "(4)"),
        (fam.lattes_333_fixed2cycle(1).map, 3, "(2,1)"),
        (make_map(X * (X + 4), ONE), 2, "(7,6)"),
    ],
)
def test_classification_examples(phi, m, tag):
    mt = classify_mu_type(phi, m)
    assert mt.tag == tag
    r, s = mt.table_relation
    classes = [PowerClass.of_x(m)] + iterate_classes(phi, m, r)
    assert classes[r] == classes[s]


def test_lattes_type_names_beta():
    mt = classify_mu_type(PHI1, 4)
    assert mt.point("B") == P(-3)
    assert mt.lattes == "(2,4,4)"


def test_type3_cycle_passes_through_infinity():
    mt = classify_mu_type(fam.family_type3(3).map, 2)
    C = P(3)
    phi = fam.family_type3(3).map
    assert phi(C) == INFINITY and phi(INFINITY) == P(0) and phi(P(0)) == C
    assert {mt.point("A1"), mt.point("A2")} == {P(0), INFINITY}


def test_type76_class_of_second_iterate():
    c1, c2, c3 = iterate_classes(T76, 2, 3)
    assert c3 == c1
    # class(phi^2) equals the class of -C x (x - C) with C = -3, the other zero of phi
    assert c2 == reduce_class(3 * X * (X + 3), ONE, 2)[0]


def test_large_modulus_non_trivial_is_unclassified():
    mt = classify_mu_type(PHI1, 5)
    assert mt.tag == "unclassified" and mt.report


def test_trivial_map_classified_trivial():
    mt = classify_mu_type(make_map(3 * X * (X - 2) ** 3, ONE), 3)
    assert mt.is_trivial and mt.trivial.j == 1


def test_generic_map_unclassified_with_report():
    mt = classify_mu_type(make_map(X**2 + 1, ONE), 2)
    assert mt.tag == "unclassified" and mt.report


def test_preimage_structure_lists_layers():
    out = preimage_structure(PHI1, 4, depth=3)
    assert set(out) == {"0", "inf"}
    assert any(layer["point"] == "-3" for layer in out["0"]["layers"])


def test_synthetic_graphs_match_unreachable_shapes():
    # functional graphs with the shape of types that do not occur over Q
    a1, a2, x, y = P(0), INFINITY, P(1), P(2)
    named = [a1, a2, x, y]
    image = {a1: x, x: y, y: a1, a2: a2}
    eidx = {a1: 1, a2: 1, x: 1, y: 1}
    assert match_shape(shape_for("(3,1)", 2), named, image, eidx, a1, a2) == {"A1": a1, "A2": a2, "X": x, "Y": y}
    b, g = P(1), P(2)
    image = {a1: a2, a2: a1, b: a1, g: a2}
    assert match_shape(shape_for("(11a)", 2), [a1, a2, b, g], image, {a1: 1, a2: 1, b: 1, g: 1}, a1, a2) is not None
    image = {a2: a1, a1: b, b: a1, g: b}
    assert match_shape(shape_for("(11b)", 2), [a1, a2, b, g], image, {a1: 1, a2: 1, b: 1, g: 1}, a1, a2) is not None
    image = {a1: b, b: a1, a2: b, g: a1}
    assert match_shape(shape_for("(11c)", 2), [a1, a2, b, g], image, {a1: 1, a2: 1, b: 1, g: 1}, a1, a2) is not None
    # a ramified edge breaks a shape that needs odd index
    assert match_shape(shape_for("(3,1)", 2), named, {a1: x, x: y, y: a1, a2: a2}, {a1: 2, a2: 1, x: 1, y: 1}, a1, a2) is None


def test_catalog_has_unique_tags_per_modulus():
    keys = [(s.tag, s.m) for s in CATALOG]
    assert len(keys) == len(set(keys))


# ---------------------------------------------------------------------------
# quadratic normal forms


def test_case5_forms():
    assert verify_case5_form(PHI3).case == "5a"
    assert verify_case5_form(PHI3).C == 3
    f = verify_case5_form(MU8)
    assert (f.case, f.B, f.C, f.h) == ("5c", -4, 1, X)
    assert verify_case5_form(T76).case == "5d"
    assert verify_case5_form(make_map(X**2 + 1, X)) is None


# ---------------------------------------------------------------------------
# polynomials


def test_polynomial_classification():
    assert classify_polynomial(make_map(X * (X + 4), ONE), 2).kind == "chebyshev"
    res = classify_polynomial(make_map(-(X + 4) * (X + 1) ** 2, ONE), 2)
    assert (res.kind, res.c, res.d) == ("chebyshev", 1, 3)
    assert classify_polynomial(make_map(X**2 + 1, ONE), 2).kind == "neither"
    res = classify_polynomial(make_map(5 * X**3 * (X - 1) ** 2, ONE), 2)
    assert res.kind == "case1" and res.trivial.j == 1


def test_scaled_chebyshev_is_recognised():
    E = fam.chebyshev_exception_poly(4)
    c = Fraction(3, 2)
    res = classify_polynomial(make_map(E.compose(c * X) * (1 / c), ONE), 2)
    assert (res.kind, res.c, res.d) == ("chebyshev", c, 4)


# ---------------------------------------------------------------------------
# abundance


def test_abundant_points_of_chebyshev_polynomial():
    res = count_branch_abundant(make_map(X**2 - 2, ONE), 2, [2, -2, INFINITY, 0])
    assert [c.abundant for c in res] == [True, True, True, False]


def test_abundant_points_of_power_map():
    res = count_branch_abundant(make_map(X**3, ONE), 2, [0, INFINITY, 1])
    assert [c.abundant for c in res] == [True, True, False]


def test_abundant_points_of_lattes_map():
    res = count_branch_abundant(PHI1, 4, [0, INFINITY, -3])
    assert [c.abundant for c in res] == [True, True, False]


# ---------------------------------------------------------------------------
# properties over random family parameters

nonzero_q = st.fractions(min_value=-9, max_value=9, max_denominator=5).filter(bool)


@st.composite
def family_instances(draw):
    name = draw(
        st.sampled_from(
            ["lattes_244", "lattes_333_fixed2cycle", "lattes_333_3cycle", "lattes_333_deg9", "family_type3", "family_type76", "family_mu8"]
        )
    )
    ctor = getattr(fam, name)
    if name == "family_mu8":
        C, s = draw(nonzero_q), draw(st.fractions(min_value=-9, max_value=9, max_denominator=5))
        assume(s != C)
        return ctor(C, s)
    v = draw(nonzero_q)
    if name == "family_type3":
        assume(v not in (-1, Fraction(-1, 3), 1))
    return ctor(v)


@settings(max_examples=500)
@given(family_instances())
def test_family_tag_and_relation_pattern(inst):
    mt = classify_mu_type(inst.map, inst.m)
    assert mt.tag == inst.tag
    r, s = mt.table_relation
    classes = [PowerClass.of_x(inst.m)] + iterate_classes(inst.map, inst.m, r)
    assert classes[r] == classes[s]
    if inst.m == 2 and inst.tag in ("(3)", "(8)", "(7,6)"):
        assert mt.case5 is not None


@settings(max_examples=500)
@given(family_instances())
def test_classification_stable_under_reciprocal(inst):
    mt = classify_mu_type(inst.map, inst.m)
    swapped = classify_mu_type(conjugate(inst.map, RECIPROCAL), inst.m)
    assert swapped.tag == mt.tag
    assert swapped.orientation != mt.orientation


@settings(max_examples=500)
@given(family_instances())
def test_lattes_signature_iff_lattes_family(inst):
    sig = orbifold_signature(inst.map)
    assert (sig in LATTES_SIGNATURES) == (inst.signature is not None)
    if inst.signature is not None:
        assert sig == inst.signature
        w = orbifold_weights(inst.map)
        g = w.graph
        for i in range(len(g.nodes)):
            assert w.nu[g.image[i]] == g.e[i] * w.nu[i]


@st.composite
def random_trivial(draw):
    m = draw(st.sampled_from([2, 3, 4]))
    j = draw(st.integers(min_value=0, max_value=m - 1))
    c = Fraction(draw(st.integers(min_value=1, max_value=9)) * draw(st.sampled_from([1, -1])), draw(st.integers(min_value=1, max_value=4)))
    a = draw(st.integers(min_value=-4, max_value=4).filter(bool))
    b = draw(st.integers(min_value=-4, max_value=4).filter(bool))
    psi_n = X + a
    psi_d = draw(st.sampled_from([ONE, X + b]))
    return m, make_map(c * X**j * psi_n**m, psi_d**m)


@settings(max_examples=500)
@given(random_trivial())
def test_random_trivial_maps_are_recognised(args):
    m, phi = args
    assume(phi.degree >= 2)
    mt = classify_mu_type(phi, m)
    assert mt.is_trivial
    t = mt.trivial
    assert make_map(t.c * X**t.j * t.psi_num**m, t.psi_den**m) == phi


@settings(max_examples=500)
@given(family_instances())
def test_critical_points_count(inst):
    crit = critical_set(inst.map)
    rd = ramification(inst.map)
    assert crit.size() <= rd.total()
