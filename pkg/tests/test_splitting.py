import pytest
import sympy as sp
from gmpy2 import mpq

from formal_split.coefficients import zeta
from formal_split.errors import InvalidParams, NeedsExtension, NotDivisible, NotOrderK, NotReduced, TruncationInsufficient
from formal_split.instances import preset, random_instance
from formal_split.series import LaurentSeries, PuiseuxSeries
from formal_split.splitting import (
    Point,
    apply_mu,
    atw_proxy,
    factor_linear_forms,
    is_nc,
    lift_roots,
    lowest_homogeneous_part,
    mu_p_action,
    split,
    translate,
)
from formal_split.transforms import ramify
from formal_split.weierstrass import WeierstrassPoly, from_roots, product_of_linear
from oracles import W, X, internal_poly, poly_is_zero, poly_truncate, series_expr

x1, x2 = X[0], X[1]


def S(nx, terms, p=1, q=0, trunc=None):
    return PuiseuxSeries.from_ab(p, q, 1, nx, trunc, terms)


def quad(terms, **kw):
    return WeierstrassPoly(2, {2: S(1, terms, **kw)})


LINE_PAIR = quad({((2,), 0): -1})
UNIT_PAIR = quad({((2,), 0): -1, ((2,), 1): -1})
WHITNEY = preset("whitney").poly()
WHITNEY_P1 = quad({((2,), 1): -1})
QPOLE = preset("qpole").poly()
NC3 = preset("nc3").poly()
MU3 = preset("mu3").poly()


def lowest_expr(lp):
    Zs = sp.Symbol("Z")
    return sum(sp.Rational(int(mpq(c).numerator), int(mpq(c).denominator)) * sp.Mul(*(X[i] ** a for i, a in enumerate(al))) * W ** sp.Rational(str(b)) * Zs**zd for (al, b, zd), c in lp.terms.items()), Zs


# -- lowest homogeneous part


def test_lowest_part_whitney_origin():
    lp = lowest_homogeneous_part(WHITNEY)
    expr, Zs = lowest_expr(lp)
    assert lp.degree == 2 and lp.xz_pure and expr == Zs**2


def test_lowest_part_whitney_at_one():
    lp = lowest_homogeneous_part(WHITNEY, Point(mpq(1)))
    expr, Zs = lowest_expr(lp)
    assert lp.degree == 2 and lp.xz_pure
    assert sp.expand(expr - (Zs**2 - x1**2)) == 0


def test_lowest_part_nc3_is_itself():
    lp = lowest_homogeneous_part(NC3)
    expr, Zs = lowest_expr(lp)
    ref = (Zs + x1) * (Zs + x2) * (Zs - x1 - x2)
    assert lp.degree == 3 and sp.expand(expr - ref) == 0


def test_lowest_part_needs_visible_degree():
    f = quad({((2,), 0): -1}, trunc=1)
    with pytest.raises(TruncationInsufficient):
        lowest_homogeneous_part(f)


# -- linear forms


def forms_of(f):
    return lowest_homogeneous_part(f).z_forms(f.nx)


def test_factor_line_pair():
    L = factor_linear_forms(forms_of(LINE_PAIR), 1)
    got = sorted(int(l[(1,)].coeffs[0]) for l in L)
    assert got == [-1, 1]


def test_factor_nc3():
    L = factor_linear_forms(forms_of(NC3), 2)
    got = sorted(tuple(int(l.get(e, LaurentSeries({})).coeffs.get(0, 0)) for e in ((1, 0), (0, 1))) for l in L)
    assert got == [(-1, -1), (0, 1), (1, 0)]


def test_factor_needs_sqrt2():
    f = quad({((2,), 0): -2})
    with pytest.raises(NeedsExtension):
        factor_linear_forms(forms_of(f), 1)


def test_factor_repeated_form():
    with pytest.raises(NotReduced):
        factor_linear_forms(forms_of(quad({})), 1)


# -- lifting


def test_lift_exact_line_pair():
    rs = lift_roots(LINE_PAIR, [S(1, {((1,), 0): 1}), S(1, {((1,), 0): -1})])
    assert [b.terms for b in rs.roots] == [{(0, 1): 1}, {(0, 1): -1}]
    assert all(b.trunc >= 8 for b in rs.roots)


def test_lift_rejects_wrong_seed():
    with pytest.raises(NotDivisible):
        lift_roots(LINE_PAIR, [S(1, {((1,), 0): 2}), S(1, {((1,), 0): -2})])


def test_lift_square_root_of_unit():
    rs = lift_roots(UNIT_PAIR, [S(1, {((1,), 0): 1}), S(1, {((1,), 0): -1})], N=8)
    b = next(r for r in rs.roots if r.terms.get((0, 1)) == 1)
    # squaring the root reproduces x^2 (1 + w) to the root's precision
    assert (b * b).equal_mod(S(1, {((2,), 0): 1, ((2,), 1): 1}), (b * b).trunc)
    t = sp.Symbol("t")
    ref = sp.series(sp.sqrt(1 + t), t, 0, 4).removeO()
    head = sum(c * W**n for n, c in enumerate(sp.Poly(ref, t).all_coeffs()[::-1])) * x1
    assert sp.expand(series_expr(b.truncate(4), 1) - head) == 0
    assert sp.Poly(ref, t).all_coeffs()[::-1] == [1, sp.Rational(1, 2), sp.Rational(-1, 8), sp.Rational(1, 16)]


def test_lift_ramified_whitney():
    f = ramify(WHITNEY_P1, 2)
    v = S(1, {((1,), mpq(1, 2)): 1}, p=2)
    rs = lift_roots(f, [v, -v])
    assert {str(b.truncate(8)) for b in rs.roots} == {str(v.truncate(8)), str((-v).truncate(8))}
    for b in rs.roots:
        assert len(b.terms) == 1


def test_lift_wrong_number_of_seeds():
    with pytest.raises(InvalidParams):
        lift_roots(LINE_PAIR, [S(1, {((1,), 0): 1})])


# -- split


def test_split_line_pair():
    res = split(LINE_PAIR)
    assert (res.status, res.p, res.q) == ("Split", 1, 0)


def test_split_whitney():
    res = split(WHITNEY_P1, p_max=4)
    assert (res.status, res.p, res.q) == ("Split", 2, 0)
    assert (0, 1, "NotDivisible") in res.trials
    v = S(1, {((1,), mpq(1, 2)): 1}, p=2)
    assert {str(b) for b in res.roots} == {str(v.truncate(res.roots[0].trunc)), str((-v).truncate(res.roots[0].trunc))}


def test_split_qpole_root_by_squaring():
    res = split(QPOLE)
    assert (res.status, res.p, res.q) == ("Split", 1, 1)
    b = next(r for r in res.roots if r.ab_terms()[0][1] == 1)
    head = [(ep.alpha, ep.beta, c) for ep, c in b.ab_terms()[:3]]
    assert head == [((1,), (1,), 1), ((2,), (0,), mpq(1, 2)), ((3,), (-1,), mpq(-1, 8))]
    # the square matches x^2 w^2 + x^3 w through the root's precision
    sq = internal_poly(b * b, 1)
    target = internal_poly(QPOLE.a(2).promote(b.p, b.q) * -1, 1)
    assert poly_is_zero(poly_truncate(sq - target, (b * b).trunc), 1)
    # and independently in w, x: (x w sqrt(1 + x/w))^2 = x^2 w^2 + x^3 w
    bexpr = series_expr(b.truncate(b.trunc), 1)
    diff = sp.expand(bexpr**2 - (x1**2 * W**2 + x1**3 * W))
    assert all(sp.degree(t, x1) >= 5 for t in sp.Add.make_args(diff))


def test_split_qpole_without_poles_fails():
    res = split(QPOLE, q_max=0)
    assert res.status != "Split"


def test_split_sqrt2_needs_extension():
    assert split(quad({((2,), 0): -2})).status == "NeedsExtension"


def test_split_not_order_k():
    with pytest.raises(NotOrderK):
        split(quad({((1,), 0): -1}))


def test_split_nc3_roots():
    res = split(NC3)
    assert res.status == "Split"
    got = {tuple(int(l.coeffs.get(0, 0)) for l in row) for row in res.root_system.bij}
    assert got == {(1, 0), (0, 1), (-1, -1)}


def test_split_report_shape():
    obj = split(WHITNEY, p_max=2).to_json()
    assert set(obj) == {"status", "p", "q", "roots", "d", "diagnostics"}
    assert obj["d"] == [1, 1]


def test_split_random_roundtrip_sample():
    for seed in range(12):
        k, p_star = 2 + seed % 2, 1 + (seed // 2) % 3
        inst = random_instance(seed, k=k, p_star=p_star)
        res = split(inst.poly(), p_max=3, q_max=1)
        assert res.status == "Split" and res.p <= p_star
        t = min(b.trunc for b in res.roots)
        want = sorted(str(b.promote(res.p, res.q).truncate(t)) for b in inst.all_roots())
        assert sorted(str(b.truncate(t)) for b in res.roots) == want


# -- normal crossings and the proxy


def test_is_nc_examples():
    assert is_nc(LINE_PAIR)["nc"]
    assert not is_nc(WHITNEY)["nc"]
    assert is_nc(WHITNEY, Point(mpq(1)))["nc"]
    assert is_nc(NC3)["nc"]


def test_is_nc_dependent_linear_parts():
    f, _ = from_roots([S(2, {((1, 0), 0): 1}), S(2, {((1, 0), 0): 2, ((0, 2), 0): 1})])
    verdict = is_nc(f)
    assert not verdict["nc"]


def test_proxy_examples():
    assert atw_proxy(UNIT_PAIR) == {"order": 2, "lowest_is_xz": True, "lowest_nc": True}
    assert atw_proxy(WHITNEY) == {"order": 2, "lowest_is_xz": True, "lowest_nc": False}
    assert atw_proxy(QPOLE) == {"order": 2, "lowest_is_xz": True, "lowest_nc": False}


def test_translate_needs_exact_data():
    with pytest.raises(TruncationInsufficient):
        translate(WHITNEY.truncate(6), Point(mpq(1)))


def test_point_parse():
    assert Point.parse("w=1/2") == Point(mpq(1, 2))
    assert Point.parse("w=0,u=1;2") == Point(mpq(0), (mpq(1), mpq(2)))
    assert Point.parse(None).is_origin()
    with pytest.raises(InvalidParams):
        Point.parse("y=3")


# -- the mu_p action


def test_mu_identity_for_p1():
    assert mu_p_action(split(LINE_PAIR).root_system) == [1, 2]


def test_mu_whitney_transposition():
    assert mu_p_action(split(WHITNEY, p_max=2).root_system) == [2, 1]


def test_mu3_three_cycle():
    res = split(MU3, p_max=3)
    assert (res.status, res.p) == ("Split", 3)
    perm = mu_p_action(res.root_system)
    assert sorted(perm) == [1, 2, 3] and all(perm[i] != i + 1 for i in range(3))
    # each root is a cube root of -w x^3 times the right unit: prod(z + b_i) = z^3 + w x^3
    sig = product_of_linear(res.roots)
    assert sig[3].equal_mod(MU3.a(3).promote(3, 0), sig[3].trunc)


def test_mu_action_fixes_f():
    for seed in range(10):
        inst = random_instance(seed, k=2 + seed % 2, p_star=2 + seed % 2)
        res = split(inst.poly())
        rs = res.root_system
        if rs.p == 1:
            continue
        eps = zeta(rs.p)
        moved = [apply_mu(b, eps) for b in rs.roots]
        sig = product_of_linear(moved)
        f = inst.poly().promote(rs.p, rs.q)
        for j in range(2, f.k + 1):
            assert sig[j].equal_mod(f.a(j), sig[j].trunc)
        assert sorted(mu_p_action(rs)) == list(range(1, f.k + 1))
