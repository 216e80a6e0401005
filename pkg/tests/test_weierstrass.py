import json

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, strategies as st

from formal_split.errors import DegenerateLinearPart, IndexOutOfRange, NonzeroConstantTerm
from formal_split.instances import random_instance
from formal_split.series import PuiseuxSeries
from formal_split.weierstrass import (
    RootSystem,
    WeierstrassPoly,
    assert_form,
    elementary_symmetric,
    from_roots,
    tschirnhaus_normalize,
)
from oracles import W, X, Z, internal_poly, poly_esym, poly_is_zero, poly_truncate, series_expr, weierstrass_expr


def S(nx, terms, p=1, q=0, trunc=None):
    return PuiseuxSeries.from_ab(p, q, 1, nx, trunc, terms)


def e(i, nx):
    v = [0] * nx
    v[i] = 1
    return tuple(v)


x1, x2 = X[0], X[1]


def test_tschirnhaus_complete_square():
    g = [S(1, {((0,), 1): 2}), S(1, {((1,), 0): 1})]
    f, shift = tschirnhaus_normalize(g)
    assert shift == S(1, {((0,), 1): 1})
    assert sp.expand(series_expr(f.a(2), 1) - (x1 - W**2)) == 0


def test_tschirnhaus_cubic():
    g = [S(2, {((1, 0), 0): 3}), S(2, {}), S(2, {})]
    f, shift = tschirnhaus_normalize(g)
    assert shift == S(2, {((1, 0), 0): 1})
    ref = sp.Poly(sp.expand((Z - x1) ** 3 + 3 * x1 * (Z - x1) ** 2), Z).all_coeffs()
    assert ref[1] == 0
    assert sp.expand(series_expr(f.a(2), 1) - ref[2]) == 0
    assert sp.expand(series_expr(f.a(3), 1) - ref[3]) == 0
    assert sp.expand(ref[2] + 3 * x1**2) == 0 and sp.expand(ref[3] - 2 * x1**3) == 0


def test_tschirnhaus_identity_on_normal_input():
    g = [S(1, {}), S(1, {((2,), 1): -1})]
    f, shift = tschirnhaus_normalize(g)
    assert shift.is_zero()
    assert f.a(2) == g[1]


def test_from_roots_x1():
    f, rs = from_roots([S(1, {((1,), 0): 1})])
    assert f.a(2) == S(1, {((2,), 0): -1})
    assert rs.roots[1] == S(1, {((1,), 0): -1})
    assert rs.d == [0, 0]


def test_from_roots_half_power():
    f, rs = from_roots([S(1, {((1,), mpq(1, 2)): 1}, p=2)])
    assert sp.expand(series_expr(f.a(2), 1) + W * x1**2) == 0
    assert rs.p == 2 and rs.d == [1, 1]


def test_from_roots_nc3():
    f, rs = from_roots([S(2, {(e(0, 2), 0): 1}), S(2, {(e(1, 2), 0): 1})])
    ref = sp.Poly(sp.expand((Z + x1) * (Z + x2) * (Z - x1 - x2)), Z).all_coeffs()
    assert sp.expand(series_expr(f.a(2), 1) - ref[2]) == 0
    assert sp.expand(series_expr(f.a(3), 1) - ref[3]) == 0
    assert sp.expand(ref[2] + x1**2 + x1 * x2 + x2**2) == 0
    assert sp.expand(ref[3] + x1**2 * x2 + x1 * x2**2) == 0


def test_from_roots_rejects_constant():
    with pytest.raises(NonzeroConstantTerm):
        from_roots([S(1, {((0,), 0): 1, ((1,), 0): 1})])


def test_root_system_degenerate():
    with pytest.raises(DegenerateLinearPart):
        RootSystem.build([S(1, {((2,), 0): 1}), S(1, {((2,), 0): -1})])


def test_root_system_bij_and_units():
    b = S(2, {(e(0, 2), 1): 2, (e(1, 2), 2): 3, ((1, 1), 0): 1})
    rs = RootSystem.build([b, -b])
    assert rs.d == [1, 1]
    assert rs.bij[0][0].coeffs == {1: 2} and rs.bij[0][1].coeffs == {2: 3}
    assert rs.btilde[0][0].coeffs == {0: 2}


def test_assert_form_examples():
    assert assert_form(WeierstrassPoly(2, {2: S(1, {((2,), 1): -1})})) == {"in_ideal": True, "order_k": True}
    assert assert_form(WeierstrassPoly(2, {2: S(1, {((0,), 1): -1})})) == {"in_ideal": False, "order_k": False}
    assert assert_form(WeierstrassPoly(3, {2: S(2, {(e(0, 2), 0): -1})})) == {"in_ideal": True, "order_k": False}


def test_elementary_symmetric_examples():
    vals = [S(2, {(e(0, 2), 0): 1}), S(2, {(e(1, 2), 0): 1}), S(2, {(e(0, 2), 0): -1, (e(1, 2), 0): -1})]
    assert elementary_symmetric(0, vals) == S(2, {((0, 0), 0): 1})
    assert elementary_symmetric(2, vals) == S(2, {((2, 0), 0): -1, ((1, 1), 0): -1, ((0, 2), 0): -1})
    assert elementary_symmetric(3, vals) == S(2, {((2, 1), 0): -1, ((1, 2), 0): -1})
    with pytest.raises(IndexOutOfRange):
        elementary_symmetric(4, vals)


def test_no_a1_slot():
    with pytest.raises(IndexOutOfRange):
        WeierstrassPoly(3, {1: S(2, {})})


def test_json_round_trip():
    f = random_instance(3, k=3, p_star=2).poly()
    back = WeierstrassPoly.from_json(json.loads(json.dumps(f.to_json())))
    assert back == f


# -- properties


def test_from_roots_matches_product():
    # 200 seeded instances, k = 2..4, exact and truncated roots
    for seed in range(200):
        k, p_star, trunc = 2 + seed % 3, 1 + (seed // 3) % 2, (None, 6, 8)[(seed // 6) % 3]
        roots = random_instance(seed, k=k, p_star=p_star, max_deg=2).all_roots()
        if trunc is not None:
            roots = [b.truncate(trunc) for b in roots]
        f, _ = from_roots(roots[:-1])
        lin = [internal_poly(b.promote(f.p, f.q), 24) for b in roots]
        for j in range(2, k + 1):
            a = f.a(j)
            ref = poly_truncate(poly_esym(j, lin), a.trunc)
            assert poly_is_zero(internal_poly(a, 24) - ref, 24), (seed, j)
            if trunc is not None:
                assert a.trunc >= trunc


@st.composite
def root_lists(draw):
    k = draw(st.sampled_from([2, 3]))
    nx = k - 1
    roots = []
    for _ in range(k - 1):
        terms = {}
        for _ in range(draw(st.integers(1, 3))):
            alpha = tuple(draw(st.integers(0, 2)) for _ in range(nx))
            beta = draw(st.integers(0 if sum(alpha) else 1, 2))
            terms[(alpha, beta)] = draw(st.integers(-2, 2))
        roots.append(S(nx, terms))
    return roots


@given(root_lists())
def test_order_k_iff_roots_in_ideal(roots):
    f = from_roots_bare(roots)
    roots_ok = all(b.valuation("x_only") >= 1 for b in _all(roots))
    assert assert_form(f)["order_k"] == roots_ok


def _all(roots):
    last = roots[0].like({}, None)
    for b in roots:
        last = last - b
    return roots + [last]


def from_roots_bare(roots):
    allr = _all(roots)
    k = len(allr)
    return WeierstrassPoly(k, {j: elementary_symmetric(j, allr) for j in range(2, k + 1)})


@st.composite
def monic_inputs(draw):
    k = draw(st.sampled_from([2, 3]))
    nx = k - 1
    g = []
    for j in range(k):
        terms = {}
        for _ in range(draw(st.integers(0, 2))):
            alpha = tuple(draw(st.integers(0, 2)) for _ in range(nx))
            terms[(alpha, draw(st.integers(0, 2)))] = draw(st.integers(-3, 3))
        g.append(S(nx, terms))
    return g


@given(monic_inputs())
def test_tschirnhaus_recovers_input(g):
    k = len(g)
    f, shift = tschirnhaus_normalize(g)
    back = sp.expand(weierstrass_expr(f, 1).subs(Z, Z + series_expr(shift, 1)))
    coeffs = sp.Poly(back, Z).all_coeffs()
    assert len(coeffs) == k + 1
    for j in range(1, k + 1):
        assert sp.expand(coeffs[j] - series_expr(g[j - 1], 1)) == 0
