import json

import pytest
import sympy as sp
from gmpy2 import mpq

from formal_split.errors import InvalidParams, MultipleWVariables, NotOrderK
from formal_split.instances import preset, random_instance
from formal_split.series import PuiseuxSeries
from formal_split.transforms import TransformLog, blowup_chart, blowup_origin, ramify, replay, rescale_q
from formal_split.weierstrass import WeierstrassPoly, assert_form
from oracles import W, X, Z, blowup_pullback, is_zero, series_expr, weierstrass_expr


def S(nx, terms, p=1, q=0, trunc=None):
    return PuiseuxSeries.from_ab(p, q, 1, nx, trunc, terms)


def quad(terms, **kw):
    return WeierstrassPoly(2, {2: S(1, terms, **kw)})


x1 = X[0]
WHITNEY = quad({((2,), 1): -1})
LINE_PAIR = quad({((2,), 0): -1})
UNIT_PAIR = quad({((2,), 0): -1, ((2,), 1): -1})
QPOLE = quad({((2,), 2): -1, ((3,), 1): -1})


def same_alpha_beta(f, g):
    return all(series_expr(f.a(j), 1) - series_expr(g.a(j), 1) == 0 for j in range(2, f.k + 1))


# -- blow-up charts


def test_homogeneous_is_fixed():
    assert blowup_origin(LINE_PAIR) == LINE_PAIR


def test_whitney_self_similar():
    g = blowup_chart(WHITNEY, 1)
    assert g == WHITNEY
    # oracle: substitute x -> w x, z -> w z and divide by w^2
    assert sp.expand(blowup_pullback(WHITNEY, 1) / W**2 - weierstrass_expr(g, 1)) == 0


def test_unit_pair_fixed():
    g = blowup_chart(UNIT_PAIR, 1)
    assert sp.expand(blowup_pullback(UNIT_PAIR, 1) / W**2 - weierstrass_expr(g, 1)) == 0
    assert g == UNIT_PAIR


def test_not_order_k():
    f = WeierstrassPoly(2, {2: S(1, {((1,), 0): -1})})
    with pytest.raises(NotOrderK):
        blowup_origin(f)


def test_bad_chart_index():
    with pytest.raises(InvalidParams):
        blowup_chart(WHITNEY, 2)


def test_two_w_variables():
    c = PuiseuxSeries(1, 0, 2, 1, None, {(1, 0, 2): -1})
    f = WeierstrassPoly(2, {2: c}, r=2)
    g = blowup_chart(f, 2)
    # -w1 x^2 -> -w1 w2^2 x^2 / w2^2
    assert g.a(2).terms == {(1, 0, 2): -1}
    with pytest.raises(MultipleWVariables):
        blowup_origin(f)
    with pytest.raises(MultipleWVariables):
        rescale_q(f, 1)


# -- ramification


def test_ramify_identity_and_relabel():
    assert ramify(WHITNEY, 1) == WHITNEY
    g = ramify(WHITNEY, 2)
    assert g.p == 2 and g.a(2).terms == {(2, 2): -1}
    assert same_alpha_beta(g, WHITNEY)


def test_ramify_then_square_root():
    g = ramify(WHITNEY, 2)
    b = S(1, {((1,), mpq(1, 2)): 1}, p=2)
    assert -(b * b) == g.a(2)


def test_ramify_composes():
    f = random_instance(5, k=3, p_star=2).poly()
    assert ramify(ramify(f, 2), 3).p == ramify(f, 6).p
    assert same_alpha_beta(ramify(ramify(f, 2), 3), ramify(f, 6))


def test_ramify_invalid():
    with pytest.raises(InvalidParams):
        ramify(WHITNEY, 0)


# -- rescaling


def test_rescale_zero():
    assert rescale_q(QPOLE, 0) == QPOLE


def test_rescale_qpole():
    g = rescale_q(QPOLE, 1)
    ref = sp.expand(weierstrass_expr(QPOLE, 1).subs({x1: W * x1, Z: W * Z}, simultaneous=True) / W**2)
    assert sp.expand(weierstrass_expr(g, 1) - ref) == 0
    assert sp.expand(ref - (Z**2 - W**2 * x1**2 - W**2 * x1**3)) == 0
    assert g == blowup_origin(QPOLE)


def test_rescale_homogeneous():
    assert rescale_q(LINE_PAIR, 1) == LINE_PAIR


def test_rescale_equals_repeated_blowups():
    for seed in range(20):
        f = random_instance(seed, k=2 + seed % 2, p_star=1 + seed % 3).poly()
        for q in (1, 2, 3):
            g = f
            for _ in range(q):
                g = blowup_origin(g)
            assert rescale_q(f, q) == g


def test_rescale_uses_up_w_powers():
    f = WeierstrassPoly(3, {2: S(2, {((2, 0), 0): 1}), 3: S(2, {((1, 1), 1): 1})})
    g = rescale_q(f, 1)
    assert series_expr(g.a(3), 1) == x1 * X[1]
    with pytest.raises(NotOrderK):
        rescale_q(WeierstrassPoly(2, {2: S(1, {((1,), 0): 1})}), 1)


# -- logs


def test_empty_log():
    assert replay(TransformLog(), WHITNEY) == WHITNEY


def test_log_blowup():
    log = TransformLog().append("blowup_wj", j=1)
    assert replay(log, WHITNEY) == WHITNEY
    assert log.exceptional == ("w1",)


def test_log_commuting_steps():
    f = random_instance(11, k=3, p_star=1).poly()
    a = TransformLog().append("ramify", p=2).append("blowup_wj", j=1)
    b = TransformLog().append("blowup_wj", j=1).append("ramify", p=2)
    assert replay(a, f) == replay(b, f)


def test_log_json_round_trip():
    log = TransformLog().append("ramify", p=2).append("rescale", q=1).append("blowup_origin")
    obj = json.loads(json.dumps(log.to_json()))
    assert obj["steps"][0] == {"kind": "ramify", "p": 2}
    assert TransformLog.from_json(obj) == log


def test_log_rejects_unknown_step():
    with pytest.raises(InvalidParams):
        TransformLog().append("twist")


# -- properties


def random_order_k(seed):
    k = 2 + seed % 2
    return random_instance(seed, k=k, p_star=1 + seed % 3, max_deg=2).poly()


def test_total_transform_identity():
    # w^k * strict transform equals the pullback f(w z, w x, w), computed independently in sympy
    for seed in range(100):
        f = random_order_k(seed)
        g = blowup_chart(f, 1)
        lhs = W**f.k * weierstrass_expr(g, 24)
        assert is_zero(lhs - blowup_pullback(f, 24), 24), seed


def test_strict_transform_keeps_shape():
    for seed in range(30):
        f = random_order_k(seed)
        g = blowup_origin(f)
        assert assert_form(g)["order_k"]
        assert not g.a(g.k).constant_term()
        assert 1 not in g.coeffs


def test_rescale_matches_sympy_substitution():
    for seed in range(50):
        f = random_order_k(seed)
        g = rescale_q(f, 2)
        ref = weierstrass_expr(f, 24).subs({Z: W**2 * Z, **{X[i]: W**2 * X[i] for i in range(f.nx)}}, simultaneous=True)
        assert is_zero(W ** (2 * f.k) * weierstrass_expr(g, 24) - ref, 24), seed


def test_preset_blowups():
    for name in ("whitney", "qpole", "mu3"):
        f = preset(name).poly()
        assert is_zero(W**f.k * weierstrass_expr(blowup_origin(f), 24) - blowup_pullback(f, 24), 24)
