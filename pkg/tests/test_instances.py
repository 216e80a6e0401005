import json

import pytest
import sympy as sp

from formal_split.errors import InvalidParams
from formal_split.instances import PRESETS, Instance, preset, random_instance
from formal_split.splitting import atw_proxy
from formal_split.weierstrass import assert_form
from oracles import W, X, Z, weierstrass_expr

x1, x2 = X[0], X[1]

EXPECTED = {
    "whitney": Z**2 - W * x1**2,
    "nc3": sp.expand((Z + x1) * (Z + x2) * (Z - x1 - x2)),
    "qpole": Z**2 - x1**2 * W**2 - x1**3 * W,
    "mu3": Z**3 + W * x1**3,
    "sqrt1w": Z**2 - x1**2 * (1 + W),
}


@pytest.mark.parametrize("name", PRESETS)
def test_preset_polynomials(name):
    f = preset(name).poly()
    assert sp.expand(weierstrass_expr(f, 1) - EXPECTED[name]) == 0
    assert assert_form(f)["order_k"]


def test_unknown_preset():
    with pytest.raises(InvalidParams):
        preset("nope")


@pytest.mark.parametrize("kind", ["general", "proxy_true", "proxy_false"])
def test_random_is_deterministic(kind):
    for seed in range(5):
        a = random_instance(seed, k=3, kind=kind).to_json()
        b = random_instance(seed, k=3, kind=kind).to_json()
        assert a == b


def test_roots_sum_to_zero():
    for seed in range(30):
        inst = random_instance(seed, k=2 + seed % 3, s=seed % 2, p_star=1 + seed % 3, q_star=seed % 2)
        total = inst.all_roots()[0].like({}, None)
        for b in inst.all_roots():
            total = total + b
        assert total.is_zero()


def test_proxy_kinds():
    for seed in range(20):
        k = 2 + seed % 2
        flags = atw_proxy(random_instance(seed, k=k, kind="proxy_true").poly())
        assert flags == {"order": k, "lowest_is_xz": True, "lowest_nc": True}
        flags = atw_proxy(random_instance(seed, k=k, kind="proxy_false").poly())
        assert not (flags["order"] == k and flags["lowest_is_xz"] and flags["lowest_nc"])


def test_json_round_trip():
    for inst in [preset(n) for n in PRESETS] + [random_instance(s, k=3, p_star=2, q_star=1) for s in range(5)]:
        back = Instance.from_json(json.loads(json.dumps(inst.to_json())))
        assert back.to_json() == inst.to_json()
        assert back.poly() == inst.poly()


def test_instance_validation():
    with pytest.raises(InvalidParams):
        Instance(k=0)
    with pytest.raises(InvalidParams):
        Instance(k=3, trunc=2)
    with pytest.raises(InvalidParams):
        Instance(k=3, payload=[])
    with pytest.raises(InvalidParams):
        Instance.from_json({"k": 2, "payload": [{"terms": 5}]})
