"""Instances: named presets and seeded random constructions from roots."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .coefficients import u_var, zeta
from .errors import InvalidParams
from .series import PuiseuxSeries
from .splitting import atw_proxy
from .weierstrass import WeierstrassPoly, from_roots, linear_coefficients

MODES = ("roots", "coeffs")


@dataclass
class Instance:
    k: int
    r: int = 1
    s: int = 0
    p: int = 1
    q: int = 0
    trunc: int = 8
    mode: str = "roots"
    payload: object = field(default_factory=list)
    label: str = ""
    seed: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParams("k must be at least 1")
        if self.trunc < self.k:
            raise InvalidParams("trunc must be at least k")
        if self.mode not in MODES:
            raise InvalidParams(f"mode must be one of {MODES}")
        if self.mode == "roots":
            if len(self.payload) != self.k - 1:
                raise InvalidParams("roots mode stores k - 1 roots; the last is minus their sum")
            for b in self.payload:
                if b.constant_term():
                    raise InvalidParams("roots must have zero constant term")

    def poly(self) -> WeierstrassPoly:
        if self.mode == "roots":
            return from_roots(self.payload, s=self.s)[0]
        return WeierstrassPoly(self.k, dict(self.payload), self.r, self.s)

    def all_roots(self) -> list | None:
        if self.mode != "roots":
            return None
        last = self.payload[0].like({}, None)
        for b in self.payload:
            last = last - b
        return list(self.payload) + [last]

    def to_json(self) -> dict:
        if self.mode == "roots":
            payload = [b.to_json() for b in self.payload]
        else:
            payload = {str(j): c.to_json() for j, c in sorted(self.payload.items())}
        return {
            "k": self.k,
            "r": self.r,
            "s": self.s,
            "p": self.p,
            "q": self.q,
            "trunc": self.trunc,
            "mode": self.mode,
            "payload": payload,
            "label": self.label,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj) -> "Instance":
        try:
            k = int(obj["k"])
            r = int(obj.get("r", 1))
            mode = obj.get("mode", "roots")
            fill = {"r": r, "num_x": k - 1}
            if mode == "roots":
                payload = [PuiseuxSeries.from_json({**fill, **b}) for b in obj["payload"]]
            else:
                payload = {int(j): PuiseuxSeries.from_json({**fill, **c}) for j, c in obj["payload"].items()}
            return cls(
                k=k,
                r=r,
                s=int(obj.get("s", 0)),
                p=int(obj.get("p", 1)),
                q=int(obj.get("q", 0)),
                trunc=int(obj.get("trunc", 8)),
                mode=mode,
                payload=payload,
                label=str(obj.get("label", "")),
                seed=obj.get("seed"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParams):
                raise
            raise InvalidParams(f"malformed instance: {exc}") from exc


def _ser(p, q, nx, terms, r=1):
    return PuiseuxSeries.from_ab(p, q, r, nx, None, terms)


def _x(i, nx):
    e = [0] * nx
    e[i] = 1
    return tuple(e)


# --------------------------------------------------------------------------
# presets


def preset(name: str) -> Instance:
    if name == "whitney":
        b = _ser(2, 0, 1, {((1,), mpq(1, 2)): 1})
        return Instance(k=2, p=2, payload=[b], label="whitney")
    if name == "nc3":
        return Instance(k=3, payload=[_ser(1, 0, 2, {((1, 0), 0): 1}), _ser(1, 0, 2, {((0, 1), 0): 1})], label="nc3")
    if name == "qpole":
        a2 = _ser(1, 0, 1, {((2,), 2): -1, ((3,), 1): -1})
        return Instance(k=2, q=1, mode="coeffs", payload={2: a2}, label="qpole")
    if name == "mu3":
        a3 = _ser(1, 0, 2, {((3, 0), 1): 1})
        return Instance(k=3, p=3, mode="coeffs", payload={3: a3}, label="mu3")
    if name == "sqrt1w":
        a2 = _ser(1, 0, 1, {((2,), 0): -1, ((2,), 1): -1})
        return Instance(k=2, mode="coeffs", payload={2: a2}, label="sqrt1w")
    raise InvalidParams(f"unknown preset {name!r}")


PRESETS = ("whitney", "nc3", "qpole", "mu3", "sqrt1w")


# --------------------------------------------------------------------------
# random constructions


_SMALL = [mpq(c) for c in (-3, -2, -1, 1, 2, 3)] + [mpq(1, 2), mpq(-1, 2), mpq(3, 2), mpq(1, 3)]


def _coeff(rng: random.Random, s: int):
    c = rng.choice(_SMALL)
    if s and rng.random() < 0.4:
        c = c + rng.choice(_SMALL) * u_var(1, s)
    return c


def _monomials(nx: int, max_total: int):
    out = []

    def rec(i, rem, cur):
        if i == nx:
            out.append(tuple(cur))
            return
        for a in range(rem + 1):
            rec(i + 1, rem - a, cur + [a])

    rec(0, max_total, [])
    return [al for al in out if sum(al) >= 1]


def _orbit_generator(rng, nx, o, s, max_deg, avoid_zero_mod):
    """Terms {(alpha, e): c} of C(t, x) with t = w^(1/o)."""
    terms = {}
    # a linear term carrying t^e with gcd(e, o) = 1 makes the orbit have size o
    j = rng.randrange(nx)
    e0 = 1
    terms[(_x(j, nx), e0)] = _coeff(rng, s)
    for al in _monomials(nx, max_deg):
        for e in range(0, max_deg - sum(al) + 1):
            if avoid_zero_mod and e % o == 0:
                continue
            if rng.random() < 0.25:
                terms[(al, e)] = terms.get((al, e), 0) + _coeff(rng, s)
    return {key: c for key, c in terms.items() if c}


def _fixed_root(rng, nx, s, max_deg, linear_const=True):
    terms = {}
    for j in range(nx):
        if linear_const or rng.random() < 0.7:
            terms[(_x(j, nx), 0)] = _coeff(rng, s)
    for al in _monomials(nx, max_deg):
        for e in range(0, max_deg - sum(al) + 1):
            if (sum(al), e) != (1, 0) and rng.random() < 0.2:
                terms[(al, e)] = terms.get((al, e), 0) + _coeff(rng, s)
    return {key: c for key, c in terms.items() if c}


def _partitions(k, sizes):
    if k == 0:
        return [[]]
    out = []
    for o in sizes:
        if o <= k:
            for rest in _partitions(k - o, [x for x in sizes if x <= o]):
                out.append([o] + rest)
    return out


def _linear_parts_distinct(roots) -> bool:
    lin = [linear_coefficients(b) for b in roots]
    if any(all(not c.coeffs for c in row) for row in lin):
        return False
    for i in range(len(lin)):
        for j in range(i + 1, len(lin)):
            if all(not (a - b).coeffs for a, b in zip(lin[i], lin[j])):
                return False
    return True


def random_instance(seed: int, k: int = 2, s: int = 0, p_star: int = 1, q_star: int = 0, max_deg: int = 3, trunc: int = 8, kind: str = "general") -> Instance:
    """Seeded instance built from roots whose set is closed under the mu_{p*} action.

    kind: "general"; "proxy_true" (p* forced to 1, generic constant linear parts);
    "proxy_false" (linear parts degenerate at w = 0 or a ramified orbit).
    """
    if kind not in ("general", "proxy_true", "proxy_false"):
        raise InvalidParams(f"unknown kind {kind!r}")
    if not (1 <= k <= 6 and 0 <= s <= 2 and 1 <= p_star <= 6 and 0 <= q_star <= 3):
        raise InvalidParams("parameters out of range")
    rng = random.Random(seed)
    nx = k - 1
    if k == 1:
        raise InvalidParams("random instances need k >= 2")
    for _ in range(200):
        if kind == "proxy_true":
            roots = [_ser(1, 0, nx, _fixed_root(rng, nx, s, max_deg)) for _ in range(k)]
            roots[-1] = -_sum(roots[:-1])
        elif kind == "proxy_false":
            mode = rng.choice(["wlinear", "orbit", "collide"] if k >= 3 else ["wlinear", "orbit"])
            roots = _proxy_false_roots(rng, k, nx, s, max_deg, mode)
        else:
            sizes = [o for o in range(1, k + 1) if p_star % o == 0]
            part = rng.choice(_partitions(k, sorted(sizes, reverse=True)))
            roots = _roots_from_partition(rng, part, nx, s, max_deg)
        if roots is None:
            continue
        if any(b.constant_term() for b in roots):
            continue
        if not _linear_parts_distinct(roots):
            continue
        enc_q = q_star if kind == "general" else 0
        p = math.lcm(*(b.p for b in roots))
        payload = [b.promote(p, enc_q) for b in roots[:-1]]
        inst = Instance(k=k, s=s, p=p, q=enc_q, trunc=trunc, payload=payload, label=f"random-{kind}", seed=seed)
        if kind != "general":
            flags = atw_proxy(inst.poly())
            holds = flags["order"] == k and flags["lowest_is_xz"] and flags["lowest_nc"]
            if holds != (kind == "proxy_true"):
                continue
        return inst
    raise InvalidParams("could not draw an instance with distinct linear parts")


def _sum(roots):
    acc = roots[0].like({}, None)
    for b in roots:
        acc = acc + b
    return acc


def _roots_from_partition(rng, part, nx, s, max_deg):
    roots = []
    fixed = [o for o in part if o == 1]
    orbits = [o for o in part if o > 1]
    full_orbit = not fixed
    for o in orbits:
        C = _orbit_generator(rng, nx, o, s, max_deg, avoid_zero_mod=full_orbit)
        eps = zeta(o)
        for j in range(o):
            terms = {(al, mpq(e, o)): c * eps ** ((j * e) % o) if (j * e) % o else c for (al, e), c in C.items()}
            roots.append(_ser(o, 0, nx, terms))
    for _ in fixed[:-1]:
        roots.append(_ser(1, 0, nx, _fixed_root(rng, nx, s, max_deg)))
    if fixed:
        roots.append(-_sum(roots) if roots else None)
        if roots[-1] is None:
            return None
    elif not _sum(roots).is_zero():
        return None
    return roots


def _proxy_false_roots(rng, k, nx, s, max_deg, mode):
    if mode == "orbit":
        return _roots_from_partition(rng, [k] if k in (2, 3) else [2] + [1] * (k - 2), nx, s, max_deg)
    roots = [_ser(1, 0, nx, _fixed_root(rng, nx, s, max_deg)) for _ in range(k - 1)]
    if mode == "wlinear":
        w = roots[0].like({(1,) + (0,) * nx: mpq(1)}, None)
        i = rng.randrange(k - 1)
        lin = roots[i].like({e: c for e, c in roots[i].terms.items() if sum(e[1:]) == 1 and e[0] == 0}, None)
        roots[i] = roots[i] - lin + lin * w
    else:
        # two roots share their linear part at w = 0 and differ at order w
        base = roots[0]
        j = rng.randrange(nx)
        roots[1] = base + base.like({(1,) + _x(j, nx): _coeff(rng, s)}, None)
    roots.append(-_sum(roots))
    return roots
