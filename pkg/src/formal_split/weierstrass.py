"""Monic polynomials z^k + a_2 z^(k-2) + ... + a_k over PuiseuxSeries, and root systems."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from gmpy2 import mpq

from .coefficients import from_json as coeff_from_json, to_json as coeff_to_json
from .errors import DegenerateLinearPart, DimensionMismatch, IndexOutOfRange, NonzeroConstantTerm
from .series import LaurentSeries, PuiseuxSeries


def _common_encoding(series: Sequence[PuiseuxSeries]):
    p = math.lcm(*(s.p for s in series)) if series else 1
    q = max((s.q for s in series), default=0)
    return p, q


class WeierstrassPoly:
    """f = z^k + sum_{j>=2} a_j z^(k-j); a_1 has no slot on purpose."""

    __slots__ = ("k", "coeffs", "r", "s")

    def __init__(self, k: int, coeffs: Mapping[int, PuiseuxSeries], r: int = 1, s: int = 0):
        if k < 1:
            raise ValueError("degree must be at least 1")
        for j in coeffs:
            if not 2 <= j <= k:
                raise IndexOutOfRange(f"coefficient index {j} outside 2..{k}")
        items = list(coeffs.values())
        for c in items:
            if (c.r, c.nx) != (r, k - 1):
                raise DimensionMismatch("coefficients must live in (w_1..w_r; x_1..x_{k-1})")
        p, q = _common_encoding(items)
        self.k, self.r, self.s = k, r, s
        zero = PuiseuxSeries(p, q, r, k - 1, None, {})
        self.coeffs = {j: (coeffs[j].promote(p, q) if j in coeffs else zero) for j in range(2, k + 1)}

    @property
    def nx(self):
        return self.k - 1

    @property
    def p(self):
        return self.coeffs[2].p if self.k >= 2 else 1

    @property
    def q(self):
        return self.coeffs[2].q if self.k >= 2 else 0

    @property
    def trunc(self):
        ts = [c.trunc for c in self.coeffs.values() if c.trunc is not None]
        return min(ts) if ts else None

    def a(self, j: int) -> PuiseuxSeries:
        if j == 0:
            return self.template().like({(0,) * (self.r + self.nx): mpq(1)}, None)
        if j == 1:
            return self.template()
        if j in self.coeffs:
            return self.coeffs[j]
        raise IndexOutOfRange(f"no coefficient a_{j}")

    def template(self) -> PuiseuxSeries:
        return PuiseuxSeries(self.p, self.q, self.r, self.nx, None, {})

    def map(self, fn) -> "WeierstrassPoly":
        return WeierstrassPoly(self.k, {j: fn(c) for j, c in self.coeffs.items()}, self.r, self.s)

    def promote(self, p=None, q=None) -> "WeierstrassPoly":
        return self.map(lambda c: c.promote(p, q))

    def truncate(self, n) -> "WeierstrassPoly":
        return self.map(lambda c: c.truncate(n))

    def eval_z(self, y: PuiseuxSeries) -> PuiseuxSeries:
        """f(z = y) by Horner."""
        acc = self.a(0)
        for j in range(1, self.k + 1):
            acc = acc * y + self.a(j)
        return acc

    def equal_mod(self, other: "WeierstrassPoly", n=None) -> bool:
        if self.k != other.k:
            return False
        for j in range(2, self.k + 1):
            d = self.coeffs[j] - other.coeffs[j]
            if n is not None:
                d = d.truncate(n)
            if not d.is_zero():
                return False
        return True

    def __eq__(self, other):
        if isinstance(other, WeierstrassPoly):
            return self.equal_mod(other)
        return NotImplemented

    __hash__ = None

    def to_json(self) -> dict:
        return {"k": self.k, "r": self.r, "s": self.s, "a": {str(j): c.to_json() for j, c in self.coeffs.items()}}

    @classmethod
    def from_json(cls, obj) -> "WeierstrassPoly":
        k = int(obj["k"])
        r = int(obj.get("r", 1))
        fixed = {int(j): PuiseuxSeries.from_json({"r": r, "num_x": k - 1, **c}) for j, c in obj["a"].items()}
        return cls(k, fixed, r, int(obj.get("s", 0)))

    def __repr__(self):
        parts = [f"z^{self.k}"]
        for j, c in self.coeffs.items():
            if c:
                parts.append(f"({c})*z^{self.k - j}")
        return " + ".join(parts)


def elementary_symmetric(j: int, values: Sequence[PuiseuxSeries]) -> PuiseuxSeries:
    n = len(values)
    if not 0 <= j <= n:
        raise IndexOutOfRange(f"sigma_{j} of {n} values")
    if n == 0:
        raise IndexOutOfRange("need at least one value to fix the ring")
    one = values[0].like({(0,) * (values[0].r + values[0].nx): mpq(1)}, None)
    zero = values[0].like({}, None)
    e = [one] + [zero] * j
    for b in values:
        for m in range(j, 0, -1):
            e[m] = e[m] + e[m - 1] * b
    return e[j]


def tschirnhaus_normalize(g: Sequence[PuiseuxSeries], r: int = 1, s: int = 0):
    """Normalize z^k + g[0] z^(k-1) + ... + g[k-1]; returns (WeierstrassPoly, shift).

    The substitution is z -> z - shift with shift = g[0]/k.
    """
    k = len(g)
    shift = g[0] * mpq(1, k)
    # coefficients c_0 = 1, c_1..c_k of g in z
    c = [g[0].like({(0,) * (g[0].r + g[0].nx): mpq(1)}, None)] + list(g)
    out = [g[0].like({}, None) for _ in range(k + 1)]
    neg = -shift
    for j in range(k + 1):
        m = k - j  # c_j (z - shift)^m
        pw = c[0].like(c[0].terms, None)
        for i in range(m + 1):
            # term binom(m, i) z^(m-i) (-shift)^i contributes to index j + i
            out[j + i] = out[j + i] + c[j] * pw * math.comb(m, i)
            pw = pw * neg
    coeffs = {j: out[j] for j in range(2, k + 1)}
    return WeierstrassPoly(k, coeffs, r, s), shift


# --------------------------------------------------------------------------


@dataclass
class RootSystem:
    roots: list
    p: int
    q: int
    bij: list = field(default_factory=list)
    d: list = field(default_factory=list)
    btilde: list = field(default_factory=list)

    @classmethod
    def build(cls, roots: Sequence[PuiseuxSeries]) -> "RootSystem":
        p, q = _common_encoding(roots)
        roots = [b.promote(p, q) for b in roots]
        bij = [linear_coefficients(b) for b in roots]
        d, bt = [], []
        for row in bij:
            known = [c for c in row if c.coeffs]
            if not known:
                raise DegenerateLinearPart("root has no visible linear x-part at this truncation")
            di = min(c.lead()[0] for c in known)
            d.append(di)
            bt.append([c.shift(-di) for c in row])
        return cls(list(roots), p, q, bij, d, bt)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "roots": [b.to_json() for b in self.roots],
            "d": list(self.d),
            "bij": [[laurent_to_json(c, self.p) for c in row] for row in self.bij],
        }


def linear_coefficients(b: PuiseuxSeries) -> list[LaurentSeries]:
    """b_ij as Laurent series in v = w^(1/p) (r = 1): coefficient of x_j in b."""
    if b.r != 1:
        raise DimensionMismatch("linear data is defined for a single w variable")
    shift = b.p * b.q
    prec = None if b.trunc is None else b.trunc - shift
    rows = [dict() for _ in range(b.nx)]
    for e, c in b.terms.items():
        al = e[1:]
        if sum(al) == 1:
            rows[al.index(1)][e[0] - shift] = c
    return [LaurentSeries(rw, prec) for rw in rows]


def laurent_to_json(c: LaurentSeries, p: int) -> dict:
    return {
        "p": p,
        "prec": c.prec,
        "terms": [{"c": coeff_to_json(v), "beta_num": [n]} for n, v in sorted(c.coeffs.items())],
    }


def laurent_from_json(obj) -> LaurentSeries:
    return LaurentSeries({t["beta_num"][0]: coeff_from_json(t["c"]) for t in obj["terms"]}, obj.get("prec"))


def from_roots(roots: Sequence[PuiseuxSeries], s: int = 0):
    """f = prod(z + b_i) with b_k = -(b_1 + ... + b_{k-1})."""
    roots = list(roots)
    for b in roots:
        if b.constant_term():
            raise NonzeroConstantTerm("roots must vanish at the origin")
    p, q = _common_encoding(roots)
    roots = [b.promote(p, q) for b in roots]
    last = roots[0].like({}, None)
    for b in roots:
        last = last - b
    allr = roots + [last]
    k = len(allr)
    coeffs = {j: elementary_symmetric(j, allr) for j in range(2, k + 1)}
    f = WeierstrassPoly(k, coeffs, roots[0].r, s)
    return f, RootSystem.build(allr) if roots[0].r == 1 else RootSystem(allr, p, q)


def assert_form(f: WeierstrassPoly) -> dict:
    in_ideal = f.a(f.k).valuation("x_only") >= 1 if f.k >= 2 else True
    order_k = all(f.a(j).valuation("x_only") >= j for j in range(2, f.k + 1))
    return {"in_ideal": bool(in_ideal), "order_k": bool(order_k)}


def product_of_linear(roots: Sequence[PuiseuxSeries]) -> list[PuiseuxSeries]:
    """Coefficients [1, sigma_1, ..., sigma_k] of prod(z + b_i)."""
    return [elementary_symmetric(j, roots) for j in range(len(roots) + 1)]
