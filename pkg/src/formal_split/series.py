"""Truncated Puiseux-Laurent series in (w_1..w_r; x_1..x_n) and helpers.

A :class:`PuiseuxSeries` with parameters (p, q) is stored in the variables
(v_1..v_r, x'_1..x'_n) where w_j = v_j^p and x_i = (v_1...v_r)^(pq) x'_i.  A
stored monomial v^a x'^alpha stands for x^alpha w^beta with
beta_j = (a_j - p q |alpha|) / p, so the pole bound beta_j >= -q|alpha| is just
a_j >= 0.  Truncation keeps internal total degree sum(a) + |alpha| <= trunc;
``trunc=None`` marks an exact (polynomial) series.

:class:`LaurentSeries` is a one-variable series in v with tracked absolute
precision; forms (dicts alpha -> LaurentSeries) are used by the root lifter.
"""
from __future__ import annotations

import itertools

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .coefficients import coerce, from_json, to_json
from .errors import (
    CoefficientNotInvertible,
    DimensionMismatch,
    NotAUnit,
    NotDivisible,
    TruncationInsufficient,
    TruncationLoss,
    ZeroSeries,
)

INF = math.inf


def _min_trunc(*ts):
    vals = [t for t in ts if t is not None]
    return min(vals) if vals else None


def _le(deg, trunc) -> bool:
    return trunc is None or deg <= trunc


# --------------------------------------------------------------------------
# support order


@dataclass(frozen=True)
class ExpPair:
    """Exponent (alpha, beta) of x^alpha w^beta."""

    alpha: tuple
    beta: tuple

    def key(self):
        return support_key(self.alpha, self.beta)


def support_key(alpha, beta):
    """(|alpha| + sum(beta), |alpha|, alpha, beta); ascending is the support order."""
    na = sum(alpha)
    return (na + sum(beta, mpq(0)), na, tuple(alpha), tuple(beta))


def compare_support(a: ExpPair, b: ExpPair) -> str:
    if len(a.alpha) != len(b.alpha) or len(a.beta) != len(b.beta):
        raise DimensionMismatch("exponent pairs of different shapes")
    ka, kb = a.key(), b.key()
    if ka < kb:
        return "less"
    if ka > kb:
        return "greater"
    return "equal"


# --------------------------------------------------------------------------


class PuiseuxSeries:
    __slots__ = ("p", "q", "r", "nx", "trunc", "terms")

    def __init__(self, p: int, q: int, r: int, nx: int, trunc, terms: Mapping | None = None, *, _clean=True):
        if p < 1 or q < 0:
            raise ValueError("need p >= 1 and q >= 0")
        self.p, self.q, self.r, self.nx = p, q, r, nx
        self.trunc = trunc
        if terms is None:
            terms = {}
        if _clean:
            out = {}
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != r + nx:
                    raise DimensionMismatch("exponent tuple has the wrong length")
                if min(e, default=0) < 0:
                    raise ValueError("exponent below the pole bound")
                if not _le(sum(e), trunc):
                    continue
                c = coerce(c)
                if c:
                    out[e] = c
            terms = out
        self.terms = terms

    # -- constructors
    @classmethod
    def zero(cls, p=1, q=0, r=1, nx=1, trunc=None):
        return cls(p, q, r, nx, trunc, {})

    @classmethod
    def const(cls, c, p=1, q=0, r=1, nx=1, trunc=None):
        return cls(p, q, r, nx, trunc, {(0,) * (r + nx): c})

    @classmethod
    def from_ab(cls, p: int, q: int, r: int, nx: int, trunc, terms: Mapping | Iterable):
        """Build from {(alpha, beta): c}; beta entries are rationals with denominator dividing p."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        raw: dict = {}
        for (alpha, beta), c in items:
            alpha = tuple(int(x) for x in alpha)
            if isinstance(beta, (int, mpq().__class__)) or not hasattr(beta, "__len__"):
                beta = (beta,)
            if len(alpha) != nx or len(beta) != r:
                raise DimensionMismatch("exponent pair does not match (r, nx)")
            na = sum(alpha)
            a = []
            for b in beta:
                pb = mpq(b) * p
                if pb.denominator != 1:
                    raise ValueError(f"w-exponent {b} is not a multiple of 1/{p}")
                a.append(int(pb) + p * q * na)
            e = tuple(a) + alpha
            raw[e] = raw.get(e, 0) + coerce(c)
        return cls(p, q, r, nx, trunc, raw)

    def like(self, terms, trunc="same"):
        return PuiseuxSeries(self.p, self.q, self.r, self.nx, self.trunc if trunc == "same" else trunc, terms)

    def _new(self, terms, trunc):
        return PuiseuxSeries(self.p, self.q, self.r, self.nx, trunc, terms, _clean=False)

    # -- views
    def ab(self, e):
        a, alpha = e[: self.r], e[self.r :]
        na = sum(alpha)
        shift = self.p * self.q * na
        return tuple(alpha), tuple(mpq(x - shift, self.p) for x in a)

    def ab_terms(self):
        """[(ExpPair, coeff)] ascending in the support order."""
        out = [(ExpPair(*self.ab(e)), c) for e, c in self.terms.items()]
        out.sort(key=lambda t: t[0].key())
        return out

    def is_exact(self) -> bool:
        return self.trunc is None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * (self.r + self.nx), mpq(0))

    # -- encoding changes
    def promote(self, p: int | None = None, q: int | None = None) -> "PuiseuxSeries":
        """Re-encode with p' (a multiple of p) and q' >= q; precision is preserved."""
        p2 = self.p if p is None else p
        q2 = self.q if q is None else q
        if p2 % self.p or q2 < self.q:
            raise ValueError("can only promote to a multiple of p and a larger q")
        if p2 == self.p and q2 == self.q:
            return self
        m = p2 // self.p
        dq = p2 * (q2 - self.q)
        r = self.r
        out = {}
        for e, c in self.terms.items():
            na = sum(e[r:])
            e2 = tuple(m * x + dq * na for x in e[:r]) + e[r:]
            if _le(sum(e2), self.trunc):
                out[e2] = c
        return PuiseuxSeries(p2, q2, r, self.nx, self.trunc, out, _clean=False)

    def normalized(self) -> "PuiseuxSeries":
        """Smallest (p, q) encoding; only exact series can be demoted."""
        if self.trunc is not None:
            raise TruncationInsufficient("only exact series can be demoted to a smaller encoding")
        if not self.terms:
            return PuiseuxSeries(1, 0, self.r, self.nx, None, {})
        pairs = [self.ab(e) for e in self.terms]
        p = 1
        for _, beta in pairs:
            for b in beta:
                p = math.lcm(p, b.denominator)
        q = 0
        for alpha, beta in pairs:
            na = sum(alpha)
            for b in beta:
                if b < 0:
                    q = max(q, math.ceil(-b / na))
        return PuiseuxSeries.from_ab(p, q, self.r, self.nx, None, {ab: c for ab, c in zip(pairs, self.terms.values())})

    def truncate(self, n) -> "PuiseuxSeries":
        n = _min_trunc(n, self.trunc)
        return self._new({e: c for e, c in self.terms.items() if _le(sum(e), n)}, n)

    # -- arithmetic
    def _align(self, other):
        if not isinstance(other, PuiseuxSeries):
            c = coerce(other)
            return self, self._new({(0,) * (self.r + self.nx): c} if c else {}, None)
        if (self.r, self.nx) != (other.r, other.nx):
            raise DimensionMismatch("series over different variable sets")
        p = math.lcm(self.p, other.p)
        q = max(self.q, other.q)
        return self.promote(p, q), other.promote(p, q)

    def __add__(self, other):
        a, b = self._align(other)
        t = _min_trunc(a.trunc, b.trunc)
        out = dict(a.terms) if t == a.trunc else {e: c for e, c in a.terms.items() if _le(sum(e), t)}
        for e, c in b.terms.items():
            if not _le(sum(e), t):
                continue
            v = out.get(e)
            v = c if v is None else v + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return a._new(out, t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            c = coerce(other)
            if not c:
                return self._new({}, self.trunc)
            return self._new({e: x * c for e, x in self.terms.items()}, self.trunc)
        a, b = self._align(other)
        va, vb = a.valuation("internal"), b.valuation("internal")
        # precision of a product: unknown parts of one factor times the other's valuation
        cands = []
        if a.trunc is not None:
            cands.append(a.trunc + (vb if vb != INF else b.trunc + 1 if b.trunc is not None else INF))
        if b.trunc is not None:
            cands.append(b.trunc + (va if va != INF else a.trunc + 1 if a.trunc is not None else INF))
        t = None
        if cands:
            t = min(cands)
            t = None if t == INF else int(t)
        return a._new(_mul_terms(a.terms, b.terms, t), t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self._new({(0,) * (self.r + self.nx): mpq(1)}, None)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, PuiseuxSeries):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def equal_mod(self, other, n) -> bool:
        return (self - other).truncate(n).is_zero()

    # -- gradings
    def valuation(self, grading: str = "internal"):
        if not self.terms:
            return INF
        if grading == "internal":
            return min(sum(e) for e in self.terms)
        if grading == "x_only":
            return min(sum(e[self.r :]) for e in self.terms)
        if grading == "xz_total":
            return min(sum(al) + sum(be, mpq(0)) for al, be in (self.ab(e) for e in self.terms))
        raise ValueError(f"unknown grading {grading!r}")

    def support_min(self) -> ExpPair:
        if not self.terms:
            raise ZeroSeries("support of the zero series is empty")
        return min((ExpPair(*self.ab(e)) for e in self.terms), key=ExpPair.key)

    def x_part(self, d: int) -> dict:
        """Homogeneous x'-degree-d part as {(a, alpha): c}."""
        r = self.r
        return {e: c for e, c in self.terms.items() if sum(e[r:]) == d}

    def form(self, d: int) -> dict:
        """Degree-d part in x' as a form alpha -> LaurentSeries in v (requires r = 1)."""
        if self.r != 1:
            raise DimensionMismatch("forms need a single w variable")
        prec = None if self.trunc is None else self.trunc - d + 1
        out: dict = {}
        for e, c in self.terms.items():
            if sum(e[1:]) == d:
                out.setdefault(e[1:], {})[e[0]] = c
        return {al: LaurentSeries(cs, prec) for al, cs in out.items()}

    # -- inversion and substitution
    def invert_unit(self, trunc=None) -> "PuiseuxSeries":
        c0 = self.constant_term()
        if not c0:
            raise NotAUnit("constant term vanishes")
        n = _min_trunc(self.trunc, trunc)
        if n is None:
            if len(self.terms) == 1:
                return self._new({(0,) * (self.r + self.nx): 1 / c0}, None)
            raise TruncationInsufficient("inverse of a non-monomial exact series needs a truncation order")
        by_deg: dict = {}
        for e, c in self.terms.items():
            d = sum(e)
            if 0 < d <= n:
                by_deg.setdefault(d, []).append((e, c))
        inv0 = 1 / c0
        g_by_deg: list[dict] = [{(0,) * (self.r + self.nx): inv0}]
        for d in range(1, n + 1):
            acc: dict = {}
            for e_deg in range(1, d + 1):
                fe = by_deg.get(e_deg)
                if not fe:
                    continue
                for e1, c1 in fe:
                    for e2, c2 in g_by_deg[d - e_deg].items():
                        k = tuple(x + y for x, y in zip(e1, e2))
                        acc[k] = acc.get(k, 0) + c1 * c2
            g_by_deg.append({k: -v * inv0 for k, v in acc.items() if v})
        out = {}
        for part in g_by_deg:
            out.update(part)
        return self._new(out, n)

    def variables(self) -> list[str]:
        return [f"v{j + 1}" for j in range(self.r)] + [f"x{i + 1}" for i in range(self.nx)]

    def gen(self, name: str) -> "PuiseuxSeries":
        """The internal variable ``name`` (v1.., x1..; 'v' and 'x' alias v1 and x1) as an exact series."""
        names = self.variables()
        name = {"v": "v1", "x": "x1"}.get(name, name)
        if name not in names:
            raise DimensionMismatch(f"no variable {name}")
        e = [0] * (self.r + self.nx)
        e[names.index(name)] = 1
        return self._new({tuple(e): mpq(1)}, None)

    def map_coefficients(self, fn: Callable) -> "PuiseuxSeries":
        return self.like({e: fn(c) for e, c in self.terms.items()})

    def to_json(self) -> dict:
        terms = []
        for e, c in self.terms.items():
            alpha, beta = self.ab(e)
            terms.append((support_key(alpha, beta), {"c": to_json(c), "alpha": list(alpha), "beta_num": [int(b * self.p) for b in beta]}))
        terms.sort(key=lambda t: t[0])
        return {"p": self.p, "q": self.q, "r": self.r, "num_x": self.nx, "trunc": self.trunc, "terms": [t for _, t in terms]}

    @classmethod
    def from_json(cls, obj) -> "PuiseuxSeries":
        p, q = int(obj["p"]), int(obj["q"])
        terms = obj["terms"]
        nx = int(obj.get("num_x", len(terms[0]["alpha"]) if terms else 1))
        r = int(obj.get("r", len(terms[0]["beta_num"]) if terms else 1))
        data = {}
        for t in terms:
            data[(tuple(t["alpha"]), tuple(mpq(b, p) for b in t["beta_num"]))] = from_json(t["c"])
        return cls.from_ab(p, q, r, nx, obj.get("trunc"), data)

    def __repr__(self):
        parts = []
        for ep, c in self.ab_terms():
            mono = "*".join(
                [f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(ep.alpha) if k]
                + [("w" if self.r == 1 else f"w{j + 1}") + (f"^({b})" if b != 1 else "") for j, b in enumerate(ep.beta) if b]
            )
            cs = f"({c})" if " " in str(c) else f"{c}"
            parts.append(f"{cs}*{mono}" if mono else cs)
        body = " + ".join(parts) if parts else "0"
        tail = "" if self.trunc is None else f" + O({self.trunc + 1})"
        return f"PS[p={self.p},q={self.q}]({body}{tail})"


def _mul_terms(ta: dict, tb: dict, trunc) -> dict:
    if not ta or not tb:
        return {}
    out: dict = {}
    if trunc is None:
        for e1, c1 in ta.items():
            for e2, c2 in tb.items():
                k = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(k)
                out[k] = c1 * c2 if v is None else v + c1 * c2
    else:
        lb = sorted(((sum(e), e, c) for e, c in tb.items()), key=lambda t: t[0])
        for e1, c1 in ta.items():
            d1 = sum(e1)
            room = trunc - d1
            if room < 0:
                continue
            for d2, e2, c2 in lb:
                if d2 > room:
                    break
                k = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(k)
                out[k] = c1 * c2 if v is None else v + c1 * c2
    return {k: v for k, v in out.items() if v}


def substitute(f: PuiseuxSeries, assignment: Mapping[str, PuiseuxSeries], target: PuiseuxSeries | None = None) -> PuiseuxSeries:
    """Compose: replace internal variables of f by series (all over one encoding).

    Variables not in ``assignment`` map to the same-named variable of the target.
    Precision: if f is truncated, every image must have positive internal order.
    """
    names = f.variables()
    alias = {"v": "v1", "x": "x1", "w": "v1"}
    assignment = {alias.get(k, k): v for k, v in assignment.items()}
    for k in assignment:
        if k not in names:
            raise DimensionMismatch(f"f has no variable {k}")
    if target is None:
        if not assignment:
            return f
        target = next(iter(assignment.values()))
    images = []
    for nm in names:
        if nm in assignment:
            img = assignment[nm]
        else:
            img = target.gen(nm)
        if (img.r, img.nx) != (target.r, target.nx):
            raise DimensionMismatch("images over different variable sets")
        images.append(img)
    p = math.lcm(*(i.p for i in images), target.p)
    q = max(max(i.q for i in images), target.q)
    images = [i.promote(p, q) for i in images]
    orders = [i.valuation("internal") for i in images]
    used = [any(e[j] for e in f.terms) for j in range(len(names))]
    trunc = _min_trunc(*(i.trunc for i, u in zip(images, used) if u))
    if f.trunc is not None:
        mo = min((o for o, u in zip(orders, used) if u), default=1)
        if mo == INF:
            mo = 1
        if mo < 1:
            raise TruncationLoss("substituting a series with a constant term into a truncated series")
        trunc = _min_trunc(trunc, (f.trunc + 1) * mo - 1)
    one = PuiseuxSeries(p, q, target.r, target.nx, None, {(0,) * (target.r + target.nx): mpq(1)})
    powers: list[list[PuiseuxSeries]] = [[one] for _ in names]
    total = PuiseuxSeries(p, q, target.r, target.nx, trunc, {})
    for e, c in f.terms.items():
        term = one * c
        for j, k in enumerate(e):
            if k:
                pw = powers[j]
                while len(pw) <= k:
                    pw.append((pw[-1] * images[j]).truncate(trunc))
                term = (term * pw[k]).truncate(trunc)
        total = total + term
    return total.truncate(trunc)


# --------------------------------------------------------------------------
# one-variable Laurent series with tracked precision


class LaurentSeries:
    """sum c_n v^n known modulo v^prec (prec None: exact)."""

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs: Mapping | None = None, prec=None):
        cs = {}
        for n, c in (coeffs or {}).items():
            if prec is not None and n >= prec:
                continue
            if c:
                cs[int(n)] = c
        self.coeffs = cs
        self.prec = prec

    @classmethod
    def const(cls, c, prec=None):
        return cls({0: c}, prec)

    @classmethod
    def O(cls, n):
        return cls({}, n)

    def is_exact(self):
        return self.prec is None

    def known_zero(self):
        """True when no coefficient is known to be nonzero."""
        return not self.coeffs

    def val(self):
        """Valuation if known, else a lower bound (prec), or INF for exact zero."""
        if self.coeffs:
            return min(self.coeffs)
        return INF if self.prec is None else self.prec

    def lead(self):
        n = min(self.coeffs)
        return n, self.coeffs[n]

    def __bool__(self):
        return bool(self.coeffs) or self.prec is not None

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries({0: coerce(other)})
        prec = _min_trunc(self.prec, other.prec)
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return LaurentSeries(out, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({n: -c for n, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            c = coerce(other)
            return LaurentSeries({n: x * c for n, x in self.coeffs.items()}, self.prec)
        va, vb = self.val(), other.val()
        cands = []
        if self.prec is not None:
            cands.append(self.prec + vb)
        if other.prec is not None:
            cands.append(other.prec + va)
        prec = None
        if cands:
            m = min(cands)
            prec = None if m == INF else int(m)
        out: dict = {}
        for n1, c1 in self.coeffs.items():
            for n2, c2 in other.coeffs.items():
                k = n1 + n2
                if prec is not None and k >= prec:
                    continue
                out[k] = out[k] + c1 * c2 if k in out else c1 * c2
        if prec is None and (va == INF or vb == INF):
            return LaurentSeries({}, None)
        return LaurentSeries(out, prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by v^k."""
        return LaurentSeries({n + k: c for n, c in self.coeffs.items()}, None if self.prec is None else self.prec + k)

    def with_prec(self, prec) -> "LaurentSeries":
        return LaurentSeries(self.coeffs, _min_trunc(self.prec, prec))

    def inverse(self, cap=None) -> "LaurentSeries":
        """1/self, known to absolute precision min(derived, cap)."""
        if not self.coeffs:
            raise CoefficientNotInvertible("no known nonzero coefficient")
        v0, c0 = self.lead()
        if self.prec is None and len(self.coeffs) == 1:
            return LaurentSeries({-v0: 1 / c0})
        # 1/(c0 v^v0 (1 + h)) with h of positive order; relative precision prec - v0
        rel = INF if self.prec is None else self.prec - v0
        target = rel - v0
        if cap is not None:
            target = min(target, cap)
        if target == INF:
            raise TruncationInsufficient("inverse of an exact non-monomial needs a cap")
        target = int(target)
        n = target + v0  # number of relative terms needed
        inv0 = 1 / c0
        h = {m - v0: c * inv0 for m, c in self.coeffs.items() if m != v0}
        g = [mpq(1)]
        for d in range(1, max(n, 0)):
            acc = 0
            for e, c in h.items():
                if e <= d:
                    acc = acc + c * g[d - e]
            g.append(-acc)
        return LaurentSeries({d - v0: x * inv0 for d, x in enumerate(g) if x}, target)

    def div(self, other: "LaurentSeries", cap=None) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return self * (1 / coerce(other))
        if not self.coeffs and self.prec is None:
            return LaurentSeries({}, None)
        if not other.coeffs:
            raise CoefficientNotInvertible("divisor has no known nonzero coefficient")
        vb = other.lead()[0]
        # target absolute precision of the quotient
        cands = []
        if self.prec is not None:
            cands.append(self.prec - vb)
        if other.prec is not None:
            cands.append(other.prec - 2 * vb + self.val())
        if cap is not None:
            cands.append(cap)
        t = min(cands) if cands else None
        if other.prec is None and len(other.coeffs) == 1:
            q = self * other.inverse()
            return q.with_prec(t) if t is not None else q
        if t is None:
            raise TruncationInsufficient("division by an exact non-monomial needs a cap")
        inv = other.inverse(cap=int(t) - (self.val() if self.val() != INF else 0))
        return (self * inv).with_prec(int(t))

    def __truediv__(self, other):
        return self.div(other)

    def __eq__(self, other):
        if isinstance(other, LaurentSeries):
            return self.coeffs.keys() == other.coeffs.keys() and all(self.coeffs[n] == other.coeffs[n] for n in self.coeffs) and self.prec == other.prec
        return NotImplemented

    __hash__ = None

    def agrees(self, other: "LaurentSeries") -> bool:
        """Equal as far as both are known."""
        d = self - other
        return not d.coeffs

    def __repr__(self):
        body = " + ".join(f"{c}*v^{n}" for n, c in sorted(self.coeffs.items())) or "0"
        return f"L({body}{'' if self.prec is None else f' + O(v^{self.prec})'})"


# --------------------------------------------------------------------------
# forms: homogeneous x-polynomials with LaurentSeries coefficients


def form_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for al1, c1 in a.items():
        for al2, c2 in b.items():
            k = tuple(x + y for x, y in zip(al1, al2))
            out[k] = out[k] + c1 * c2 if k in out else c1 * c2
    return out


def form_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out[k] + c if k in out else c
    return out


def form_scale(a: dict, c) -> dict:
    return {k: x * c for k, x in a.items()}


def form_min_prec(a: dict):
    ps = [c.prec for c in a.values() if c.prec is not None]
    return min(ps) if ps else None


def _best_lex_order(piv, den):
    """Lex order on a permutation of the variables whose leading divisor coefficient has least valuation.

    Every such order is a monomial order, so division stays exact; a low-valuation
    pivot keeps the series precision that each division step consumes small.
    """
    nx = len(piv[0])
    perms = itertools.permutations(range(nx)) if nx <= 5 else [tuple(range(nx))]
    best = None
    for perm in perms:
        lead = max(piv, key=lambda al: tuple(al[i] for i in perm))
        score = den[lead].val()
        if best is None or score < best[0]:
            best = (score, perm)
    perm = best[1]
    return lambda al: tuple(al[i] for i in perm)


def exact_divide_form(num: dict, den: dict, cap=None) -> dict:
    """Quotient of forms alpha -> LaurentSeries, num = den * quotient.

    Runs the division algorithm for a lex order on permuted variables; a known nonzero
    remainder raises NotDivisible.  Precision is tracked through the
    coefficients; ``cap`` bounds series inversion of non-monomial pivots.
    """
    piv = [al for al, c in den.items() if c.coeffs]
    if not piv:
        raise CoefficientNotInvertible("divisor form has no known nonzero coefficient")
    key = _best_lex_order(piv, den)
    ad = max(piv, key=key)
    cd = den[ad]
    rem = {al: c for al, c in num.items() if c.coeffs or c.prec is not None}
    quot: dict = {}
    while rem:
        mu = max(rem, key=key)
        c = rem.pop(mu)
        shift = tuple(x - y for x, y in zip(mu, ad))
        if min(shift, default=0) < 0:
            if c.coeffs:
                raise NotDivisible("form is not divisible")
            continue
        t = c.div(cd, cap=cap)
        if not t.coeffs and t.prec is None:
            continue
        quot[shift] = quot[shift] + t if shift in quot else t
        for al, dc in den.items():
            if al == ad:
                continue
            k = tuple(x + y for x, y in zip(al, shift))
            prod = -(t * dc)
            rem[k] = rem[k] + prod if k in rem else prod
        # drop entries that are exactly zero
        rem = {k: v for k, v in rem.items() if v.coeffs or v.prec is not None}
    return quot


def series_form_divide(num: PuiseuxSeries, den: PuiseuxSeries) -> PuiseuxSeries:
    """Divide x-homogeneous series (one w variable, common encoding); see exact_divide_form."""
    a, b = num._align(den)
    if a.r != 1:
        raise DimensionMismatch("form division needs a single w variable")
    da = {sum(e[1:]) for e in a.terms}
    db = {sum(e[1:]) for e in b.terms}
    if len(da) > 1 or len(db) != 1:
        raise ValueError("arguments must be homogeneous in x")
    d_num = da.pop() if da else 0
    d_den = db.pop()
    fa = a.form(d_num) if a.terms else {}
    fb = b.form(d_den)
    quot = exact_divide_form(fa, fb)
    dq = d_num - d_den
    terms = {}
    prec = form_min_prec(quot)
    for al, ls in quot.items():
        for n, c in ls.coeffs.items():
            if n < 0:
                raise NotDivisible("quotient leaves the series ring")
            terms[(n,) + al] = c
    trunc = None if prec is None else prec + dq - 1
    return PuiseuxSeries(a.p, a.q, 1, a.nx, trunc, terms)
