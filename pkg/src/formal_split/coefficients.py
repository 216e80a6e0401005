"""Exact coefficient tower: Q, cyclotomic fields Q(zeta_n), and Q(zeta_n)(u_1..u_s).

Rationals are ``gmpy2.mpq``.  Cyclotomic numbers and rational functions are
immutable value objects; every arithmetic result is demoted to the smallest
representation that holds it (a ``Cyclotomic`` with no irrational part becomes
an ``mpq``, a ``FieldElem`` with constant numerator and unit denominator becomes
its coefficient).  Code elsewhere therefore only relies on ``+ - * /``, ``==``
and truthiness.
"""
from __future__ import annotations

import functools
import math
from itertools import product
from typing import Iterable, Sequence

import flint
import gmpy2
import sympy
from gmpy2 import mpq


from .errors import DivisionByZero, IncompatibleOrders, NeedsExtension

Rational = type(mpq(0))

MAX_ORDER = 24


def rational(x) -> mpq:
    """Parse an int, mpq, Fraction or ``"a/b"`` string."""
    if isinstance(x, str):
        if "/" in x:
            a, b = x.split("/")
            return mpq(int(a), int(b))
        return mpq(int(x))
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    if isinstance(x, (int, Rational)):
        return mpq(x)
    # Fraction, sympy and FLINT rationals
    return mpq(int(x.numerator), int(x.denominator))


def rational_str(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# univariate helpers over Q (lists, low degree first)


def _trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def _udivmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    q = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    _trim(a)
    while len(a) >= len(b):
        c = a[-1] / lb
        s = len(a) - len(b)
        q[s] = c
        for i, bi in enumerate(b):
            a[s + i] -= c * bi
        a.pop()
        _trim(a)
    return q, a


def _umul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("order must be positive")
    num = [mpq(-1)] + [mpq(0)] * (n - 1) + [mpq(1)]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _udivmod(num, [mpq(c) for c in cyclotomic_poly(d)])
            assert not _trim(rem)
    return tuple(int(c) for c in num)


def totient(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


def _reduce_mod(c: list, n: int) -> list:
    phi = cyclotomic_poly(n)
    d = len(phi) - 1
    c = list(c)
    for i in range(len(c) - 1, d - 1, -1):
        t = c[i]
        if t:
            s = i - d
            for j in range(d):
                if phi[j]:
                    c[s + j] -= t * phi[j]
        c[i] = mpq(0)
    c = c[:d]
    c += [mpq(0)] * (d - len(c))
    return c


class Cyclotomic:
    """Element of Q(zeta_n) in the power basis 1, zeta, ..., zeta^(phi(n)-1)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Iterable):
        if n < 1:
            raise ValueError("order must be positive")
        self.n = n
        self.coeffs = tuple(_reduce_mod([rational(x) for x in coeffs], n))

    # -- helpers
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def demote(self):
        return self.coeffs[0] if self.is_rational() else self

    def _lift(self, other):
        """Return (a, b) coefficient lists at a common order."""
        if isinstance(other, Cyclotomic):
            m = math.lcm(self.n, other.n)
            return m, embed_cyclotomic(self, m).coeffs, embed_cyclotomic(other, m).coeffs
        o = rational(other)
        return self.n, self.coeffs, (o,) + (mpq(0),) * (len(self.coeffs) - 1)

    # -- arithmetic
    def __add__(self, other):
        if isinstance(other, FieldElem):
            return NotImplemented
        m, a, b = self._lift(other)
        return Cyclotomic(m, [x + y for x, y in zip(a, b)]).demote()

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.n, [-x for x in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, FieldElem):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, FieldElem):
            return NotImplemented
        if not isinstance(other, Cyclotomic):
            o = rational(other)
            return Cyclotomic(self.n, [x * o for x in self.coeffs]).demote()
        m, a, b = self._lift(other)
        return Cyclotomic(m, _umul(list(a), list(b))).demote()

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise DivisionByZero("division by zero in Q(zeta_%d)" % self.n)
        # extended Euclid of a(x) against Phi_n(x)
        r0, r1 = [mpq(c) for c in cyclotomic_poly(self.n)], _trim(list(self.coeffs))
        s0, s1 = [], [mpq(1)]
        while len(r1) > 1:
            q, r = _udivmod(r0, r1)
            r0, r1 = r1, _trim(r)
            prod = _umul(q, s1)
            n = max(len(s0), len(prod))
            s0, s1 = s1, _trim([(s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0) for i in range(n)])
        c = r1[0]
        return Cyclotomic(self.n, [x / c for x in s1]).demote()

    def __truediv__(self, other):
        if isinstance(other, FieldElem):
            return NotImplemented
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        o = rational(other)
        if not o:
            raise DivisionByZero("division by zero")
        return Cyclotomic(self.n, [x / o for x in self.coeffs]).demote()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = mpq(1), self
        while e:
            if e & 1:
                out = base * out
            base = base * base if isinstance(base, Cyclotomic) else base * base
            e >>= 1
        return out

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return NotImplemented
        if isinstance(other, (int, Rational)) or isinstance(other, Cyclotomic):
            _, a, b = self._lift(other)
            return tuple(a) == tuple(b)
        return NotImplemented

    __hash__ = None  # equal values may live at different orders

    def __repr__(self):
        return f"Cyclotomic({self.n}, {[rational_str(c) for c in self.coeffs]})"

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else (f"z{self.n}" if i == 1 else f"z{self.n}^{i}")
            if not mono:
                parts.append(rational_str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{rational_str(c)}*{mono}")
        return "(" + " + ".join(parts) + ")" if parts else "0"


def zeta(n: int):
    """The primitive n-th root of unity exp(2 pi i / n), demoted when rational."""
    if n == 1:
        return mpq(1)
    return Cyclotomic(n, [0, 1]).demote()


def embed_cyclotomic(e, target_order: int) -> Cyclotomic:
    """Canonical embedding Q(zeta_n) -> Q(zeta_m) for n | m."""
    if not isinstance(e, Cyclotomic):
        return Cyclotomic(target_order, [rational(e)])
    if target_order % e.n:
        raise IncompatibleOrders(f"order {e.n} does not divide {target_order}")
    step = target_order // e.n
    c = [mpq(0)] * (step * (len(e.coeffs) - 1) + 1)
    for i, x in enumerate(e.coeffs):
        c[i * step] = x
    return Cyclotomic(target_order, c)


# --------------------------------------------------------------------------
# sparse polynomials in u: dict[tuple[int, ...], coeff]


def _grlex(e):
    return (sum(e), e)


def _pclean(a: dict) -> dict:
    return {e: c for e, c in a.items() if c}


def _padd(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return _pclean(out)


def _pneg(a: dict) -> dict:
    return {e: -c for e, c in a.items()}


def _pscale(a: dict, c) -> dict:
    return _pclean({e: x * c for e, x in a.items()})


def _pmul(a: dict, b: dict) -> dict:
    if len(a) * len(b) >= 24 and _all_rational(a) and _all_rational(b):
        s = len(next(iter(a)))
        ctx = _flint_ctx(s)
        return _from_flint(_to_flint(ctx, a) * _to_flint(ctx, b))
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return _pclean(out)


def _plead(a: dict):
    e = max(a, key=_grlex)
    return e, a[e]


def _pdivexact(a: dict, b: dict) -> dict:
    """Multivariate exact division a / b (grlex division algorithm)."""
    eb, cb = _plead(b)
    a = dict(a)
    q: dict = {}
    while a:
        ea, ca = _plead(a)
        d = tuple(x - y for x, y in zip(ea, eb))
        if d and min(d) < 0:
            raise ArithmeticError("inexact polynomial division")
        t = ca / cb
        q[d] = t
        a = _padd(a, _pneg(_pmul({d: t}, b)))
    return q


def _is_one(a: dict, s: int) -> bool:
    return len(a) == 1 and (0,) * s in a and a[(0,) * s] == 1


def _orders_in(values) -> int:
    m = 1
    for c in values:
        if isinstance(c, Cyclotomic):
            m = math.lcm(m, c.n)
        elif isinstance(c, FieldElem):
            m = math.lcm(m, _orders_in(list(c.num.values()) + list(c.den.values())))
    return m


def _pgcd(a: dict, b: dict, s: int) -> dict:
    one = {(0,) * s: mpq(1)}
    if s == 0 or _is_one(a, s) or _is_one(b, s):
        return one
    if s == 1:
        return _monic_euclid(a, b)
    return _sympy_gcd(a, b, s)


def _monic_euclid(a: dict, b: dict) -> dict:
    """Univariate gcd with every remainder made monic, which keeps coefficients small."""

    def dense(x):
        out = [0] * (max(e[0] for e in x) + 1)
        for e, c in x.items():
            out[e[0]] = c
        return out

    def monic(x):
        lc = x[-1]
        return [c / lc for c in x[:-1]] + [mpq(1)]

    pa, pb = monic(dense(a)), monic(dense(b))
    if len(pa) < len(pb):
        pa, pb = pb, pa
    while pb:
        _, r = _udivmod_any(pa, pb)
        pa, pb = pb, (monic(r) if r else r)
    return {(i,): c for i, c in enumerate(pa) if c}


def _udivmod_any(a: list, b: list) -> tuple[list, list]:
    """Univariate division over any field in the tower."""
    a = list(a)
    b = list(b)
    while b and not b[-1]:
        b.pop()
    while a and not a[-1]:
        a.pop()
    q = [0] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lb
        s = len(a) - len(b)
        q[s] = c
        for i, bi in enumerate(b):
            a[s + i] = a[s + i] - c * bi
        a.pop()
        while a and not a[-1]:
            a.pop()
    return q, a


# --------------------------------------------------------------------------
# FLINT bridge: gcd cancellation for rational coefficients


@functools.lru_cache(maxsize=None)
def _flint_ctx(s: int):
    return flint.fmpq_mpoly_ctx.get(tuple(f"u{i + 1}" for i in range(s)), "deglex")


def _all_rational(a: dict) -> bool:
    return all(type(c) is Rational for c in a.values())


def _flint_reduce(num: dict, den: dict, s: int):
    """(num/g, den/g) with g = gcd(num, den)."""
    ctx = _flint_ctx(s)
    A = _to_flint(ctx, num)
    B = _to_flint(ctx, den)
    g = A.gcd(B)
    if g.is_one():
        return num, den
    return _from_flint(A // g), _from_flint(B // g)


def _to_flint(ctx, a: dict):
    return ctx.from_dict({e: flint.fmpq(int(c.numerator), int(c.denominator)) for e, c in a.items()})


def _from_flint(P) -> dict:
    return {tuple(int(x) for x in e): mpq(int(c.p), int(c.q)) for e, c in P.to_dict().items()}


# --------------------------------------------------------------------------
# sympy bridge (used for multivariate gcd and for root finding)


@functools.lru_cache(maxsize=None)
def _sympy_domain(n: int):
    if n == 1:
        return sympy.QQ
    K = sympy.QQ.algebraic_field(sympy.exp(2 * sympy.pi * sympy.I / n))
    mp = [int(c) for c in K.ext.minpoly.all_coeffs()][::-1]
    if tuple(mp) != cyclotomic_poly(n):
        raise NeedsExtension(f"cannot represent Q(zeta_{n}) with a cyclotomic power basis")
    return K


def _to_dom(c, n: int):
    K = _sympy_domain(n)
    if n == 1:
        return K.convert(rational(c))
    e = embed_cyclotomic(c, n)
    return K([sympy.QQ.convert(x) for x in reversed(e.coeffs)])


def _from_dom(a, n: int):
    if n == 1:
        return rational(a)
    lst = [rational(x) for x in a.to_list()][::-1]
    return Cyclotomic(n, lst).demote() if lst else mpq(0)


def _sympy_gens(nvars: int):
    return sympy.symbols(f"g0:{nvars}") if nvars else ()


def _to_sympy_poly(a: dict, nvars: int, n: int):
    K = _sympy_domain(n)
    gens = _sympy_gens(nvars)
    return sympy.Poly.from_dict({e: _to_dom(c, n) for e, c in a.items()}, *gens, domain=K)


def _from_sympy_poly(P, n: int) -> dict:
    return _pclean({tuple(int(x) for x in e): _from_dom(c, n) for e, c in P.rep.to_dict().items()})


def _sympy_gcd(a: dict, b: dict, s: int) -> dict:
    n = _orders_in(list(a.values()) + list(b.values()))
    g = _from_sympy_poly(_to_sympy_poly(a, s, n).gcd(_to_sympy_poly(b, s, n)), n)
    _, lc = _plead(g)
    return _pscale(g, 1 / lc) if not isinstance(lc, FieldElem) else g


# --------------------------------------------------------------------------


class FieldElem:
    """Rational function num/den in u_1..u_s with cyclotomic coefficients.

    Canonical form: gcd(num, den) = 1 and den has leading coefficient 1 under
    graded-lex order with u_1 > u_2 > ...; use :func:`field_elem` to build
    values, which also demotes constants.
    """

    __slots__ = ("s", "num", "den")

    def __init__(self, s: int, num: dict, den: dict):
        self.s = s
        self.num = num
        self.den = den

    @staticmethod
    def _canon(s: int, num: dict, den: dict):
        num = _pclean(num)
        den = _pclean(den)
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        zero = (0,) * s
        if not num:
            return mpq(0)
        if not _is_one(den, s):
            if _all_rational(num) and _all_rational(den):
                num, den = _flint_reduce(num, den, s)
            else:
                g = _pgcd(num, den, s)
                if not _is_one(g, s):
                    num = _pdivexact(num, g)
                    den = _pdivexact(den, g)
            _, lc = _plead(den)
            if lc != 1:
                inv = 1 / lc
                num = _pscale(num, inv)
                den = _pscale(den, inv)
        if _is_one(den, s) and len(num) == 1 and zero in num:
            return num[zero]
        return FieldElem(s, num, den)

    # -- coercion
    def _parts(self, other):
        if isinstance(other, FieldElem):
            s = max(self.s, other.s)
            return s, _pad(self.num, s), _pad(self.den, s), _pad(other.num, s), _pad(other.den, s)
        s = self.s
        return s, self.num, self.den, {(0,) * s: other}, {(0,) * s: mpq(1)}

    def __add__(self, other):
        s, a, b, c, d = self._parts(other)
        if _is_one(b, s) and _is_one(d, s):
            return FieldElem._canon(s, _padd(a, c), b)
        if b == d:
            return FieldElem._canon(s, _padd(a, c), b)
        return FieldElem._canon(s, _padd(_pmul(a, d), _pmul(c, b)), _pmul(b, d))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.s, _pneg(self.num), self.den)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        s, a, b, c, d = self._parts(other)
        if not isinstance(other, FieldElem):
            if not other:
                return mpq(0)
            if _is_one(b, s):
                return FieldElem._canon(s, _pscale(a, other), b)
        return FieldElem._canon(s, _pmul(a, c), _pmul(b, d))

    __rmul__ = __mul__

    def inverse(self):
        return FieldElem._canon(self.s, self.den, self.num)

    def __truediv__(self, other):
        if not other:
            raise DivisionByZero("division by zero")
        s, a, b, c, d = self._parts(other)
        return FieldElem._canon(s, _pmul(a, d), _pmul(b, c))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = mpq(1)
        for _ in range(e):
            out = self * out
        return out

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Rational, Cyclotomic, FieldElem)):
            return not (self - other)
        return NotImplemented

    __hash__ = None

    def evaluate(self, values: Sequence):
        """Specialize u = values; raises DivisionByZero at poles."""
        vals = [rational(v) if not isinstance(v, Cyclotomic) else v for v in values]
        vals = list(vals) + [mpq(0)] * (self.s - len(vals))
        den = _peval(self.den, vals)
        if not den:
            raise DivisionByZero("denominator vanishes at the point")
        return _peval(self.num, vals) / den

    def taylor_lowest(self, values: Sequence) -> tuple[int, dict]:
        """Order of vanishing at u = values and the lowest homogeneous form in u - values."""
        vals = list(values) + [mpq(0)] * (self.s - len(values))
        den = _peval(self.den, vals)
        if not den:
            raise DivisionByZero("denominator vanishes at the point")
        shifted = _pshift(self.num, vals)
        order = min(sum(e) for e in shifted)
        return order, {e: c / den for e, c in shifted.items() if sum(e) == order}

    def __repr__(self):
        return f"FieldElem({poly_str(self.num)} / {poly_str(self.den)})"

    def __str__(self):
        if _is_one(self.den, self.s):
            return poly_str(self.num)
        return f"({poly_str(self.num)})/({poly_str(self.den)})"


def _pad(a: dict, s: int) -> dict:
    out = {}
    for e, c in a.items():
        out[tuple(e) + (0,) * (s - len(e))] = c
    return out


def _peval(a: dict, vals) -> object:
    total = mpq(0)
    for e, c in a.items():
        t = c
        for v, k in zip(vals, e):
            if k:
                t = t * v**k
        total = total + t
    return total


def _pshift(a: dict, vals) -> dict:
    """Substitute u_i -> vals_i + u_i."""
    out: dict = {}
    s = len(vals)
    for e, c in a.items():
        ranges = [range(k + 1) for k in e]
        for sub in product(*ranges):
            t = c
            for i in range(s):
                k, j = e[i], sub[i]
                if k - j:
                    t = t * (math.comb(k, j) * vals[i] ** (k - j))
                elif k:
                    t = t * math.comb(k, j)
            out[sub] = out.get(sub, 0) + t
    return _pclean(out)


def poly_str(a: dict) -> str:
    if not a:
        return "0"
    parts = []
    for e in sorted(a, key=_grlex, reverse=True):
        mono = "*".join(f"u{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
        c = a[e]
        cs = rational_str(c) if isinstance(c, Rational) else str(c)
        if not mono:
            parts.append(cs)
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts)


def u_var(i: int, s: int) -> FieldElem:
    """The parameter u_i (1-based) in a tower with s parameters."""
    e = [0] * s
    e[i - 1] = 1
    return FieldElem(s, {tuple(e): mpq(1)}, {(0,) * s: mpq(1)})


def field_elem(num: dict, den: dict | None = None, s: int | None = None):
    if s is None:
        s = len(next(iter(num))) if num else (len(next(iter(den))) if den else 0)
    if den is None:
        den = {(0,) * s: mpq(1)}
    return FieldElem._canon(s, _pad(num, s), _pad(den, s))


def coerce(x):
    """Bring ints/strings/Fractions into the tower; tower values pass through."""
    if isinstance(x, (Rational, Cyclotomic, FieldElem)):
        return x
    return rational(x)


def num_params(c) -> int:
    return c.s if isinstance(c, FieldElem) else 0


# --------------------------------------------------------------------------
# serialization


def to_json(c):
    if isinstance(c, FieldElem):
        return {
            "num": [{"c": to_json(v), "u": list(e)} for e, v in sorted(c.num.items(), key=lambda t: _grlex(t[0]), reverse=True)],
            "den": [{"c": to_json(v), "u": list(e)} for e, v in sorted(c.den.items(), key=lambda t: _grlex(t[0]), reverse=True)],
        }
    if isinstance(c, Cyclotomic):
        return {"zeta_order": c.n, "coeffs": [rational_str(x) for x in c.coeffs]}
    return rational_str(c)


def from_json(obj):
    if isinstance(obj, (str, int)):
        return rational(obj)
    if "zeta_order" in obj:
        return Cyclotomic(int(obj["zeta_order"]), [rational(x) for x in obj["coeffs"]]).demote()
    num = {tuple(t["u"]): from_json(t["c"]) for t in obj["num"]}
    den = {tuple(t["u"]): from_json(t["c"]) for t in obj["den"]}
    return field_elem(num, den)


# --------------------------------------------------------------------------
# roots of univariate polynomials in the tower


def _is_square_q(q) -> bool:
    q = mpq(q)
    return q >= 0 and gmpy2.is_square(q.numerator) and gmpy2.is_square(q.denominator)


def _sqrt_q(q) -> mpq:
    q = mpq(q)
    return mpq(gmpy2.isqrt(q.numerator), gmpy2.isqrt(q.denominator))


def _quadratic_over_q(b, c):
    disc = b * b - 4 * c
    if not disc:
        return [(-b / 2, 2)]
    if _is_square_q(disc):
        r = _sqrt_q(disc)
    elif _is_square_q(-disc):
        r = _sqrt_q(-disc) * zeta(4)
    elif _is_square_q(-disc / 3):
        r = _sqrt_q(-disc / 3) * (2 * zeta(3) + 1)
    else:
        raise NeedsExtension(f"sqrt({rational_str(disc)}) is not in the cyclotomic tower")
    return [((-b + r) / 2, 1), ((-b - r) / 2, 1)]


def _factor_y(poly: dict, nvars: int, n: int):
    """Factor a polynomial in (y, u...) over Q(zeta_n); returns [(factor dict, mult)]."""
    P = _to_sympy_poly(poly, nvars, n)
    _, facs = P.factor_list()
    return [(_from_sympy_poly(f, n), m) for f, m in facs]


def _linear_root(fac: dict, s: int):
    c1 = {e[1:]: c for e, c in fac.items() if e[0] == 1}
    c0 = {e[1:]: -c for e, c in fac.items() if e[0] == 0}
    if not c0:
        return mpq(0)
    return field_elem(c0, c1, s)


def field_roots(coeffs: Sequence, extra_orders: Iterable[int] = (3, 4)) -> list[tuple[object, int]]:
    """Roots with multiplicity of sum coeffs[i] y^i inside the tower.

    The search field is Q(zeta_n)(u) where n is the lcm of orders already
    present; if a factor does not split there, adjoining zeta_m for m in
    ``extra_orders`` is attempted.  Anything else raises NeedsExtension.
    """
    c = [coerce(x) for x in coeffs]
    while c and not c[-1]:
        c.pop()
    deg = len(c) - 1
    if deg < 1:
        return []
    lead = c[-1]
    c = [x / lead for x in c]
    key = repr((tuple(_json_key(x) for x in c), tuple(extra_orders)))
    return list(_field_roots_cached(key, tuple(c), tuple(extra_orders)))


def _json_key(x):
    import json

    return json.dumps(to_json(x), sort_keys=True)


_ROOT_CACHE: dict = {}


def _field_roots_cached(key, c, extra_orders):
    if key in _ROOT_CACHE:
        return _ROOT_CACHE[key]
    out = _field_roots_impl(list(c), extra_orders)
    if len(_ROOT_CACHE) > 20000:
        _ROOT_CACHE.clear()
    _ROOT_CACHE[key] = out
    return out


def _field_roots_impl(c: list, extra_orders) -> list:
    deg = len(c) - 1
    if deg == 1:
        return [(-c[0], 1)]
    zero_mult = 0
    while not c[0]:
        c = c[1:]
        zero_mult += 1
    out = [(mpq(0), zero_mult)] if zero_mult else []
    deg = len(c) - 1
    if deg == 0:
        return out
    if deg == 1:
        return out + [(-c[0], 1)]
    s = max(num_params(x) for x in c)
    n = _orders_in(c)
    if s == 0 and n == 1 and deg == 2:
        return out + _quadratic_over_q(c[1], c[0])
    # clear denominators, build a polynomial in (y, u)
    dens = [x.den if isinstance(x, FieldElem) else {(0,) * s: mpq(1)} for x in c]
    L = {(0,) * s: mpq(1)}
    for d in dens:
        d = _pad(d, s)
        g = _pgcd(L, d, s)
        L = _pmul(L, _pdivexact(d, g))
    poly: dict = {}
    for i, x in enumerate(c):
        if isinstance(x, FieldElem):
            part = _pmul(_pad(x.num, s), _pdivexact(L, _pad(x.den, s)))
        else:
            part = _pscale(L, x)
        for e, v in part.items():
            poly[(i,) + e] = v
    return out + _roots_of_poly(poly, s, n, extra_orders)


def _roots_of_poly(poly: dict, s: int, n: int, extra_orders) -> list:
    roots = []
    for fac, mult in _factor_y(poly, s + 1, n):
        ydeg = max(e[0] for e in fac)
        if ydeg == 0:
            continue
        if ydeg == 1:
            roots.append((_linear_root(fac, s), mult))
            continue
        found = None
        candidates = list(extra_orders)
        if len(candidates) > 1:
            candidates.append(math.lcm(*candidates))
        for m in candidates:
            n2 = math.lcm(n, m)
            if n2 == n or n2 > MAX_ORDER:
                continue
            sub = _factor_y(fac, s + 1, n2)
            if all(max(e[0] for e in f) <= 1 for f, _ in sub):
                found = [(_linear_root(f, s), mult * k) for f, k in sub if max(e[0] for e in f) == 1]
                break
        if found is None:
            raise NeedsExtension(f"a degree-{ydeg} factor has no roots in Q(zeta_{n})(u) or its small cyclotomic extensions")
        roots.extend(found)
    return roots
