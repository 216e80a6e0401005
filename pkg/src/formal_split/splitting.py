"""Splitting Weierstrass polynomials into linear factors over truncated Puiseux-Laurent series.

The search visits frames F = ramify(rescale_q(f, q), p) for q = 0.., p = 1..
(q outer).  In a frame, F is regular in (v, x') and its lowest x'-part P (a
degree-k form in (x', z) over Laurent series in v) is factored into linear
forms z + L_i.  Each seed is lifted order by order in x'; a negative power of v
in the lift means the roots need a larger q.
"""
from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .coefficients import FieldElem, field_roots, rational, to_json, zeta
from .errors import (
    CoefficientNotInvertible,
    DegenerateLinearPart,
    DivisionByZero,
    InvalidParams,
    MultipleWVariables,
    NeedsExtension,
    NotAProductOfLinearForms,
    NotClosedUnderAction,
    NotDivisible,
    NotOrderK,
    NotReduced,
    PoleFound,
    SeedsNotDistinct,
    TruncationInsufficient,
)
from .series import INF, LaurentSeries, PuiseuxSeries, exact_divide_form, form_add, form_min_prec, form_mul, form_scale
from .transforms import ramify, rescale_q
from .weierstrass import RootSystem, WeierstrassPoly, assert_form, product_of_linear

DEFAULT_TRUNC = 8
MAX_CAP_FACTOR = 8


# --------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class Point:
    """w = w0 and u = u0; u0 None keeps u generic (work over K(u))."""

    w0: object = 0
    u0: tuple | None = None

    @classmethod
    def parse(cls, text: str | None) -> "Point":
        if not text:
            return cls()
        w0, u0 = mpq(0), None
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key == "w":
                w0 = rational(val.strip())
            elif key == "u":
                u0 = tuple(rational(x) for x in val.strip().split(";"))
            else:
                raise InvalidParams(f"unknown coordinate {key!r} in point")
        return cls(w0, u0)

    def is_origin(self) -> bool:
        return not self.w0 and self.u0 is None

    def to_json(self):
        return {"w": to_json(self.w0), "u": None if self.u0 is None else [to_json(c) for c in self.u0]}


def translate(f: WeierstrassPoly, at: Point | None) -> WeierstrassPoly:
    """Re-centre f at the point: w = w0 + w', u specialized to u0 when given."""
    if at is None or at.is_origin():
        return f
    if f.r != 1:
        raise MultipleWVariables("points are supported for a single w variable")
    out = {}
    for j, c in f.coeffs.items():
        if at.u0 is not None:
            c = c.map_coefficients(lambda x: x.evaluate(at.u0) if isinstance(x, FieldElem) else x)
        if at.w0:
            if c.trunc is not None:
                raise TruncationInsufficient("moving the centre needs exact data")
            c = c.normalized()
            if c.p != 1 or c.q != 0:
                raise TruncationInsufficient("moving the centre needs data without poles or roots of w")
            terms: dict = {}
            for e, v in c.terms.items():
                b = e[0]
                for i in range(b + 1):
                    t = v * math.comb(b, i) * at.w0 ** (b - i)
                    key = (i,) + e[1:]
                    terms[key] = terms.get(key, 0) + t
            c = PuiseuxSeries(1, 0, 1, c.nx, None, terms)
        out[j] = c
    return WeierstrassPoly(f.k, out, f.r, 0 if at.u0 is not None else f.s)


# --------------------------------------------------------------------------
# roots of polynomials over Laurent series in v (integer slopes)


def _ls_horner(coeffs: Sequence[LaurentSeries], t: LaurentSeries, bound, s) -> LaurentSeries:
    """sum coeffs[m] t^m known to absolute precision bound (val t = s)."""
    k = len(coeffs) - 1
    acc = coeffs[k]
    for m in range(k - 1, -1, -1):
        acc = (acc * t + coeffs[m]).with_prec(int(bound - m * s))
    return acc


def _strip(x: LaurentSeries) -> LaurentSeries:
    return LaurentSeries(x.coeffs, None)


def _newton_polygon(coeffs: Sequence[LaurentSeries]):
    """Lower hull edges [(m1, m2, slope)] of the points (m, val c_m); slope = root valuation."""
    pts = [(m, c.lead()[0]) for m, c in enumerate(coeffs) if c.coeffs]
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    edges = []
    for (m1, v1), (m2, v2) in zip(hull, hull[1:]):
        edges.append((m1, v1, m2, v2, mpq(v1 - v2, m2 - m1)))
    # unknown coefficients must lie strictly above the hull
    for m, c in enumerate(coeffs):
        if not c.coeffs and c.prec is not None:
            for m1, v1, m2, v2, s in edges:
                if m1 <= m <= m2:
                    line = v1 - s * (m - m1)
                    if c.prec <= line:
                        raise TruncationInsufficient("Newton polygon not determined at this precision")
    return edges


def laurent_roots(coeffs: Sequence[LaurentSeries], cap: int, extra_orders=(3, 4), min_val=None) -> list[LaurentSeries]:
    """Roots (with multiplicity) of sum coeffs[m] t^m, each known to absolute precision <= cap.

    Only roots with integral valuation are supported; a fractional slope means
    the roots need w^(1/p') for a larger p' and raises NotDivisible.  With
    ``min_val`` only roots of valuation > min_val are returned.
    """
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1].coeffs:
        if coeffs[-1].prec is None:
            coeffs.pop()
        else:
            raise TruncationInsufficient("leading coefficient not determined")
    k = len(coeffs) - 1
    roots: list[LaurentSeries] = []
    while k > 0 and not coeffs[0].coeffs:
        if coeffs[0].prec is not None:
            raise TruncationInsufficient("constant coefficient not determined")
        roots.append(LaurentSeries({}, None))
        coeffs = coeffs[1:]
        k -= 1
    if k == 0:
        return roots
    for m1, v1, m2, v2, s in _newton_polygon(coeffs):
        if min_val is not None and s <= min_val:
            continue
        if s.denominator != 1:
            raise NotDivisible(f"root valuation {s} is not integral; a ramified cover is needed")
        s = int(s)
        vedge = v1 + m1 * s
        char = [mpq(0)] * (m2 - m1 + 1)
        for m in range(m1, m2 + 1):
            c = coeffs[m]
            if c.coeffs and c.lead()[0] + m * s == vedge:
                char[m - m1] = c.lead()[1]
        for y0, mult in field_roots(char, extra_orders):
            if not y0:
                continue
            if mult == 1:
                roots.append(_newton_lift(coeffs, y0, s, vedge, cap))
            else:
                roots.extend(_multiple_root(coeffs, y0, s, mult, cap, extra_orders))
    return roots


def _newton_lift(coeffs, y0, s, vedge, cap) -> LaurentSeries:
    val_gp = vedge - s
    limit = min((c.prec + m * s for m, c in enumerate(coeffs) if c.prec is not None), default=INF)
    tgt = min(cap, limit - val_gp)
    if tgt == INF:
        raise TruncationInsufficient("root of an exact equation needs a precision cap")
    tgt = int(tgt)
    t = LaurentSeries({s: y0})
    if tgt <= s:
        return LaurentSeries({}, tgt)
    dcoeffs = [c * m for m, c in enumerate(coeffs)][1:]
    for _ in range(64):
        gt = _ls_horner(coeffs, t, tgt + val_gp, s)
        if not gt.coeffs:
            prec = None if gt.prec is None else min(tgt, gt.prec - val_gp)
            return t if prec is None else t.with_prec(prec)
        gp = _ls_horner(dcoeffs, t, val_gp + (tgt - s) + 1, s)
        delta = gt.div(gp, cap=tgt)
        t = _strip((t - _strip(delta)).with_prec(tgt))
    raise TruncationInsufficient("Newton iteration did not converge")


def _multiple_root(coeffs, y0, s, mult, cap, extra_orders) -> list[LaurentSeries]:
    """Roots t = v^s (y0 + t1) with val t1 > 0 through the substitution."""
    k = len(coeffs) - 1
    sub_cap = cap - s
    if sub_cap <= 0:
        return [LaurentSeries({}, cap)] * mult if s >= cap else [LaurentSeries({s: y0}, cap)] * mult
    a = LaurentSeries({s: y0})
    b_pows = [LaurentSeries({s * j: mpq(1)}) for j in range(k + 1)]
    a_pows = [LaurentSeries({0: mpq(1)})]
    for _ in range(k):
        a_pows.append(a_pows[-1] * a)
    h = []
    for j in range(k + 1):
        acc = LaurentSeries({}, None)
        for m in range(j, k + 1):
            acc = acc + coeffs[m] * a_pows[m - j] * math.comb(m, j)
        h.append(acc * b_pows[j])
    t1s = laurent_roots(h, sub_cap, extra_orders, min_val=0)
    if len(t1s) != mult:
        raise TruncationInsufficient("could not separate a multiple root at this precision")
    out = []
    for t1 in t1s:
        out.append(a + t1.shift(s))
    return out


# --------------------------------------------------------------------------
# forms in (x, z): P = [p_0 = 1, p_1, ..., p_k] with p_m a degree-m form in x


def _one_form(nx):
    return {(0,) * nx: LaurentSeries({0: mpq(1)})}


def _known_zero(form: dict) -> bool:
    return all(not c.coeffs for c in form.values())


def _unit(nx, j):
    e = [0] * nx
    e[j] = 1
    return tuple(e)


def _synthetic_divide(P: list, L: dict, nx: int):
    """P / (z + L): quotient coefficient forms and remainder form."""
    q = [P[0]]
    for m in range(1, len(P)):
        q.append(form_add(P[m], form_scale(form_mul(L, q[-1]), -1)))
    rem = q.pop()
    return q, rem


def factor_linear_forms(P: list, nx: int, cap: int = 16, extra_orders=(3, 4)) -> list[dict]:
    """Split a monic degree-k form in (x, z) into k forms z + L_i (returns the L_i).

    P[m] is the degree-m x-form multiplying z^(k-m); coefficients are
    LaurentSeries in v (constants for plain forms).
    """
    k = len(P) - 1
    if k == 0:
        return []
    per_dir = []
    for j in range(nx):
        ej = _unit(nx, j)
        g = []
        for m in range(k, -1, -1):
            mono = tuple(m * x for x in ej)
            g.append(P[m].get(mono, LaurentSeries({}, form_min_prec(P[m]))))
        per_dir.append(laurent_roots(g, cap, extra_orders))
        if len(per_dir[-1]) != k:
            raise NotAProductOfLinearForms("a specialization has too few roots")
    forms = _match(P, per_dir, nx)
    if forms is None:
        raise NotAProductOfLinearForms("no combination of direction roots divides the form")
    for i, j in itertools.combinations(range(k), 2):
        if _known_zero(form_add(forms[i], form_scale(forms[j], -1))):
            raise NotReduced("repeated linear factor")
    return forms


def _match(P: list, per_dir: list, nx: int):
    k = len(P) - 1
    if k == 0:
        return []
    seen = []
    for idx in itertools.product(*(range(len(r)) for r in per_dir)):
        L = {}
        for j, i in enumerate(idx):
            lam = -per_dir[j][i]
            if lam.coeffs or lam.prec is not None:
                L[_unit(nx, j)] = lam
        if any(_known_zero(form_add(L, form_scale(S, -1))) and _known_zero(form_add(S, form_scale(L, -1))) for S in seen):
            continue
        seen.append(L)
        quot, rem = _synthetic_divide(P, L, nx)
        if not _known_zero(rem):
            continue
        rest = [[r for t, r in enumerate(per_dir[j]) if t != idx[j]] for j in range(nx)]
        sub = _match(quot, rest, nx)
        if sub is not None:
            return [L] + sub
    return None


# --------------------------------------------------------------------------
# lifting


def _coeff_forms(F: WeierstrassPoly):
    cache: dict = {}

    def get(j, e):
        key = (j, e)
        if key not in cache:
            cache[key] = F.coeffs[j].form(e)
        return cache[key]

    return get


def _separant(seeds: list, i: int) -> dict:
    out = None
    for j, L in enumerate(seeds):
        if j == i:
            continue
        diff = form_add(L, form_scale(seeds[i], -1))
        if _known_zero(diff):
            raise SeedsNotDistinct(f"seeds {i + 1} and {j + 1} coincide")
        out = diff if out is None else form_mul(out, diff)
    return out


def _lift_one(F: WeierstrassPoly, get, seed: dict, sep: dict, D: int, cap: int) -> list[dict]:
    """Forms B_1..B_D with z = -(B_1 + ... + B_D) a root of F (frame coordinates)."""
    k, nx = F.k, F.nx
    y = {1: form_scale(seed, -1)}
    powers = [{0: _one_form(nx)}, {1: y[1]}]
    for m in range(2, k + 1):
        powers.append({m: form_mul(powers[m - 1][m - 1], y[1])})
    # the seed itself must kill the degree-k part
    T0: dict = dict(powers[k][k])
    for m in range(0, k - 1):
        a = get(k - m, k - m)
        if a:
            T0 = form_add(T0, form_mul(a, powers[m][m]))
    if not _known_zero(T0):
        raise NotDivisible("seed is not the linear part of a root")
    for d in range(2, D + 1):
        powers[1][d] = {}
        for m in range(2, k + 1):
            E = d + m - 1
            acc: dict = {}
            for t in range(1, d):
                prev = powers[m - 1].get(E - t)
                if prev:
                    acc = form_add(acc, form_mul(y[t], prev))
            powers[m][E] = acc
        target = d + k - 1
        T: dict = dict(powers[k][target])
        for m in range(0, k - 1):
            j = k - m
            for e in range(j, target - m + 1):
                pw = powers[m].get(target - e)
                if not pw:
                    continue
                a = get(j, e)
                if a:
                    T = form_add(T, form_mul(a, pw))
        B = exact_divide_form(T, sep, cap=cap)
        for c in B.values():
            if c.coeffs and min(c.coeffs) < 0:
                raise PoleFound("lifted root has a pole in w at this q")
        yd = form_scale(B, -1)
        y[d] = yd
        powers[1][d] = yd
        for m in range(2, k + 1):
            powers[m][d + m - 1] = form_add(powers[m][d + m - 1], form_scale(form_mul(yd, powers[m - 1][m - 1]), m))
    return [form_scale(y[d], -1) for d in range(1, D + 1)]


def _frame_trunc(Bs: list[dict], shift: int, D: int):
    t = D + shift
    for d, B in enumerate(Bs, start=1):
        pr = form_min_prec(B)
        if pr is not None:
            t = min(t, pr - 1 + shift + d)
    return t


def _assemble(Bs: list[dict], p: int, q: int, nx: int, trunc) -> PuiseuxSeries:
    shift = p * q
    terms = {}
    for B in Bs:
        for al, ls in B.items():
            for n, c in ls.coeffs.items():
                terms[(n + shift,) + al] = c
    return PuiseuxSeries(p, q, 1, nx, trunc, terms)


def _root_sort_key(b: PuiseuxSeries):
    if b.is_zero():
        return ((INF,), "")
    return (b.support_min().key(), json.dumps(b.to_json(), sort_keys=True))


def _lift_all(F: WeierstrassPoly, seeds: list, D: int, cap: int) -> list[list[dict]]:
    get = _coeff_forms(F)
    out = []
    for i, L in enumerate(seeds):
        for c in L.values():
            if c.coeffs and min(c.coeffs) < 0:
                raise PoleFound("seed has a pole in w")
        sep = _separant(seeds, i) if F.k > 1 else _one_form(F.nx)
        out.append(_lift_one(F, get, L, sep, D, cap))
    return out


def _frame_lowest(F: WeierstrassPoly) -> list:
    P = [_one_form(F.nx), {}]
    for j in range(2, F.k + 1):
        P.append(F.coeffs[j].form(j))
    return P[: F.k + 1]


def lift_roots(f: WeierstrassPoly, seeds: Sequence, N: int = DEFAULT_TRUNC, cap: int | None = None) -> RootSystem:
    """Lift linear seeds to roots of f (regular, q = 0 encoding) to truncation N.

    Seeds are linear forms: dicts alpha -> LaurentSeries in v = w^(1/p), or
    PuiseuxSeries linear in x.  A seed may be a leading approximation; it is
    refined to the exact linear factor it approximates, so b_i's linear part is
    seed_i whenever seed_i is exact.
    """
    F = _regular_frame(f)
    L = [_seed_form(s, F) for s in seeds]
    if len(L) != F.k:
        raise InvalidParams(f"need {F.k} seeds")
    bs, _ = _lift_with_caps(F, _refined_seeds(F, L), F.p, 0, N, cap)
    return RootSystem.build(bs)


def _agreement(L: dict, s: dict):
    """v-valuation of L - s (its precision where it is known to vanish)."""
    vals = []
    for c in form_add(L, form_scale(s, -1)).values():
        if c.coeffs:
            vals.append(min(c.coeffs))
        elif c.prec is not None:
            vals.append(c.prec)
    return min(vals, default=INF)


def _refined_seeds(F: WeierstrassPoly, seeds: list):
    """Seeds as leading approximations: each is replaced by the linear factor of the
    lowest part that it approximates.  Falls back to the seeds as given when that
    part cannot be factored."""
    extra = tuple(sorted({3, 4, F.p}))
    low = _frame_lowest(F)

    @functools.lru_cache(None)
    def at_cap(cap):
        try:
            forms = factor_linear_forms(low, F.nx, cap=cap, extra_orders=extra)
        except (NotReduced, NotAProductOfLinearForms, NeedsExtension, NotDivisible, TruncationInsufficient):
            return seeds
        out, used = [], set()
        for s in seeds:
            lead = min((min(c.coeffs) for c in s.values() if c.coeffs), default=INF)
            score, i = max(((_agreement(L, s), i) for i, L in enumerate(forms) if i not in used), default=(-INF, None))
            if i is None or score <= lead:
                raise NotDivisible("seed does not approximate the linear part of a root")
            used.add(i)
            out.append(forms[i])
        return out

    return at_cap


def _seed_form(s, F: WeierstrassPoly) -> dict:
    if isinstance(s, dict):
        return s
    s = s.promote(p=math.lcm(s.p, F.p))
    if s.p != F.p or s.q != 0:
        raise InvalidParams("seed encoding does not match the frame")
    return {al: ls for al, ls in s.form(1).items()}


def _lift_with_caps(F, seeds, p, q, N, cap=None):
    shift = p * q
    D = N - shift
    if D < 1:
        raise TruncationInsufficient(f"truncation {N} leaves no room at p={p}, q={q}")
    cap = cap or N + 4
    best = -1
    while True:
        Bs = _lift_all(F, seeds(cap) if callable(seeds) else seeds, D, cap)
        t = min(_frame_trunc(B, shift, D) for B in Bs)
        if t >= N or cap >= MAX_CAP_FACTOR * (N + 4):
            break
        if t <= best and F.trunc is not None:
            break
        best = max(best, t)
        cap *= 2
    if t < 1:
        raise TruncationInsufficient("lifted roots carry no information at this truncation")
    return [_assemble(B, p, q, F.nx, t) for B in Bs], t


def _regular_frame(F: WeierstrassPoly) -> WeierstrassPoly:
    """Re-encode with q = 0 (internal variables (v, x')); poles raise PoleFound."""
    if F.q == 0:
        return F
    if F.trunc is not None:
        raise TruncationInsufficient("re-encoding truncated data with poles")
    out = {}
    for j, c in F.coeffs.items():
        data = {}
        for e, v in c.terms.items():
            al, be = c.ab(e)
            if min(be) < 0:
                raise PoleFound("frame polynomial has a pole in w")
            data[(al, be)] = v
        out[j] = PuiseuxSeries.from_ab(c.p, 0, c.r, c.nx, None, data)
    return WeierstrassPoly(F.k, out, F.r, F.s)


# --------------------------------------------------------------------------
# the split search


@dataclass
class SplitResult:
    status: str
    root_system: RootSystem | None = None
    p: int | None = None
    q: int | None = None
    diagnostics: list = field(default_factory=list)
    trials: list = field(default_factory=list)

    @property
    def roots(self):
        return self.root_system.roots if self.root_system else []

    def to_json(self) -> dict:
        rs = self.root_system
        return {
            "status": self.status,
            "p": self.p,
            "q": self.q,
            "roots": [b.to_json() for b in rs.roots] if rs else [],
            "d": list(rs.d) if rs else [],
            "diagnostics": list(self.diagnostics),
        }


_INCONCLUSIVE = {"NeedsExtension": 2, "TruncationInsufficient": 1}


def split(f: WeierstrassPoly, p_max: int = 3, q_max: int = 1, N: int = DEFAULT_TRUNC, seeds=None, at: Point | None = None) -> SplitResult:
    if f.r != 1:
        raise MultipleWVariables("the (p, q) search needs a single w variable")
    if p_max < 1 or q_max < 0:
        raise InvalidParams("need p_max >= 1 and q_max >= 0")
    f = translate(f, at)
    form = assert_form(f)
    if not form["order_k"]:
        raise NotOrderK("f does not have order k along z = x = 0")
    if f.trunc is None:
        # search p from the polynomial's own smallest encoding
        f = f.map(lambda c: c.normalized())
    if f.trunc is not None:
        N = min(N, f.trunc)
    if f.k == 1:
        b = PuiseuxSeries(f.p, f.q, 1, 0, None, {})
        return SplitResult("Split", RootSystem([b], f.p, f.q), f.p, 0, ["k = 1: f = z"])
    diags, trials = [], []
    worst = None
    for q in range(q_max + 1):
        for p in range(1, p_max + 1):
            tag = f"q={q} p={p}"
            try:
                F = _regular_frame(ramify(rescale_q(f, q), p))
                P = F.p
                extra = tuple(sorted({3, 4, P}))
                if seeds is not None:
                    L = _refined_seeds(F, [_seed_form(s, F) for s in seeds])
                else:
                    low = _frame_lowest(F)
                    L = functools.lru_cache(None)(lambda c, low=low, F=F, extra=extra: factor_linear_forms(low, F.nx, cap=c, extra_orders=extra))
                roots, t = _lift_with_caps(F, L, P, q, N)
                roots.sort(key=_root_sort_key)
                _check_product(f, roots, t)
                rs = RootSystem.build(roots)
                diags.append(f"{tag}: split, truncation {t}")
                trials.append((q, p, "Split"))
                return SplitResult("Split", rs, P, q, diags, trials)
            except (NeedsExtension, TruncationInsufficient) as exc:
                name = type(exc).__name__
                diags.append(f"{tag}: {name}: {exc}")
                trials.append((q, p, name))
                if worst is None or _INCONCLUSIVE[name] > _INCONCLUSIVE[worst]:
                    worst = name
            except (NotDivisible, PoleFound, NotReduced, NotAProductOfLinearForms, SeedsNotDistinct, CoefficientNotInvertible, DegenerateLinearPart, DivisionByZero) as exc:
                name = type(exc).__name__
                diags.append(f"{tag}: {name}: {exc}")
                trials.append((q, p, name))
    return SplitResult(worst or "NonSplitEvidence", None, None, None, diags, trials)


def _check_product(f: WeierstrassPoly, roots: list, t) -> None:
    total = roots[0].like({}, None)
    for b in roots:
        total = total + b
    if not total.truncate(t).is_zero():
        raise NotDivisible("lifted roots do not sum to zero")
    sig = product_of_linear(roots)
    for j in range(2, f.k + 1):
        a = f.coeffs[j]
        d = (sig[j] - a).truncate(t)
        if not d.is_zero():
            raise NotDivisible(f"product of the lifted factors differs from f in a_{j}")


# --------------------------------------------------------------------------
# normal crossings, the mu_p action and the proxy flags


@dataclass
class LowestPart:
    degree: object
    terms: dict
    k: int

    @property
    def is_degree_k(self) -> bool:
        return self.degree == self.k

    @property
    def xz_pure(self) -> bool:
        return self.is_degree_k and all(not b for (_, b, _) in self.terms)

    def z_forms(self, nx: int) -> list:
        """The part as [p_0..p_k] forms (requires xz_pure)."""
        P = [{} for _ in range(self.k + 1)]
        for (al, _, zd), c in self.terms.items():
            P[self.k - zd][al] = LaurentSeries({0: c})
        return P

    def to_json(self) -> dict:
        return {
            "degree": str(self.degree),
            "terms": [
                {"c": to_json(c), "alpha": list(al), "beta": str(b), "z": zd}
                for (al, b, zd), c in sorted(self.terms.items(), key=lambda t: (t[0][2], t[0][0], t[0][1]), reverse=True)
            ],
        }


def lowest_homogeneous_part(f: WeierstrassPoly, at: Point | None = None) -> LowestPart:
    f = translate(f, at)
    k = f.k
    if f.trunc is not None and f.trunc < f.p * (f.q + 1) * k + k:
        raise TruncationInsufficient("truncation too low to see the degree-k part")
    terms = {((0,) * f.nx, mpq(0), k): mpq(1)}
    for j, c in f.coeffs.items():
        for ep, v in c.ab_terms():
            terms[(ep.alpha, sum(ep.beta, mpq(0)), k - j)] = v
    deg = min(sum(al) + b + zd for (al, b, zd) in terms)
    low = {key: v for key, v in terms.items() if sum(key[0]) + key[1] + key[2] == deg}
    return LowestPart(deg, low, k)


def _row_deleted_minors(M: list) -> list:

    out = []
    for i in range(len(M)):
        rows = [r for t, r in enumerate(M) if t != i]
        out.append(_det(rows))
    return out


def _det(rows: list):
    n = len(rows)
    if n == 0:
        return mpq(1)
    if n == 1:
        return rows[0][0]
    total = mpq(0)
    for j in range(n):
        if not rows[0][j]:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def atw_proxy(f: WeierstrassPoly, at: Point | None = None) -> dict:
    lp = lowest_homogeneous_part(f, at)
    order = lp.degree
    pure = lp.xz_pure
    nc = False
    if pure:
        try:
            forms = factor_linear_forms(lp.z_forms(f.nx), f.nx, extra_orders=(3, 4))
            M = [[_const(L.get(_unit(f.nx, j))) for j in range(f.nx)] for L in forms]
            nc = all(m != 0 for m in _row_deleted_minors(M))
        except (NotReduced, NotAProductOfLinearForms, NotDivisible):
            nc = False
    return {"order": int(order) if mpq(order).denominator == 1 else str(order), "lowest_is_xz": bool(pure), "lowest_nc": bool(nc)}


def _const(ls):
    if ls is None:
        return mpq(0)
    return ls.coeffs.get(0, mpq(0))


def is_nc(f: WeierstrassPoly, at: Point | None = None, N: int = DEFAULT_TRUNC) -> dict:
    """Normal crossings at the point: split with p = 1, q = 0 and independent differentials."""
    g = translate(f, at)
    res = split(g, p_max=1, q_max=0, N=N)
    if res.status != "Split":
        reason = res.diagnostics[-1] if res.diagnostics else res.status
        if res.status in ("NeedsExtension", "TruncationInsufficient"):
            raise (NeedsExtension if res.status == "NeedsExtension" else TruncationInsufficient)(reason)
        return {"nc": False, "reason": f"no splitting with p=1, q=0 ({reason})"}
    for b in res.roots:
        for e in b.terms:
            if any(x.denominator != 1 or x < 0 for x in b.ab(e)[1]):
                return {"nc": False, "reason": "the roots need fractional powers of w"}
    M = [[_const(c) for c in row] for row in res.root_system.bij]
    minors = _row_deleted_minors(M)
    if all(m != 0 for m in minors):
        return {"nc": True, "reason": "splits with p=1, q=0 and the linear parts are independent"}
    return {"nc": False, "reason": "splits but a row-deleted minor of the linear-part matrix vanishes"}


def apply_mu(b: PuiseuxSeries, eps) -> PuiseuxSeries:
    """v -> eps v, x fixed: the term v^a x'^alpha picks up eps^(p beta)."""
    shift = b.p * b.q
    out = {}
    for e, c in b.terms.items():
        a = e[0] - shift * sum(e[1:])
        out[e] = c * eps ** (a % b.p) if b.p > 1 else c
    return b.like(out)


def mu_p_action(rs: RootSystem) -> list[int]:
    """Permutation pi (1-based) with eps . b_i = b_{pi(i)} for eps = zeta_p."""
    p = rs.p
    if p == 1:
        return list(range(1, len(rs.roots) + 1))
    eps = zeta(p)
    perm = []
    used = set()
    for b in rs.roots:
        img = apply_mu(b, eps)
        hit = None
        for j, c in enumerate(rs.roots):
            if j in used:
                continue
            t = min(x for x in (img.trunc, c.trunc) if x is not None) if (img.trunc is not None or c.trunc is not None) else None
            if (img - c).truncate(t).is_zero():
                hit = j
                break
        if hit is None:
            raise NotClosedUnderAction("image of a root is not a root")
        used.add(hit)
        perm.append(hit + 1)
    return perm
