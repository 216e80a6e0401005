"""Blow-up charts, ramified covers w = v^p and the x/w^q rescaling of Weierstrass polynomials.

Truncated inputs are assumed to have order k beyond their truncation too, so
every transform keeps the truncation order of its input.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidParams, MultipleWVariables, NotOrderK
from .series import PuiseuxSeries, substitute
from .weierstrass import WeierstrassPoly


def _divide_by_w(c: PuiseuxSeries, j: int, n: int, trunc) -> PuiseuxSeries:
    """c / w_j^n, staying inside the encoding's pole bound."""
    shift = c.p * n
    out = {}
    for e, v in c.terms.items():
        a = e[j] - shift
        if a < 0:
            raise NotOrderK(f"dividing by w_{j + 1}^{n} leaves a pole")
        e2 = e[:j] + (a,) + e[j + 1 :]
        out[e2] = v
    return PuiseuxSeries(c.p, c.q, c.r, c.nx, trunc, out)


def blowup_chart(f: WeierstrassPoly, j: int = 1) -> WeierstrassPoly:
    """Strict transform in the w_j-chart: w_j^(-k) f(w, u, w_j x, w_j z)."""
    if not 1 <= j <= f.r:
        raise InvalidParams(f"no w-variable w_{j}")
    tmpl = f.template()
    wj = tmpl.gen(f"v{j}") ** f.p
    assignment = {f"x{i + 1}": wj * tmpl.gen(f"x{i + 1}") for i in range(f.nx)}
    coeffs = {}
    for i, c in f.coeffs.items():
        exact = PuiseuxSeries(c.p, c.q, c.r, c.nx, None, c.terms)
        pulled = substitute(exact, assignment, target=tmpl)
        coeffs[i] = _divide_by_w(pulled, j - 1, i, c.trunc)
    return WeierstrassPoly(f.k, coeffs, f.r, f.s)


def blowup_origin(f: WeierstrassPoly) -> WeierstrassPoly:
    """Blow-up with centre {z = x = w = 0}, w-chart (single w variable)."""
    if f.r != 1:
        raise MultipleWVariables("the origin blow-up needs r = 1")
    return blowup_chart(f, 1)


def ramify(f: WeierstrassPoly, p: int) -> WeierstrassPoly:
    """Pass to the cover w = v^p; the (alpha, beta) data is unchanged."""
    if p < 1:
        raise InvalidParams("p must be positive")
    return f.promote(p=f.p * p)


def rescale_q(f: WeierstrassPoly, q: int) -> WeierstrassPoly:
    """x -> w^q x, z -> w^q z, divided by w^(qk), by direct exponent arithmetic."""
    if q < 0:
        raise InvalidParams("q must be nonnegative")
    if f.r != 1:
        raise MultipleWVariables("rescaling needs r = 1")
    if q == 0:
        return f
    coeffs = {}
    for i, c in f.coeffs.items():
        out = {}
        for e, v in c.terms.items():
            na = sum(e[1:])
            a = e[0] + c.p * q * (na - i)
            if a < 0:
                raise NotOrderK("rescaling leaves a pole")
            out[(a,) + e[1:]] = v
        coeffs[i] = PuiseuxSeries(c.p, c.q, c.r, c.nx, c.trunc, out)
    return WeierstrassPoly(f.k, coeffs, f.r, f.s)


@dataclass(frozen=True)
class TransformLog:
    steps: tuple = ()
    exceptional: tuple = field(default=())

    def append(self, kind: str, **params) -> "TransformLog":
        if kind not in ("blowup_wj", "blowup_origin", "ramify", "rescale"):
            raise InvalidParams(f"unknown step {kind!r}")
        exc = self.exceptional
        if kind in ("blowup_wj", "blowup_origin"):
            label = f"w{params.get('j', 1)}"
            if label not in exc:
                exc = exc + (label,)
        return TransformLog(self.steps + ((kind, tuple(sorted(params.items()))),), exc)

    def to_json(self) -> dict:
        return {"steps": [{"kind": k, **dict(ps)} for k, ps in self.steps], "exceptional": list(self.exceptional)}

    @classmethod
    def from_json(cls, obj) -> "TransformLog":
        log = cls()
        for st in obj["steps"]:
            st = dict(st)
            kind = st.pop("kind")
            log = log.append(kind, **st)
        return log


def apply_step(f: WeierstrassPoly, kind: str, params: dict) -> WeierstrassPoly:
    if kind == "blowup_wj":
        return blowup_chart(f, int(params.get("j", 1)))
    if kind == "blowup_origin":
        return blowup_origin(f)
    if kind == "ramify":
        return ramify(f, int(params["p"]))
    if kind == "rescale":
        return rescale_q(f, int(params["q"]))
    raise InvalidParams(f"unknown step {kind!r}")


def replay(log: TransformLog, f0: WeierstrassPoly) -> WeierstrassPoly:
    f = f0
    for kind, ps in log.steps:
        f = apply_step(f, kind, dict(ps))
    return f
