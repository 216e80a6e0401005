"""formal-split: generate instances, run the pipeline, check lemmas; JSON reports on stdout."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib import metadata

import gmpy2

from . import errors as E
from .instances import PRESETS, Instance, preset, random_instance
from .series import PuiseuxSeries, substitute
from .splitting import DEFAULT_TRUNC, Point, is_nc, split, translate
from .transforms import blowup_chart, blowup_origin, ramify, rescale_q
from .verify import (
    verify_clopen,
    verify_homog,
    verify_negpower,
    verify_p1,
    verify_q0,
    verify_sigma_identity,
)
from .weierstrass import WeierstrassPoly

EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 2, 3, 4

_INCONCLUSIVE = (E.NeedsExtension, E.TruncationInsufficient, E.TruncationLoss)
_INPUT = (E.InvalidParams, E.DimensionMismatch, E.IndexOutOfRange, E.NonzeroConstantTerm, E.MultipleWVariables)


class InputError(Exception):
    pass


def version() -> str:
    try:
        return metadata.version("formal-split")
    except metadata.PackageNotFoundError:
        return "0.1.0"


def _plain(obj):
    if isinstance(obj, type(gmpy2.mpz(0))):
        return int(obj)
    if isinstance(obj, type(gmpy2.mpq(0))):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, default=_plain)


def digest(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


# --------------------------------------------------------------------------
# input


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_instance(path: str) -> Instance:
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise InputError("instance file must hold a JSON object")
    # a report carries its instance along
    if "instance" in obj and "k" not in obj:
        obj = obj["instance"]
    try:
        return Instance.from_json(obj)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed instance: {exc}") from exc


def _load_seeds(path: str, inst: Instance):
    obj = _load_json(path)
    if not isinstance(obj, list):
        raise InputError("seed file must hold a JSON list of series")
    try:
        return [PuiseuxSeries.from_json({"r": inst.r, "num_x": inst.k - 1, **s}) for s in obj]
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed seeds: {exc}") from exc


def _point(text):
    if text is None:
        return None
    try:
        return Point.parse(text)
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        raise InputError(f"bad point {text!r}: {exc}") from exc


def _as_instance(f: WeierstrassPoly, like: Instance, label: str) -> Instance:
    trunc = f.trunc if f.trunc is not None else like.trunc
    return Instance(k=f.k, r=f.r, s=f.s, p=f.p, q=f.q, trunc=max(trunc, f.k), mode="coeffs", payload=dict(f.coeffs), label=label)


# --------------------------------------------------------------------------
# commands: each returns (result object, exit code, instance or None)


def cmd_generate(a):
    if a.preset:
        inst = preset(a.preset)
        if a.k is not None and a.k != inst.k:
            raise E.InvalidParams(f"preset {a.preset} has k = {inst.k}")
        return inst.to_json(), EXIT_OK, inst
    if not a.random:
        raise E.InvalidParams("give --preset NAME or --random")
    if a.r not in (1,):
        raise E.InvalidParams("random instances use a single w variable")
    inst = random_instance(
        a.seed if a.seed is not None else 0,
        k=a.k if a.k is not None else 2,
        s=a.s,
        p_star=a.p,
        q_star=a.q,
        trunc=a.trunc if a.trunc is not None else DEFAULT_TRUNC,
        kind=a.kind,
    )
    return inst.to_json(), EXIT_OK, inst


def _trunc(a, inst):
    return a.trunc if a.trunc is not None else inst.trunc


def cmd_split(a):
    inst = load_instance(a.instance)
    seeds = _load_seeds(a.seeds, inst) if a.seeds else None
    res = split(inst.poly(), p_max=a.pmax, q_max=a.qmax, N=_trunc(a, inst), seeds=seeds, at=_point(a.at))
    code = {"Split": EXIT_OK, "NonSplitEvidence": EXIT_NEGATIVE}.get(res.status, EXIT_INCONCLUSIVE)
    return res.to_json(), code, inst


def cmd_nc_check(a):
    inst = load_instance(a.instance)
    at = None if a.at_origin else _point(a.at)
    out = is_nc(inst.poly(), at, N=_trunc(a, inst))
    return out, EXIT_OK if out["nc"] else EXIT_NEGATIVE, inst


def cmd_blowup(a):
    inst = load_instance(a.instance)
    f = inst.poly()
    g = blowup_origin(f) if a.origin else blowup_chart(f, a.j)
    return _as_instance(g, inst, f"{inst.label}:blowup").to_json(), EXIT_OK, inst


def cmd_ramify(a):
    inst = load_instance(a.instance)
    g = ramify(inst.poly(), a.p)
    return _as_instance(g, inst, f"{inst.label}:ramify").to_json(), EXIT_OK, inst


def cmd_rescale(a):
    inst = load_instance(a.instance)
    g = rescale_q(inst.poly(), a.q)
    return _as_instance(g, inst, f"{inst.label}:rescale").to_json(), EXIT_OK, inst


def _report_code(rep) -> int:
    if rep.hypothesis == "untestable":
        return EXIT_INCONCLUSIVE
    return EXIT_NEGATIVE if rep.conclusion == "fails" else EXIT_OK


def _run_lemma(lemma, f, a, at):
    N = a.trunc if a.trunc is not None else DEFAULT_TRUNC
    if lemma == "negpower":
        res = split(f, p_max=a.pmax, q_max=a.qmax, N=N, at=at)
        if res.root_system is None:
            if res.status == "NonSplitEvidence":
                raise E.NotDivisible("f does not split, so there are no roots to test")
            raise E.TruncationInsufficient(f"no splitting to test: {res.status}")
        return verify_negpower(res.root_system, translate(f, at))
    if lemma == "homog":
        return verify_homog(f, None, at, p_max=a.pmax, q_max=a.qmax, N=N)
    if lemma == "p1":
        return verify_p1(f, at, p_max=a.pmax, q_max=a.qmax, N=N)
    if lemma == "q0":
        return verify_q0(f, at, p_max=a.pmax, q_max=a.qmax, N=N)
    if lemma == "clopen":
        pts = [_point(t) for t in (a.points or [])] or [None]
        return verify_clopen(f, pts, N=N)
    raise E.InvalidParams(f"unknown lemma {lemma!r}")


def cmd_verify(a):
    if a.lemma == "sigma":
        if a.k is None or a.h is None:
            raise E.InvalidParams("sigma needs --k and --h")
        rep = verify_sigma_identity(a.k, a.h)
        return rep.to_json(), _report_code(rep), None
    if a.batch:
        return _verify_batch(a)
    if not a.instance:
        raise E.InvalidParams("give an instance file or --batch N")
    inst = load_instance(a.instance)
    rep = _run_lemma(a.lemma, inst.poly(), a, _point(a.at))
    return rep.to_json(), _report_code(rep), inst


def _verify_batch(a):
    lemmas = ["negpower", "homog", "p1", "q0"] if a.lemma == "all" else [a.lemma]
    tally: dict = {}
    failures = []
    base = a.seed if a.seed is not None else 0
    for n in range(a.batch):
        k = a.k if a.k is not None else 2 + n % 2
        inst = random_instance(base + n, k=k, s=a.s, kind=a.kind)
        f = inst.poly()
        for lem in lemmas:
            rep = _run_lemma(lem, f, a, None)
            key = f"{lem}:{rep.hypothesis}:{rep.conclusion}"
            tally[key] = tally.get(key, 0) + 1
            if rep.failed:
                failures.append({"seed": base + n, "lemma": lem, "witness": rep.witness})
    result = {"batch": a.batch, "kind": a.kind, "tally": tally, "failures": failures}
    return result, EXIT_NEGATIVE if failures else EXIT_OK, None


def cmd_identity(a):
    """Blow-up identities on an instance: w^k * strict transform = pullback, and
    rescale_q(f, q) = q-fold origin blow-up."""
    inst = load_instance(a.instance)
    f = inst.poly()
    checks = {}
    g = blowup_chart(f, a.j)
    tmpl = f.template()
    wj = tmpl.gen(f"v{a.j}") ** f.p
    assignment = {f"x{i + 1}": wj * tmpl.gen(f"x{i + 1}") for i in range(f.nx)}
    ok = True
    for i, c in f.coeffs.items():
        exact = PuiseuxSeries(c.p, c.q, c.r, c.nx, None, c.terms)
        pulled = substitute(exact, assignment, target=tmpl)
        diff = g.coeffs[i] * wj**i - pulled
        if not diff.truncate(c.trunc).is_zero():
            ok = False
    checks["total_transform"] = ok
    if f.r == 1:
        h = f
        for _ in range(a.q):
            h = blowup_origin(h)
        checks["rescale_equals_blowups"] = rescale_q(f, a.q).equal_mod(h, f.trunc)
    result = {"identity": "blowup", "j": a.j, "q": a.q, "checks": checks, "holds": all(checks.values())}
    return result, EXIT_OK if result["holds"] else EXIT_NEGATIVE, inst


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="formal-split", description="Formal splitting of Weierstrass polynomials into linear factors.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {version()}")
    sub = ap.add_subparsers(dest="command", required=True)

    def shared(p, instance=True, optional_instance=False):
        if instance:
            p.add_argument("instance", nargs="?" if optional_instance else None, help="instance JSON file ('-' for stdin)")
        p.add_argument("--trunc", type=int, help="truncation order N")
        p.add_argument("--pmax", type=int, default=3)
        p.add_argument("--qmax", type=int, default=1)
        p.add_argument("--seeds", help="JSON list of linear seed forms")
        p.add_argument("--at", help="point, e.g. w=1,u=2;3")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, help="RNG seed")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")

    g = sub.add_parser("generate", help="write a preset or random instance")
    shared(g, instance=False)
    g.add_argument("--preset", choices=PRESETS)
    g.add_argument("--random", action="store_true")
    g.add_argument("--k", type=int)
    g.add_argument("--r", type=int, default=1)
    g.add_argument("--s", type=int, default=0)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--q", type=int, default=0)
    g.add_argument("--kind", choices=["general", "proxy_true", "proxy_false"], default="general")
    g.set_defaults(fn=cmd_generate)

    p = sub.add_parser("split", help="search for a splitting over (q, p)")
    shared(p)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("nc-check", help="normal crossings test at a point")
    shared(p)
    p.add_argument("--at-origin", action="store_true")
    p.set_defaults(fn=cmd_nc_check)

    p = sub.add_parser("blowup", help="strict transform in a w_j chart")
    shared(p)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--origin", action="store_true", help="blow up the origin instead")
    p.set_defaults(fn=cmd_blowup)

    p = sub.add_parser("ramify", help="pass to the cover w = v^p")
    shared(p)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(fn=cmd_ramify)

    p = sub.add_parser("rescale", help="x -> w^q x, z -> w^q z")
    shared(p)
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(fn=cmd_rescale)

    p = sub.add_parser("verify", help="lemma checks on an instance, a batch, or the symmetric identity")
    shared(p, optional_instance=True)
    p.add_argument("--lemma", required=True, choices=["negpower", "homog", "p1", "q0", "sigma", "clopen", "all"])
    p.add_argument("--k", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--batch", type=int, help="run on N random instances")
    p.add_argument("--kind", choices=["general", "proxy_true", "proxy_false"], default="proxy_true")
    p.add_argument("--points", action="append", help="sample point for clopen (repeatable)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("identity", help="check the blow-up identities on an instance")
    shared(p)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.set_defaults(fn=cmd_identity)
    return ap


def _input_echo(a, inst):
    if inst is not None and a.command != "generate":
        return inst.to_json()
    return {k: v for k, v in sorted(vars(a).items()) if k not in ("fn", "out", "timing")}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    t0 = time.perf_counter()
    inst = None
    try:
        if a.command == "verify" and a.lemma == "all" and not a.batch:
            raise E.InvalidParams("--lemma all needs --batch")
        result, code, inst = a.fn(a)
    except InputError as exc:
        return _fail(argv, str(exc), "InputError")
    except _INPUT as exc:
        return _fail(argv, str(exc), type(exc).__name__)
    except _INCONCLUSIVE as exc:
        result, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_INCONCLUSIVE
    except E.FormalSplitError as exc:
        result, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_NEGATIVE
    echo = _input_echo(a, inst)
    report = {
        "command": argv,
        "version": version(),
        "input_digest": digest(echo),
        "exit_code": code,
        "result": result,
    }
    if inst is not None:
        report["instance"] = inst.to_json()
    if a.timing:
        report["timing"] = {"seconds": f"{time.perf_counter() - t0:.3f}"}
    _emit(a, canonical(report))
    return code


def _fail(argv, message, kind) -> int:
    report = {"command": argv, "version": version(), "exit_code": EXIT_INPUT, "result": {"error": kind, "message": message}}
    print(canonical(report), file=sys.stderr)
    return EXIT_INPUT


def _emit(a, text):
    if getattr(a, "out", None):
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
