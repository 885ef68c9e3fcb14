"""The ``semitop`` command line.

Every command builds a report dictionary; ``--format json`` prints it with sorted
keys, so a fixed command and seed give byte-identical output.  Exit codes: 0 when
the verdict is pass, 1 on fail or unknown, 2 on usage and parse errors.
"""
from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from typing import Optional, Sequence

from . import __version__, cantor, clones, propx, suites
from .elements import (UNDEF, ComputableElement, FiniteBinaryRelation, FinitePartialBijection, ParseError,
                       Unknown, bipartition_product, check_certificate, compose, element_from_finite,
                       parse_bipartition, parse_element)
from .fintop import (check_semigroup_topology, enumerate_topologies, is_continuous, load_cayley, members,
                     separation)
from .subbasis import METRICS, ball_to_basic, member, metric, normalize_I4, parse_named_set
from .zariski import elementary_algebraic, word_functions, zariski_topology

CHECK_SCHEMA = {
    "type": "object",
    "required": ["name", "verdict"],
    "properties": {
        "name": {"type": "string"},
        "verdict": {"enum": ["pass", "fail", "unknown"]},
        "reason": {},
    },
    "if": {"properties": {"verdict": {"enum": ["fail", "unknown"]}}},
    "then": {"required": ["name", "verdict", "reason"]},
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "semitop report",
    "type": "object",
    "required": ["tool", "version", "command", "verdict", "provenance", "checks", "result"],
    "additionalProperties": False,
    "properties": {
        "tool": {"const": "semitop"},
        "version": {"type": "string"},
        "command": {"type": "string"},
        "verdict": {"enum": ["pass", "fail", "unknown"]},
        "provenance": {
            "type": "object",
            "required": ["argv", "seed"],
            "properties": {"argv": {"type": "array", "items": {"type": "string"}},
                           "seed": {"type": ["integer", "null"]}},
        },
        "checks": {"type": "array", "items": CHECK_SCHEMA},
        "result": {"type": "object"},
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _check(name: str, verdict, reason=None) -> dict:
    if isinstance(verdict, bool):
        verdict = "pass" if verdict else "fail"
    out = {"name": name, "verdict": verdict}
    if reason is not None or verdict != "pass":
        out["reason"] = reason if reason is not None else "no detail"
    return out


def _verdict(checks: list[dict]) -> str:
    vs = {c["verdict"] for c in checks}
    return "fail" if "fail" in vs else "unknown" if "unknown" in vs else "pass"


def _show(v) -> object:
    if v is UNDEF:
        return "-"
    if isinstance(v, Unknown):
        return f"unknown: {v.reason}"
    return v


def _computable(text: str) -> ComputableElement:
    e = parse_element(text, as_family="PartialBijection" if text.strip().startswith("{") else None)
    if isinstance(e, ComputableElement):
        return e
    if isinstance(e, (FinitePartialBijection, FiniteBinaryRelation)) or hasattr(e, "images"):
        return element_from_finite(e)
    raise UsageError(f"{text!r} is not an element of a monoid on N")


def _render(e, window: int):
    if isinstance(e, ComputableElement):
        out = {"name": e.name, "family": e.family,
               "values": [_show(e(x)) for x in range(window)] if e.fn is not None else None}
        if e.support is not None:
            out["support"] = str(e.support)
        return out
    return {"value": str(e)}


# -- commands ------------------------------------------------------------------------------

def cmd_zariski(a):
    S = load_cayley(a.cayley)
    words = a.words.replace("-", "_")
    wfs = word_functions(S, a.mode, words, a.adjoin_identity)
    fam = elementary_algebraic(S, a.mode, words, a.adjoin_identity)
    t = zariski_topology(S, a.mode, words, a.adjoin_identity)
    rep = check_semigroup_topology(S, t)
    sep = separation(t)
    checks = [_check("left_semitopological", rep.left_semitopological, None if rep.left_semitopological
                     else "some left translation is discontinuous"),
              _check("right_semitopological", rep.right_semitopological, None if rep.right_semitopological
                     else "some right translation is discontinuous")]
    if S.inverse is not None:
        ok = is_continuous(S.inverse, t)
        checks.append(_check("inversion_continuous", ok, None if ok else "inversion is discontinuous"))
    result = {"order": S.order, "mode": a.mode, "words": a.words,
              "word_functions": len(wfs),
              "elementary_algebraic": sorted((members(m) for m in fam.masks), key=lambda s: (len(s), s)),
              "opens": t.sorted_opens(),
              "separation": {"T0": sep.T0, "T1": sep.T1, "T2": sep.T2},
              "topological": rep.topological}
    return checks, result


def cmd_propx(a):
    rep = propx.run_suite(a.monoid, samples=a.samples, window=a.window, seed=a.seed,
                          nbhds=a.nbhds, ks=a.ks, n=a.n)
    checks = [_check("identity_and_transfer", rep.ok, None if rep.ok else rep.failures[:10])]
    return checks, rep.to_json()


def cmd_partition_mul(a):
    s, t = parse_bipartition(a.left), parse_bipartition(a.right)
    if s.degree != t.degree:
        n = max(s.degree, t.degree)
        s, t = parse_bipartition(a.left, n), parse_bipartition(a.right, n)
    prod, cert = bipartition_product(s, t)
    certs = []
    ok = True
    for p, q in cert.pairs():
        path = cert.path(p, q)
        good = check_certificate(s, t, path)
        ok &= good
        certs.append({"from": str(p), "to": str(q), "path": [list(x) for x in path], "valid": good})
    checks = [_check("certificates", ok, None if ok else "an invalid path certificate")]
    return checks, {"product": str(prod), "certificates": certs}


def cmd_compose(a):
    if a.left.strip().startswith("[[") or a.right.strip().startswith("[["):
        s, t = parse_bipartition(a.left), parse_bipartition(a.right)
        return [], {"product": str(bipartition_product(s, t)[0])}
    fam = a.family
    x, y = parse_element(a.left, fam), parse_element(a.right, fam)
    if fam is None and {type(x).__name__, type(y).__name__} == {"FiniteTransformation", "FinitePartialMap"}:
        x, y = parse_element(a.left, "PartialMap"), parse_element(a.right, "PartialMap")
    if isinstance(x, ComputableElement) != isinstance(y, ComputableElement):
        x, y = _computable(a.left), _computable(a.right)
    return [], {"product": _render(compose(x, y), a.window)}


def cmd_metric(a):
    f, g = _computable(a.left), _computable(a.right)
    d = metric(a.metric, f, g)
    return [], {"metric": a.metric, "distance": f"{d.numerator}/{d.denominator}"}


def cmd_member(a):
    e = _computable(a.element)
    s = parse_named_set(a.set)
    v = member(e, s)
    if isinstance(v, Unknown):
        return [_check("decided", "unknown", v.reason)], {"set": str(s), "member": None}
    return [], {"set": str(s), "member": bool(v)}


def cmd_normalize(a):
    sets = [parse_named_set(s) for s in a.sets]
    B = normalize_I4(sets)
    out = {"sets": [str(s) for s in sets], "basic": str(B)}
    if a.element is not None:
        e = _computable(a.element)
        direct = all(member(e, s) for s in sets)
        got = B.member(e)
        return [_check("agrees_with_membership", got == direct,
                       None if got == direct else f"basic set says {got}, subbasic sets say {direct}")], \
            {**out, "member": bool(got)}
    return [], out


def cmd_ball(a):
    f = _computable(a.element)
    return [], {"m": a.m, "basic": str(ball_to_basic(f, a.m))}


def cmd_topology_enumerate(a):
    ts = list(enumerate_topologies(a.n))
    result = {"n": a.n, "count": len(ts)}
    if a.list:
        result["topologies"] = [t.sorted_opens() for t in ts]
    return [], result


def cmd_cantor_mill(a):
    import random
    rng = random.Random(f"cli-mill:{a.seed}")
    checks, reports = [], []
    for i in range(a.samples):
        A, B, phi, phi_inv, eps = cantor.random_mill_instance(rng)
        ext = cantor.mill_extend(A, B, phi, phi_inv, eps, depth=a.depth)
        rep = cantor.verify_mill(ext, A, phi, depth=a.depth, seed=a.seed * 1000 + i)
        reports.append({"A": A.name, "phi": phi.name, **rep.to_json()})
        checks.append(_check(f"instance {i}", rep.ok, None if rep.ok else rep.failure))
    return checks, {"depth": a.depth, "instances": reports}


def cmd_cantor_witness(a):
    s = cantor.parse_map(a.map)
    w = cantor.cantor_propx_witness(s, depth=a.depth)
    rep = cantor.verify_witness(s, w, depth=a.depth, samples=a.samples, seed=a.seed)
    return [_check("witness", rep.ok, None if rep.ok else rep.failure)], \
        {"map": s.name, "depth": a.depth, **rep.to_json()}


def cmd_clone_generate(a):
    gens = [clones.FiniteOperation.from_json(json.loads(g)) for g in a.generators]
    fam = clones.clone_generate(gens, a.arity_cap, a.q)
    return [], {"q": a.q, "arity_cap": a.arity_cap,
                "counts": {str(n): len(ops) for n, ops in sorted(fam.items())}}


def cmd_horn(a):
    import random
    rng = random.Random(f"cli-horn:{a.seed}")
    checks, rows = [], []
    for case in a.case:
        for i in range(a.samples):
            fs, g = clones.random_case_instance(rng, case)
            rep = clones.check_horn_instance(fs, g)
            ok = rep.ok and rep.case == case
            rows.append(rep.to_json())
            checks.append(_check(f"{case} {i}", ok, None if ok else rep.to_json()))
    return checks, {"instances": rows}


def cmd_suite(a):
    names = list(suites.SUITES) if a.name == "all" else [a.name]
    checks, out = [], {}
    for name in names:
        kw = {"samples": a.samples} if name == "propx" and a.samples is not None else {}
        r = suites.SUITES[name](a.seed, **kw)
        out[name] = r.to_json()
        checks.append(_check(name, r.ok, None if r.ok else r.failures[:5]))
    return checks, out


def cmd_schema(a):
    return [], {"schema": REPORT_SCHEMA}


def cmd_batch(a):
    try:
        with open(a.manifest) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read manifest: {e}")
    try:
        entries = json.loads(text) if text.strip() else []
    except json.JSONDecodeError:
        entries = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if isinstance(entries, dict):
        entries = entries.get("commands", [])
    checks, rows = [], []
    for i, entry in enumerate(entries):
        try:
            argv = shlex.split(entry) if isinstance(entry, str) else [str(x) for x in entry]
        except (ValueError, TypeError) as e:
            argv, code, rep = [], 2, None
            err = f"unreadable entry: {e}"
        else:
            if argv and argv[0] == "batch":
                code, rep, err = 2, None, "nested batch manifests are not allowed"
            else:
                try:
                    code, rep, err = run(argv)
                except Exception as e:      # isolate the entry, keep the batch going
                    code, rep, err = 1, None, f"{type(e).__name__}: {e}"
        verdict = rep["verdict"] if rep else "fail"
        rows.append({"entry": i, "argv": argv, "exit_code": code, "verdict": verdict,
                     **({"report": rep} if rep else {"error": err})})
        checks.append(_check(f"entry {i}", verdict, None if verdict == "pass" else (err or "entry failed")))
    return checks, {"entries": rows, "count": len(rows)}


# -- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="semitop", description="Semigroup topology verification tools.")
    p.add_argument("--version", action="version", version=f"semitop {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    z = sub.add_parser("zariski", parents=[common], help="Zariski topology of a Cayley table")
    z.add_argument("--cayley", required=True, metavar="FILE")
    z.add_argument("--words", choices=["strict", "with-constants"], default="with-constants")
    z.add_argument("--mode", choices=["semigroup", "inverse"], default="semigroup")
    z.add_argument("--adjoin-identity", action="store_true")
    z.set_defaults(func=cmd_zariski, command="zariski")

    px = sub.add_parser("propx", help="property-X witnesses").add_subparsers(dest="sub", required=True,
                                                                           parser_class=_Parser)
    v = px.add_parser("verify", parents=[common])
    v.add_argument("--monoid", required=True,
                   help="XX, PX, IX, InjX, BX, FullClone(n) or PX/XX")
    v.add_argument("--window", type=int, default=64)
    v.add_argument("--samples", type=int, default=10)
    v.add_argument("--nbhds", type=int, default=10)
    v.add_argument("--ks", type=int, default=10)
    v.add_argument("--n", type=int, default=2, help="arity for FullClone")
    v.set_defaults(func=cmd_propx, command="propx verify")

    pt = sub.add_parser("partition", help="bipartitions").add_subparsers(dest="sub", required=True,
                                                                        parser_class=_Parser)
    m = pt.add_parser("mul", parents=[common])
    m.add_argument("left")
    m.add_argument("right")
    m.set_defaults(func=cmd_partition_mul, command="partition mul")

    c = sub.add_parser("compose", parents=[common], help="compose two elements left to right")
    c.add_argument("left")
    c.add_argument("right")
    c.add_argument("--family", choices=["PartialBijection", "PartialMap"], default=None)
    c.add_argument("--window", type=int, default=16)
    c.set_defaults(func=cmd_compose, command="compose")

    d = sub.add_parser("metric", parents=[common], help="exact distance between two elements")
    d.add_argument("--metric", choices=METRICS, default="d4")
    d.add_argument("left")
    d.add_argument("right")
    d.set_defaults(func=cmd_metric, command="metric")

    mb = sub.add_parser("member", parents=[common], help="membership in a subbasic set")
    mb.add_argument("element")
    mb.add_argument("set")
    mb.set_defaults(func=cmd_member, command="member")

    nz = sub.add_parser("normalize", parents=[common], help="intersect I4 subbasic sets")
    nz.add_argument("sets", nargs="*")
    nz.add_argument("--element", default=None)
    nz.set_defaults(func=cmd_normalize, command="normalize")

    bl = sub.add_parser("ball", parents=[common], help="d4 ball as a basic set")
    bl.add_argument("element")
    bl.add_argument("--m", type=int, required=True)
    bl.set_defaults(func=cmd_ball, command="ball")

    tp = sub.add_parser("topology", help="finite topologies").add_subparsers(dest="sub", required=True,
                                                                            parser_class=_Parser)
    te = tp.add_parser("enumerate", parents=[common])
    te.add_argument("n", type=int)
    te.add_argument("--list", action="store_true")
    te.set_defaults(func=cmd_topology_enumerate, command="topology enumerate")

    ca = sub.add_parser("cantor", help="Cantor space tools").add_subparsers(dest="sub", required=True,
                                                                           parser_class=_Parser)
    cm = ca.add_parser("mill", parents=[common])
    cm.add_argument("--depth", type=int, default=16)
    cm.add_argument("--samples", type=int, default=5)
    cm.set_defaults(func=cmd_cantor_mill, command="cantor mill")
    cw = ca.add_parser("witness", parents=[common])
    cw.add_argument("map", help="prefix map, e.g. 'compose(flip(0),shift(2))'")
    cw.add_argument("--depth", type=int, default=12)
    cw.add_argument("--samples", type=int, default=64)
    cw.set_defaults(func=cmd_cantor_witness, command="cantor witness")

    cl = sub.add_parser("clone", help="finite clones").add_subparsers(dest="sub", required=True,
                                                                     parser_class=_Parser)
    cg = cl.add_parser("generate", parents=[common])
    cg.add_argument("generators", nargs="+", help='JSON operations {"q":..,"arity":..,"table":[..]}')
    cg.add_argument("--q", type=int, default=2)
    cg.add_argument("--arity-cap", type=int, default=2)
    cg.set_defaults(func=cmd_clone_generate, command="clone generate")

    h = sub.add_parser("horn", parents=[common], help="Horn composition against the detection oracle")
    h.add_argument("--case", action="append", choices=["alpha", "beta", "gamma", "delta"])
    h.add_argument("--samples", type=int, default=10)
    h.set_defaults(func=cmd_horn, command="horn")

    s = sub.add_parser("suite", parents=[common], help="run a verification suite")
    s.add_argument("name", choices=["all"] + list(suites.SUITES))
    s.add_argument("--samples", type=int, default=None, help="elements per monoid for the propx suite")
    s.set_defaults(func=cmd_suite, command="suite")

    sc = sub.add_parser("schema", parents=[common], help="print the report JSON schema")
    sc.set_defaults(func=cmd_schema, command="schema")

    b = sub.add_parser("batch", parents=[common], help="run a manifest of commands")
    b.add_argument("manifest")
    b.set_defaults(func=cmd_batch, command="batch")
    return p


def run(argv: Sequence[str]) -> tuple[int, Optional[dict], Optional[str]]:
    """Parse and execute; returns (exit code, report, error message)."""
    argv = list(argv)
    try:
        a = build_parser().parse_args(argv)
    except UsageError as e:
        return 2, None, str(e)
    except SystemExit as e:     # --help and --version
        return int(e.code or 0), None, None
    if getattr(a, "case", "x") is None:
        a.case = ["alpha", "beta", "gamma", "delta"]
    try:
        checks, result = a.func(a)
    except (UsageError, ParseError, ValueError, TypeError, OverflowError, KeyError, OSError) as e:
        return 2, None, f"{a.command}: {e}"
    verdict = _verdict(checks)
    report = {"tool": "semitop", "version": __version__, "command": a.command, "verdict": verdict,
              "provenance": {"argv": argv, "seed": a.seed}, "checks": checks, "result": result}
    report = json.loads(json.dumps(report, default=str))
    return (0 if verdict == "pass" else 1), report, None


def _text(report: dict) -> str:
    lines = [f"{report['command']}: {report['verdict']}"]
    if report["command"] == "batch":        # nested reports are too long to inline
        for r in report["result"]["entries"]:
            lines.append(f"  [{r['verdict']}] exit {r['exit_code']}  {shlex.join(r['argv'])}"
                         + (f"  ({r['error']})" if "error" in r else ""))
        return "\n".join(lines)
    for k, v in report["result"].items():
        lines.append(f"  {k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    for c in report["checks"]:
        if c["verdict"] != "pass":
            lines.append(f"  [{c['verdict']}] {c['name']}: {json.dumps(c.get('reason'), sort_keys=True)}")
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    t0 = time.perf_counter()
    code, report, err = run(argv)
    if err:
        print(f"error: {err}", file=sys.stderr)
    if report is not None:
        fmt = argparse.ArgumentParser(add_help=False)
        fmt.add_argument("--format", default="text")
        if fmt.parse_known_args(argv)[0].format == "json":
            print(json.dumps(report, sort_keys=True, indent=2))
        else:
            print(_text(report))
            print(f"  elapsed: {time.perf_counter() - t0:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
