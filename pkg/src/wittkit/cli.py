"""Command-line front end: JSON-in/JSON-out reports over the library.

Exit codes: 0 all checks pass, 1 any failure, 2 any indeterminate verdict,
3 usage or resource errors (malformed input, Witt table cap exceeded).
Reports are deterministic for a fixed invocation and seed; the report hash
excludes timings.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction

from .errors import TableCapError
from .glueing import GlueDatum, glue_datum_from_json, glue_to_free
from .hahn import HahnSeries
from .newton import ascii_plot, newton_polygon
from .tower import Monomial, covering_table_check, monomial_membership
from .values import Zp1
from .witt import (WittVec, teichmuller, witt_add, witt_from_json, witt_mul,
                   witt_neg)
from .witness import (build_archimedean_witness, build_nonarchimedean_witness,
                      build_scholze_element, factorization_obstruction_check,
                      ideal_chain_report, liouville_certificate,
                      regrouped_subsequence)
from .witt import divide_exact_teichmuller
from .wittpoly import get_table

SCHEMA = "wittkit-report/1"


def _report(command: str, parameters: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "parameters": parameters,
            "certificates": [], "verdicts": [], "timings": {}}


def _verdict(report: dict, name: str, verdict: str, reason: str) -> None:
    report["verdicts"].append({"name": name, "verdict": verdict,
                               "reason": reason})


def _finish(report: dict, t0: float) -> int:
    report["timings"]["seconds"] = round(time.time() - t0, 3)
    hashed = {k: v for k, v in report.items() if k != "timings"}
    payload = json.dumps(hashed, sort_keys=True, default=str)
    report["hash"] = hashlib.sha256(payload.encode()).hexdigest()
    json.dump(report, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    verdicts = [v["verdict"] for v in report["verdicts"]]
    if any(v == "fail" for v in verdicts):
        return 1
    if any(v == "indeterminate" for v in verdicts):
        return 2
    return 0


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


# -- subcommands ------------------------------------------------------------


def _cmd_witt(args) -> int:
    t0 = time.time()
    rep = _report("witt", {"input": args.input})
    obj = _load_json(args.input)
    table = get_table(obj["a"]["coords"][0]["p"] if obj["a"]["coords"] else args.p)
    a = witt_from_json(obj["a"])
    op = obj.get("op", "add")
    if op == "neg":
        out = witt_neg(a, table)
    else:
        b = witt_from_json(obj["b"])
        out = witt_add(a, b, table) if op == "add" else witt_mul(a, b, table)
    rep["certificates"].append({"op": op, "result": out.to_json()})
    _verdict(rep, f"witt-{op}", "pass", "computed at precision")
    return _finish(rep, t0)


def _cmd_newton(args) -> int:
    t0 = time.time()
    rep = _report("newton", {"input": args.input})
    h = witt_from_json(_load_json(args.input))
    np = newton_polygon(h)
    cert = np.to_json()
    cert["plot"] = ascii_plot(np)
    rep["certificates"].append(cert)
    _verdict(rep, "newton-show", "pass",
             f"certified prefix width {np.certified_width}")
    return _finish(rep, t0)


def _cmd_witness(args) -> int:
    t0 = time.time()
    rep = _report("witness", {"kind": args.kind, "p": args.p,
                              "depth": args.depth, "kmax": args.kmax})
    table = get_table(args.p)
    if args.kind == "arch":
        w = build_archimedean_witness(args.p, args.depth)
    else:
        w = build_nonarchimedean_witness(args.p, args.depth)
    chain = ideal_chain_report(w, args.kmax, table)
    rep["certificates"].append(chain.to_json())
    if chain.all_in and chain.strictly_decreasing:
        _verdict(rep, f"witness-{args.kind}", "pass",
                 "all chain elements certified in the intersection; "
                 "leading valuations strictly decreasing")
    elif any(e["membership"]["verdict"] == "indeterminate"
             for e in chain.entries):
        _verdict(rep, f"witness-{args.kind}", "indeterminate",
                 "membership hidden by precision caps")
    else:
        _verdict(rep, f"witness-{args.kind}", "fail", "chain check failed")
    return _finish(rep, t0)


def _cmd_scholze(args) -> int:
    t0 = time.time()
    rep = _report("scholze", {"p": args.p, "depth": args.depth,
                              "height": args.height,
                              "candidates": args.candidates})
    table = get_table(args.p)
    el = build_scholze_element(args.p, args.depth)
    terms = regrouped_subsequence(list(el.s_seq))
    liou = liouville_certificate(terms, args.height)
    rep["certificates"].append({"liouville": liou.to_json()})
    _verdict(rep, "liouville", "pass" if liou.certified else "fail", liou.reason)

    violated = indeterminate = 0
    s_min = min(el.s_seq)
    for k in range(1, args.candidates + 1):
        gamma = s_min + Fraction(k, 4 * args.candidates)
        tg = HahnSeries.t_pow(args.p, type(el.x.coords[0].terms[0][0])(gamma, args.p))
        y = teichmuller(tg, el.x.prec_n)
        z = divide_exact_teichmuller(el.x, tg)
        res = factorization_obstruction_check(el, y, z, table)
        if res.status == "violation":
            violated += 1
        else:
            indeterminate += 1
    rep["certificates"].append({"candidates": args.candidates,
                                "violated": violated,
                                "indeterminate": indeterminate})
    if indeterminate:
        _verdict(rep, "obstruction-family", "indeterminate",
                 f"{indeterminate} candidates undecided")
    else:
        _verdict(rep, "obstruction-family", "pass",
                 f"all {violated} candidate factorizations violated")
    return _finish(rep, t0)


def _cmd_glue(args) -> int:
    t0 = time.time()
    rep = _report("glue", {"input": args.input, "N": args.N,
                           "gamma": args.gamma})
    obj = _load_json(args.input)
    if args.N is not None:
        obj["N"] = args.N
    if args.gamma is not None:
        q = Fraction(args.gamma)
        obj["gamma_max"] = {"num": q.numerator, "den": q.denominator}
    datum = glue_datum_from_json(obj)
    cert = glue_to_free(datum, get_table(datum.p))
    rep["certificates"].append(cert.to_json())
    _verdict(rep, "glue-certificate", "pass" if cert.ok else "fail",
             "T*Q == U at precision with membership certificates"
             if cert.ok else "certificate incomplete")
    return _finish(rep, t0)


def _cmd_tower(args) -> int:
    t0 = time.time()
    rep = _report("tower", {"mode": args.mode, "window": args.window})
    if args.mode == "member":
        m = Monomial(args.a, Fraction(args.gamma))
        ok = monomial_membership(m, args.tag)
        rep["certificates"].append({"monomial": m.to_json(), "tag": args.tag,
                                    "member": ok})
        _verdict(rep, "tower-member", "pass", f"membership is {ok}")
    else:
        table_rep = covering_table_check(args.window)
        rep["certificates"].append(table_rep.to_json())
        _verdict(rep, "tower-table", "pass" if table_rep.ok else "fail",
                 "all covering-table cells verified" if table_rep.ok
                 else f"{len(table_rep.failures)} failing cells")
    return _finish(rep, t0)


def _cmd_selftest(args) -> int:
    t0 = time.time()
    rep = _report("selftest", {"seed": args.seed})
    rng = random.Random(args.seed)
    table = get_table(2)

    # Witt arithmetic sanity: [1] + [1] == p for p = 2.
    one = WittVec.one(2, "Zp1", 3)
    s = witt_add(one, one, table)
    ok = (s.coords[0].is_zero() and not s.coords[1].is_zero())
    rep["certificates"].append({"check": "one-plus-one", "ok": ok})
    _verdict(rep, "witt-sanity", "pass" if ok else "fail", "[1]+[1] == p")

    # Archimedean witness, short chain.
    w = build_archimedean_witness(2, 4)
    chain = ideal_chain_report(w, 3, table)
    ok = chain.all_in and chain.strictly_decreasing
    rep["certificates"].append({"check": "arch-chain", "ok": ok})
    _verdict(rep, "witness-sanity", "pass" if ok else "fail",
             "chain certified and strictly decreasing")

    # Random Teichmuller multiplicativity probes.
    probes = 0
    for _ in range(20):
        e1 = Fraction(rng.randint(-4, 4), 2 ** rng.randint(0, 2))
        e2 = Fraction(rng.randint(-4, 4), 2 ** rng.randint(0, 2))
        t1 = teichmuller(HahnSeries.t_pow(2, Zp1(e1, 2)), 3)
        t2 = teichmuller(HahnSeries.t_pow(2, Zp1(e2, 2)), 3)
        prod = witt_mul(t1, t2, table)
        want = teichmuller(HahnSeries.t_pow(2, Zp1(e1 + e2, 2)), 3)
        if all((a - b).is_zero() for a, b in zip(prod.coords, want.coords)):
            probes += 1
    rep["certificates"].append({"check": "teichmuller-mult", "ok": probes == 20})
    _verdict(rep, "teichmuller-sanity", "pass" if probes == 20 else "fail",
             f"{probes}/20 exact")

    # Tower covering table on a small window.
    trep = covering_table_check(5)
    rep["certificates"].append({"check": "tower-table", "ok": trep.ok})
    _verdict(rep, "tower-sanity", "pass" if trep.ok else "fail",
             "covering table verified")

    # Tiny glue round trip.
    datum = GlueDatum(2, "Zp1", 1, (("diag", ((1, Fraction(-1)),)),), 3,
                      Fraction(4))
    cert = glue_to_free(datum, table)
    rep["certificates"].append({"check": "glue-d1", "ok": cert.ok})
    _verdict(rep, "glue-sanity", "pass" if cert.ok else "fail",
             "d=1 certificate complete")

    return _finish(rep, t0)


# -- argument parsing -------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wittkit",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_witt = sub.add_parser("witt", help="Witt arithmetic on JSON inputs")
    p_witt.add_argument("--input", required=True)
    p_witt.add_argument("--p", type=int, default=2)
    p_witt.set_defaults(func=_cmd_witt)

    p_newton = sub.add_parser("newton", help="Newton polygon of an element")
    p_newton.add_argument("mode", choices=["show"])
    p_newton.add_argument("--input", required=True)
    p_newton.set_defaults(func=_cmd_newton)

    p_wit = sub.add_parser("witness", help="non-coherence witness chains")
    p_wit.add_argument("kind", choices=["arch", "nonarch"])
    p_wit.add_argument("--p", type=int, default=2)
    p_wit.add_argument("--depth", type=int, default=5)
    p_wit.add_argument("--kmax", type=int, default=8)
    p_wit.set_defaults(func=_cmd_witness)

    p_sch = sub.add_parser("scholze", help="rapid sequence obstruction")
    p_sch.add_argument("--p", type=int, default=2)
    p_sch.add_argument("--depth", type=int, default=6)
    p_sch.add_argument("--height", type=int, default=1000)
    p_sch.add_argument("--candidates", type=int, default=50)
    p_sch.set_defaults(func=_cmd_scholze)

    p_glue = sub.add_parser("glue", help="two-chart factorization certificate")
    p_glue.add_argument("--input", required=True)
    p_glue.add_argument("--N", type=int, default=None)
    p_glue.add_argument("--gamma", default=None)
    p_glue.set_defaults(func=_cmd_glue)

    p_tow = sub.add_parser("tower", help="ring tower calculus")
    p_tow.add_argument("mode", choices=["member", "table"])
    p_tow.add_argument("--window", type=int, default=8)
    p_tow.add_argument("--a", type=int, default=0)
    p_tow.add_argument("--gamma", default="0")
    p_tow.add_argument("--tag", default="A")
    p_tow.set_defaults(func=_cmd_tower)

    p_self = sub.add_parser("selftest", help="deterministic invariant suite")
    p_self.add_argument("--seed", type=int, default=0)
    p_self.set_defaults(func=_cmd_selftest)

    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 3 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"wittkit: bad input: {exc}", file=sys.stderr)
        return 3
    except TableCapError as exc:
        print(f"wittkit: resource limit: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
