"""Command-line interface.

Subcommands: field, curve, regulator, lvalue, verify, scan-limit.
Exit codes for verify: 0 = all matches, 2 = recognized but mismatched,
3 = unrecognized.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import mpmath as mp

from . import verify as verify_mod
from .arith import factored_str
from .fields import CubicSpec, NumberField, QuarticSpec
from .curves import parameter_from_field, tate_normal_form, rank_family_from_unit
from .regulator import limit_scan, limit_rhs
from .verify import FAMILY_KINDS, expected_row, row_report_json, verify_row


def _field_from_args(args):
    if args.family == "cubic":
        spec = CubicSpec(args.eps, args.epsp, args.a)
    else:
        spec = QuarticSpec(args.b, args.c_offset, args.eps, args.a)
    return NumberField.from_spec(spec)


def cmd_field(args):
    field = _field_from_args(args)
    doc = field.to_json()
    _emit(doc, args)
    return 0


def cmd_curve(args):
    kind = _kind_from_args(args)
    field, model, _classes, fam = verify_mod.build_row_objects(kind, args.a)
    doc = model.to_json()
    doc["field"] = field.to_json()
    if fam is not None:
        doc["c_lambda"] = fam.c_lambda
    _emit(doc, args)
    return 0


def _kind_from_args(args):
    if getattr(args, "N", None):
        return f"N{args.N}"
    if getattr(args, "lam", None):
        return f"L{args.lam}"
    raise SystemExit("specify --N 7|8|10 or --lam 1..4")


def cmd_regulator(args):
    from .regulator import regulator as reg_fn
    kind = _kind_from_args(args)
    field, model, classes, fam = verify_mod.build_row_objects(kind, args.a)
    reg = reg_fn(field, model, classes, args.prec, family=fam)
    doc = reg.to_json(extra={"a": args.a, "family": kind})
    _emit(doc, args)
    return 0


def cmd_lvalue(args):
    from . import lfunction as lf
    kind = _kind_from_args(args)
    field, model, _classes, _fam = verify_mod.build_row_objects(kind, args.a)
    data = lf.build_lseries(model, field, prec=args.prec, cache_dir=args.cache,
                            tail_bits=args.tail_bits)
    val, rep = lf.lstar_at_zero(data, args.prec)
    doc = {
        "family": kind, "a": args.a,
        "A": rep["A"], "w": rep["w"], "m": rep["m"],
        "Lstar": mp.nstr(val, args.prec * 3 // 10),
        "digits": args.prec * 3 // 10,
        "cutoff": rep["cutoff"],
        "runtime": rep["runtime"],
    }
    _emit(doc, args)
    return 0


def _verify_kinds(table):
    mapping = {"7": "N7", "8": "N8", "10": "N10",
               "l1": "L1", "l2": "L2", "l3": "L3", "l4": "L4"}
    if table not in mapping:
        raise SystemExit(f"unknown table {table}")
    return mapping[table]


def _verify_one(job):
    kind, a, prec, cache = job
    try:
        rep = verify_row(kind, a, prec, cache_dir=cache)
        return row_report_json(rep)
    except Exception as exc:
        return {"family": kind, "a": a, "error": repr(exc)}


def cmd_verify(args):
    kind = _verify_kinds(args.table)
    if args.all:
        from .verify import _expected_tables
        rows = [r["a"] for r in _expected_tables()[kind]]
    elif args.a is not None:
        rows = [args.a]
    else:
        raise SystemExit("give --a <int> or --all")
    jobs = [(kind, a, args.prec, args.cache) for a in rows]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(_verify_one, jobs))
    else:
        reports = [_verify_one(j) for j in jobs]
    worst = 0
    for rep in reports:
        if "error" in rep:
            status = "ERROR"
            worst = max(worst, 3)
        elif not rep.get("recognized"):
            status = "UNRECOGNIZED"
            worst = max(worst, 3)
        elif "match" in rep and not rep["match"]:
            status = "MISMATCH"
            worst = max(worst, 2)
        else:
            status = "ok" if rep.get("match") else "ok (no expected row)"
        line = f"{rep['family']} a={rep['a']}: {status}"
        if "Q_str" in rep and rep.get("Q_str"):
            line += f"  Q~ = {rep['Q_str']}"
        if "lstar" in rep:
            line += f"  L* = {rep['lstar']}"
        print(line)
    _emit({"reports": reports}, args, quiet=True)
    return worst


def cmd_scan_limit(args):
    kind = args.kind
    if kind.startswith("N"):
        scan_kind, par = "torsion", int(kind[1:])
        if par == 10:
            spec = lambda a: QuarticSpec(0, 0, 1, a)
        else:
            spec = lambda a: CubicSpec(1, -1, a)
    elif kind.startswith("S6:"):
        scan_kind, par = "rank", int(kind.split(":")[1])
        spec = lambda a: CubicSpec(1, -1, a)
    else:
        raise SystemExit("kind must be N7|N8|N10|S6:<lambda>")
    a_values = list(range(args.amin, args.amax + 1, args.step))
    out = limit_scan(scan_kind, par, spec, a_values, prec=args.prec)
    target = out["target"]
    print(f"target {kind}: {target} = {float(target):.6f}")
    for row in out["rows"]:
        if "error" in row:
            print(f"a={row['a']}: ERROR {row['error']}")
        else:
            print(f"a={row['a']}: R/log^{out['d']}|a| = {mp.nstr(row['ratio'], 12)}"
                  f"   rel.dev = {mp.nstr(row['rel_dev'], 4)}")
    doc = {"kind": kind, "target": str(target),
           "rows": [{k: (mp.nstr(v, 20) if isinstance(v, mp.mpf) else v)
                     for k, v in r.items()} for r in out["rows"]]}
    _emit(doc, args, quiet=True)
    return 0


def _emit(doc, args, quiet=False):
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2)
    elif not quiet:
        print(json.dumps(doc, indent=2))


def main(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None, help="working precision in bits (default 192)")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--cache", type=str, default=None, help="coefficient cache directory")
    common.add_argument("--json", type=str, default=None, help="write the report to this path")

    ap = argparse.ArgumentParser(prog="k2reg", parents=[common],
                                 description="Beilinson regulators and L-values for K2 of "
                                             "elliptic curves over cubic/quartic fields")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("field", parents=[common],
                       help="build a field and print its JSON descriptor")
    p.add_argument("--family", choices=["cubic", "quartic"], required=True)
    p.add_argument("--eps", type=int, default=1)
    p.add_argument("--epsp", type=int, default=-1)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--c-offset", dest="c_offset", type=int, default=0)
    p.add_argument("--a", type=int, required=True)
    p.set_defaults(fn=cmd_field)

    for name, fn in (("curve", cmd_curve), ("regulator", cmd_regulator), ("lvalue", cmd_lvalue)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--N", type=int, choices=[7, 8, 10])
        p.add_argument("--lam", type=int, choices=[1, 2, 3, 4])
        p.add_argument("--a", type=int, required=True)
        p.add_argument("--tail-bits", dest="tail_bits", type=int, default=None)
        p.set_defaults(fn=fn)

    p = sub.add_parser("verify", parents=[common], help="reproduce table rows and compare")
    p.add_argument("--table", required=True, help="7|8|10|l1|l2|l3|l4")
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--all", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("scan-limit", parents=[common], help="regulator limit-law scan")
    p.add_argument("--kind", required=True, help="N7|N8|N10|S6:<lambda>")
    p.add_argument("--amin", type=int, required=True)
    p.add_argument("--amax", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.set_defaults(fn=cmd_scan_limit)

    args = ap.parse_args(argv)
    if args.prec is None:
        args.prec = 192
    if args.threads is None:
        args.threads = 1
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
