"""Deterministic command-line front end.

Subcommands: gen, decompose, dual, tensor, check, report.  Everything is a
pure function of the input bytes, the flags, and the seed; outputs are
canonical JSON (sorted keys, fixed separators) so repeated runs are
byte-identical.  Exit codes: 0 success, 1 check failure, 2 malformed input
(with a JSON error object naming the path into the document).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bidirected as bd
from .duality import dual_object
from .exactla import FieldSpec
from .generators import rand_grid, rand_indtower, rand_tate, rand_tower
from .serialize import ParseError, grid_doc, matrix_doc, parse_grid, parse_space, space_doc
from .spaces import IndLCObj, IndTower, ProDiscObj, TateObj, Tower
from .suites import SUITES, run_suite
from .tensor import (
    tensor_bang_prodisc,
    tensor_bang_tate,
    tensor_indtowers,
    tensor_star_indlc,
    tensor_star_tate,
    tensor_star_towers,
)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_doc(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError("$", f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise ParseError("$", f"invalid JSON: {e}")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TATESPACE_SEED")
    return int(env) if env else 0


def cmd_gen(args) -> int:
    field = FieldSpec(args.field)
    rng = np.random.default_rng(_seed(args))
    if args.kind == "grid":
        planted = rand_grid(rng, field, m=args.m, n=args.n)
        truth = {
            "Vdims": list(planted.Vdims),
            "Wdims": list(planted.Wdims),
            "scramble": [[matrix_doc(S) for S in row] for row in planted.scramble],
        }
        doc = grid_doc(planted.grid, planted.witness, truth=truth)
        _emit(_dump(doc), args.out)
        if args.out:
            with open(args.out + ".truth.json", "w") as fh:
                fh.write(_dump(truth))
        return 0
    if args.kind == "tower":
        obj = rand_tower(rng, field, depth=args.depth)
    elif args.kind == "indtower":
        obj = rand_indtower(rng, field, depth=args.depth)
    elif args.kind == "tate":
        obj = rand_tate(rng, field, depth=args.depth)
    else:
        raise ParseError("$.kind", f"unknown kind {args.kind!r}")
    _emit(_dump(space_doc(obj, args.depth)), args.out)
    return 0


def cmd_decompose(args) -> int:
    doc = _load_doc(args.input)
    G, W, _, _, truth = parse_grid(doc)
    if W is None:
        raise ParseError("$.ses", "decomposition needs a short-exact-sequence witness")
    rep = bd.validate_grid(G, W)
    if not rep.ok:
        _emit(_dump({"kind": "validation", "ok": False, "violations": list(rep.violations)}), args.out)
        return 1
    basis = bd.split_grid(G, W)
    dec = bd.grid_decomposition(G, W, basis)
    cert = bd.kappa_check(G, W, basis)
    out = {
        "kind": "decomposition",
        "field": G.field.p,
        "tate": space_doc(dec.tate),
        "iota": [matrix_doc(m) for m in dec.iota],
        "pi": [matrix_doc(m) for m in dec.pi],
        "opens": [matrix_doc(m) for m in dec.opens],
        "opens_grid": [matrix_doc(m) for m in dec.opens_grid],
        "corner_basis": matrix_doc(dec.corner_basis),
        "basis": [[matrix_doc(basis.at(r, c)) for c in range(G.n)] for r in range(G.m)],
        "exchange": {"ok": cert.ok, "normal_form": matrix_doc(cert.normal_form)},
    }
    _emit(_dump(out), args.out)
    return 0


def cmd_dual(args) -> int:
    doc = _load_doc(args.input)
    if isinstance(doc, dict) and doc.get("kind") == "grid":
        G, W, _, _, _ = parse_grid(doc)
        if W is None:
            raise ParseError("$.ses", "dualizing a grid needs its witness")
        rep = bd.validate_grid(G, W)
        if not rep.ok:
            _emit(_dump({"kind": "validation", "ok": False, "violations": list(rep.violations)}), args.out)
            return 1
        out = bd.dual_grid(G, W)
        doc2 = grid_doc(out.grid, out.witness)
        doc2["dual_certificate"] = {"ok": out.certificate_ok, "detail": out.detail}
        _emit(_dump(doc2), args.out)
        return 0 if out.certificate_ok else 1
    obj = parse_space(doc)
    _emit(_dump(space_doc(dual_object(obj), args.depth)), args.out)
    return 0


def cmd_tensor(args) -> int:
    a = parse_space(_load_doc(args.a))
    b = parse_space(_load_doc(args.b))
    pairs = {
        ("star", Tower, Tower): tensor_star_towers,
        ("star", TateObj, TateObj): tensor_star_tate,
        ("star", IndLCObj, IndLCObj): tensor_star_indlc,
        ("bang", IndTower, IndTower): tensor_indtowers,
        ("bang", TateObj, TateObj): tensor_bang_tate,
        ("bang", ProDiscObj, ProDiscObj): tensor_bang_prodisc,
    }
    fn = pairs.get((args.op, type(a), type(b)))
    if fn is None:
        raise ParseError(
            "$", f"no {args.op} tensor for {type(a).__name__} and {type(b).__name__}"
        )
    _emit(_dump(space_doc(fn(a, b), args.depth)), args.out)
    return 0


def cmd_check(args) -> int:
    failures = 0
    for name, ok, detail in run_suite(args.suite):
        mark = "ok" if ok else "FAIL"
        line = f"[{mark}] {name}"
        if not ok:
            line += f" -- {detail}"
            failures += 1
        print(line)
    return 1 if failures else 0


def cmd_report(args) -> int:
    doc = _load_doc(args.input)
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "grid":
        G, W, pairings, pd, truth = parse_grid(doc)
        print(f"bidirected grid over GF({G.field.p}): {G.m} x {G.n}")
        print(f"cell dimensions: {G.dims}")
        if W is not None:
            print(f"witness: V dims {W.Vdims}, W dims {W.Wdims}")
            rep = bd.validate_grid(G, W)
            print(f"validation: {'passes' if rep.ok else 'FAILS'}")
            for v in rep.violations:
                print(f"  - {v}")
        if truth:
            print("ground truth sidecar present")
        return 0
    if kind == "decomposition":
        tate = doc.get("tate", {})
        c, d = tate.get("c", {}), tate.get("d", {})
        print(f"decomposition over GF({doc.get('field')})")
        print(f"compact part dims: {c.get('dims')}")
        print(f"discrete part dims: {d.get('dims')}")
        print(f"open subspace dims: {[u.get('cols') for u in doc.get('opens', [])]}")
        ex = doc.get("exchange", {})
        print(f"exchange certificate: {'identity' if ex.get('ok') else 'FAILED'}")
        return 0
    if kind == "validation":
        print(f"validation: {'passes' if doc.get('ok') else 'FAILS'}")
        for v in doc.get("violations", []):
            print(f"  - {v}")
        return 0
    if kind in ("tower", "indtower", "tate", "indlc", "prodisc", "finvect", "builtin"):
        obj = parse_space(doc)
        print(f"{kind} presentation over GF({doc.get('field')})")
        if kind in ("tower", "indtower"):
            print(f"level dims: {doc.get('dims')}, tail: {doc.get('tail')}")
        return 0
    print(f"unrecognized document kind: {kind!r}")
    return 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tatevec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a random valid instance with ground truth")
    g.add_argument("--kind", required=True, choices=["grid", "tate", "tower", "indtower"])
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--field", type=int, default=2)
    g.add_argument("--depth", type=int, default=4)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=cmd_gen)

    d = sub.add_parser("decompose", help="validate, split, decompose and certify a grid")
    d.add_argument("input")
    d.add_argument("--out", default=None)
    d.set_defaults(fn=cmd_decompose)

    u = sub.add_parser("dual", help="dualize a presentation or a grid")
    u.add_argument("input")
    u.add_argument("--depth", type=int, default=4)
    u.add_argument("--out", default=None)
    u.set_defaults(fn=cmd_dual)

    t = sub.add_parser("tensor", help="completed tensor product of two presentations")
    t.add_argument("--op", required=True, choices=["star", "bang"])
    t.add_argument("--depth", type=int, default=4)
    t.add_argument("a")
    t.add_argument("b")
    t.add_argument("--out", default=None)
    t.set_defaults(fn=cmd_tensor)

    c = sub.add_parser("check", help="run an invariant suite")
    c.add_argument("--suite", required=True, choices=sorted(SUITES))
    c.set_defaults(fn=cmd_check)

    r = sub.add_parser("report", help="human-readable summary of a document")
    r.add_argument("input")
    r.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        sys.stdout.write(_dump({"error": e.message, "path": e.path}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
