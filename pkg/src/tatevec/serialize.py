"""JSON forms for every object kind.

Documents are plain dicts; matrices are {"rows", "cols", "entries"} with
entries reduced mod p on load, and every top-level document carries its
field.  Parse errors name the path into the offending document.
"""

from __future__ import annotations

from typing import Optional

from .bidirected import (
    BidirectedGrid,
    GridDualityWitness,
    PairingEntry,
    PairingFamily,
    SESWitness,
)
from .exactla import FieldSpec, Matrix
from .spaces import (
    FinVect,
    IndLCObj,
    IndTower,
    IndTowerPrefix,
    ProDiscObj,
    TailDescriptor,
    TateObj,
    Tower,
    TowerPrefix,
    builtin_space,
    materialize,
)


class ParseError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _need(doc, key, path):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"{path}.{key}", "missing")
    return doc[key]


def parse_field(doc, path="$") -> FieldSpec:
    p = _need(doc, "field", path)
    try:
        return FieldSpec(int(p))
    except (TypeError, ValueError) as e:
        raise ParseError(f"{path}.field", str(e))


def parse_matrix(field: FieldSpec, doc, path="$") -> Matrix:
    try:
        return Matrix.from_json(field, doc)
    except Exception as e:
        raise ParseError(path, f"bad matrix: {e}")


def matrix_doc(M: Matrix) -> dict:
    return M.to_json()


def tail_doc(t: TailDescriptor) -> dict:
    out = {"kind": t.kind}
    if t.bound is not None:
        out["c"] = t.bound
    return out


def parse_tail(doc, path="$") -> TailDescriptor:
    if doc is None:
        return TailDescriptor()
    kind = _need(doc, "kind", path)
    try:
        return TailDescriptor(kind, doc.get("c"))
    except ValueError as e:
        raise ParseError(path, str(e))


# ---------------------------------------------------------------------------
# Space presentations
# ---------------------------------------------------------------------------


def space_doc(obj, depth: Optional[int] = None) -> dict:
    """Serialize a presentation; lazy objects are materialized to `depth`."""
    if isinstance(obj, FinVect):
        return {"kind": "finvect", "dim": obj.dim}
    if isinstance(obj, (Tower, IndTower)):
        d = obj.depth if obj.depth is not None else depth
        if d is None:
            raise ValueError("serializing an unbounded system needs a depth")
        pre = materialize(obj, d)
        return {
            "kind": obj.kind,
            "field": obj.field.p,
            "dims": list(pre.dims),
            "transitions": [matrix_doc(t) for t in pre.maps],
            "tail": tail_doc(obj.tail),
        }
    if isinstance(obj, TateObj):
        return {
            "kind": "tate",
            "field": obj.field.p,
            "c": space_doc(obj.cLattice, depth),
            "d": space_doc(obj.dLattice, depth),
        }
    if isinstance(obj, IndLCObj):
        if obj.count is None and depth is None:
            raise ValueError("serializing an unbounded sum needs a depth")
        count = obj.count if obj.count is not None else depth
        return {
            "kind": "indlc",
            "field": obj.field.p,
            "summands": [space_doc(obj.summand(k), depth) for k in range(1, count + 1)],
        }
    if isinstance(obj, ProDiscObj):
        if obj.count is None and depth is None:
            raise ValueError("serializing an unbounded product needs a depth")
        count = obj.count if obj.count is not None else depth
        return {
            "kind": "prodisc",
            "field": obj.field.p,
            "factors": [space_doc(obj.factor(k), depth) for k in range(1, count + 1)],
        }
    if isinstance(obj, (TowerPrefix, IndTowerPrefix)):
        kind = "tower" if isinstance(obj, TowerPrefix) else "indtower"
        return {
            "kind": kind,
            "field": obj.field.p,
            "dims": list(obj.dims),
            "transitions": [matrix_doc(t) for t in obj.maps],
            "tail": tail_doc(TailDescriptor()),
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_space(doc, path="$"):
    kind = _need(doc, "kind", path)
    if kind == "finvect":
        return FinVect(int(_need(doc, "dim", path)))
    if kind == "builtin":
        field = parse_field(doc, path)
        return builtin_space(_need(doc, "name", path), field, int(doc.get("n", 0)))
    field = parse_field(doc, path)
    if kind in ("tower", "indtower"):
        dims = [int(d) for d in _need(doc, "dims", path)]
        raw = _need(doc, "transitions", path)
        if len(raw) != max(len(dims) - 1, 0):
            raise ParseError(f"{path}.transitions", "one transition per adjacent level pair")
        maps = [parse_matrix(field, m, f"{path}.transitions[{i}]") for i, m in enumerate(raw)]
        tail = parse_tail(doc.get("tail"), f"{path}.tail")
        cls = Tower if kind == "tower" else IndTower
        try:
            obj = cls.from_prefix(field, dims, maps, tail=tail)
            materialize(obj, len(dims))  # validates shapes against dims
        except Exception as e:
            raise ParseError(path, f"bad {kind}: {e}")
        return obj
    if kind == "tate":
        c = parse_space(_need(doc, "c", path), f"{path}.c")
        d = parse_space(_need(doc, "d", path), f"{path}.d")
        if not isinstance(c, Tower) or not isinstance(d, IndTower):
            raise ParseError(path, "tate object needs a tower 'c' and an indtower 'd'")
        return TateObj(c, d)
    if kind == "indlc":
        parts = [
            parse_space(s, f"{path}.summands[{i}]")
            for i, s in enumerate(_need(doc, "summands", path))
        ]
        if not all(isinstance(s, Tower) for s in parts):
            raise ParseError(f"{path}.summands", "every summand must be a tower")
        return IndLCObj.from_list(field, parts)
    if kind == "prodisc":
        parts = [
            parse_space(f, f"{path}.factors[{i}]")
            for i, f in enumerate(_need(doc, "factors", path))
        ]
        if not all(isinstance(f, IndTower) for f in parts):
            raise ParseError(f"{path}.factors", "every factor must be an indtower")
        return ProDiscObj.from_list(field, parts)
    raise ParseError(f"{path}.kind", f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


def grid_doc(
    G: BidirectedGrid,
    W: Optional[SESWitness] = None,
    pairings: Optional[dict] = None,
    pd: Optional[GridDualityWitness] = None,
    truth: Optional[dict] = None,
) -> dict:
    out = {
        "kind": "grid",
        "field": G.field.p,
        "m": G.m,
        "n": G.n,
        "dims": [list(row) for row in G.dims],
        "right": [[matrix_doc(G.right[r][c]) for c in range(G.n - 1)] for r in range(G.m)],
        "up": [[matrix_doc(G.up[r][c]) for c in range(G.n)] for r in range(G.m - 1)],
    }
    if W is not None:
        out["ses"] = {
            "Vdims": list(W.Vdims),
            "Vmaps": [matrix_doc(m) for m in W.Vmaps],
            "Wdims": list(W.Wdims),
            "Wmaps": [matrix_doc(m) for m in W.Wmaps],
            "inj": [[matrix_doc(W.inj[r][c]) for c in range(G.n)] for r in range(G.m)],
            "surj": [[matrix_doc(W.surj[r][c]) for c in range(G.n)] for r in range(G.m)],
        }
    if pairings is not None:
        out["pairings"] = {
            key: [
                [
                    None
                    if fam.at(r, c) is None
                    else {
                        "target": [fam.at(r, c).target[0] + 1, fam.at(r, c).target[1] + 1],
                        "matrix": matrix_doc(fam.at(r, c).matrix),
                    }
                    for c in range(G.n)
                ]
                for r in range(G.m)
            ]
            for key, fam in pairings.items()
        }
    if pd is not None:
        out["pd"] = {
            "f": [[matrix_doc(pd.f[r][c]) for c in range(G.n)] for r in range(G.m)],
            "g": [[matrix_doc(pd.g[r][c]) for c in range(G.n)] for r in range(G.m)],
        }
    if truth is not None:
        out["truth"] = truth
    return out


def _matrix_table(field, rows, cols, raw, path):
    if len(raw) != rows:
        raise ParseError(path, f"expected {rows} rows")
    out = []
    for r, row in enumerate(raw):
        if len(row) != cols:
            raise ParseError(f"{path}[{r}]", f"expected {cols} entries")
        out.append([parse_matrix(field, m, f"{path}[{r}][{c}]") for c, m in enumerate(row)])
    return out


def parse_grid(doc, path="$"):
    """Returns (grid, witness-or-None, pairings dict, pd-or-None, truth)."""
    if _need(doc, "kind", path) != "grid":
        raise ParseError(f"{path}.kind", "expected 'grid'")
    field = parse_field(doc, path)
    m, n = int(_need(doc, "m", path)), int(_need(doc, "n", path))
    dims = _need(doc, "dims", path)
    right = _matrix_table(field, m, max(n - 1, 0), _need(doc, "right", path), f"{path}.right")
    up = _matrix_table(field, max(m - 1, 0), n, _need(doc, "up", path), f"{path}.up")
    try:
        G = BidirectedGrid(field, dims, right, up)
    except ValueError as e:
        raise ParseError(path, str(e))
    W = None
    if doc.get("ses") is not None:
        s = doc["ses"]
        sp = f"{path}.ses"
        W = SESWitness(
            Vdims=[int(d) for d in _need(s, "Vdims", sp)],
            Vmaps=[parse_matrix(field, x, f"{sp}.Vmaps[{i}]") for i, x in enumerate(_need(s, "Vmaps", sp))],
            Wdims=[int(d) for d in _need(s, "Wdims", sp)],
            Wmaps=[parse_matrix(field, x, f"{sp}.Wmaps[{i}]") for i, x in enumerate(_need(s, "Wmaps", sp))],
            inj=_matrix_table(field, m, n, _need(s, "inj", sp), f"{sp}.inj"),
            surj=_matrix_table(field, m, n, _need(s, "surj", sp), f"{sp}.surj"),
        )
    pairings = {}
    for key, kind in (("mu", "product"), ("lambda", "coproduct")):
        raw = (doc.get("pairings") or {}).get(key)
        if raw is None:
            continue
        entries = []
        for r in range(m):
            row = []
            for c in range(n):
                cell = raw[r][c]
                if cell is None:
                    row.append(None)
                    continue
                pth = f"{path}.pairings.{key}[{r}][{c}]"
                tr, tc = (int(x) - 1 for x in _need(cell, "target", pth))
                row.append(PairingEntry((tr, tc), parse_matrix(field, _need(cell, "matrix", pth), pth)))
            entries.append(row)
        pairings[key] = PairingFamily(kind, entries)
    pd = None
    if doc.get("pd") is not None:
        pd = GridDualityWitness(
            f=_matrix_table(field, m, n, _need(doc["pd"], "f", f"{path}.pd"), f"{path}.pd.f"),
            g=_matrix_table(field, m, n, _need(doc["pd"], "g", f"{path}.pd.g"), f"{path}.pd.g"),
        )
    return G, W, pairings, pd, doc.get("truth")
