"""Finite bidirected systems and their block-diagonal decomposition.

A grid holds finite-dimensional cells V[r][c] with commuting maps, inverse
along rows (up maps toward row 1, row r encoding the r-th action cutoff
below zero) and direct along columns.  A short-exact-sequence witness
exhibits each cell as an extension of a constant inverse system W_r by a
constant direct system V_c; `split_grid` then conjugates every cell into
the split form by the double induction with graph corrections, after which
the iterated limit/colimit data, the canonical exchange map, duality, and
user-supplied multiplication/comultiplication windows can all be read off
and verified exactly.

All verification is exact mod p; reports use 1-based cell indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .duality import dual_object
from .exactla import (
    Matrix,
    block_diag,
    complement_basis,
    hstack,
    image_basis,
    inverse,
    is_invertible,
    kernel_basis,
    kron,
    rank,
    solve_linear,
    vstack,
)
from .spaces import IndTower, TateObj, Tower, materialize


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


class BidirectedGrid:
    """m x n grid of spaces; right[r][c]: (r,c)->(r,c+1), up[r][c]: (r+1,c)->(r,c)."""

    def __init__(self, field, dims, right, up):
        self.field = field
        self.dims = [[int(d) for d in row] for row in dims]
        self.m = len(self.dims)
        self.n = len(self.dims[0]) if self.m else 0
        if any(len(row) != self.n for row in self.dims):
            raise ValueError("ragged grid")
        self.right = right
        self.up = up
        for r in range(self.m):
            for c in range(self.n - 1):
                if right[r][c].shape != (self.dims[r][c + 1], self.dims[r][c]):
                    raise ValueError(f"right map at ({r + 1},{c + 1}) has the wrong shape")
        for r in range(self.m - 1):
            for c in range(self.n):
                if up[r][c].shape != (self.dims[r][c], self.dims[r + 1][c]):
                    raise ValueError(f"up map at ({r + 1},{c + 1}) has the wrong shape")


class SESWitness:
    """Constant systems V_c, W_r with per-cell inclusion and projection."""

    def __init__(self, Vdims, Vmaps, Wdims, Wmaps, inj, surj):
        self.Vdims = [int(d) for d in Vdims]
        self.Vmaps = Vmaps  # Vmaps[c]: V_c -> V_{c+1}
        self.Wdims = [int(d) for d in Wdims]
        self.Wmaps = Wmaps  # Wmaps[r]: W_{r+1} -> W_r
        self.inj = inj  # inj[r][c]: V_c -> cell
        self.surj = surj  # surj[r][c]: cell -> W_r


@dataclass(frozen=True)
class GridChangeOfBasis:
    """Invertible per-cell matrices into (V_c block, W_r block) coordinates."""

    basis: tuple[tuple[Matrix, ...], ...]

    def at(self, r: int, c: int) -> Matrix:
        return self.basis[r][c]


@dataclass(frozen=True)
class GridReport:
    ok: bool
    violations: tuple[str, ...]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_grid(G: BidirectedGrid, W: Optional[SESWitness] = None) -> GridReport:
    """Check square commutation and, with a witness, exactness and naturality.

    Every violated identity is listed with its 1-based cell indices.
    """
    bad: list[str] = []
    for r in range(G.m - 1):
        for c in range(G.n - 1):
            if G.up[r][c + 1] @ G.right[r + 1][c] != G.right[r][c] @ G.up[r][c]:
                bad.append(f"square at ({r + 1},{c + 1}) does not commute")
    if W is not None:
        for r in range(G.m):
            for c in range(G.n):
                inj, surj = W.inj[r][c], W.surj[r][c]
                cell = f"({r + 1},{c + 1})"
                if inj.shape != (G.dims[r][c], W.Vdims[c]) or surj.shape != (
                    W.Wdims[r],
                    G.dims[r][c],
                ):
                    bad.append(f"witness shapes wrong at {cell}")
                    continue
                if rank(inj) != W.Vdims[c]:
                    bad.append(f"inclusion not injective at {cell}")
                if rank(surj) != W.Wdims[r]:
                    bad.append(f"projection not surjective at {cell}")
                if not (surj @ inj).is_zero():
                    bad.append(f"composite V -> W nonzero at {cell}")
                if W.Vdims[c] + W.Wdims[r] != G.dims[r][c]:
                    bad.append(f"cell dimension is not |V|+|W| at {cell}")
        for r in range(G.m):
            for c in range(G.n - 1):
                if G.right[r][c] @ W.inj[r][c] != W.inj[r][c + 1] @ W.Vmaps[c]:
                    bad.append(f"inclusion not natural for right map at ({r + 1},{c + 1})")
                if W.surj[r][c + 1] @ G.right[r][c] != W.surj[r][c]:
                    bad.append(f"projection not natural for right map at ({r + 1},{c + 1})")
        for r in range(G.m - 1):
            for c in range(G.n):
                if G.up[r][c] @ W.inj[r + 1][c] != W.inj[r][c]:
                    bad.append(f"inclusion not natural for up map at ({r + 1},{c + 1})")
                if W.surj[r][c] @ G.up[r][c] != W.Wmaps[r] @ W.surj[r + 1][c]:
                    bad.append(f"projection not natural for up map at ({r + 1},{c + 1})")
    return GridReport(not bad, tuple(bad))


# ---------------------------------------------------------------------------
# Block helpers
# ---------------------------------------------------------------------------


def _blocks(M: Matrix, v1: int, v2: int):
    d = M.data
    f = M.field
    return (
        Matrix(f, d[:v1, :v2]),
        Matrix(f, d[:v1, v2:]),
        Matrix(f, d[v1:, :v2]),
        Matrix(f, d[v1:, v2:]),
    )


def _upper_corr(field, v: int, w: int, off: Matrix) -> Matrix:
    # [[I, off], [0, I]] with off: w-block -> v-block
    out = np.eye(v + w, dtype=np.int64)
    out[:v, v:] = off.data
    return Matrix(field, out)


# ---------------------------------------------------------------------------
# Block diagonalization (double induction with graph corrections)
# ---------------------------------------------------------------------------


def split_grid(G: BidirectedGrid, W: SESWitness) -> GridChangeOfBasis:
    """Conjugate every cell into split (V_c block, W_r block) coordinates.

    After the returned change of basis, every right map is
    blockdiag(V-transition, identity) and every up map is
    blockdiag(identity, W-transition), exactly.  Row 1 is fixed by a column
    induction absorbing the off-diagonal block into a graph correction; the
    remaining rows are fixed one at a time the same way, and the forced
    vanishing of the lower rows' right-map off-diagonal blocks is
    re-verified numerically.
    """
    rep = validate_grid(G, W)
    if not rep.ok:
        raise ValueError("grid validation failed: " + "; ".join(rep.violations))
    field = G.field

    C: list[list[Matrix]] = []
    for r in range(G.m):
        row = []
        for c in range(G.n):
            inj, surj = W.inj[r][c], W.surj[r][c]
            E = complement_basis(inj, G.dims[r][c])
            SE = surj @ E
            if not is_invertible(SE):
                raise AssertionError("internal: complement does not project onto W")
            base = inverse(hstack([inj, E]))
            assert base is not None
            row.append(block_diag([Matrix.identity(field, W.Vdims[c]), SE]) @ base)
        C.append(row)

    def conj_right(r, c):
        return C[r][c + 1] @ G.right[r][c] @ _inv(C[r][c])

    def conj_up(r, c):
        return C[r][c] @ G.up[r][c] @ _inv(C[r + 1][c])

    # row 1: absorb the off-diagonal blocks of the right maps
    for c in range(G.n - 1):
        v1, w1 = W.Vdims[c], W.Wdims[0]
        v2, w2 = W.Vdims[c + 1], W.Wdims[0]
        A, tau, Cc, D = _blocks(conj_right(0, c), v2, v1)
        if A != W.Vmaps[c] or not Cc.is_zero() or D != Matrix.identity(field, w2):
            raise AssertionError("internal: right map lost its forced block shape")
        C[0][c + 1] = _upper_corr(field, v2, w2, -tau) @ C[0][c + 1]

    # remaining rows: absorb the up-map off-diagonal blocks row by row
    for r in range(G.m - 1):
        for c in range(G.n):
            v, w_up, w_dn = W.Vdims[c], W.Wdims[r], W.Wdims[r + 1]
            A, sigma, Cc, D = _blocks(conj_up(r, c), v, v)
            if A != Matrix.identity(field, v) or not Cc.is_zero() or D != W.Wmaps[r]:
                raise AssertionError("internal: up map lost its forced block shape")
            C[r + 1][c] = _upper_corr(field, v, w_dn, sigma) @ C[r + 1][c]
        # commutation forces the corrected row's right maps block-diagonal
        for c in range(G.n - 1):
            want = block_diag([W.Vmaps[c], Matrix.identity(field, W.Wdims[r + 1])])
            if conj_right(r + 1, c) != want:
                raise AssertionError(
                    "internal: right map of the corrected row is not block diagonal"
                )

    basis = GridChangeOfBasis(tuple(tuple(row) for row in C))
    check_split(G, W, basis, strict=True)
    return basis


def _inv(M: Matrix) -> Matrix:
    out = inverse(M)
    if out is None:
        raise AssertionError("internal: singular change of basis")
    return out


def check_split(G: BidirectedGrid, W: SESWitness, basis: GridChangeOfBasis, strict=False) -> bool:
    """Exhaustive exact check of the split normal form."""
    field = G.field
    for r in range(G.m):
        for c in range(G.n - 1):
            want = block_diag([W.Vmaps[c], Matrix.identity(field, W.Wdims[r])])
            got = basis.at(r, c + 1) @ G.right[r][c] @ _inv(basis.at(r, c))
            if got != want:
                if strict:
                    raise AssertionError(f"split check failed: right map at ({r + 1},{c + 1})")
                return False
    for r in range(G.m - 1):
        for c in range(G.n):
            want = block_diag([Matrix.identity(field, W.Vdims[c]), W.Wmaps[r]])
            got = basis.at(r, c) @ G.up[r][c] @ _inv(basis.at(r + 1, c))
            if got != want:
                if strict:
                    raise AssertionError(f"split check failed: up map at ({r + 1},{c + 1})")
                return False
    return True


# ---------------------------------------------------------------------------
# Decomposition into compact and discrete parts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridDecomposition:
    """Normal form of the grid's iterated (co)limit at truncation.

    The compact part is the W-tower, the discrete part the V-system.  For
    each row cutoff r, pi[r-1] projects the total window onto what is
    visible strictly above the cutoff, iota[r-1] includes the compact stage
    below it, and opens[r-1] = ker pi = im iota is the corresponding open
    subspace of the total window (in normal-form coordinates;
    `opens_grid` gives the same subspaces in the corner cell's original
    coordinates).
    """

    tate: TateObj
    iota: tuple[Matrix, ...]
    pi: tuple[Matrix, ...]
    opens: tuple[Matrix, ...]
    opens_grid: tuple[Matrix, ...]
    corner_basis: Matrix


def grid_decomposition(G: BidirectedGrid, W: SESWitness, basis: GridChangeOfBasis) -> GridDecomposition:
    check_split(G, W, basis, strict=True)
    field = G.field
    c_tower = Tower.from_prefix(field, W.Wdims, W.Wmaps)
    d_ind = IndTower.from_prefix(field, W.Vdims, W.Vmaps)
    tate = TateObj(c_tower, d_ind)

    v_n = W.Vdims[-1]
    w_m = W.Wdims[-1]
    m = G.m
    # composite W_m -> W_r along the tower
    comp = [None] * m
    comp[m - 1] = Matrix.identity(field, w_m)
    for r in range(m - 2, -1, -1):
        comp[r] = W.Wmaps[r] @ comp[r + 1]

    iota, pi, opens, opens_grid = [], [], [], []
    corner = basis.at(m - 1, G.n - 1)
    corner_inv = _inv(corner)
    prev_dim = None
    for r in range(m):
        # cutoff strictly above row r+1: project to V_n + W_r (W_0 = 0)
        tail = comp[r - 1] if r >= 1 else Matrix.zeros(field, 0, w_m)
        proj = block_diag([Matrix.identity(field, v_n), tail], field=field)
        ker_w = kernel_basis(tail)
        U = vstack([Matrix.zeros(field, v_n, ker_w.cols), ker_w])
        inc = U
        if not (proj @ inc).is_zero():
            raise AssertionError("internal: compact stage does not die above the cutoff")
        if inc.cols != (v_n + w_m) - rank(proj):
            raise AssertionError("internal: image of iota differs from ker pi")
        if prev_dim is not None and inc.cols > prev_dim:
            raise AssertionError("internal: open subspaces are not shrinking")
        prev_dim = inc.cols
        iota.append(inc)
        pi.append(proj)
        opens.append(U)
        opens_grid.append(corner_inv @ U)
    return GridDecomposition(
        tate, tuple(iota), tuple(pi), tuple(opens), tuple(opens_grid), corner
    )


# ---------------------------------------------------------------------------
# Finite limits and colimits of chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainLimit:
    basis: Matrix  # columns: compatible tuples inside the block sum
    projections: tuple[Matrix, ...]


@dataclass(frozen=True)
class ChainColimit:
    classes: Matrix  # block sum -> colimit coordinates
    reps: Matrix  # representative columns of the colimit basis
    injections: tuple[Matrix, ...]
    relations: Matrix  # columns spanning the identified differences


def chain_limit(field, dims: list[int], maps: list[Matrix]) -> ChainLimit:
    """Limit of X_1 <- X_2 <- ... as compatible tuples; maps[i]: X_{i+2} -> X_{i+1}."""
    total = sum(dims)
    k = len(dims)
    if k == 1:
        basis = Matrix.identity(field, total)
    else:
        rows = []
        for i in range(k - 1):
            blocks = []
            for j in range(k):
                if j == i:
                    blocks.append(Matrix.identity(field, dims[i]))
                elif j == i + 1:
                    blocks.append(-maps[i])
                else:
                    blocks.append(Matrix.zeros(field, dims[i], dims[j]))
            rows.append(hstack(blocks))
        basis = kernel_basis(vstack(rows))
    projections = []
    off = 0
    for d in dims:
        proj = Matrix(field, basis.data[off : off + d, :])
        projections.append(proj)
        off += d
    return ChainLimit(basis, tuple(projections))


def chain_colimit(field, dims: list[int], maps: list[Matrix]) -> ChainColimit:
    """Colimit of X_1 -> X_2 -> ... as a quotient; maps[i]: X_{i+1} -> X_{i+2}."""
    total = sum(dims)
    k = len(dims)
    offs = np.cumsum([0] + dims).tolist()
    if k == 1 or total == 0:
        rel = Matrix.zeros(field, total, 0)
    else:
        cols = []
        for i in range(k - 1):
            block = np.zeros((total, dims[i]), dtype=np.int64)
            block[offs[i] : offs[i + 1], :] = np.eye(dims[i], dtype=np.int64)
            block[offs[i + 1] : offs[i + 2], :] = (-maps[i]).data
            cols.append(Matrix(field, block))
        rel = hstack(cols)
    im = image_basis(rel)
    reps = complement_basis(im, total)
    full = inverse(hstack([im, reps]))
    assert full is not None
    classes = Matrix(field, full.data[im.cols :, :])
    injections = []
    for i in range(k):
        block = np.zeros((total, dims[i]), dtype=np.int64)
        block[offs[i] : offs[i + 1], :] = np.eye(dims[i], dtype=np.int64)
        injections.append(classes @ Matrix(field, block))
    return ChainColimit(classes, reps, tuple(injections), rel)


# ---------------------------------------------------------------------------
# The exchange map between the two iterated (co)limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExchangeCertificate:
    """The canonical map colim-of-limits -> limit-of-colimits, computed on
    the grid and compared against the normal form; in normal-form
    coordinates it must be the identity."""

    matrix: Matrix
    normal_form: Matrix
    ok: bool


def kappa_check(G: BidirectedGrid, W: SESWitness, basis: GridChangeOfBasis) -> ExchangeCertificate:
    check_split(G, W, basis, strict=True)
    field = G.field
    m, n = G.m, G.n

    # route 1: limits of the columns, then the colimit of those limits
    col_limits = [
        chain_limit(field, [G.dims[r][c] for r in range(m)], [G.up[r][c] for r in range(m - 1)])
        for c in range(n)
    ]
    lim_dims = [L.basis.cols for L in col_limits]
    lim_maps = []
    for c in range(n - 1):
        big_right = block_diag([G.right[r][c] for r in range(m)], field=field)
        nxt = solve_linear(col_limits[c + 1].basis, big_right @ col_limits[c].basis)
        if nxt is None:
            raise AssertionError("internal: right maps do not preserve column limits")
        lim_maps.append(nxt)
    source = chain_colimit(field, lim_dims, lim_maps)

    # route 2: colimits of the rows, then the limit of those colimits
    row_colims = [
        chain_colimit(field, [G.dims[r][c] for c in range(n)], [G.right[r][c] for c in range(n - 1)])
        for r in range(m)
    ]
    colim_dims = [Cr.reps.cols for Cr in row_colims]
    colim_maps = []
    for r in range(m - 1):
        big_up = block_diag([G.up[r][c] for c in range(n)], field=field)
        down = row_colims[r].classes @ (big_up @ row_colims[r + 1].reps)
        # well-defined on classes
        if row_colims[r].classes @ big_up != down @ row_colims[r + 1].classes:
            raise AssertionError("internal: up maps do not descend to row colimits")
        colim_maps.append(down)
    target = chain_limit(field, colim_dims, colim_maps)

    # the canonical map: slice a column-limit tuple into rows, take classes
    blocks = []
    for c in range(n):
        L = col_limits[c]
        blocks.append(vstack([row_colims[r].injections[c] @ L.projections[r] for r in range(m)]))
    phi = hstack(blocks)  # block sum of column limits -> block sum of row colimits
    if not (phi @ source.relations).is_zero():
        raise AssertionError("internal: exchange map is not constant on colimit classes")
    kappa = solve_linear(target.basis, phi @ source.reps)
    if kappa is None:
        raise AssertionError("internal: exchange image is not a compatible family")

    # normal-form comparison through the corner cell
    v_n, w_m = W.Vdims[-1], W.Wdims[-1]
    corner_dim = G.dims[m - 1][n - 1]
    up_comp = [None] * m
    up_comp[m - 1] = Matrix.identity(field, corner_dim)
    for r in range(m - 2, -1, -1):
        up_comp[r] = G.up[r][n - 1] @ up_comp[r + 1]
    corner_tuple = vstack(up_comp)  # corner cell -> compatible tuple in column n
    corner_lim = solve_linear(col_limits[n - 1].basis, corner_tuple)
    assert corner_lim is not None
    psi_source = source.injections[n - 1] @ corner_lim @ _inv(basis.at(m - 1, n - 1))
    psi_target_raw = vstack([row_colims[r].injections[n - 1] @ up_comp[r] for r in range(m)])
    psi_target_lim = solve_linear(target.basis, psi_target_raw)
    assert psi_target_lim is not None
    psi_target = psi_target_lim @ _inv(basis.at(m - 1, n - 1))
    if not (is_invertible(psi_source) and is_invertible(psi_target)):
        raise AssertionError("internal: corner does not span the iterated (co)limits")
    normal = _inv(psi_target) @ kappa @ psi_source
    ok = normal == Matrix.identity(field, v_n + w_m) and is_invertible(kappa)
    return ExchangeCertificate(kappa, normal, ok)


# ---------------------------------------------------------------------------
# Dual grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualGridResult:
    grid: BidirectedGrid
    witness: SESWitness
    certificate_ok: bool
    detail: str


def dual_grid(G: BidirectedGrid, W: SESWitness) -> DualGridResult:
    """Transpose all maps, exchanging the inverse and direct directions.

    Cell (r', c') of the dual is the dual of cell (c', r'); the witness
    systems swap roles with transposed maps.  The certificate verifies that
    decomposing the dual grid agrees levelwise with dualizing the original
    decomposition.
    """
    rep = validate_grid(G, W)
    if not rep.ok:
        raise ValueError("grid validation failed: " + "; ".join(rep.violations))
    field = G.field
    m2, n2 = G.n, G.m
    dims2 = [[G.dims[c][r] for c in range(n2)] for r in range(m2)]
    right2 = [[G.up[c][r].T for c in range(n2 - 1)] for r in range(m2)]
    up2 = [[G.right[c][r].T for c in range(n2)] for r in range(m2 - 1)]
    G2 = BidirectedGrid(field, dims2, right2, up2)
    W2 = SESWitness(
        Vdims=list(W.Wdims),
        Vmaps=[w.T for w in W.Wmaps],
        Wdims=list(W.Vdims),
        Wmaps=[v.T for v in W.Vmaps],
        inj=[[W.surj[c][r].T for c in range(n2)] for r in range(m2)],
        surj=[[W.inj[c][r].T for c in range(n2)] for r in range(m2)],
    )

    # certificate: decomposition of the dual == dual of the decomposition
    basis = split_grid(G, W)
    basis2 = split_grid(G2, W2)
    dec = grid_decomposition(G, W, basis)
    dec2 = grid_decomposition(G2, W2, basis2)
    dual_c = materialize(dual_object(dec.tate).cLattice, G.n)
    dual_d = materialize(dual_object(dec.tate).dLattice, G.m)
    got_c = materialize(dec2.tate.cLattice, G.n)
    got_d = materialize(dec2.tate.dLattice, G.m)
    ok = (
        got_c.dims == dual_c.dims
        and got_c.maps == dual_c.maps
        and got_d.dims == dual_d.dims
        and got_d.maps == dual_d.maps
    )
    detail = "dual decomposition matches dualized decomposition levelwise" if ok else (
        "dual decomposition disagrees with the dualized decomposition"
    )
    return DualGridResult(G2, W2, ok, detail)


# ---------------------------------------------------------------------------
# Pairing families (multiplication / comultiplication windows)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairingEntry:
    target: tuple[int, int]  # 0-based cell indices
    matrix: Matrix


class PairingFamily:
    """Per-cell bilinear windows with recorded target cells.

    kind 'product': matrix maps cell (x) cell -> target cell.
    kind 'coproduct': matrix maps cell -> target (x) target.
    Entries may be absent (None) when the window arithmetic leaves the
    truncated grid; such cells are skipped and reported.
    """

    def __init__(self, kind: str, entries):
        if kind not in ("product", "coproduct"):
            raise ValueError(f"unknown pairing kind {kind!r}")
        self.kind = kind
        self.entries = entries  # entries[r][c]: Optional[PairingEntry]

    def at(self, r: int, c: int) -> Optional[PairingEntry]:
        return self.entries[r][c]


@dataclass(frozen=True)
class InducedLevel:
    index: int  # 1-based row (product) or column (coproduct)
    cell: tuple[int, int]  # 1-based source cell
    target: tuple[int, int]  # 1-based target cell
    matrix: Matrix
    complementary_block_zero: bool


@dataclass(frozen=True)
class PairingAssembly:
    ok: bool
    violations: tuple[str, ...]
    residuals: tuple[Matrix, ...]  # one per violation, the failed difference
    skipped: tuple[str, ...]
    induced: tuple[InducedLevel, ...]


def _path_map(G: BidirectedGrid, src: tuple[int, int], dst: tuple[int, int]) -> Optional[Matrix]:
    """Composite of up then right maps from src to dst, if the order allows."""
    (r1, c1), (r2, c2) = src, dst
    if r2 > r1 or c2 < c1:
        return None
    out = Matrix.identity(G.field, G.dims[r1][c1])
    for r in range(r1 - 1, r2 - 1, -1):
        out = G.up[r][c1] @ out
    for c in range(c1, c2):
        out = G.right[r2][c] @ out
    return out


def _check_entry_shapes(G, P, bad, residuals, skipped):
    cells = {}
    for r in range(G.m):
        for c in range(G.n):
            e = P.at(r, c)
            if e is None:
                skipped.append(f"cell ({r + 1},{c + 1}): no window recorded")
                continue
            tr, tc = e.target
            if not (0 <= tr < G.m and 0 <= tc < G.n):
                skipped.append(f"cell ({r + 1},{c + 1}): target outside the grid")
                continue
            d, dt = G.dims[r][c], G.dims[tr][tc]
            want = (dt, d * d) if P.kind == "product" else (dt * dt, d)
            if e.matrix.shape != want:
                bad.append(f"cell ({r + 1},{c + 1}): window matrix has shape "
                           f"{e.matrix.shape}, expected {want}")
                residuals.append(e.matrix)
                continue
            cells[(r, c)] = e
    return cells


def assemble_product(
    G: BidirectedGrid, W: SESWitness, basis: GridChangeOfBasis, P: PairingFamily
) -> PairingAssembly:
    """Check naturality of multiplication windows and read off the induced
    map on the compact part of the normal form.

    Naturality: for adjacent cells, transporting the window along the grid
    structure maps must agree with the structure path between the recorded
    targets.  The induced map restricts each window to the W (x) W block in
    normal-form coordinates (the limit stage) at the rightmost available
    column (the colimit stage), one level per row.
    """
    if P.kind != "product":
        raise ValueError("expected a product family")
    check_split(G, W, basis, strict=True)
    bad: list[str] = []
    residuals: list[Matrix] = []
    skipped: list[str] = []
    cells = _check_entry_shapes(G, P, bad, residuals, skipped)

    for (r, c), e in sorted(cells.items()):
        for (r2, c2), move in (((r, c + 1), "right"), ((r - 1, c), "up")):
            if (r2, c2) not in cells:
                continue
            e2 = cells[(r2, c2)]
            if move == "right":
                step = G.right[r][c]
            else:
                step = G.up[r - 1][c]
            path = _path_map(G, e.target, e2.target)
            if path is None:
                skipped.append(
                    f"cells ({r + 1},{c + 1})->({r2 + 1},{c2 + 1}): targets not comparable"
                )
                continue
            lhs = e2.matrix @ kron(step, step)
            rhs = path @ e.matrix
            if lhs != rhs:
                bad.append(f"window at ({r + 1},{c + 1}) is not natural along {move}")
                residuals.append(lhs - rhs)

    induced = []
    for r in range(G.m):
        cands = [c for c in range(G.n) if (r, c) in cells]
        if not cands:
            continue
        c = max(cands)
        e = cells[(r, c)]
        tr, tc = e.target
        conj = basis.at(tr, tc) @ e.matrix @ _inv(kron(basis.at(r, c), basis.at(r, c)))
        v, w = W.Vdims[c], W.Wdims[r]
        vt, wt = W.Vdims[tc], W.Wdims[tr]
        src_idx = [i * (v + w) + j for i in range(v, v + w) for j in range(v, v + w)]
        ww = Matrix(G.field, conj.data[vt:, :].take(src_idx, axis=1))
        vpart = Matrix(G.field, conj.data[:vt, :].take(src_idx, axis=1))
        induced.append(
            InducedLevel((r + 1), (r + 1, c + 1), (tr + 1, tc + 1), ww, vpart.is_zero())
        )
    return PairingAssembly(not bad, tuple(bad), tuple(residuals), tuple(skipped), tuple(induced))


def assemble_coproduct(
    G: BidirectedGrid, W: SESWitness, basis: GridChangeOfBasis, P: PairingFamily
) -> PairingAssembly:
    """Mirror of assemble_product with the two stages swapped: windows map
    cells into tensor squares of their targets, and the induced map
    restricts to the V -> V (x) V block (the colimit stage) at the deepest
    available row (the limit stage), one level per column."""
    if P.kind != "coproduct":
        raise ValueError("expected a coproduct family")
    check_split(G, W, basis, strict=True)
    bad: list[str] = []
    residuals: list[Matrix] = []
    skipped: list[str] = []
    cells = _check_entry_shapes(G, P, bad, residuals, skipped)

    for (r, c), e in sorted(cells.items()):
        for (r2, c2), move in (((r, c + 1), "right"), ((r - 1, c), "up")):
            if (r2, c2) not in cells:
                continue
            e2 = cells[(r2, c2)]
            step = G.right[r][c] if move == "right" else G.up[r - 1][c]
            path = _path_map(G, e.target, e2.target)
            if path is None:
                skipped.append(
                    f"cells ({r + 1},{c + 1})->({r2 + 1},{c2 + 1}): targets not comparable"
                )
                continue
            lhs = e2.matrix @ step
            rhs = kron(path, path) @ e.matrix
            if lhs != rhs:
                bad.append(f"window at ({r + 1},{c + 1}) is not natural along {move}")
                residuals.append(lhs - rhs)

    induced = []
    for c in range(G.n):
        cands = [r for r in range(G.m) if (r, c) in cells]
        if not cands:
            continue
        r = max(cands)
        e = cells[(r, c)]
        tr, tc = e.target
        conj = kron(basis.at(tr, tc), basis.at(tr, tc)) @ e.matrix @ _inv(basis.at(r, c))
        v, w = W.Vdims[c], W.Wdims[r]
        vt, wt = W.Vdims[tc], W.Wdims[tr]
        dt = vt + wt
        tgt_idx = [i * dt + j for i in range(vt) for j in range(vt)]
        vv = Matrix(G.field, conj.data.take(tgt_idx, axis=0)[:, :v])
        rest = np.delete(conj.data, tgt_idx, axis=0)[:, :v]
        induced.append(
            InducedLevel(
                (c + 1), (r + 1, c + 1), (tr + 1, tc + 1), vv, not rest.any()
            )
        )
    return PairingAssembly(not bad, tuple(bad), tuple(residuals), tuple(skipped), tuple(induced))


# ---------------------------------------------------------------------------
# Duality intertwining of product and coproduct windows
# ---------------------------------------------------------------------------


class GridDualityWitness:
    """Per-cell isomorphisms into dual-grid coordinates with inverses."""

    def __init__(self, f, g):
        self.f = f  # f[r][c]: cell -> reflected dual cell coordinates
        self.g = g  # inverse of f per cell


@dataclass(frozen=True)
class IntertwineReport:
    ok: bool
    violations: tuple[str, ...]
    residuals: tuple[Matrix, ...]  # one per violated square
    skipped: tuple[str, ...]
    checked: int


def check_pd_intertwine(
    G: BidirectedGrid,
    W: SESWitness,
    basis: GridChangeOfBasis,
    P_mu: PairingFamily,
    P_lambda: PairingFamily,
    PD: GridDualityWitness,
) -> IntertwineReport:
    """Verify, cell by cell, that the duality witness intertwines the
    multiplication windows with the transposed comultiplication windows:
    f_target . mu_x = (lambda_target)^T . (f_x (x) f_x), exactly."""
    check_split(G, W, basis, strict=True)
    bad: list[str] = []
    residuals: list[Matrix] = []
    skipped: list[str] = []
    checked = 0
    for r in range(G.m):
        for c in range(G.n):
            f, g = PD.f[r][c], PD.g[r][c]
            d = G.dims[r][c]
            if f.shape != (d, d) or g.shape != (d, d) or f @ g != Matrix.identity(G.field, d):
                bad.append(f"duality witness at ({r + 1},{c + 1}) is not an isomorphism pair")
                residuals.append(f @ g - Matrix.identity(G.field, d) if f.shape == g.shape == (d, d) else f)
    for r in range(G.m):
        for c in range(G.n):
            e = P_mu.at(r, c)
            if e is None:
                skipped.append(f"cell ({r + 1},{c + 1}): no product window")
                continue
            tr, tc = e.target
            if not (0 <= tr < G.m and 0 <= tc < G.n):
                skipped.append(f"cell ({r + 1},{c + 1}): product target outside the grid")
                continue
            lam = P_lambda.at(tr, tc)
            if lam is None:
                skipped.append(f"cell ({r + 1},{c + 1}): no coproduct window at the target")
                continue
            lhs = PD.f[tr][tc] @ e.matrix
            rhs_t = lam.matrix.T
            fx = PD.f[r][c]
            if rhs_t.cols != fx.rows * fx.rows or rhs_t.rows != lhs.rows:
                skipped.append(
                    f"cell ({r + 1},{c + 1}): window shapes do not line up under reflection"
                )
                continue
            checked += 1
            rhs = rhs_t @ kron(fx, fx)
            if lhs != rhs:
                bad.append(f"duality square fails at cell ({r + 1},{c + 1})")
                residuals.append(lhs - rhs)
    return IntertwineReport(not bad, tuple(bad), tuple(residuals), tuple(skipped), checked)
