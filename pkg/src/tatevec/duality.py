"""Topological duality on presentations, self-duality, and functional extension.

Dual bases are always the coordinate dual of the stored basis, so dualizing
is literally matrix transposition: a Tower (linearly compact) dualizes to an
IndTower (discrete) with transposed transitions and the same level
dimensions, and conversely; Tate objects swap their two parts; sums of
compact pieces dualize to products of discrete pieces componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exactla import (
    Matrix,
    complement_basis,
    hstack,
    intersect_columns,
    inverse,
    is_invertible,
    kernel_basis,
    rank,
    rref,
    solve_linear,
)
from .spaces import (
    FilteredSpace,
    FinVect,
    IndLCObj,
    IndTower,
    LinMap,
    ProDiscObj,
    TailDescriptor,
    TateObj,
    Tower,
    lattice_check,
    materialize,
)


def _dual_tail(tail: TailDescriptor) -> TailDescriptor:
    # transposition swaps kernels and cokernels
    if tail.kind == "bounded-ker":
        return TailDescriptor("bounded-coker", tail.bound)
    if tail.kind == "bounded-coker":
        return TailDescriptor("bounded-ker", tail.bound)
    return tail


def dual_object(X):
    """The topological dual of a presentation, of the matching dual kind."""
    if isinstance(X, FinVect):
        return FinVect(X.dim)
    if isinstance(X, LinMap):
        return LinMap(FinVect(X.dst.dim), FinVect(X.src.dim), X.mat.T)
    if isinstance(X, Tower):
        return IndTower(
            X.field,
            lambda n: X.space(n).dim,
            lambda n: X.transition(n).T,
            tail=_dual_tail(X.tail),
            depth=X.depth,
        )
    if isinstance(X, IndTower):
        return Tower(
            X.field,
            lambda n: X.space(n).dim,
            lambda n: X.transition(n).T,
            tail=_dual_tail(X.tail),
            depth=X.depth,
        )
    if isinstance(X, TateObj):
        return TateObj(dual_object(X.dLattice), dual_object(X.cLattice))
    if isinstance(X, IndLCObj):
        return ProDiscObj(X.field, lambda k: dual_object(X.summand(k)), X.count)
    if isinstance(X, ProDiscObj):
        return IndLCObj(X.field, lambda k: dual_object(X.factor(k)), X.count)
    raise TypeError(f"cannot dualize {type(X).__name__}")


@dataclass(frozen=True)
class DualityWitness:
    """Level-indexed perfect pairings identifying an object with its bidual."""

    pairings: tuple[Matrix, ...]
    description: str

    def __post_init__(self):
        for m in self.pairings:
            if not is_invertible(m):
                raise ValueError("pairing matrix is not invertible")


@dataclass(frozen=True)
class BidualReport:
    ok: bool
    witness: Optional[DualityWitness]
    mismatch: Optional[str]


def _prefix_pair(kind: str, a, b) -> Optional[str]:
    if a.dims != b.dims:
        for i, (x, y) in enumerate(zip(a.dims, b.dims)):
            if x != y:
                return f"{kind}: level {i + 1} dims differ ({x} vs {y})"
    for i, (x, y) in enumerate(zip(a.maps, b.maps)):
        if x != y:
            return f"{kind}: transition {i + 1} differs"
    return None


def bidual_check(X, depth: int) -> BidualReport:
    """Verify dual(dual(X)) equals X levelwise to the given depth."""
    XX = dual_object(dual_object(X))
    if isinstance(X, FinVect):
        ok = XX.dim == X.dim
        w = DualityWitness((), "finite-dimensional coordinate pairing")
        return BidualReport(ok, w if ok else None, None if ok else "dimension changed")
    field = X.field
    ident = lambda d: Matrix.identity(field, d)
    if isinstance(X, (Tower, IndTower)):
        a, b = materialize(X, depth), materialize(XX, depth)
        bad = _prefix_pair(X.kind, a, b)
        if bad:
            return BidualReport(False, None, bad)
        w = DualityWitness(tuple(ident(d) for d in a.dims), "levelwise coordinate pairings")
        return BidualReport(True, w, None)
    if isinstance(X, TateObj):
        a, b = materialize(X, depth), materialize(XX, depth)
        bad = _prefix_pair("c-lattice", a.c, b.c) or _prefix_pair("d-lattice", a.d, b.d)
        if bad:
            return BidualReport(False, None, bad)
        pair = tuple(ident(d) for d in a.c.dims) + tuple(ident(d) for d in a.d.dims)
        return BidualReport(True, DualityWitness(pair, "c- and d-lattice levels"), None)
    if isinstance(X, (IndLCObj, ProDiscObj)):
        a, b = materialize(X, depth), materialize(XX, depth)
        parts_a = a.summands if hasattr(a, "summands") else a.factors
        parts_b = b.summands if hasattr(b, "summands") else b.factors
        if len(parts_a) != len(parts_b):
            return BidualReport(False, None, "component count changed")
        pair = []
        for k, (x, y) in enumerate(zip(parts_a, parts_b), start=1):
            bad = _prefix_pair(f"component {k}", x, y)
            if bad:
                return BidualReport(False, None, bad)
            pair.extend(ident(d) for d in x.dims)
        return BidualReport(True, DualityWitness(tuple(pair), "componentwise levels"), None)
    raise TypeError(f"cannot bidual-check {type(X).__name__}")


# ---------------------------------------------------------------------------
# Constructive self-duality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfDualSplit:
    """Certified decomposition of a self-paired space.

    K is the intersection of the chosen c-lattice with the preimage of its
    annihilator, D the deterministic complement, F the finite correction
    with K + F = phi^{-1}(K-perp).  `iso` certifies that the pairing maps
    K + F isomorphically onto functionals on D; `change_of_basis` certifies
    K + D = V.  F is reported, never absorbed.
    """

    K: Matrix
    D: Matrix
    F: Matrix
    iso: Matrix
    change_of_basis: Matrix
    notes: tuple[str, ...]


def self_dual_decompose(V: FilteredSpace, phi: Matrix, L: Matrix) -> SelfDualSplit:
    n = V.dim
    if phi.shape != (n, n) or not is_invertible(phi):
        raise ValueError("pairing map must be an invertible n x n matrix")
    if not lattice_check(V, L, "c").ok:
        raise ValueError("L is not a c-lattice of the filtered space")
    phi_inv = inverse(phi)
    assert phi_inv is not None

    L_perp = kernel_basis(L.T)  # functionals vanishing on L
    K = intersect_columns(L, phi_inv @ L_perp)
    D = complement_basis(K, n)

    K_perp = kernel_basis(K.T)
    P = phi_inv @ K_perp
    # K sits inside phi^{-1}(K-perp); complete it by columns of P in order
    current = K
    f_cols = []
    for j in range(P.cols):
        cand = hstack([current, P.col(j)])
        if rank(cand) == rank(current) + 1:
            current = cand
            f_cols.append(j)
    F = P.take_cols(f_cols)

    notes = []
    if K.cols == 0:
        notes.append("K is zero")
    if D.cols == 0:
        notes.append("D is zero")
    notes.append(f"finite correction dim {F.cols}")

    change = hstack([K, D])
    if not is_invertible(change):
        raise AssertionError("internal: K + D is not a direct sum decomposition")
    if K.cols and not ((phi @ K).T @ K).is_zero():
        raise AssertionError("internal: pairing does not annihilate K against itself")
    kf = hstack([K, F])
    iso = (D.T @ phi) @ kf if D.cols else Matrix.zeros(phi.field, 0, kf.cols)
    if not is_invertible(iso):
        raise AssertionError("internal: pairing does not identify K + F with functionals on D")
    return SelfDualSplit(K, D, F, iso, change, tuple(notes))


# ---------------------------------------------------------------------------
# Hahn-Banach extension at a truncation level
# ---------------------------------------------------------------------------


def extend_functional(B: FilteredSpace, A: Matrix, f: Matrix, k: int) -> Matrix:
    """Extend a continuous functional from a subspace to the whole space.

    f is a row vector on A's basis; the continuity witness k demands that f
    kill A meet U_k.  The extension descends to the quotient by U_k, is set
    to 0 on the deterministic complement of A's image there, and pulls back,
    so the result restricts to f on A and kills U_k.
    """
    n = B.dim
    if A.rows != n or rank(A) != A.cols:
        raise ValueError("A must be given by independent columns in B")
    if f.shape != (1, A.cols):
        raise ValueError(f"functional on A must be 1 x {A.cols}")
    if not 1 <= k <= len(B.flags):
        raise ValueError("continuity witness index out of range")
    Uk = B.flags[k - 1]

    meet = intersect_columns(A, Uk)
    if meet.cols:
        coords = solve_linear(A, meet)
        assert coords is not None
        if not (f @ coords).is_zero():
            raise ValueError("continuity witness fails: f does not kill A meet U_k")

    Q = complement_basis(Uk, n)
    T_inv = inverse(hstack([Uk, Q]))
    assert T_inv is not None
    qcoord = Matrix(B.field, T_inv.data[Uk.cols :, :])  # B -> B/U_k coordinates

    Abar = qcoord @ A
    _, pivots = rref(Abar)
    P = Abar.take_cols(pivots)
    fP = f.take_cols(pivots)
    Cbar = complement_basis(P, Q.cols)
    basis_inv = inverse(hstack([P, Cbar])) if Q.cols else None
    if Q.cols:
        gbar = hstack([fP, Matrix.zeros(B.field, 1, Cbar.cols)]) @ basis_inv
        g = gbar @ qcoord
    else:
        g = Matrix.zeros(B.field, 1, n)

    if A.cols and g @ A != f:
        raise AssertionError("internal: extension does not restrict to f")
    if Uk.cols and not (g @ Uk).is_zero():
        raise AssertionError("internal: extension does not kill U_k")
    return g


# ---------------------------------------------------------------------------
# Evaluation continuity witness for Tate presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvWitness:
    """The c-lattice, used both as the open U and the compact K, makes the
    evaluation pairing continuous; the annihilator check is run on level
    bases."""

    level: int
    U: Matrix
    U_perp: Matrix
    checked: bool


def ev_witness(V: TateObj, depth: int) -> EvWitness:
    pre = materialize(V, depth)
    l, d = pre.c.dims[-1], pre.d.dims[-1]
    field = V.field
    U = vcat_identity(field, l, d)
    U_perp = kernel_basis(U.T)
    if not (U_perp.T @ U).is_zero():
        raise AssertionError("internal: ev(U x U_perp) != 0")
    return EvWitness(depth, U, U_perp, True)


def vcat_identity(field, l: int, d: int) -> Matrix:
    """Columns spanning the first block of a window of size l + d."""
    import numpy as np

    out = np.zeros((l + d, l), dtype=np.int64)
    for i in range(l):
        out[i, i] = 1
    return Matrix(field, out)
