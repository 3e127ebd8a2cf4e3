"""Completed * and ! tensor products on presentations.

Both completed tensors are computed on the diagonal cofinal subsystem of
the doubly-indexed (co)limit: level n of a product of towers is the
Kronecker product of the two level-n spaces.  Doubly-indexed families of
summands or factors are reindexed by a single fixed diagonal enumeration.

The output category tags are load-bearing: the * tensor of Tate objects is
an ind-linearly-compact object and the ! tensor a pro-discrete one, never a
Tate object, because the result genuinely can fail to be Tate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .duality import dual_object
from .exactla import FieldMismatchError, Matrix, kron, rank
from .spaces import (
    IndLCObj,
    IndTower,
    ProDiscObj,
    TailDescriptor,
    TateObj,
    Tower,
    constant_indtower,
    constant_tower,
    materialize,
)


# ---------------------------------------------------------------------------
# Diagonal pair enumeration
# ---------------------------------------------------------------------------


def index_from_pair(i: int, j: int) -> int:
    """Position of (i, j) in the diagonal order (1,1),(1,2),(2,1),(1,3),..."""
    if i < 1 or j < 1:
        raise ValueError("pair entries are 1-based")
    s = i + j
    return (s - 2) * (s - 1) // 2 + i


def pair_from_index(n: int) -> tuple[int, int]:
    if n < 1:
        raise ValueError("index is 1-based")
    s = 2
    while (s - 1) * s // 2 < n:
        s += 1
    i = n - (s - 2) * (s - 1) // 2
    return i, s - i


def _verify_pair_indexing(limit: int = 10_000):
    seen = set()
    for n in range(1, limit + 1):
        pair = pair_from_index(n)
        if pair in seen or index_from_pair(*pair) != n:
            raise AssertionError("pair enumeration is not bijective on the prefix")
        seen.add(pair)


_verify_pair_indexing()


def pair_at(k: int, count_a: Optional[int], count_b: Optional[int]) -> tuple[int, int]:
    """k-th pair of the diagonal order restricted to the given ranges."""
    if (count_a is not None and count_a == 0) or (count_b is not None and count_b == 0):
        raise IndexError("no pairs over an empty range")
    seen = 0
    n = 0
    while True:
        n += 1
        i, j = pair_from_index(n)
        if count_a is not None and i > count_a:
            continue
        if count_b is not None and j > count_b:
            continue
        seen += 1
        if seen == k:
            return i, j


def _pair_count(count_a: Optional[int], count_b: Optional[int]) -> Optional[int]:
    if count_a == 0 or count_b == 0:
        return 0
    if count_a is None or count_b is None:
        return None
    return count_a * count_b


# ---------------------------------------------------------------------------
# Tensors of single systems
# ---------------------------------------------------------------------------


def _combine_tails(a: TailDescriptor, b: TailDescriptor) -> TailDescriptor:
    if a.kind == "stabilizing" and b.kind == "stabilizing":
        return a
    return TailDescriptor("unspecified")


def _combine_depth(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def tensor_star_towers(A: Tower, B: Tower) -> Tower:
    """Completed * tensor of linearly compact presentations (all completed
    tensors agree there): levelwise Kronecker products on the diagonal."""
    if A.field != B.field:
        raise FieldMismatchError("tensor of towers over different fields")
    return Tower(
        A.field,
        lambda n: A.space(n).dim * B.space(n).dim,
        lambda n: kron(A.transition(n), B.transition(n)),
        tail=_combine_tails(A.tail, B.tail),
        depth=_combine_depth(A.depth, B.depth),
    )


def tensor_indtowers(A: IndTower, B: IndTower) -> IndTower:
    """Tensor of discrete presentations (all completed tensors agree)."""
    if A.field != B.field:
        raise FieldMismatchError("tensor of systems over different fields")
    return IndTower(
        A.field,
        lambda n: A.space(n).dim * B.space(n).dim,
        lambda n: kron(A.transition(n), B.transition(n)),
        tail=_combine_tails(A.tail, B.tail),
        depth=_combine_depth(A.depth, B.depth),
    )


def tensor_star_indlc(A: IndLCObj, B: IndLCObj) -> IndLCObj:
    """The * tensor of sums of compact pieces: pairwise products of summands,
    enumerated diagonally."""
    if A.field != B.field:
        raise FieldMismatchError("tensor over different fields")

    def summand(k):
        i, j = pair_at(k, A.count, B.count)
        return tensor_star_towers(A.summand(i), B.summand(j))

    return IndLCObj(A.field, summand, _pair_count(A.count, B.count))


def tensor_bang_prodisc(A: ProDiscObj, B: ProDiscObj) -> ProDiscObj:
    """The ! tensor of products of discrete pieces: pairwise tensors of
    factors, enumerated diagonally."""
    if A.field != B.field:
        raise FieldMismatchError("tensor over different fields")

    def factor(k):
        i, j = pair_at(k, A.count, B.count)
        return tensor_indtowers(A.factor(i), B.factor(j))

    return ProDiscObj(A.field, factor, _pair_count(A.count, B.count))


# ---------------------------------------------------------------------------
# Embeddings of Tate objects
# ---------------------------------------------------------------------------


def embed_tate(V: TateObj, target: str):
    """Present a Tate object inside the ind-compact or pro-discrete category.

    indlc: the c-lattice plus the finite-dimensional increments of the
    discrete part, each a constant tower.  prodisc: the d-lattice plus the
    finite quotient increments of the compact part, each a constant system.
    """
    field = V.field
    if target == "indlc":
        D = V.dLattice

        def summand(k):
            if k == 1:
                return V.cLattice
            step = k - 1
            if step == 1:
                inc = D.space(1).dim
            else:
                inc = D.space(step).dim - rank(D.transition(step - 1))
            return constant_tower(field, inc)

        count = None if D.depth is None else D.depth + 1
        return IndLCObj(field, summand, count)
    if target == "prodisc":
        C = V.cLattice

        def factor(k):
            if k == 1:
                return V.dLattice
            step = k - 1
            if step == 1:
                inc = C.space(1).dim
            else:
                inc = C.space(step).dim - rank(C.transition(step - 1))
            return constant_indtower(field, inc)

        count = None if C.depth is None else C.depth + 1
        return ProDiscObj(field, factor, count)
    raise ValueError(f"unknown embedding target {target!r}")


def tensor_star_tate(A: TateObj, B: TateObj) -> IndLCObj:
    """The * tensor of Tate objects, computed through the ind-compact
    embedding.  The result is generally not Tate; the category tag says so."""
    return tensor_star_indlc(embed_tate(A, "indlc"), embed_tate(B, "indlc"))


def tensor_bang_tate(A: TateObj, B: TateObj) -> ProDiscObj:
    """The ! tensor of Tate objects, through the pro-discrete embedding."""
    return tensor_bang_prodisc(embed_tate(A, "prodisc"), embed_tate(B, "prodisc"))


# ---------------------------------------------------------------------------
# Hom presentation and evaluation tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomPresentation:
    """Hom(A, B) presented as dual(A) (!)-tensored with B.

    `ev[n-1]` sends level-n tensors phi (x) b to level-n homomorphism
    matrices vec'd row-major; `window` lists the (dim A_n, dim B_n) window
    dimensions the tables act on.
    """

    prodisc: ProDiscObj
    ev: tuple[Matrix, ...]
    window: tuple[tuple[int, int], ...]


def _ev_matrix(field, a: int, b: int) -> Matrix:
    # tensor coordinates: phi_i (x) b_j at i*b + j (left factor major);
    # hom coordinates: row-major vec of the b x a matrix unit E[j, i]
    out = np.zeros((a * b, a * b), dtype=np.int64)
    for i in range(a):
        for j in range(b):
            out[j * a + i, i * b + j] = 1
    return Matrix(field, out)


def hom_via_tensor(A: TateObj, B: TateObj, depth: int) -> HomPresentation:
    """Hom(A, B) as the ! tensor of the dual of A with B, plus evaluation
    tables mapping rank-one tensors to homomorphism matrices.

    Every level table is verified on all rank-one basis tensors before
    return: the image of phi_i (x) b_j must be the matrix a -> phi_i(a) b_j.
    """
    if A.field != B.field:
        raise FieldMismatchError("hom over different fields")
    prodisc = tensor_bang_tate(dual_object(A), B)
    pa = materialize(A, depth)
    pb = materialize(B, depth)
    tables = []
    window = []
    for n in range(depth):
        a = pa.c.dims[n] + pa.d.dims[n]
        b = pb.c.dims[n] + pb.d.dims[n]
        ev = _ev_matrix(A.field, a, b)
        for i in range(a):  # rank-one verification
            for j in range(b):
                col = ev.col(i * b + j)
                hom = Matrix(A.field, col.data.reshape(b, a))
                expect = np.zeros((b, a), dtype=np.int64)
                expect[j, i] = 1
                if hom != Matrix(A.field, expect):
                    raise AssertionError("evaluation table failed a rank-one check")
        if rank(ev) != a * b:
            raise AssertionError("evaluation table is not injective")
        tables.append(ev)
        window.append((a, b))
    return HomPresentation(prodisc, tuple(tables), tuple(window))


# ---------------------------------------------------------------------------
# Duality intertwining
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TensorDualityReport:
    ok: bool
    alignment: tuple[tuple[int, tuple[int, int]], ...]
    mismatch: Optional[str]


def check_tensor_duality(A: IndLCObj, B: IndLCObj, depth: int) -> TensorDualityReport:
    """Compare dual(A *-tensor B) with (dual A) !-tensor (dual B) levelwise.

    Both sides are materialized independently to the given outer and inner
    depth and aligned by the diagonal enumeration; dims and transition
    matrices must agree exactly.
    """
    lhs = dual_object(tensor_star_indlc(A, B))
    rhs = tensor_bang_prodisc(dual_object(A), dual_object(B))
    pl = materialize(lhs, depth)
    pr = materialize(rhs, depth)
    if len(pl.factors) != len(pr.factors):
        return TensorDualityReport(False, (), "factor counts differ")
    alignment = []
    for k in range(1, len(pl.factors) + 1):
        alignment.append((k, pair_at(k, A.count, B.count)))
        x, y = pl.factors[k - 1], pr.factors[k - 1]
        if x.dims != y.dims:
            return TensorDualityReport(False, (), f"factor {k}: dims {x.dims} vs {y.dims}")
        for lvl, (mx, my) in enumerate(zip(x.maps, y.maps), start=1):
            if mx != my:
                return TensorDualityReport(
                    False, (), f"factor {k}: transition {lvl} differs"
                )
    return TensorDualityReport(True, tuple(alignment), None)


# ---------------------------------------------------------------------------
# Structure isomorphisms used by the law suites
# ---------------------------------------------------------------------------


def swap_matrix(field, m: int, n: int) -> Matrix:
    """Permutation sending e_i (x) e_j in an m x n tensor to e_j (x) e_i."""
    out = np.zeros((m * n, m * n), dtype=np.int64)
    for i in range(m):
        for j in range(n):
            out[j * m + i, i * n + j] = 1
    return Matrix(field, out)


def curry(M: Matrix, a: int, b: int, c: int) -> Matrix:
    """Reshape a bilinear map C <- A (x) B into Hom(A, Hom(B, C)).

    Hom(B, C) coordinates are the row-major vec of c x b matrices, so the
    result is a (b*c) x a matrix; currying is a dimension-preserving
    bijection on entries.
    """
    if M.shape != (c, a * b):
        raise ValueError(f"bilinear matrix must be {c} x {a * b}")
    out = np.zeros((b * c, a), dtype=np.int64)
    for k in range(c):
        for i in range(a):
            for j in range(b):
                out[k * b + j, i] = M.data[k, i * b + j]
    return Matrix(M.field, out)


def uncurry(N: Matrix, a: int, b: int, c: int) -> Matrix:
    if N.shape != (b * c, a):
        raise ValueError(f"curried matrix must be {b * c} x {a}")
    out = np.zeros((c, a * b), dtype=np.int64)
    for k in range(c):
        for i in range(a):
            for j in range(b):
                out[k, i * b + j] = N.data[k * b + j, i]
    return Matrix(N.field, out)
