"""Presentations of linearly topologized spaces at finite truncation.

A linearly compact space with countable basis is modelled by a Tower (an
inverse system of finite-dimensional GF(p) spaces), a discrete space of
countable dimension by an IndTower (a direct system), a Tate space by a
TateObj pairing the two, and the ind-linearly-compact / pro-discrete
categories by lazy sums of Towers / products of IndTowers.  Topology is
carried entirely by the presentation: flags, tower structure and category
tags, never pointwise open sets.

Levels are lazy and memoized; level functions must be pure, so concurrent
duplicate evaluation is harmless.  Behaviour beyond the computed prefix is
declared through a TailDescriptor, the single honest channel for claims
about infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .exactla import (
    FieldSpec,
    Matrix,
    ShapeMismatchError,
    hstack,
    image_basis,
    kernel_basis,
    rank,
    solve_linear,
    span_contains,
)


class DescriptorViolation(ValueError):
    """A materialized prefix contradicts the declared tail behaviour."""


@dataclass(frozen=True)
class FinVect:
    """A finite-dimensional discrete space, known by its dimension."""

    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("negative dimension")


@dataclass(frozen=True)
class LinMap:
    """A linear map between finite-dimensional spaces."""

    src: FinVect
    dst: FinVect
    mat: Matrix

    def __post_init__(self):
        if self.mat.shape != (self.dst.dim, self.src.dim):
            raise ShapeMismatchError(
                f"map {self.src.dim}->{self.dst.dim} needs a "
                f"{self.dst.dim}x{self.src.dim} matrix, got {self.mat.shape}"
            )


TAIL_KINDS = ("stabilizing", "bounded-ker", "bounded-coker", "unbounded", "unspecified")


@dataclass(frozen=True)
class TailDescriptor:
    """Declared behaviour of a system beyond any computed prefix.

    ``stabilizing``: transitions are eventually isomorphisms.
    ``bounded-ker(c)`` / ``bounded-coker(c)``: every transition kernel /
    cokernel has dimension at most c, forever.
    ``unbounded``: the relevant dimensions grow beyond every bound.
    ``unspecified``: no claim.
    """

    kind: str = "unspecified"
    bound: Optional[int] = None

    def __post_init__(self):
        if self.kind not in TAIL_KINDS:
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind in ("bounded-ker", "bounded-coker") and self.bound is None:
            raise ValueError(f"{self.kind} needs a bound")


UNSPECIFIED = TailDescriptor()


def _ker_dim(t: Matrix) -> int:
    return t.cols - rank(t)


def _coker_dim(t: Matrix) -> int:
    return t.rows - rank(t)


def _check_tail(tail: TailDescriptor, maps: list[Matrix]):
    if tail.kind == "bounded-ker":
        for i, t in enumerate(maps):
            if _ker_dim(t) > tail.bound:
                raise DescriptorViolation(
                    f"bounded-ker({tail.bound}) but transition {i + 1} has "
                    f"kernel dimension {_ker_dim(t)}"
                )
    elif tail.kind == "bounded-coker":
        for i, t in enumerate(maps):
            if _coker_dim(t) > tail.bound:
                raise DescriptorViolation(
                    f"bounded-coker({tail.bound}) but transition {i + 1} has "
                    f"cokernel dimension {_coker_dim(t)}"
                )


class _LazySystem:
    """Shared machinery of Tower and IndTower: memoized 1-based levels."""

    kind = ""

    def __init__(self, field, dim_fn, transition_fn, tail=None, depth=None):
        self.field = field
        self._dim_fn = dim_fn
        self._transition_fn = transition_fn
        self.tail = tail or UNSPECIFIED
        self.depth = depth
        self._dims: dict[int, int] = {}
        self._maps: dict[int, Matrix] = {}

    def _check_level(self, n: int):
        if n < 1:
            raise ValueError("levels are 1-based")
        if self.depth is not None and n > self.depth:
            raise IndexError(f"{self.kind} truncated at depth {self.depth}, level {n} requested")

    def space(self, n: int) -> FinVect:
        self._check_level(n)
        if n not in self._dims:
            d = int(self._dim_fn(n))
            if d < 0:
                raise ValueError("negative level dimension")
            self._dims[n] = d
        return FinVect(self._dims[n])

    def _transition_shape(self, n: int) -> tuple[int, int]:
        raise NotImplementedError

    def transition(self, n: int) -> Matrix:
        self._check_level(n)
        if self.depth is not None and n + 1 > self.depth:
            raise IndexError(f"transition {n} needs level {n + 1} beyond depth {self.depth}")
        if n not in self._maps:
            t = self._transition_fn(n)
            expect = self._transition_shape(n)
            if t.shape != expect:
                raise ShapeMismatchError(
                    f"{self.kind} transition {n}: expected shape {expect}, got {t.shape}"
                )
            if t.field != self.field:
                raise ValueError("transition over the wrong field")
            self._maps[n] = t
        return self._maps[n]

    @classmethod
    def from_prefix(cls, field, dims, maps, tail=None):
        dims = [int(d) for d in dims]
        maps = list(maps)
        if len(maps) != max(len(dims) - 1, 0):
            raise ShapeMismatchError("prefix needs one transition per adjacent level pair")

        def dim_fn(n, _dims=dims):
            return _dims[n - 1]

        def trans_fn(n, _maps=maps):
            return _maps[n - 1]

        return cls(field, dim_fn, trans_fn, tail=tail, depth=len(dims))


class Tower(_LazySystem):
    """Inverse system W_1 <- W_2 <- ...; transition(n): level n+1 -> level n."""

    kind = "tower"

    def _transition_shape(self, n):
        return (self.space(n).dim, self.space(n + 1).dim)


class IndTower(_LazySystem):
    """Direct system V_1 -> V_2 -> ...; transition(n): level n -> level n+1."""

    kind = "indtower"

    def _transition_shape(self, n):
        return (self.space(n + 1).dim, self.space(n).dim)


@dataclass(frozen=True)
class TateObj:
    """A Tate-space presentation: linearly compact part plus discrete part."""

    cLattice: Tower
    dLattice: IndTower

    @property
    def field(self) -> FieldSpec:
        return self.cLattice.field


class IndLCObj:
    """Countable direct sum of linearly compact spaces (lazy Tower summands)."""

    kind = "indlc"

    def __init__(self, field, summand_fn: Callable[[int], Tower], count: Optional[int]):
        self.field = field
        self._summand_fn = summand_fn
        self.count = count
        self._memo: dict[int, Tower] = {}

    def summand(self, k: int) -> Tower:
        if k < 1 or (self.count is not None and k > self.count):
            raise IndexError(f"summand {k} out of range")
        if k not in self._memo:
            self._memo[k] = self._summand_fn(k)
        return self._memo[k]

    @classmethod
    def from_list(cls, field, towers: list[Tower]) -> "IndLCObj":
        towers = list(towers)
        return cls(field, lambda k: towers[k - 1], len(towers))


class ProDiscObj:
    """Countable direct product of discrete spaces (lazy IndTower factors)."""

    kind = "prodisc"

    def __init__(self, field, factor_fn: Callable[[int], IndTower], count: Optional[int]):
        self.field = field
        self._factor_fn = factor_fn
        self.count = count
        self._memo: dict[int, IndTower] = {}

    def factor(self, k: int) -> IndTower:
        if k < 1 or (self.count is not None and k > self.count):
            raise IndexError(f"factor {k} out of range")
        if k not in self._memo:
            self._memo[k] = self._factor_fn(k)
        return self._memo[k]

    @classmethod
    def from_list(cls, field, indtowers: list[IndTower]) -> "ProDiscObj":
        indtowers = list(indtowers)
        return cls(field, lambda k: indtowers[k - 1], len(indtowers))


class FilteredSpace:
    """A finite-dimensional space with a nested flag of open subspaces.

    Flags U_1 >= U_2 >= ... >= U_N = 0 are column-span matrices; nesting is
    rank-checked and the last flag must be zero.
    """

    def __init__(self, field: FieldSpec, dim: int, flags: list[Matrix]):
        if dim < 0:
            raise ValueError("negative dimension")
        if not flags:
            raise ValueError("at least one flag (the zero flag) is required")
        for i, U in enumerate(flags):
            if U.rows != dim:
                raise ShapeMismatchError(f"flag {i + 1} lives in the wrong ambient space")
            if rank(U) != U.cols:
                raise ValueError(f"flag {i + 1} has dependent columns")
        for i in range(len(flags) - 1):
            if not span_contains(flags[i], flags[i + 1]):
                raise ValueError(f"flag {i + 2} is not contained in flag {i + 1}")
        if flags[-1].cols != 0:
            raise ValueError("last flag must be the zero subspace")
        self.field = field
        self.ambient = FinVect(dim)
        self.flags = list(flags)

    @property
    def dim(self) -> int:
        return self.ambient.dim


# ---------------------------------------------------------------------------
# Materialization (truncation functor)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TowerPrefix:
    field: FieldSpec
    dims: tuple[int, ...]
    maps: tuple[Matrix, ...]  # maps[i]: level i+2 -> level i+1


@dataclass(frozen=True)
class IndTowerPrefix:
    field: FieldSpec
    dims: tuple[int, ...]
    maps: tuple[Matrix, ...]  # maps[i]: level i+1 -> level i+2


@dataclass(frozen=True)
class TatePrefix:
    c: TowerPrefix
    d: IndTowerPrefix


@dataclass(frozen=True)
class IndLCPrefix:
    summands: tuple[TowerPrefix, ...]


@dataclass(frozen=True)
class ProDiscPrefix:
    factors: tuple[IndTowerPrefix, ...]


def materialize(obj, depth: int, inner: Optional[int] = None):
    """First `depth` levels of a presentation, transitions included.

    Two-layer objects (IndLCObj / ProDiscObj) take `inner` for the level
    depth of each summand or factor (defaulting to `depth`).  Materialized
    prefixes are checked against the object's TailDescriptor.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(obj, Tower):
        dims = tuple(obj.space(n).dim for n in range(1, depth + 1))
        maps = tuple(obj.transition(n) for n in range(1, depth))
        _check_tail(obj.tail, list(maps))
        return TowerPrefix(obj.field, dims, maps)
    if isinstance(obj, IndTower):
        dims = tuple(obj.space(n).dim for n in range(1, depth + 1))
        maps = tuple(obj.transition(n) for n in range(1, depth))
        _check_tail(obj.tail, list(maps))
        return IndTowerPrefix(obj.field, dims, maps)
    if isinstance(obj, TateObj):
        return TatePrefix(materialize(obj.cLattice, depth), materialize(obj.dLattice, depth))
    if isinstance(obj, IndLCObj):
        inner = depth if inner is None else inner
        n = depth if obj.count is None else min(depth, obj.count)
        return IndLCPrefix(tuple(materialize(obj.summand(k), inner) for k in range(1, n + 1)))
    if isinstance(obj, ProDiscObj):
        inner = depth if inner is None else inner
        n = depth if obj.count is None else min(depth, obj.count)
        return ProDiscPrefix(tuple(materialize(obj.factor(k), inner) for k in range(1, n + 1)))
    raise TypeError(f"cannot materialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Built-in spaces (monomial bases, coordinate projections/inclusions)
# ---------------------------------------------------------------------------


def constant_tower(field: FieldSpec, dim: int) -> Tower:
    ident = Matrix.identity(field, dim)
    return Tower(field, lambda n: dim, lambda n: ident, tail=TailDescriptor("stabilizing"))


def constant_indtower(field: FieldSpec, dim: int) -> IndTower:
    ident = Matrix.identity(field, dim)
    return IndTower(field, lambda n: dim, lambda n: ident, tail=TailDescriptor("stabilizing"))


def _drop_last(field: FieldSpec, n: int) -> Matrix:
    # projection k[t]/t^(n+1) -> k[t]/t^n on the monomial basis 1, t, ...
    import numpy as np

    out = np.zeros((n, n + 1), dtype=np.int64)
    for i in range(n):
        out[i, i] = 1
    return Matrix(field, out)


def _include(field: FieldSpec, n: int) -> Matrix:
    return _drop_last(field, n).T


def power_series_tower(field: FieldSpec) -> Tower:
    return Tower(
        field,
        lambda n: n,
        lambda n: _drop_last(field, n),
        tail=TailDescriptor("bounded-ker", 1),
    )


def polynomial_indtower(field: FieldSpec) -> IndTower:
    return IndTower(
        field,
        lambda n: n,
        lambda n: _include(field, n),
        tail=TailDescriptor("bounded-coker", 1),
    )


def laurent_tate(field: FieldSpec) -> TateObj:
    # c-lattice k[[t]], complementary d-lattice spanned by t^-1, t^-2, ...
    return TateObj(power_series_tower(field), polynomial_indtower(field))


def builtin_space(name: str, field: FieldSpec, n: int = 0):
    if name == "power_series":
        return power_series_tower(field)
    if name == "polynomial":
        return polynomial_indtower(field)
    if name == "laurent":
        return laurent_tate(field)
    if name == "constant":
        return FinVect(n)
    raise ValueError(f"unknown builtin space {name!r}")


def tate_from_finvect(field: FieldSpec, fv: FinVect) -> TateObj:
    """A finite-dimensional space as a Tate object: all compact, no discrete part."""
    return TateObj(constant_tower(field, fv.dim), constant_indtower(field, 0))


# ---------------------------------------------------------------------------
# Normalization (prefix level)
# ---------------------------------------------------------------------------


def normalize_indtower(T: IndTower, depth: int) -> tuple[IndTowerPrefix, list[Matrix]]:
    """Replace each level by its image in the top level; transitions become
    inclusions (injective).  Returns the normalized prefix plus comparison
    maps old level -> new level that commute with the transitions.
    """
    pre = materialize(T, depth)
    field = pre.field
    N = depth
    # composite up to the top: G[i]: level i+1 -> level N
    G = [None] * N
    G[N - 1] = Matrix.identity(field, pre.dims[N - 1])
    for i in range(N - 2, -1, -1):
        G[i] = G[i + 1] @ pre.maps[i]
    bases = [image_basis(G[i]) for i in range(N)]
    new_dims = tuple(b.cols for b in bases)
    new_maps = []
    for i in range(N - 1):
        incl = solve_linear(bases[i + 1], bases[i])
        assert incl is not None
        new_maps.append(incl)
    comparisons = []
    for i in range(N):
        cmp_i = solve_linear(bases[i], G[i])
        assert cmp_i is not None
        comparisons.append(cmp_i)
    out = IndTowerPrefix(field, new_dims, tuple(new_maps))
    for i in range(N - 1):  # naturality of the comparison
        assert new_maps[i] @ comparisons[i] == comparisons[i + 1] @ pre.maps[i]
    return out, comparisons


def normalize_tower(T: Tower, depth: int) -> tuple[TowerPrefix, list[Matrix]]:
    """Replace each level by the image of the deepest available level.

    Output transitions are surjective onto the new levels; comparison maps
    are the inclusions new level -> old level.  Correct relative to the
    prefix only: deeper data can shrink levels further unless the tail is
    declared stabilizing.
    """
    pre = materialize(T, depth)
    field = pre.field
    N = depth
    # composite down from the top: H[i]: level N -> level i+1
    H = [None] * N
    H[N - 1] = Matrix.identity(field, pre.dims[N - 1])
    for i in range(N - 2, -1, -1):
        H[i] = pre.maps[i] @ H[i + 1]
    bases = [image_basis(H[i]) for i in range(N)]
    new_dims = tuple(b.cols for b in bases)
    new_maps = []
    for i in range(N - 1):
        t = solve_linear(bases[i], pre.maps[i] @ bases[i + 1])
        assert t is not None
        new_maps.append(t)
        assert rank(t) == new_dims[i]  # surjective by construction
    out = TowerPrefix(field, new_dims, tuple(new_maps))
    comparisons = list(bases)
    for i in range(N - 1):
        assert pre.maps[i] @ bases[i + 1] == bases[i] @ new_maps[i]
    return out, comparisons


def tate_window(V: TateObj, depth: int) -> tuple[FilteredSpace, Matrix, Matrix]:
    """The level-N window L_N + D_N of a Tate object as a filtered space.

    Flags are the kernels of the tower projections (the traces of the open
    subspaces on the window), ending at zero; returns the window along with
    the column spans of the compact and discrete blocks.
    """
    import numpy as np

    pre = materialize(V, depth)
    field = V.field
    l, d = pre.c.dims[-1], pre.d.dims[-1]
    n = l + d

    def l_block(cols: Matrix) -> Matrix:
        out = np.zeros((n, cols.cols), dtype=np.int64)
        out[:l, :] = cols.data
        return Matrix(field, out)

    comp = Matrix.identity(field, l)
    kernels = []
    for k in range(depth - 1, 0, -1):
        comp = pre.c.maps[k - 1] @ comp  # L_N -> L_k
        kernels.append(kernel_basis(comp))
    flags = [l_block(Matrix.identity(field, l))]
    flags.extend(l_block(K) for K in reversed(kernels))
    flags.append(Matrix.zeros(field, n, 0))
    dedup = [flags[0]]
    for U in flags[1:]:  # repeated ranks collapse to one flag
        if U.cols < dedup[-1].cols:
            dedup.append(U)
    if dedup[-1].cols != 0:
        dedup.append(Matrix.zeros(field, n, 0))
    c_cols = l_block(Matrix.identity(field, l))
    d_data = np.zeros((n, d), dtype=np.int64)
    for i in range(d):
        d_data[l + i, i] = 1
    return FilteredSpace(field, n, dedup), c_cols, Matrix(field, d_data)


# ---------------------------------------------------------------------------
# Lattice checks and Tate verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeCheck:
    ok: bool
    witness: Optional[int]
    note: str


def lattice_check(F: FilteredSpace, S: Matrix, mode: str) -> LatticeCheck:
    """Openness (mode 'c') or discreteness (mode 'd') of S against the flags.

    Mode 'c': S contains some flag U_k (witness k); linear boundedness is
    automatic in finite dimension.  Mode 'd': S meets some flag trivially;
    closedness is automatic in finite dimension.
    """
    if S.rows != F.dim:
        raise ShapeMismatchError("subspace lives in the wrong ambient space")
    if rank(S) != S.cols:
        raise ValueError("S has dependent columns")
    # The terminal zero flag stands in for the undeclared rest of the chain
    # and never witnesses openness or discreteness.
    declared = list(enumerate(F.flags[:-1], start=1))
    if mode == "c":
        for k, U in declared:
            if span_contains(S, U):
                return LatticeCheck(True, k, "open: contains flag; boundedness automatic")
        return LatticeCheck(False, None, "contains no declared flag")
    if mode == "d":
        for k, U in declared:
            if rank(hstack([S, U])) == rank(S) + rank(U):
                return LatticeCheck(True, k, "discrete: meets flag trivially; closedness automatic")
        return LatticeCheck(False, None, "meets every declared flag nontrivially")
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class TateVerdict:
    verdict: str  # tate | not-tate | inconclusive
    evidence: dict


def is_tate_verdict(sys, depth: int) -> TateVerdict:
    """Combine prefix kernel/cokernel dimensions with the tail descriptor.

    Towers are judged by transition kernels, IndTowers by cokernels; a
    bounded descriptor of the relevant kind plus a consistent prefix gives
    'tate', an unbounded descriptor with a growth-consistent prefix gives
    'not-tate', anything else is 'inconclusive'.  Any verdict that leans on
    the descriptor says so in its evidence.
    """
    if isinstance(sys, Tower):
        relevant, bounded_kind = "kernel", "bounded-ker"
        dim_of = _ker_dim
    elif isinstance(sys, IndTower):
        relevant, bounded_kind = "cokernel", "bounded-coker"
        dim_of = _coker_dim
    else:
        raise TypeError("verdict applies to Tower or IndTower presentations")
    pre = materialize(sys, depth)
    profile = [dim_of(t) for t in pre.maps]
    evidence = {
        "relevant": relevant,
        "profile": profile,
        "kernel_dims": [_ker_dim(t) for t in pre.maps],
        "cokernel_dims": [_coker_dim(t) for t in pre.maps],
        "descriptor": sys.tail.kind,
        "bound": sys.tail.bound,
    }
    kind = sys.tail.kind
    if kind == "stabilizing":
        evidence["note"] = "descriptor: transitions eventually isomorphisms"
        return TateVerdict("tate", evidence)
    if kind == bounded_kind:
        evidence["note"] = f"descriptor bounds every {relevant} dimension by {sys.tail.bound}"
        return TateVerdict("tate", evidence)
    if kind == "unbounded":
        if any(profile[i] > profile[i + 1] for i in range(len(profile) - 1)):
            raise DescriptorViolation(
                f"unbounded descriptor but {relevant} profile {profile} is not nondecreasing"
            )
        evidence["note"] = f"descriptor claims unbounded {relevant} growth; prefix consistent"
        return TateVerdict("not-tate", evidence)
    evidence["note"] = "prefix alone cannot decide; no usable descriptor"
    return TateVerdict("inconclusive", evidence)


# ---------------------------------------------------------------------------
# Isomorphism-of-presentations guard
# ---------------------------------------------------------------------------


def iso_certificate(X, Y, depth: int) -> Optional[list[Matrix]]:
    """Levelwise identity certificate for same-kind presentations.

    Refuses (TypeError) to compare presentations of different kinds: a
    continuous bijection between a discrete and a linearly compact
    presentation is not an isomorphism, and no certificate exists for it.
    """
    if type(X) is not type(Y):
        raise TypeError(
            f"refusing to certify an isomorphism between a {type(X).__name__} "
            f"and a {type(Y).__name__} presentation"
        )
    if not isinstance(X, (Tower, IndTower)):
        raise TypeError("iso certificates apply to Tower or IndTower presentations")
    a = materialize(X, depth)
    b = materialize(Y, depth)
    if a.dims != b.dims or a.maps != b.maps:
        return None
    return [Matrix.identity(X.field, d) for d in a.dims]
