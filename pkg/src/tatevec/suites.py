"""Named invariant suites, mirroring the guarantees of each module.

Each check returns (name, ok, detail); the CLI `check` subcommand runs a
suite and exits nonzero if anything fails.  Counts follow the stated
contracts (e.g. 1000 consistent systems per field, 100 scrambled grids),
and everything is seeded so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from . import bidirected as bd
from .duality import bidual_check, extend_functional, self_dual_decompose
from .exactla import (
    FieldSpec,
    Matrix,
    complement_basis,
    hstack,
    image_basis,
    intersect_columns,
    inverse,
    is_invertible,
    kernel_basis,
    kron,
    rank,
    solve_linear,
    span_contains,
)
from .generators import (
    rand_filtered_space,
    rand_grid,
    rand_indtower,
    rand_invertible,
    rand_matrix,
    rand_pairings,
    rand_selfdual,
    rand_tate,
    rand_tower,
)
from .spaces import (
    constant_tower,
    is_tate_verdict,
    iso_certificate,
    lattice_check,
    materialize,
    normalize_indtower,
    polynomial_indtower,
    power_series_tower,
)
from .splitting import SESLadder, lift_splitting, split_filtered_ses, topological_complement
from .tensor import (
    curry,
    hom_via_tensor,
    index_from_pair,
    pair_from_index,
    swap_matrix,
    tensor_star_towers,
    uncurry,
)

GF2 = FieldSpec(2)
GF5 = FieldSpec(5)


def _check(name):
    def wrap(fn):
        fn.check_name = name
        return fn

    return wrap


# ---------------------------------------------------------------------------
# laws suite: exact linear algebra, spaces, duality, tensor
# ---------------------------------------------------------------------------


@_check("exactla/solve-linear: 1000 random consistent systems per field")
def check_solve_linear(seed=0):
    for p in (2, 3, 5, 101):
        field = FieldSpec(p)
        rng = np.random.default_rng(seed + p)
        for _ in range(1000):
            m, n, k = (int(x) for x in rng.integers(1, 6, size=3))
            A = rand_matrix(rng, field, m, n)
            B = A @ rand_matrix(rng, field, n, k)
            X = solve_linear(A, B)
            if X is None or A @ X != B:
                return False, f"failed over GF({p})"
    return True, "MX = B entrywise for every instance"


@_check("exactla/kernel-image: orthogonality and rank additivity")
def check_kernel_image(seed=1):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        field = FieldSpec(int(rng.choice([2, 3, 5])))
        A = rand_matrix(rng, field, int(rng.integers(1, 7)), int(rng.integers(1, 7)))
        K = kernel_basis(A)
        if not (A @ K).is_zero() or K.cols + rank(A) != A.cols:
            return False, "kernel identity failed"
    return True, "M.kernel = 0 and rank(ker) + rank(im) = cols"


@_check("exactla/complement: deterministic greedy direct sums")
def check_complement(seed=2):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        field = FieldSpec(int(rng.choice([2, 5])))
        n = int(rng.integers(1, 8))
        S = image_basis(rand_matrix(rng, field, n, n))
        C1 = complement_basis(S, n)
        C2 = complement_basis(S, n)
        if C1 != C2 or rank(hstack([S, C1])) != n:
            return False, "complement not deterministic or not complementary"
    return True, "byte-identical reruns; span + complement = ambient"


@_check("exactla/kron: mixed product law on random composable triples")
def check_kron_mixed(seed=3):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        field = FieldSpec(int(rng.choice([2, 3, 5])))
        a, b, c, d, e, f = (int(x) for x in rng.integers(1, 4, size=6))
        A1, A2 = rand_matrix(rng, field, a, b), rand_matrix(rng, field, b, c)
        B1, B2 = rand_matrix(rng, field, d, e), rand_matrix(rng, field, e, f)
        if kron(A1 @ A2, B1 @ B2) != kron(A1, B1) @ kron(A2, B2):
            return False, "mixed product law failed"
    return True, "kron(AB, CD) = kron(A,C) kron(B,D)"


@_check("spaces/truncation: prefixes restrict byte-for-byte")
def check_truncation(seed=4):
    rng = np.random.default_rng(seed)
    for _ in range(100):
        t = rand_tower(rng, GF5, depth=6)
        full = materialize(t, 6)
        short = materialize(t, 3)
        if full.dims[:3] != short.dims or full.maps[:2] != short.maps:
            return False, "restriction differs from direct materialization"
    return True, "materialize(obj, N)|_{N'} = materialize(obj, N')"


@_check("spaces/normalize: injective transitions, top level preserved")
def check_normalize(seed=5):
    rng = np.random.default_rng(seed)
    for _ in range(100):
        t = rand_indtower(rng, GF2, depth=4, max_dim=5)
        out, _ = normalize_indtower(t, 4)
        if out.dims[-1] != materialize(t, 4).dims[-1]:
            return False, "top level changed"
        if any(rank(m) != m.cols for m in out.maps):
            return False, "a normalized transition is not injective"
    return True, "images stabilize into inclusions"


@_check("spaces/lattices: complementary pairs pass both checks (200 spaces)")
def check_lattice_pairs(seed=6):
    rng = np.random.default_rng(seed)
    done = 0
    while done < 200:
        field = FieldSpec(int(rng.choice([2, 5])))
        F = rand_filtered_space(rng, field, max_dim=7, max_flags=4)
        if len(F.flags) < 2:
            continue
        k = int(rng.integers(0, len(F.flags) - 1))
        S = F.flags[k]
        Sp = complement_basis(S, F.dim)
        if S.cols and not lattice_check(F, S, "c").ok:
            return False, "flag superspace failed the c check"
        if not lattice_check(F, Sp, "d").ok:
            return False, "complement failed the d check"
        done += 1
    return True, "S >= flag and complement meet it trivially"


@_check("spaces/verdict: power series is Tate at every depth")
def check_verdict_monotone(seed=7):
    verdicts = {is_tate_verdict(power_series_tower(GF2), d).verdict for d in range(1, 7)}
    if verdicts != {"tate"}:
        return False, f"verdicts {verdicts}"
    return True, "verdict never flips as the depth grows"


@_check("duality/involution: 200 random objects per kind, levelwise equality")
def check_involution(seed=8):
    for field in (GF2, GF5):
        rng = np.random.default_rng(seed + field.p)
        for _ in range(100):
            depth = int(rng.integers(1, 7))
            for obj in (
                rand_tower(rng, field, depth=depth),
                rand_indtower(rng, field, depth=depth),
                rand_tate(rng, field, depth=depth),
            ):
                if not bidual_check(obj, depth).ok:
                    return False, f"double dual differs over GF({field.p})"
    return True, "dual(dual(X)) = X after double transpose"


@_check("duality/contravariance: dual reverses composition exactly")
def check_contravariance(seed=9):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        field = FieldSpec(int(rng.choice([2, 5])))
        a, b, c = (int(x) for x in rng.integers(1, 5, size=3))
        F = rand_matrix(rng, field, c, b)
        G = rand_matrix(rng, field, b, a)
        if (F @ G).T != G.T @ F.T:
            return False, "transpose does not reverse composition"
    return True, "dual(fg) = dual(g) dual(f)"


@_check("duality/iso-reflection: map invertible iff its dual is")
def check_iso_reflection(seed=10):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        field = FieldSpec(int(rng.choice([2, 5])))
        n = int(rng.integers(1, 6))
        A = rand_matrix(rng, field, n, n)
        if is_invertible(A) != is_invertible(A.T):
            return False, "rank differs under transpose"
    return True, "rank check agrees both ways"


@_check("duality/self-dual: 50 scrambled models recover the planted dimension")
def check_selfdual(seed=11):
    rng = np.random.default_rng(seed)
    for _ in range(50):
        field = FieldSpec(int(rng.choice([2, 5])))
        inst = rand_selfdual(rng, field)
        out = self_dual_decompose(inst.space, inst.pairing, inst.lattice)
        if out.D.cols != inst.discrete_dim:
            return False, f"recovered dim {out.D.cols}, planted {inst.discrete_dim}"
        if not is_invertible(out.change_of_basis) or not is_invertible(out.iso):
            return False, "certificates do not multiply out"
    return True, "K + D decompositions certified, planted dims recovered"


@_check("duality/hahn-banach: 200 extensions restrict and kill the witness flag")
def check_extend(seed=12):
    rng = np.random.default_rng(seed)
    done = 0
    while done < 200:
        field = FieldSpec(int(rng.choice([2, 5])))
        F = rand_filtered_space(rng, field, max_dim=8, max_flags=4)
        A = image_basis(rand_matrix(rng, field, F.dim, int(rng.integers(1, F.dim + 1))))
        k = int(rng.integers(1, len(F.flags) + 1))
        meet = intersect_columns(A, F.flags[k - 1])
        coords = solve_linear(A, meet)
        ann = kernel_basis(coords.T).T if meet.cols else Matrix.identity(field, A.cols)
        if ann.rows == 0:
            continue
        f = rand_matrix(rng, field, 1, ann.rows) @ ann
        g = extend_functional(F, A, f, k)
        Uk = F.flags[k - 1]
        if g @ A != f or (Uk.cols and not (g @ Uk).is_zero()):
            return False, "extension failed its contract"
        done += 1
    return True, "g|_A = f on every basis vector; g kills U_k columnwise"


@_check("tensor/pair-indexing: diagonal enumeration bijective on 10^4 prefix")
def check_pair_indexing(seed=13):
    seen = set()
    for n in range(1, 10_001):
        pair = pair_from_index(n)
        if pair in seen or index_from_pair(*pair) != n:
            return False, f"failure at index {n}"
        seen.add(pair)
    return True, "prefix bijective both ways"


@_check("tensor/symmetry: swap and associator identities, unit laws")
def check_tensor_symmetry(seed=14):
    rng = np.random.default_rng(seed)
    for _ in range(100):
        field = FieldSpec(int(rng.choice([2, 5])))
        m1, m2, n1, n2 = (int(x) for x in rng.integers(1, 4, size=4))
        tA = rand_matrix(rng, field, m1, m2)
        tB = rand_matrix(rng, field, n1, n2)
        if swap_matrix(field, m1, n1) @ kron(tA, tB) != kron(tB, tA) @ swap_matrix(field, m2, n2):
            return False, "commutativity swap failed"
        tC = rand_matrix(rng, field, 2, 2)
        if kron(kron(tA, tB), tC) != kron(tA, kron(tB, tC)):
            return False, "associativity failed"
    t = power_series_tower(GF2)
    u = tensor_star_towers(constant_tower(GF2, 1), t)
    a, b = materialize(u, 5), materialize(t, 5)
    if a.dims != b.dims or a.maps != b.maps:
        return False, "unit law failed"
    return True, "swap conjugates transitions; associator is the identity"


@_check("tensor/mixed-map: star-over-bang comparison matrix exists and is verified")
def check_mixed_map(seed=15):
    rng = np.random.default_rng(seed)
    for _ in range(100):
        field = FieldSpec(int(rng.choice([2, 5])))
        dims = [int(x) for x in rng.integers(1, 4, size=6)]
        A = rand_matrix(rng, field, dims[0], dims[1])
        B = rand_matrix(rng, field, dims[2], dims[3])
        C = rand_matrix(rng, field, dims[4], dims[5])
        # the identity-induced comparison at a finite level is the associator
        if kron(A, kron(B, C)) != kron(kron(A, B), C):
            return False, "comparison matrices differ"
    return True, "levelwise comparison maps verified"


@_check("tensor/adjunction: curry and uncurry are inverse dimension-preserving maps")
def check_adjunction(seed=16):
    rng = np.random.default_rng(seed)
    for _ in range(100):
        field = FieldSpec(int(rng.choice([2, 5])))
        a, b, c = (int(x) for x in rng.integers(1, 4, size=3))
        M = rand_matrix(rng, field, c, a * b)
        N = curry(M, a, b, c)
        if uncurry(N, a, b, c) != M:
            return False, "curry/uncurry is not a bijection"
        x = rand_matrix(rng, field, a, 1)
        y = rand_matrix(rng, field, b, 1)
        hom_x = Matrix(field, (N @ x).data.reshape(c, b))
        if hom_x @ y != M @ kron(x, y):
            return False, "curried evaluation disagrees"
    return True, "B(AxB,C) = Hom(A, Hom(B,C)) entrywise at finite level"


@_check("tensor/hom-ev: evaluation tables injective and functorial")
def check_hom_ev(seed=17):
    rng = np.random.default_rng(seed)
    from tatevec.spaces import FinVect, tate_from_finvect

    hp = hom_via_tensor(tate_from_finvect(GF5, FinVect(3)), tate_from_finvect(GF5, FinVect(2)), 1)
    a, b = hp.window[0]
    ev = hp.ev[0]
    if rank(ev) != a * b:
        return False, "table not injective"
    for _ in range(50):
        phi = rand_matrix(rng, GF5, a, 1)
        vec = rand_matrix(rng, GF5, b, 1)
        hom = Matrix(GF5, (ev @ kron(phi, vec)).data.reshape(b, a))
        x = rand_matrix(rng, GF5, a, 1)
        if hom @ x != vec @ (phi.T @ x):
            return False, "rank-one evaluation mismatch"
    return True, "phi (x) b acts as a -> phi(a) b on every sample"


LAWS = [
    check_solve_linear,
    check_kernel_image,
    check_complement,
    check_kron_mixed,
    check_truncation,
    check_normalize,
    check_lattice_pairs,
    check_verdict_monotone,
    check_involution,
    check_contravariance,
    check_iso_reflection,
    check_selfdual,
    check_extend,
    check_pair_indexing,
    check_tensor_symmetry,
    check_mixed_map,
    check_adjunction,
    check_hom_ev,
]


# ---------------------------------------------------------------------------
# grid suite
# ---------------------------------------------------------------------------


@_check("grid/scramble-recover: 100 planted grids block-diagonalize exactly")
def check_grid_recover(seed=20):
    for field in (GF2, GF5):
        rng = np.random.default_rng(seed + field.p)
        for _ in range(50):
            planted = rand_grid(rng, field)
            basis = bd.split_grid(planted.grid, planted.witness)
            if not bd.check_split(planted.grid, planted.witness, basis):
                return False, f"split failed over GF({field.p})"
            dec = bd.grid_decomposition(planted.grid, planted.witness, basis)
            cpre = materialize(dec.tate.cLattice, planted.grid.m)
            dpre = materialize(dec.tate.dLattice, planted.grid.n)
            if cpre.dims != planted.Wdims or dpre.dims != planted.Vdims:
                return False, "planted profiles not recovered"
    return True, "all right/up maps exactly block diagonal; planted dims recovered"


@_check("grid/kappa: exchange certificate is the identity in normal form")
def check_grid_kappa(seed=21):
    for field in (GF2, GF5):
        rng = np.random.default_rng(seed + field.p)
        for _ in range(15):
            planted = rand_grid(rng, field, m=int(rng.integers(1, 5)), n=int(rng.integers(1, 5)))
            basis = bd.split_grid(planted.grid, planted.witness)
            cert = bd.kappa_check(planted.grid, planted.witness, basis)
            if not cert.ok:
                return False, "exchange map is not the normal-form identity"
    return True, "colim-lim equals lim-colim through the corner"


@_check("grid/duality: dual decomposition equals dualized decomposition")
def check_grid_duality(seed=22):
    for field in (GF2, GF5):
        rng = np.random.default_rng(seed + field.p)
        for _ in range(10):
            planted = rand_grid(rng, field, m=int(rng.integers(1, 4)), n=int(rng.integers(1, 4)))
            out = bd.dual_grid(planted.grid, planted.witness)
            if not out.certificate_ok:
                return False, "duality certificate failed"
    return True, "levelwise equality of the two routes"


@_check("grid/opens: shrinking flags with exact kernel-image agreement")
def check_grid_opens(seed=23):
    rng = np.random.default_rng(seed)
    for _ in range(20):
        planted = rand_grid(rng, GF2)
        basis = bd.split_grid(planted.grid, planted.witness)
        dec = bd.grid_decomposition(planted.grid, planted.witness, basis)
        sizes = [u.cols for u in dec.opens]
        if sizes != sorted(sizes, reverse=True):
            return False, "open subspaces grow"
        for inc, proj in zip(dec.iota, dec.pi):
            if not (proj @ inc).is_zero() or inc.cols != inc.rows - rank(proj):
                return False, "im iota != ker pi"
    return True, "dim U_r nonincreasing; im iota = ker pi exactly"


@_check("grid/pairings: plant-and-recover with corruption localization")
def check_grid_pairings(seed=24):
    rng = np.random.default_rng(seed)
    for trial in range(25):
        field = GF2 if trial % 2 == 0 else GF5
        fx = rand_pairings(rng, field, m=2, n=2)
        basis = fx.planted.planted_basis
        out = bd.assemble_product(fx.planted.grid, fx.planted.witness, basis, fx.mu)
        cout = bd.assemble_coproduct(fx.planted.grid, fx.planted.witness, basis, fx.lam)
        rep = bd.check_pd_intertwine(
            fx.planted.grid, fx.planted.witness, basis, fx.mu, fx.lam, fx.pd
        )
        if not (out.ok and cout.ok and rep.ok):
            return False, "planted windows failed verification"
        # corrupt a single entry and demand localization
        r = int(rng.integers(0, 2))
        c = int(rng.integers(0, 2))
        bad = fx.mu.at(r, c).matrix.data.copy()
        i = int(rng.integers(0, bad.shape[0]))
        j = int(rng.integers(0, bad.shape[1]))
        bad[i, j] = (bad[i, j] + 1) % field.p
        entries = [
            [
                bd.PairingEntry(
                    (rr, cc),
                    Matrix(field, bad) if (rr, cc) == (r, c) else fx.mu.at(rr, cc).matrix,
                )
                for cc in range(2)
            ]
            for rr in range(2)
        ]
        rep2 = bd.check_pd_intertwine(
            fx.planted.grid,
            fx.planted.witness,
            basis,
            bd.PairingFamily("product", entries),
            fx.lam,
            fx.pd,
        )
        if rep2.ok or not any(f"({r + 1},{c + 1})" in v for v in rep2.violations):
            return False, f"corruption at ({r + 1},{c + 1}) not localized"
    return True, "windows verified; every corrupted entry localized"


GRID = [
    check_grid_recover,
    check_grid_kappa,
    check_grid_duality,
    check_grid_opens,
    check_grid_pairings,
]


# ---------------------------------------------------------------------------
# appendix suite
# ---------------------------------------------------------------------------


@_check("appendix/splitting: 100 filtered SES instances split flag-compatibly")
def check_appendix_split(seed=30):
    for field in (GF2, GF5):
        rng = np.random.default_rng(seed + field.p)
        for _ in range(50):
            F = rand_filtered_space(rng, field, max_dim=12, max_flags=6)
            A = image_basis(rand_matrix(rng, field, F.dim, int(rng.integers(1, F.dim + 1))))
            cert = split_filtered_ses(F, A)
            if cert.pi @ A != Matrix.identity(field, A.cols):
                return False, "retraction does not restrict to the identity"
            for U in F.flags:
                if not span_contains(intersect_columns(A, U), A @ (cert.pi @ U)):
                    return False, "flag containment failed"
            comp = topological_complement(F, A)
            if A.cols + comp.S.cols != F.dim or intersect_columns(A, comp.S).cols != 0:
                return False, "complement not certified"
    return True, "pi o i = id; pi(U_k) in A meet U_k; complements certified"


@_check("appendix/lift: lifted splittings commute on random ladders")
def check_appendix_ladders(seed=34):
    rng = np.random.default_rng(seed)
    for _ in range(50):
        field = FieldSpec(int(rng.choice([2, 5])))
        a, c = int(rng.integers(0, 4)), int(rng.integers(0, 4))
        n = a + c
        T = rand_invertible(rng, field, n)
        T_inv = inverse(T)
        i_cols = np.vstack([np.eye(a, dtype=np.int64), np.zeros((c, a), np.int64)])
        p_rows = np.hstack([np.zeros((c, a), np.int64), np.eye(c, dtype=np.int64)])
        i2 = T @ Matrix(field, i_cols)
        p2 = Matrix(field, p_rows) @ T_inv
        K = T @ Matrix(field, np.vstack([np.zeros((a, c), np.int64), np.eye(c, dtype=np.int64)]))
        pi1 = Matrix(field, inverse(hstack([i2, K])).data[:a, :])
        ladder = SESLadder(
            i1=i2, p1=p2, i2=i2, p2=p2,
            f=Matrix.identity(field, a),
            g=Matrix.identity(field, n),
            h=Matrix.identity(field, c),
            pi1=pi1,
        )
        pi2, s1, s2 = lift_splitting(ladder)
        if ladder.f @ pi2 != pi1 @ ladder.g or ladder.g @ s2 != s1 @ ladder.h:
            return False, "a lifted splitting does not commute"
    return True, "f o pi2 = pi1 o g and sections commute on every ladder"


@_check("appendix/lift: the worked GF(2) ladder instance")
def check_appendix_worked(seed=31):
    one = Matrix.identity(GF2, 1)
    ladder = SESLadder(
        i1=Matrix(GF2, [[1], [0]]),
        p1=Matrix(GF2, [[0, 1]]),
        i2=Matrix(GF2, [[1], [0]]),
        p2=Matrix(GF2, [[0, 1]]),
        f=one,
        g=Matrix(GF2, [[1, 1], [0, 1]]),
        h=one,
        pi1=Matrix(GF2, [[1, 0]]),
    )
    pi2, _, _ = lift_splitting(ladder)
    if pi2 != Matrix(GF2, [[1, 1]]):
        return False, f"expected [1,1], got {pi2.data.tolist()}"
    return True, "pi2 = [1,1]; both commuting identities verified"


@_check("appendix/hahn-banach: continuity witnesses respected")
def check_appendix_hb(seed=32):
    return check_extend(seed)


@_check("appendix/open-mapping-guard: no certificate across category tags")
def check_open_mapping_guard(seed=33):
    compact = power_series_tower(GF2)
    discrete = polynomial_indtower(GF2)
    # same level dims, continuous bijection of presentations, but the library
    # must refuse to certify an isomorphism between the two topologies
    try:
        iso_certificate(compact, discrete, 4)
    except TypeError:
        same = iso_certificate(power_series_tower(GF2), power_series_tower(GF2), 4)
        if same is None:
            return False, "identity certificate missing"
        return True, "refused the cross-tag certificate, granted the honest one"
    return False, "a cross-tag certificate was emitted"


APPENDIX = [
    check_appendix_split,
    check_appendix_ladders,
    check_appendix_worked,
    check_appendix_hb,
    check_open_mapping_guard,
]

SUITES = {"laws": LAWS, "grid": GRID, "appendix": APPENDIX}


def run_suite(name: str):
    """Run a named suite; yields (check name, ok, detail) in order."""
    for fn in SUITES[name]:
        ok, detail = fn()
        yield fn.check_name, ok, detail
