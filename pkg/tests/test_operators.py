import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordanblocks import (
    Family,
    GFpMatrix,
    GroupContext,
    Isogeny,
    JordanType,
    ModuleKind,
    ModuleSpec,
    NilpotentOperator,
    admissible_witness,
    distinguished_vectors,
    is_admissible,
    jordan_type_of_nilpotent,
    lift_to_sym2,
    lift_to_tensor,
    lift_to_wedge2,
    natural_nilpotent,
    natural_unipotent,
    oracle_type,
    oracle_types,
    quotient_by_invariant_line,
    restrict_to_trace_kernel,
)
from jordanblocks.gfp import _row_echelon, nullspace, solve_columns, vstack
from jordanblocks.operators import gamma_vector, trace_functional, trace_kernel_basis
from jordanblocks.sweep import enumerate_partitions

partitions = st.lists(st.integers(1, 5), min_size=1, max_size=4).map(JordanType.from_sizes)


def T(text):
    return JordanType.parse(text)


# -- natural module builders ------------------------------------------------------


def test_natural_nilpotent_structure():
    op = natural_nilpotent(T("1^2,2"), 2)
    # blocks ascending: two size-1 blocks, then one size-2 block
    expect = np.zeros((4, 4), dtype=np.int64)
    expect[2, 3] = 1
    assert op.matrix.a.tolist() == expect.tolist()
    assert op.basis_labels == ("v1", "v2", "v3", "v4")
    op2 = natural_nilpotent(T("2"), 3)
    assert op2.matrix.a.tolist() == [[0, 1], [0, 0]]


@given(partitions, st.sampled_from([2, 3, 5]))
def test_natural_nilpotent_roundtrip(jt, p):
    assert natural_nilpotent(jt, p).jordan_type() == jt


@given(partitions, st.sampled_from([2, 3, 5]))
def test_natural_unipotent_is_shifted_identity(jt, p):
    u = natural_unipotent(jt, p)
    n = jt.total_dim
    assert jordan_type_of_nilpotent(u - GFpMatrix.identity(p, n)) == jt
    # unitriangular, hence invertible
    assert u.rank() == n


def test_empty_type_rejected():
    with pytest.raises(ValueError):
        natural_nilpotent(JordanType(), 3)


# -- tensor lift --------------------------------------------------------------------


def test_tensor_lift_regular_n3_p3():
    op = lift_to_tensor(natural_nilpotent(T("3"), 3).matrix)
    assert op.jordan_type() == T("3^3")
    assert op.basis_labels[:4] == ("v1⊗v1*", "v1⊗v2*", "v1⊗v3*", "v2⊗v1*")


def test_tensor_lift_zero_map():
    for n, p in ((2, 2), (4, 3)):
        op = lift_to_tensor(GFpMatrix.zeros(p, n, n))
        assert op.jordan_type() == JordanType({1: n * n})


@pytest.mark.parametrize("p", [2, 3, 5])
def test_tensor_power_coefficients(p):
    # the k-th power sends v_i (x) v_j* to the alternating binomial sum
    # over v_(i-t) (x) v_(j+k-t)*; checked entrywise by matrix powering
    n = 4
    op = lift_to_tensor(natural_nilpotent(T(str(n)), p).matrix)
    for k in range(6):
        mk = (op.matrix**k).a
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                expect = np.zeros(n * n, dtype=np.int64)
                for t in range(k + 1):
                    a, b = i - t, j + k - t
                    if 1 <= a <= n and 1 <= b <= n:
                        coeff = math.comb(k, t) * (-1) ** (k + t)
                        expect[(a - 1) * n + (b - 1)] += coeff
                col = (i - 1) * n + (j - 1)
                assert np.array_equal(mk[:, col], expect % p), (p, k, i, j)


@given(partitions, st.sampled_from([2, 3, 5]))
@settings(max_examples=30)
def test_tensor_type_matches_unsigned_convention(jt, p):
    # same block sizes on V (x) V* and V (x) V: the dual sign does not matter
    e = natural_nilpotent(jt, p).matrix
    n = jt.total_dim
    eye = np.eye(n, dtype=np.int64)
    unsigned = GFpMatrix(p, np.kron(e.a, eye) + np.kron(eye, e.a))
    assert lift_to_tensor(e).jordan_type() == jordan_type_of_nilpotent(unsigned)


# -- exterior and symmetric squares --------------------------------------------------


def test_wedge_regular_action_formula():
    # on a single block the lift acts by w(i,j) -> w(i,j-1) + w(i-1,j)
    n = 4
    op = lift_to_wedge2(natural_nilpotent(T(str(n)), 5).matrix)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    index = {pair: k for k, pair in enumerate(pairs)}
    for (i, j), col in index.items():
        expect = np.zeros(len(pairs), dtype=np.int64)
        for a, b in ((i, j - 1), (i - 1, j)):
            if 1 <= a < b <= n:
                expect[index[(a, b)]] += 1
        assert np.array_equal(op.matrix.a[:, col], expect)


def test_wedge_and_sym_char2_small_dimensions():
    # In characteristic 2 the regular unipotent and nilpotent elements can
    # differ on these squares.  For dim V = 3 the exterior-square types
    # coincide (both a single size-3 block; the space is 3-dimensional, so
    # six-dimensional block lists cannot apply here, see the companion
    # n = 4 test below) while the symmetric square already separates them.
    e3 = natural_nilpotent(T("3"), 2).matrix
    u3 = natural_unipotent(T("3"), 2)
    assert lift_to_wedge2(e3).jordan_type() == T("3")
    assert lift_to_wedge2(u3, unipotent=True).jordan_type() == T("3")
    assert lift_to_sym2(e3).jordan_type() == T("1^2,4")
    assert lift_to_sym2(u3, unipotent=True).jordan_type() == T("2,4")


def test_wedge_and_sym_char2_counterexample_dimension():
    # dim V = 4 is where the reference counterexample lists hold exactly:
    # exterior square 2+4 vs 3+3, symmetric square 2+4+4 vs 1+1+4+4
    e4 = natural_nilpotent(T("4"), 2).matrix
    u4 = natural_unipotent(T("4"), 2)
    assert lift_to_wedge2(u4, unipotent=True).jordan_type() == T("2,4")
    assert lift_to_wedge2(e4).jordan_type() == T("3^2")
    assert lift_to_sym2(u4, unipotent=True).jordan_type() == T("2,4^2")
    assert lift_to_sym2(e4).jordan_type() == T("1^2,4^2")


def test_wedge_regular_n3_large_p():
    # dimension 3; for p >= 5 the characteristic-zero single block survives
    for p in (5, 7):
        op = lift_to_wedge2(natural_nilpotent(T("3"), p).matrix)
        assert op.jordan_type() == T("3")


def test_sym_zero_map_n2():
    op = lift_to_sym2(GFpMatrix.zeros(5, 2, 2))
    assert op.jordan_type() == T("1^3")
    assert op.basis_labels == ("v1·v1", "v1·v2", "v2·v2")


def test_wedge_needs_dim_two():
    with pytest.raises(ValueError, match="dim V >= 2"):
        lift_to_wedge2(GFpMatrix.zeros(3, 1, 1))


@given(partitions, st.sampled_from([3, 5]))
@settings(max_examples=25)
def test_odd_p_tensor_splits_into_wedge_and_sym(jt, p):
    e = natural_nilpotent(jt, p).matrix
    full = lift_to_tensor(e).jordan_type()
    split = lift_to_wedge2(e).jordan_type() + lift_to_sym2(e).jordan_type() if jt.total_dim >= 2 else None
    if split is not None:
        assert full == split


# -- trace-zero restriction and the quotient ------------------------------------------


def test_restrict_regular_n3_p3():
    # frozen from the exact-rank oracle on the 8-dimensional kernel
    op = restrict_to_trace_kernel(lift_to_tensor(natural_nilpotent(T("3"), 3).matrix))
    assert op.jordan_type() == T("2,3^2")
    assert op.dim == 8


def test_restrict_zero_map():
    for n, p in ((3, 2), (4, 3)):  # p does not divide n
        op = restrict_to_trace_kernel(lift_to_tensor(GFpMatrix.zeros(p, n, n)))
        assert op.jordan_type() == JordanType({1: n * n - 1})


def test_restrict_n2_p2_zero_map():
    op = restrict_to_trace_kernel(lift_to_tensor(GFpMatrix.zeros(2, 2, 2)))
    assert op.jordan_type() == T("1^3")


def test_restrict_rejects_wrong_module():
    wedge = lift_to_wedge2(natural_nilpotent(T("3"), 3).matrix)
    with pytest.raises(ValueError, match="V \\(x\\) V\\*"):
        restrict_to_trace_kernel(wedge)


def test_quotient_reference_values():
    cases = [
        ("3", 3, "2^2,3"),
        ("2^2", 2, "1^2,2^6"),
        ("1^5", 5, "1^23"),
    ]
    for part, p, want in cases:
        sl_op = restrict_to_trace_kernel(lift_to_tensor(natural_nilpotent(T(part), p).matrix))
        assert quotient_by_invariant_line(sl_op).jordan_type() == T(want)


def test_quotient_requires_p_dividing_n():
    sl_op = restrict_to_trace_kernel(lift_to_tensor(natural_nilpotent(T("3"), 2).matrix))
    with pytest.raises(ValueError, match="does not divide"):
        quotient_by_invariant_line(sl_op)


def test_gamma_is_annihilated():
    for part, p in (("3", 3), ("1,3", 2), ("2,3", 5)):
        jt = T(part)
        n = jt.total_dim
        g = gamma_vector(n, p)
        e_op = lift_to_tensor(natural_nilpotent(jt, p).matrix)
        assert (e_op.matrix @ g).is_zero()
        u_op = lift_to_tensor(natural_unipotent(jt, p), unipotent=True)
        assert (u_op.matrix @ g).is_zero()
        assert trace_functional(n, p).a[0].sum() == n


def test_trace_kernel_basis_shape_and_kernel():
    basis, labels = trace_kernel_basis(3, 5)
    assert basis.shape == (9, 8)
    assert len(labels) == 8
    assert (trace_functional(3, 5) @ basis).is_zero()
    assert basis.rank() == 8


# -- smallest block and kernel containment facts ---------------------------------------


@pytest.mark.parametrize("p", [2, 3])
def test_smallest_tensor_block_is_p_power_of_valuation(p):
    for n in range(2, 7):
        for jt in enumerate_partitions(n):
            full = lift_to_tensor(natural_nilpotent(jt, p).matrix).jordan_type()
            assert min(full.sizes) == p ** jt.gcd_valuation(p), (jt, p)


@pytest.mark.parametrize("part,p", [("2", 2), ("2^2", 2), ("3", 3), ("1^2,2", 2), ("3,6", 3)])
def test_kernel_containments(part, p):
    jt = T(part)
    n = jt.total_dim
    e0 = lift_to_tensor(natural_nilpotent(jt, p).matrix).matrix
    phi = trace_functional(n, p)
    s = p ** jt.gcd_valuation(p)
    prev = e0 ** (s - 1)
    # kernel of the previous power lies inside ker(trace)
    assert vstack([prev, phi]).rank() == prev.rank()
    cur = e0**s
    # kernel of this power escapes ker(trace)
    assert vstack([cur, phi]).rank() == cur.rank() + 1


# -- invariant-hyperplane restriction, generic property --------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_codim_one_invariant_restriction_rule(p):
    # For a nilpotent e and an invariant hyperplane ker(f), the restricted
    # type drops one block: size m+1 becomes size m, where m is largest with
    # ker(e^m) inside ker(f) (a size-1 block disappears when m = 0).
    for n in range(2, 6):
        for jt in enumerate_partitions(n):
            e = natural_nilpotent(jt, p).matrix
            left_kernel = nullspace(e.transpose())  # functionals with f(e v) = 0
            candidates = [left_kernel.a[:, k] for k in range(left_kernel.cols)]
            if left_kernel.cols > 1:
                candidates.append(left_kernel.a.sum(axis=1) % p)
            for row in candidates:
                f = GFpMatrix(p, row.reshape(1, n))
                basis = nullspace(f)
                restricted = solve_columns(basis, e @ basis)
                m = 0
                while True:
                    power = e ** (m + 1)
                    if vstack([power, f]).rank() != power.rank():
                        break
                    m += 1
                if m == 0:
                    want = jt - JordanType({1: 1})
                else:
                    want = jt - JordanType({m + 1: 1}) + JordanType({m: 1})
                assert jordan_type_of_nilpotent(restricted) == want, (jt, p, row)


# -- distinguished vectors ---------------------------------------------------------------


def test_distinguished_vectors_regular_n3_p3():
    vectors = distinguished_vectors(T("3"), 3, 1)
    e0 = lift_to_tensor(natural_nilpotent(T("3"), 3).matrix).matrix
    # the one-block diagonal sub-sum is v3 (x) v3*
    expect = np.zeros((9, 1), dtype=np.int64)
    expect[8, 0] = 1
    assert vectors.delta_prime.a.tolist() == expect.tolist()
    assert ((e0**3) @ vectors.delta_prime).is_zero()
    # two applications of the action turn delta into the invariant vector
    assert (e0**2) @ vectors.delta == vectors.gamma
    assert vectors.gamma == gamma_vector(3, 3)


def test_distinguished_vectors_beta_zero_degenerate():
    vectors = distinguished_vectors(T("2,3"), 5, 0)
    assert vectors.delta == vectors.gamma
    assert vectors.delta_prime.a[:, 0].sum() == 2  # first block has size 2


@pytest.mark.parametrize("p,beta,part", [(2, 1, "2,4"), (3, 1, "3,6"), (2, 2, "4,8")])
def test_distinguished_vectors_multiblock_identities(p, beta, part):
    jt = T(part)
    vectors = distinguished_vectors(jt, p, beta)
    e0 = lift_to_tensor(natural_nilpotent(jt, p).matrix).matrix
    s = p**beta
    assert ((e0**s) @ vectors.delta_prime).is_zero()
    assert (e0 ** (s - 1)) @ vectors.delta == vectors.gamma


def test_distinguished_vectors_divisibility_error():
    with pytest.raises(ValueError, match="divide every block size"):
        distinguished_vectors(T("2,3"), 2, 1)


# -- oracle dispatch ------------------------------------------------------------------


def test_oracle_reference_values():
    assert oracle_type(T("2,3"), GroupContext(Family.SL, 5, 5), ModuleSpec(ModuleKind.PSL)) == T(
        "2^2,3^2,4^2,5"
    )
    assert oracle_type(
        T("1^4"), GroupContext(Family.SP, 4, 3), ModuleSpec(ModuleKind.SP_OMEGA2)
    ) == T("1^5")
    assert oracle_type(T("2,3"), GroupContext(Family.SL, 5, 3), ModuleSpec(ModuleKind.NATURAL)) == T("2,3")


def test_oracle_psl_without_p_dividing_n_is_trace_zero_type():
    ctx = GroupContext(Family.SL, 5, 3)
    out = oracle_types(T("2,3"), ctx, [ModuleSpec(ModuleKind.SL), ModuleSpec(ModuleKind.PSL)])
    assert out[ModuleSpec(ModuleKind.SL)] == out[ModuleSpec(ModuleKind.PSL)]


def test_oracle_adjoint_modules():
    ctx = GroupContext(Family.SL, 4, 2)
    sl_t = oracle_type(T("1^4"), ctx, ModuleSpec(ModuleKind.SL))
    psl_t = oracle_type(T("1^4"), ctx, ModuleSpec(ModuleKind.PSL))
    assert oracle_type(T("1^4"), ctx, ModuleSpec(ModuleKind.ADJOINT, Isogeny.SIMPLY_CONNECTED)) == sl_t
    assert oracle_type(T("1^4"), ctx, ModuleSpec(ModuleKind.ADJOINT, Isogeny.ADJOINT_GROUP)) == sl_t
    assert oracle_type(
        T("1^4"), ctx, ModuleSpec(ModuleKind.ADJOINT, Isogeny.INTERMEDIATE)
    ) == psl_t + JordanType({1: 1})


def test_oracle_validation_errors():
    with pytest.raises(ValueError, match="not admissible"):
        oracle_type(T("3,1"), GroupContext(Family.SP, 4, 3), ModuleSpec(ModuleKind.SP_OMEGA2))
    with pytest.raises(ValueError, match="family Sp"):
        oracle_type(T("2,3"), GroupContext(Family.SL, 5, 3), ModuleSpec(ModuleKind.SP_OMEGA2))
    with pytest.raises(ValueError, match="p\\^2 dividing n"):
        oracle_type(
            T("1^6"),
            GroupContext(Family.SL, 6, 2),
            ModuleSpec(ModuleKind.ADJOINT, Isogeny.INTERMEDIATE),
        )
    with pytest.raises(ValueError, match="does not match"):
        oracle_type(T("2"), GroupContext(Family.SL, 3, 2), ModuleSpec(ModuleKind.SL))


def test_module_spec_parse_and_str():
    assert ModuleSpec.parse("psl") == ModuleSpec(ModuleKind.PSL)
    assert ModuleSpec.parse("VxV*") == ModuleSpec(ModuleKind.TENSOR)
    assert ModuleSpec.parse("adjoint-int") == ModuleSpec(ModuleKind.ADJOINT, Isogeny.INTERMEDIATE)
    assert str(ModuleSpec.parse("adjoint-sc")) == "adjoint-sc"
    with pytest.raises(ValueError, match="unknown module"):
        ModuleSpec.parse("spin")
    with pytest.raises(ValueError, match="isogeny tag"):
        ModuleSpec(ModuleKind.SL, Isogeny.ADJOINT_GROUP)


def test_nilpotent_operator_validation():
    good = natural_nilpotent(T("2"), 3)
    with pytest.raises(ValueError, match="label count"):
        NilpotentOperator(good.matrix, ("v1",), ModuleSpec(ModuleKind.NATURAL))
    with pytest.raises(ValueError, match="not nilpotent"):
        NilpotentOperator(GFpMatrix.identity(3, 2), ("v1", "v2"), ModuleSpec(ModuleKind.NATURAL))


# -- admissibility witnesses and exhaustive small cross-checks ---------------------------


def _is_skew_adjoint(x, g):
    return (x.transpose() @ g + g @ x).is_zero()


def test_witness_sp14_example():
    ctx = GroupContext(Family.SP, 14, 3)
    jt = T("3^2,4^2")
    x, g = admissible_witness(jt, ctx)
    assert jordan_type_of_nilpotent(x) == jt
    assert _is_skew_adjoint(x, g)
    assert g.rank() == 14
    assert (g.transpose() + g).is_zero()  # alternating (p odd: skew-symmetric suffices)


def test_witness_covers_small_admissible_partitions():
    for family, dims in ((Family.SP, (4, 6)), (Family.SO, (5, 6, 7))):
        for n in dims:
            ctx = GroupContext(family, n, 3)
            for jt in enumerate_partitions(n):
                if not is_admissible(jt, ctx):
                    continue
                x, g = admissible_witness(jt, ctx)
                assert jordan_type_of_nilpotent(x) == jt
                assert _is_skew_adjoint(x, g)
                assert g.rank() == n
                if family is Family.SP:
                    assert (g.transpose() + g).is_zero()
                    assert not np.any(np.diagonal(g.a))
                else:
                    assert g.transpose() == g


def test_witness_rejects_sl_and_inadmissible():
    with pytest.raises(ValueError, match="Sp and SO only"):
        admissible_witness(T("2"), GroupContext(Family.SL, 2, 3))
    with pytest.raises(ValueError, match="not admissible"):
        admissible_witness(T("3,1"), GroupContext(Family.SP, 4, 3))


def _lie_algebra_basis(g: GFpMatrix) -> list[np.ndarray]:
    # matrices X with X^T G + G X = 0, found from the kernel of the
    # linearised condition applied to matrix units
    n = g.rows
    p = g.p
    columns = []
    for a in range(n):
        for b in range(n):
            unit = np.zeros((n, n), dtype=np.int64)
            unit[a, b] = 1
            image = (unit.T @ g.a + g.a @ unit) % p
            columns.append(image.reshape(-1))
    constraint = GFpMatrix(p, np.column_stack(columns))
    kernel = nullspace(constraint)
    return [kernel.a[:, k].reshape(n, n) for k in range(kernel.cols)]


def _rank_mod_p(arr, p):
    return len(_row_echelon(arr % p, p)[1])


def _exhaustive_nilpotent_types(g: GFpMatrix) -> set[JordanType]:
    p = g.p
    n = g.rows
    basis = _lie_algebra_basis(g)
    mats = np.stack(basis)
    coeffs = np.array(list(itertools.product(range(p), repeat=len(basis))), dtype=np.int64)
    xs = np.einsum("ck,kij->cij", coeffs, mats) % p
    power = xs
    for _ in range(n - 1):
        power = np.matmul(power, xs) % p
    nilpotent = xs[~power.any(axis=(1, 2))]
    types = set()
    for x in nilpotent:
        ranks = [n]
        y = x
        while ranks[-1] > 0:
            ranks.append(_rank_mod_p(y, p))
            y = (y @ x) % p
        counts = {}
        for size in range(1, len(ranks)):
            after = ranks[size + 1] if size + 1 < len(ranks) else 0
            r = ranks[size - 1] - 2 * ranks[size] + after
            if r:
                counts[size] = r
        types.add(JordanType(counts))
    return types


@pytest.mark.parametrize("family,n", [(Family.SO, 5), (Family.SP, 4)])
def test_exhaustive_small_lie_algebra_types_are_admissible(family, n):
    # every element of the full Lie algebra over GF(3), enumerated outright
    ctx = GroupContext(family, n, 3)
    g = GFpMatrix(3, np.rot90(np.eye(n, dtype=np.int64))) if family is Family.SO else None
    if family is Family.SP:
        half = n // 2
        eye = np.eye(half, dtype=np.int64)
        zero = np.zeros((half, half), dtype=np.int64)
        g = GFpMatrix(3, np.block([[zero, eye], [-eye, zero]]))
    realized = _exhaustive_nilpotent_types(g)
    for jt in realized:
        assert is_admissible(jt, ctx), f"validator rejected realized type {jt}"
    assert JordanType({1: n}) in realized
    # the specific inadmissible shape stays unrealized
    if family is Family.SO:
        assert T("2,3") not in realized
    else:
        assert T("1,3") not in realized


def test_operator_matrix_dump_roundtrip():
    op = lift_to_tensor(natural_nilpotent(T("1,2"), 3).matrix)
    dumped = op.matrix.to_text()
    assert GFpMatrix.from_text(dumped) == op.matrix
    assert dumped.splitlines()[0] == "3 9 9"
