"""Explicit matrices for nilpotent and unipotent actions on derived modules.

Everything is built over GF(p) with fixed basis orders so matrices are
bit-identical run to run:

* natural module V: one basis vector per block position, blocks listed with
  sizes ascending, shift action ``e v_j = v_(j-1)`` inside each block;
* tensor square V (x) V*: basis ``v_i (x) v_j*`` with pairs (i, j) in
  row-major order;
* exterior square: ``v_i ^ v_j`` for i < j, lexicographic;
* symmetric square: monomials ``v_i v_j`` for i <= j, lexicographic;
* trace-zero subspace of V (x) V*: off-diagonal pairs row-major, then the
  consecutive diagonal differences ``v_i (x) v_i* - v_(i+1) (x) v_(i+1)*``.

The dual action carries the sign ``(e.f)(v) = -f(e v)``, so on V (x) V* a
nilpotent e acts as ``X -> EX - XE`` under the matrix-unit identification.
A unipotent u acts by conjugation ``X -> u X u^(-1)``; unipotent operators
are always returned as (action - identity), since only block sizes matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gfp import (
    GFpMatrix,
    inverse,
    is_nilpotent,
    jordan_type_of_nilpotent,
    solve_columns,
)
from .partitions import Family, GroupContext, JordanType, is_admissible


class ModuleKind(Enum):
    NATURAL = "v"
    TENSOR = "tensor"  # V (x) V*
    GL = "gl"
    WEDGE2 = "wedge2"
    SYM2 = "sym2"
    SL = "sl"
    PSL = "psl"
    SP_OMEGA2 = "l_omega2"  # irreducible Sp module of highest weight w2
    SO_2OMEGA1 = "l_2omega1"  # irreducible SO module of highest weight 2w1
    ADJOINT = "adjoint"


class Isogeny(Enum):
    SIMPLY_CONNECTED = "sc"
    ADJOINT_GROUP = "ad"
    INTERMEDIATE = "int"


_MODULE_ALIASES = {
    "v": ModuleKind.NATURAL,
    "natural": ModuleKind.NATURAL,
    "tensor": ModuleKind.TENSOR,
    "vxv*": ModuleKind.TENSOR,
    "vxv": ModuleKind.TENSOR,
    "gl": ModuleKind.GL,
    "wedge2": ModuleKind.WEDGE2,
    "sym2": ModuleKind.SYM2,
    "sl": ModuleKind.SL,
    "psl": ModuleKind.PSL,
    "l_omega2": ModuleKind.SP_OMEGA2,
    "l_2omega1": ModuleKind.SO_2OMEGA1,
}


@dataclass(frozen=True)
class ModuleSpec:
    """Symbolic name of a module the operators act on."""

    kind: ModuleKind
    isogeny: Isogeny | None = None

    def __post_init__(self):
        if (self.kind is ModuleKind.ADJOINT) != (self.isogeny is not None):
            raise ValueError("isogeny tag is required exactly for the adjoint module")

    def __str__(self) -> str:
        if self.kind is ModuleKind.ADJOINT:
            return f"adjoint-{self.isogeny.value}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> "ModuleSpec":
        key = text.strip().lower()
        if key in _MODULE_ALIASES:
            return cls(_MODULE_ALIASES[key])
        if key.startswith("adjoint-"):
            tag = key.removeprefix("adjoint-")
            for iso in Isogeny:
                if iso.value == tag:
                    return cls(ModuleKind.ADJOINT, iso)
        raise ValueError(
            f"unknown module {text!r}; expected one of "
            f"{sorted(_MODULE_ALIASES)} or adjoint-sc/adjoint-ad/adjoint-int"
        )


class DecompositionError(ValueError):
    """A claimed direct-sum decomposition failed; a real bug, never patched."""


@dataclass(frozen=True, eq=False)
class NilpotentOperator:
    """A square nilpotent matrix with a labelled basis and a module tag."""

    matrix: GFpMatrix
    basis_labels: tuple[str, ...]
    module: ModuleSpec

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols:
            raise ValueError("operator matrix must be square")
        if len(self.basis_labels) != self.matrix.rows:
            raise ValueError("label count must equal the matrix dimension")
        if not is_nilpotent(self.matrix):
            raise ValueError("matrix not nilpotent")

    @property
    def dim(self) -> int:
        return self.matrix.rows

    @property
    def p(self) -> int:
        return self.matrix.p

    def jordan_type(self) -> JordanType:
        return jordan_type_of_nilpotent(self.matrix)


# -- builders on the natural module -------------------------------------------


def block_layout(jt: JordanType) -> list[tuple[int, int]]:
    """(size, offset) per block, sizes ascending, offsets consecutive."""
    out = []
    offset = 0
    for size, mult in jt.pairs():
        for _ in range(mult):
            out.append((size, offset))
            offset += size
    return out


def _shift_array(jt: JordanType) -> np.ndarray:
    n = jt.total_dim
    a = np.zeros((n, n), dtype=np.int64)
    for size, off in block_layout(jt):
        for j in range(1, size):
            a[off + j - 1, off + j] = 1
    return a


def natural_labels(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(1, n + 1))


def natural_nilpotent(jt: JordanType, p: int) -> NilpotentOperator:
    """Block-diagonal shift of the given Jordan type acting on V."""
    if not jt:
        raise ValueError("empty Jordan type has no natural operator")
    return NilpotentOperator(
        GFpMatrix(p, _shift_array(jt)),
        natural_labels(jt.total_dim),
        ModuleSpec(ModuleKind.NATURAL),
    )


def natural_unipotent(jt: JordanType, p: int) -> GFpMatrix:
    """Unitriangular u = 1 + shift with the given Jordan type (of u - 1)."""
    if not jt:
        raise ValueError("empty Jordan type has no natural operator")
    n = jt.total_dim
    return GFpMatrix(p, np.eye(n, dtype=np.int64) + _shift_array(jt))


# -- lifts to derived modules ---------------------------------------------------


def tensor_labels(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}⊗v{j}*" for i in range(1, n + 1) for j in range(1, n + 1))


def lift_to_tensor(m_on_v: GFpMatrix, *, unipotent: bool = False) -> NilpotentOperator:
    """Action on V (x) V*, basis pairs (i, j) row-major.

    Nilpotent input e acts as ``X -> EX - XE`` (dual action is the negative
    transpose).  Unipotent input u acts by conjugation; the returned matrix
    is (conjugation - identity).
    """
    if m_on_v.rows != m_on_v.cols:
        raise ValueError("operator on V must be square")
    n = m_on_v.rows
    p = m_on_v.p
    eye = np.eye(n, dtype=np.int64)
    if unipotent:
        u = m_on_v.a
        uinv = inverse(m_on_v).a
        big = np.kron(u, uinv.T) - np.eye(n * n, dtype=np.int64)
    else:
        e = m_on_v.a
        big = np.kron(e, eye) - np.kron(eye, e.T)
    return NilpotentOperator(GFpMatrix(p, big), tensor_labels(n), ModuleSpec(ModuleKind.TENSOR))


def wedge_labels(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}∧v{j}" for i in range(1, n + 1) for j in range(i + 1, n + 1))


def lift_to_wedge2(m_on_v: GFpMatrix, *, unipotent: bool = False) -> NilpotentOperator:
    """Action on the exterior square, basis ``v_i ^ v_j`` (i < j, lex order)."""
    if m_on_v.rows != m_on_v.cols:
        raise ValueError("operator on V must be square")
    n = m_on_v.rows
    if n < 2:
        raise ValueError("exterior square needs dim V >= 2")
    p = m_on_v.p
    rows_idx, cols_idx = np.triu_indices(n, 1)
    dim = len(rows_idx)
    mat = np.zeros((dim, dim), dtype=np.int64)
    m = m_on_v.a
    for col, (a, b) in enumerate(zip(rows_idx, cols_idx)):
        if unipotent:
            d = np.outer(m[:, a], m[:, b])
        else:
            d = np.zeros((n, n), dtype=np.int64)
            d[:, b] += m[:, a]
            d[a, :] += m[:, b]
        anti = d - d.T
        mat[:, col] = anti[rows_idx, cols_idx]
    if unipotent:
        mat -= np.eye(dim, dtype=np.int64)
    return NilpotentOperator(GFpMatrix(p, mat), wedge_labels(n), ModuleSpec(ModuleKind.WEDGE2))


def sym_labels(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}·v{j}" for i in range(1, n + 1) for j in range(i, n + 1))


def lift_to_sym2(m_on_v: GFpMatrix, *, unipotent: bool = False) -> NilpotentOperator:
    """Action on the symmetric square, monomial basis ``v_i v_j`` (i <= j).

    The symmetric square is the degree-2 part of the polynomial algebra on
    the ``v_i`` (a quotient of V (x) V), which also gives the right object
    in characteristic 2.
    """
    if m_on_v.rows != m_on_v.cols:
        raise ValueError("operator on V must be square")
    n = m_on_v.rows
    p = m_on_v.p
    rows_idx, cols_idx = np.triu_indices(n, 0)
    dim = len(rows_idx)
    mat = np.zeros((dim, dim), dtype=np.int64)
    m = m_on_v.a
    diag = np.arange(n)
    for col, (a, b) in enumerate(zip(rows_idx, cols_idx)):
        if unipotent:
            d = np.outer(m[:, a], m[:, b])
        else:
            d = np.zeros((n, n), dtype=np.int64)
            d[:, b] += m[:, a]
            d[a, :] += m[:, b]
        sym = d + d.T
        sym[diag, diag] = d[diag, diag]
        mat[:, col] = sym[rows_idx, cols_idx]
    if unipotent:
        mat -= np.eye(dim, dtype=np.int64)
    return NilpotentOperator(GFpMatrix(p, mat), sym_labels(n), ModuleSpec(ModuleKind.SYM2))


# -- trace-zero subspace and its quotient ---------------------------------------


def trace_functional(n: int, p: int) -> GFpMatrix:
    """The row functional sending a tensor coordinate vector to its trace."""
    row = np.zeros((1, n * n), dtype=np.int64)
    for i in range(n):
        row[0, i * n + i] = 1
    return GFpMatrix(p, row)


def gamma_vector(n: int, p: int) -> GFpMatrix:
    """Coordinates of the invariant vector: sum of all ``v_i (x) v_i*``."""
    col = np.zeros((n * n, 1), dtype=np.int64)
    for i in range(n):
        col[i * n + i, 0] = 1
    return GFpMatrix(p, col)


def trace_kernel_basis(n: int, p: int) -> tuple[GFpMatrix, tuple[str, ...]]:
    """Deterministic integer basis of the trace-zero subspace of V (x) V*.

    Off-diagonal matrix units in row-major order, then the consecutive
    diagonal differences.
    """
    cols = []
    labels = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            v = np.zeros(n * n, dtype=np.int64)
            v[i * n + j] = 1
            cols.append(v)
            labels.append(f"v{i + 1}⊗v{j + 1}*")
    for i in range(n - 1):
        v = np.zeros(n * n, dtype=np.int64)
        v[i * n + i] = 1
        v[(i + 1) * n + (i + 1)] = -1
        cols.append(v)
        labels.append(f"v{i + 1}⊗v{i + 1}*-v{i + 2}⊗v{i + 2}*")
    return GFpMatrix(p, np.column_stack(cols)), tuple(labels)


def restrict_to_trace_kernel(op: NilpotentOperator) -> NilpotentOperator:
    """Restrict an operator on V (x) V* to the trace-zero subspace."""
    if op.module.kind not in (ModuleKind.TENSOR, ModuleKind.GL):
        raise ValueError("input must act on V (x) V*")
    n = math.isqrt(op.dim)
    if n * n != op.dim:
        raise ValueError("operator dimension is not a perfect square")
    basis, labels = trace_kernel_basis(n, op.p)
    try:
        restricted = solve_columns(basis, op.matrix @ basis)
    except ValueError as exc:
        raise ValueError(f"trace-zero subspace is not invariant: {exc}") from exc
    return NilpotentOperator(restricted, labels, ModuleSpec(ModuleKind.SL))


def quotient_by_invariant_line(
    op_on_kernel: NilpotentOperator, gamma: GFpMatrix | None = None
) -> NilpotentOperator:
    """Induced operator on (trace-zero subspace) / (invariant line).

    Only meaningful when p divides n; otherwise the invariant vector has
    nonzero trace, the quotient is isomorphic to the trace-zero subspace
    itself, and calling this is an error.
    """
    if op_on_kernel.module.kind is not ModuleKind.SL:
        raise ValueError("input must act on the trace-zero subspace")
    dim = op_on_kernel.dim
    n = math.isqrt(dim + 1)
    if n * n != dim + 1:
        raise ValueError("operator dimension is not n^2 - 1")
    p = op_on_kernel.p
    if n % p != 0:
        raise ValueError(
            "quotient equals the trace-zero subspace when p does not divide n; "
            "use restrict_to_trace_kernel"
        )
    if gamma is None:
        gamma = gamma_vector(n, p)
    basis, _ = trace_kernel_basis(n, p)
    coords = solve_columns(basis, gamma).a[:, 0]
    nz = np.nonzero(coords)[0]
    if nz.size == 0:
        raise ValueError("invariant vector is zero")
    pivot = int(nz[0])
    r = op_on_kernel.matrix.a
    if (r @ coords % p).any():
        raise ValueError("line is not annihilated by the operator")
    inv = pow(int(coords[pivot]), -1, p)
    reduced = (r - np.outer(coords * inv % p, r[pivot, :])) % p
    keep = [i for i in range(dim) if i != pivot]
    q = reduced[np.ix_(keep, keep)]
    labels = tuple(op_on_kernel.basis_labels[i] for i in keep)
    return NilpotentOperator(GFpMatrix(p, q), labels, ModuleSpec(ModuleKind.PSL))


# -- distinguished vectors -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistinguishedVectors:
    """Explicit tensor-coordinate vectors tied to a divisibility level.

    ``gamma`` is the invariant vector (all-ones on the diagonal positions).
    ``delta`` sums, over every block, the positions whose image under the
    (p^beta - 1)-th power of the action telescopes to the block diagonal;
    ``delta_prime`` is the diagonal sub-sum supported on one chosen block,
    killed by the p^beta-th power.  All coefficients are 1.
    """

    beta: int
    gamma: GFpMatrix
    delta: GFpMatrix
    delta_prime: GFpMatrix


def distinguished_vectors(jt: JordanType, p: int, beta: int) -> DistinguishedVectors:
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if not jt:
        raise ValueError("empty Jordan type")
    step = p**beta
    if any(size % step for size in jt.sizes):
        raise ValueError(f"p^beta = {step} must divide every block size, got {jt}")
    n = jt.total_dim
    layout = block_layout(jt)
    gamma = gamma_vector(n, p)
    delta = np.zeros((n * n, 1), dtype=np.int64)
    for size, off in layout:
        for j in range(size // step):
            a = off + (j + 1) * step - 1  # v_((j+1) p^beta) within the block
            b = off + j * step  # v_(j p^beta + 1) within the block
            delta[a * n + b, 0] += 1
    delta_prime = np.zeros((n * n, 1), dtype=np.int64)
    size0, off0 = layout[0]
    for j in range(1, size0 // step + 1):
        g = off0 + j * step - 1
        delta_prime[g * n + g, 0] += 1
    return DistinguishedVectors(
        beta, gamma, GFpMatrix(p, delta), GFpMatrix(p, delta_prime)
    )


# -- admissibility witnesses -----------------------------------------------------


def _single_block_gram(d: int) -> np.ndarray:
    """Gram matrix making the size-d shift block skew-adjoint.

    Anti-diagonal with alternating signs: alternating for even d, symmetric
    for odd d.
    """
    g = np.zeros((d, d), dtype=np.int64)
    for i in range(1, d + 1):
        g[i - 1, d - i] = (-1) ** i
    return g


def admissible_witness(jt: JordanType, ctx: GroupContext) -> tuple[GFpMatrix, GFpMatrix]:
    """Nilpotent X of the given type together with a Gram matrix G with
    ``X^T G + G X = 0``; G is alternating for Sp and symmetric for SO.

    Blocks of the parity the form accommodates directly (even for Sp, odd
    for SO) get the alternating-sign anti-diagonal Gram; the remaining sizes
    come in pairs and are embedded as hyperbolic pairs (a block plus its
    dual, with the dual action the negative transpose).  Constructive proof
    that :func:`jordanblocks.partitions.is_admissible` is not too strict.
    """
    if ctx.family is Family.SL:
        raise ValueError("witness construction applies to Sp and SO only")
    if not is_admissible(jt, ctx):
        raise ValueError(f"partition {jt} is not admissible for {ctx.family.value}")
    single_parity = 0 if ctx.family is Family.SP else 1  # block size parity kept single
    x_blocks: list[np.ndarray] = []
    g_blocks: list[np.ndarray] = []
    for size, mult in jt.pairs():
        shift = np.zeros((size, size), dtype=np.int64)
        for j in range(1, size):
            shift[j - 1, j] = 1
        if size % 2 == single_parity:
            for _ in range(mult):
                x_blocks.append(shift)
                g_blocks.append(_single_block_gram(size))
        else:
            # guaranteed even multiplicity; embed as hyperbolic pairs
            eye = np.eye(size, dtype=np.int64)
            zero = np.zeros((size, size), dtype=np.int64)
            sign = -1 if ctx.family is Family.SP else 1
            pair_x = np.block([[shift, zero], [zero, -shift.T]])
            pair_g = np.block([[zero, eye], [sign * eye, zero]])
            for _ in range(mult // 2):
                x_blocks.append(pair_x)
                g_blocks.append(pair_g)
    n = ctx.n
    x = np.zeros((n, n), dtype=np.int64)
    g = np.zeros((n, n), dtype=np.int64)
    off = 0
    for xb, gb in zip(x_blocks, g_blocks):
        d = xb.shape[0]
        x[off : off + d, off : off + d] = xb
        g[off : off + d, off : off + d] = gb
        off += d
    return GFpMatrix(ctx.p, x), GFpMatrix(ctx.p, g)


# -- the oracle ------------------------------------------------------------------


def validate_query(jt: JordanType, ctx: GroupContext, module: ModuleSpec) -> None:
    """Check a (partition, context, module) query; raises on any violation."""
    if jt.total_dim != ctx.n:
        raise ValueError(
            f"partition of {jt.total_dim} does not match natural dimension {ctx.n}"
        )
    if not is_admissible(jt, ctx):
        raise ValueError(f"partition {jt} is not admissible for {ctx.family.value}")
    kind = module.kind
    if kind is ModuleKind.SP_OMEGA2 and ctx.family is not Family.SP:
        raise ValueError("module l_omega2 needs family Sp")
    if kind is ModuleKind.SO_2OMEGA1 and ctx.family is not Family.SO:
        raise ValueError("module l_2omega1 needs family SO")
    if kind is ModuleKind.ADJOINT:
        if ctx.family is not Family.SL:
            raise ValueError("adjoint module tags are defined here for family SL only")
        if module.isogeny is Isogeny.INTERMEDIATE and ctx.n % (ctx.p**2):
            raise ValueError("intermediate isogeny type needs p^2 dividing n")


class _OracleSession:
    """Lazy shared intermediates for one (partition, context, element) query."""

    def __init__(self, jt: JordanType, ctx: GroupContext, unipotent: bool):
        self.jt = jt
        self.ctx = ctx
        self.unipotent = unipotent
        self._cache: dict[str, object] = {}

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def matrix_on_v(self) -> GFpMatrix:
        if self.unipotent:
            return self._memo("v", lambda: natural_unipotent(self.jt, self.ctx.p))
        return self._memo("v", lambda: natural_nilpotent(self.jt, self.ctx.p).matrix)

    def tensor_op(self) -> NilpotentOperator:
        return self._memo(
            "tensor", lambda: lift_to_tensor(self.matrix_on_v(), unipotent=self.unipotent)
        )

    def tensor_type(self) -> JordanType:
        return self._memo("tensor_type", lambda: self.tensor_op().jordan_type())

    def sl_op(self) -> NilpotentOperator:
        return self._memo("sl", lambda: restrict_to_trace_kernel(self.tensor_op()))

    def sl_type(self) -> JordanType:
        return self._memo("sl_type", lambda: self.sl_op().jordan_type())

    def psl_type(self) -> JordanType:
        if self.ctx.n % self.ctx.p != 0:
            return self.sl_type()
        return self._memo(
            "psl_type", lambda: quotient_by_invariant_line(self.sl_op()).jordan_type()
        )

    def wedge_type(self) -> JordanType:
        return self._memo(
            "wedge_type",
            lambda: lift_to_wedge2(self.matrix_on_v(), unipotent=self.unipotent).jordan_type(),
        )

    def sym_type(self) -> JordanType:
        return self._memo(
            "sym_type",
            lambda: lift_to_sym2(self.matrix_on_v(), unipotent=self.unipotent).jordan_type(),
        )

    def type_for(self, module: ModuleSpec) -> JordanType:
        kind = module.kind
        if kind is ModuleKind.NATURAL:
            return self.jt
        if kind in (ModuleKind.TENSOR, ModuleKind.GL):
            return self.tensor_type()
        if kind is ModuleKind.WEDGE2:
            return self.wedge_type()
        if kind is ModuleKind.SYM2:
            return self.sym_type()
        if kind is ModuleKind.SL:
            return self.sl_type()
        if kind is ModuleKind.PSL:
            return self.psl_type()
        if kind is ModuleKind.SP_OMEGA2:
            try:
                return self.psl_type() - self.sym_type()
            except ValueError as exc:
                raise DecompositionError(
                    f"module decomposition violated for {module}: {exc}"
                ) from exc
        if kind is ModuleKind.SO_2OMEGA1:
            try:
                return self.psl_type() - self.wedge_type()
            except ValueError as exc:
                raise DecompositionError(
                    f"module decomposition violated for {module}: {exc}"
                ) from exc
        if kind is ModuleKind.ADJOINT:
            if module.isogeny is Isogeny.INTERMEDIATE:
                return self.psl_type() + JordanType({1: 1})
            return self.sl_type()
        raise ValueError(f"unhandled module {module}")


def oracle_types(
    jt: JordanType,
    ctx: GroupContext,
    modules: list[ModuleSpec] | tuple[ModuleSpec, ...],
    *,
    unipotent: bool = False,
) -> dict[ModuleSpec, JordanType]:
    """Brute-force Jordan types on several modules, sharing intermediates."""
    for module in modules:
        validate_query(jt, ctx, module)
    session = _OracleSession(jt, ctx, unipotent)
    return {module: session.type_for(module) for module in modules}


def oracle_type(
    jt: JordanType, ctx: GroupContext, module: ModuleSpec, *, unipotent: bool = False
) -> JordanType:
    """Brute-force Jordan type on one module, by explicit exact matrices."""
    return oracle_types(jt, ctx, [module], unipotent=unipotent)[module]
