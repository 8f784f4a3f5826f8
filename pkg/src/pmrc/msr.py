"""Minimum-storage (MSR) encode, repair, and reconstruction at d = 2k-2.

Per beta-slice the message lives in two symmetric (k-1)x(k-1) matrices S1, S2
stacked into M = [S1; S2]; node i stores the row psi_i^t M. A helper h sends
the single symbol (h's stored row) . phi_f for the failed node f, so the
replacement sees evaluations of the degree-<d polynomial with coefficients
m_f = M phi_f and can decode them through the errors-and-erasures layer. The
failed share is then rebuilt as phi_f^t S1 + lambda_f phi_f^t S2 using the
symmetry of S1 and S2. Slices are independent; a block's share is the
concatenation of its slice shares.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import decoding, linalg
from .decoding import Response
from .errors import DecodeFailure, InfeasibleError, ParameterError
from .field import Fq
from .linalg import MatrixFq
from .params import CodeMode, EncodingMatrix, SystemParams, resilience_feasible


@dataclass(frozen=True)
class NodeShare:
    """The alpha symbols a node stores for one block (slice-major order)."""

    node_id: int
    symbols: tuple[int, ...]


def _triangle(m: int) -> int:
    return m * (m + 1) // 2


def sym_from_triangle(values: Sequence[int], size: int, field: Fq) -> MatrixFq:
    """Symmetric matrix from its upper triangle listed row-major."""
    if len(values) != _triangle(size):
        raise ParameterError(f"need {_triangle(size)} values for size {size}")
    a = np.zeros((size, size), dtype=np.int64)
    it = iter(values)
    for i in range(size):
        for j in range(i, size):
            v = next(it)
            a[i, j] = v
            a[j, i] = v
    return MatrixFq(field, a)


def triangle_from_sym(mat: MatrixFq) -> tuple[int, ...]:
    out = []
    for i in range(mat.rows):
        for j in range(i, mat.cols):
            out.append(mat.entry(i, j))
    return tuple(out)


@dataclass(frozen=True)
class MsrMessageMatrix:
    """One slice of the message: two symmetric (k-1)x(k-1) halves."""

    s1: MatrixFq
    s2: MatrixFq

    def __post_init__(self):
        for m in (self.s1, self.s2):
            if m.rows != m.cols or m != m.T:
                raise ParameterError("message halves must be square and symmetric")
        if self.s1.shape != self.s2.shape or self.s1.field != self.s2.field:
            raise ParameterError("message halves must match in shape and field")

    @property
    def alpha_prime(self) -> int:
        return self.s1.rows

    def stacked(self) -> MatrixFq:
        """The (d x alpha') product-matrix operand [S1; S2]."""
        return linalg.vstack([self.s1, self.s2])


def _check_msr(params: SystemParams):
    if params.mode is not CodeMode.MSR:
        raise ParameterError("MSR operation on non-MSR parameters")


def msr_fill_message(
    payload: Sequence[int], params: SystemParams, field: Fq
) -> list[MsrMessageMatrix]:
    """Pack B payload symbols into beta slices: per slice, the first
    triangle fills S1 and the second fills S2."""
    _check_msr(params)
    if len(payload) != params.message_symbols:
        raise ParameterError(
            f"payload must have {params.message_symbols} symbols, got {len(payload)}"
        )
    ap = params.k - 1
    tri = _triangle(ap)
    per_slice = params.slice_symbols
    slices = []
    for j in range(params.beta):
        chunk = payload[j * per_slice : (j + 1) * per_slice]
        slices.append(
            MsrMessageMatrix(
                s1=sym_from_triangle(chunk[:tri], ap, field),
                s2=sym_from_triangle(chunk[tri:], ap, field),
            )
        )
    return slices


def msr_read_message(
    slices: Sequence[MsrMessageMatrix], params: SystemParams
) -> tuple[int, ...]:
    """Inverse of msr_fill_message."""
    _check_msr(params)
    if len(slices) != params.beta:
        raise ParameterError(f"expected {params.beta} slices, got {len(slices)}")
    out: list[int] = []
    for sl in slices:
        out.extend(triangle_from_sym(sl.s1))
        out.extend(triangle_from_sym(sl.s2))
    return tuple(out)


def msr_encode(
    slices: Sequence[MsrMessageMatrix], enc: EncodingMatrix
) -> list[NodeShare]:
    """Code matrix psi @ M per slice; node i's share concatenates row i of
    every slice."""
    params = enc.params
    _check_msr(params)
    if len(slices) != params.beta:
        raise ParameterError(f"expected {params.beta} slices, got {len(slices)}")
    per_slice = []
    for sl in slices:
        if sl.alpha_prime != params.k - 1:
            raise ParameterError("slice size does not match parameters")
        per_slice.append((enc.psi @ sl.stacked()).array())
    shares = []
    for i in range(params.n):
        symbols: list[int] = []
        for c in per_slice:
            symbols.extend(int(v) for v in c[i])
        shares.append(NodeShare(node_id=i + 1, symbols=tuple(symbols)))
    return shares


def _slice_view(share: Sequence[int], j: int, width: int) -> Sequence[int]:
    return share[j * width : (j + 1) * width]


def msr_helper_symbol(
    helper_share: NodeShare, failed_id: int, enc: EncodingMatrix
) -> tuple[int, ...]:
    """The beta repair symbols helper h sends for failed node f: per slice the
    inner product of h's stored row with phi_f. Depends only on h's own share
    and f, never on which other helpers take part."""
    params = enc.params
    _check_msr(params)
    enc.check_node(failed_id)
    enc.check_node(helper_share.node_id)
    if failed_id == helper_share.node_id:
        raise ParameterError("a node cannot help repair itself")
    if len(helper_share.symbols) != params.alpha:
        raise ParameterError("helper share has wrong length")
    q = enc.field.q
    phi_f = enc.phi_row(failed_id)
    ap = params.k - 1
    out = []
    for j in range(params.beta):
        row = _slice_view(helper_share.symbols, j, ap)
        out.append(sum(a * b for a, b in zip(row, phi_f)) % q)
    return tuple(out)


def _check_repair_word(
    responses: Sequence[Response],
    failed_id: int,
    enc: EncodingMatrix,
    s: int,
    t: int,
):
    params = enc.params
    if not resilience_feasible(params, s, t):
        raise InfeasibleError(
            f"(s={s}, t={t}) infeasible for [n={params.n}, k={params.k}, d={params.d}]"
        )
    delta = params.d + s + 2 * t
    if len(responses) != delta:
        raise ParameterError(
            f"repair needs exactly {delta} responses (d+s+2t), got {len(responses)}"
        )
    ids = [r.node_id for r in responses]
    if len(set(ids)) != len(ids):
        raise ParameterError("duplicate helper ids")
    for r in responses:
        enc.check_node(r.node_id)
        if r.node_id == failed_id:
            raise ParameterError("failed node cannot be its own helper")
        if not r.erased and len(r.symbols) != params.beta:
            raise ParameterError("repair responses must carry beta symbols")
    erased = sum(r.erased for r in responses)
    if erased > s:
        raise ParameterError(f"{erased} erased responses exceed the budget s={s}")


def msr_repair(
    responses: Sequence[Response],
    failed_id: int,
    enc: EncodingMatrix,
    s: int = 0,
    t: int = 0,
) -> NodeShare:
    """Exact repair of the failed node's share from d+s+2t helper responses
    with at most s erased and at most t silently corrupted."""
    params = enc.params
    _check_msr(params)
    enc.check_node(failed_id)
    _check_repair_word(responses, failed_id, enc, s, t)
    ap = params.k - 1
    lam_f = enc.lam_of(failed_id)
    points = [enc.point_of(r.node_id) for r in responses]
    symbols: list[int] = []
    q = enc.field.q
    for j in range(params.beta):
        values = [None if r.erased else r.symbols[j] for r in responses]
        try:
            m_f = decoding.rs_decode_ee(values, points, params.d, t, enc.field)
        except DecodeFailure as e:
            raise DecodeFailure(f"repair of node {failed_id} failed: {e}") from e
        symbols.extend((m_f[c] + lam_f * m_f[ap + c]) % q for c in range(ap))
    return NodeShare(node_id=failed_id, symbols=tuple(symbols))


def msr_share_map(enc: EncodingMatrix) -> np.ndarray:
    """Coefficient tensor A with shape (n, alpha', B') mapping one slice of
    message symbols to every node's stored slice: share_i = A[i] @ u."""
    params = enc.params
    _check_msr(params)
    ap = params.k - 1
    bprime = params.slice_symbols
    psi = enc.psi.array()
    a = np.zeros((params.n, ap, bprime), dtype=np.int64)
    q = enc.field.q
    u = 0
    for half in range(2):  # S1 then S2
        base = half * ap
        for r in range(ap):
            for c in range(r, ap):
                # symbol u sits at M[base+r, c] and M[base+c, r]
                a[:, c, u] += psi[:, base + r]
                if r != c:
                    a[:, r, u] += psi[:, base + c]
                u += 1
    return a % q


def _check_reconstruct_word(
    responses: Sequence[Response], enc: EncodingMatrix, s: int, t: int
):
    params = enc.params
    extra = s + 2 * t
    if params.k + extra > params.n:
        raise InfeasibleError(
            f"(s={s}, t={t}) reconstruction needs k+s+2t <= n"
        )
    kappa = params.k + extra
    if len(responses) != kappa:
        raise ParameterError(
            f"reconstruction needs exactly {kappa} responses (k+s+2t), "
            f"got {len(responses)}"
        )
    ids = [r.node_id for r in responses]
    if len(set(ids)) != len(ids):
        raise ParameterError("duplicate node ids")
    for r in responses:
        enc.check_node(r.node_id)
        if not r.erased and len(r.symbols) != params.alpha:
            raise ParameterError("share responses must carry alpha symbols")
    erased = sum(r.erased for r in responses)
    if erased > s:
        raise ParameterError(f"{erased} erased responses exceed the budget s={s}")


def msr_reconstruct(
    responses: Sequence[Response],
    enc: EncodingMatrix,
    s: int = 0,
    t: int = 0,
) -> tuple[int, ...]:
    """All B message symbols from k+s+2t share responses with at most s
    erased and at most t corrupted."""
    params = enc.params
    _check_msr(params)
    _check_reconstruct_word(responses, enc, s, t)
    field = enc.field
    amap = msr_share_map(enc)
    ap = params.k - 1

    def solve_k(ids, shares):
        rows = np.concatenate([amap[i - 1] for i in ids], axis=0)
        rhs = [v for share in shares for v in share]
        sol = linalg.solve(
            MatrixFq(field, rows, _trusted=True), MatrixFq.column(field, rhs)
        )
        return tuple(int(v) for v in sol.array()[:, 0])

    def reencode(cand, node_id):
        vec = amap[node_id - 1] @ np.asarray(cand, dtype=np.int64) % field.q
        return tuple(int(v) for v in vec)

    payload: list[int] = []
    for j in range(params.beta):
        word = [
            Response(r.node_id, None)
            if r.erased
            else Response(r.node_id, tuple(_slice_view(r.symbols, j, ap)))
            for r in responses
        ]
        try:
            payload.extend(
                decoding.consistency_reconstruct(word, params.k, t, solve_k, reencode)
            )
        except DecodeFailure as e:
            raise DecodeFailure(f"reconstruction failed: {e}") from e
    return tuple(payload)


def msr_systematic_remap(
    payload: Sequence[int], enc: EncodingMatrix, sys_nodes: Sequence[int]
) -> list[MsrMessageMatrix]:
    """Message matrices under which node sys_nodes[r] stores
    payload[r*alpha : (r+1)*alpha] verbatim.

    Inverts the linear map message -> (designated k shares), which the
    reconstruction property makes invertible."""
    params = enc.params
    _check_msr(params)
    if len(set(sys_nodes)) != params.k:
        raise ParameterError(f"need {params.k} distinct systematic nodes")
    for i in sys_nodes:
        enc.check_node(i)
    if len(payload) != params.message_symbols:
        raise ParameterError(
            f"payload must have {params.message_symbols} symbols, got {len(payload)}"
        )
    field = enc.field
    amap = msr_share_map(enc)
    a_sys = MatrixFq(
        field, np.concatenate([amap[i - 1] for i in sys_nodes], axis=0), _trusted=True
    )
    ap = params.k - 1
    slices = []
    for j in range(params.beta):
        # per slice, the target stacked shares gather each node's slice-j
        # segment of its designated alpha-symbol run
        target = []
        for r in range(params.k):
            seg = payload[r * params.alpha + j * ap : r * params.alpha + (j + 1) * ap]
            target.extend(field.check(v) for v in seg)
        u = linalg.solve(a_sys, MatrixFq.column(field, target))
        vals = tuple(int(v) for v in u.array()[:, 0])
        tri = _triangle(ap)
        slices.append(
            MsrMessageMatrix(
                s1=sym_from_triangle(vals[:tri], ap, field),
                s2=sym_from_triangle(vals[tri:], ap, field),
            )
        )
    return slices
