"""Errors-and-erasures decoding.

Two scalar decoders recover a length-`msg_len` coefficient vector from noisy
evaluations of it:

* ``subset_decode_oracle`` is the normative brute-force reference: it solves
  every msg_len-subset of the received entries and accepts a candidate that
  agrees with at least R - t_max received entries (R = received count). Within
  budget (at most t_max wrong entries and R >= msg_len + 2t) the accepted
  candidate is unique; finding two distinct ones means the caller exceeded the
  budget.

* ``rs_decode_ee`` is the polynomial-time production path. Erasures are fixed
  by dropping their positions; the error locator is found algebraically from
  the Berlekamp-Welch key equation N(x_i) = v_i * E(x_i), solved as a linear
  system with E monic of degree tau = min(t_max, (R - msg_len) // 2). Any
  solution yields the message as N / E when at most tau entries are wrong, so
  within budget it agrees with the oracle bit for bit; its final acceptance
  check is the oracle's (agreement with >= R - t_max received entries).

``consistency_reconstruct`` lifts the same accept rule to vector symbols:
candidates come from an error-free k-subset solver and are kept when their
re-encoding matches at least R - t_max received shares. Two survivors would
agree on >= R - 2*t_max >= k shares and hence be equal, so first-in-canonical-
order acceptance is deterministic and safe within budget.

Beyond-budget inputs never crash any decoder: they end in a correct answer, a
``DecodeFailure``/``AmbiguityError``, or an arbitrary candidate the caller
must treat as untrusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from . import linalg
from .errors import (
    AmbiguityError,
    DecodeFailure,
    InconsistentSystemError,
    ParameterError,
    SingularMatrixError,
)
from .field import Fq
from .linalg import MatrixFq

RECEIVED = "received"
ERASED = "erased"


@dataclass(frozen=True)
class Response:
    """One node's contribution to a decode: beta repair symbols or an
    alpha-symbol share; ``symbols is None`` marks a (block) erasure."""

    node_id: int
    symbols: tuple[int, ...] | None = None

    @property
    def status(self) -> str:
        return ERASED if self.symbols is None else RECEIVED

    @property
    def erased(self) -> bool:
        return self.symbols is None


def received_response(node_id: int, symbols: Sequence[int]) -> Response:
    return Response(node_id, tuple(int(v) for v in symbols))


def erased_response(node_id: int) -> Response:
    return Response(node_id, None)


def _check_scalar_word(values: Sequence[int | None], msg_len: int, t_max: int):
    if t_max < 0:
        raise ParameterError("t_max must be nonnegative")
    received = [(i, v) for i, v in enumerate(values) if v is not None]
    if len(received) < msg_len + t_max:
        raise ParameterError(
            f"{len(received)} received symbols cannot tolerate {t_max} errors "
            f"on a length-{msg_len} message"
        )
    return received


def subset_decode_oracle(
    values: Sequence[int | None], rows: MatrixFq, t_max: int
) -> tuple[int, ...]:
    """Exhaustive reference decoder against arbitrary MDS rows.

    values[i] is the symbol observed for rows.row(i), or None if erased.
    """
    msg_len = rows.cols
    if len(values) != rows.rows:
        raise ParameterError("one value per encoding row required")
    received = _check_scalar_word(values, msg_len, t_max)
    r_count = len(received)
    field = rows.field
    candidates: set[tuple[int, ...]] = set()
    seen: set[tuple[int, ...]] = set()
    for subset in combinations(range(r_count), msg_len):
        idx = [received[j][0] for j in subset]
        rhs = MatrixFq.column(field, [received[j][1] for j in subset])
        try:
            x = linalg.solve(rows.take_rows(idx), rhs)
        except SingularMatrixError:
            continue
        cand = tuple(int(v) for v in x.array()[:, 0])
        if cand in seen:
            continue
        seen.add(cand)
        preds = (rows @ x).array()[:, 0]
        agree = sum(int(preds[i]) == v for i, v in received)
        if agree >= r_count - t_max:
            candidates.add(cand)
    if not candidates:
        raise DecodeFailure("no candidate met the agreement threshold")
    if len(candidates) > 1:
        raise AmbiguityError(
            f"{len(candidates)} candidates met the threshold; budget exceeded"
        )
    return candidates.pop()


def _poly_eval(coeffs: Sequence[int], x: int, field: Fq) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % field.q
    return acc


def _poly_divmod(num: Sequence[int], den: Sequence[int], field: Fq):
    """Quotient and remainder of polynomial division (coefficients low-first)."""
    num = list(num)
    dn = len(den) - 1
    while dn >= 0 and den[dn] == 0:
        dn -= 1
    if dn < 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = field.inv(den[dn])
    quot = [0] * max(len(num) - dn, 0)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i] * inv_lead % field.q
        if c:
            quot[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] = (num[i - dn + j] - c * den[j]) % field.q
    while num and num[-1] == 0:
        num.pop()
    return quot, num


def rs_decode_ee(
    values: Sequence[int | None],
    points: Sequence[int],
    msg_len: int,
    t_max: int,
    field: Fq,
) -> tuple[int, ...]:
    """Errors-and-erasures decoding of polynomial evaluations.

    values[i] is p(points[i]) possibly corrupted, or None if erased; deg p <
    msg_len. Recovers p's coefficient vector for up to t_max wrong entries.
    """
    if len(values) != len(points):
        raise ParameterError("one value per evaluation point required")
    if len(set(points)) != len(points):
        raise ParameterError("evaluation points must be distinct")
    received = _check_scalar_word(values, msg_len, t_max)
    r_count = len(received)
    q = field.q
    xs = [field.check(points[i]) for i, _ in received]
    vs = [field.check(v) for _, v in received]
    tau = min(t_max, (r_count - msg_len) // 2)

    if tau == 0:
        vdm = linalg.vandermonde(field, xs[:msg_len], msg_len)
        sol = linalg.solve(vdm, MatrixFq.column(field, vs[:msg_len]))
        coeffs = [int(v) for v in sol.array()[:, 0]]
    else:
        # Key equation: N(x) - v*E(x) = v*x^tau with E = z^tau + sum e_j z^j,
        # deg N < msg_len + tau. Unknowns: msg_len + 2*tau.
        n_terms = msg_len + tau
        rows = []
        rhs = []
        for x, v in zip(xs, vs):
            xp = 1
            row = []
            for _ in range(n_terms):
                row.append(xp)
                xp = xp * x % q
            # continue powers for the E block
            ep = 1
            for _ in range(tau):
                row.append(-v * ep % q)
                ep = ep * x % q
            rows.append(row)
            rhs.append(v * ep % q)  # ep == x^tau after the loop
        system = MatrixFq(field, rows, _trusted=True)
        try:
            sol = linalg.solve_any(system, MatrixFq.column(field, rhs))
        except InconsistentSystemError:
            raise DecodeFailure("key equation unsolvable: budget exceeded")
        flat = [int(v) for v in sol.array()[:, 0]]
        n_poly = flat[:n_terms]
        e_poly = flat[n_terms:] + [1]
        quot, rem = _poly_divmod(n_poly, e_poly, field)
        if rem:
            raise DecodeFailure("error locator does not divide the numerator")
        coeffs = quot

    agree = sum(_poly_eval(coeffs, x, field) == v for x, v in zip(xs, vs))
    if agree < r_count - t_max:
        raise DecodeFailure(
            f"candidate agrees with {agree}/{r_count} symbols, "
            f"needs {r_count - t_max}"
        )
    return tuple(coeffs)


def consistency_reconstruct(
    word: Sequence[Response],
    k: int,
    t_max: int,
    solve_k: Callable[[tuple[int, ...], tuple[tuple[int, ...], ...]], tuple[int, ...]],
    reencode: Callable[[tuple[int, ...], int], tuple[int, ...]],
) -> tuple[int, ...]:
    """Reconstruction from vector shares with up to t_max corrupted shares.

    solve_k(node_ids, shares) is the error-free k-subset solver; reencode
    (candidate, node_id) predicts that node's share. Candidates are tested in
    canonical subset order and the first one whose re-encoding matches at
    least R - t_max received shares wins.
    """
    if t_max < 0:
        raise ParameterError("t_max must be nonnegative")
    ids = [r.node_id for r in word]
    if len(set(ids)) != len(ids):
        raise ParameterError("duplicate node ids in reconstruction word")
    received = [r for r in word if not r.erased]
    r_count = len(received)
    if r_count < k + 2 * t_max:
        raise ParameterError(
            f"{r_count} received shares cannot tolerate {t_max} corrupt shares "
            f"(need {k + 2 * t_max})"
        )
    for subset in combinations(range(r_count), k):
        sub_ids = tuple(received[j].node_id for j in subset)
        sub_shares = tuple(received[j].symbols for j in subset)
        try:
            cand = solve_k(sub_ids, sub_shares)
        except (SingularMatrixError, InconsistentSystemError):
            # a corrupt share inside the subset can make the stacked system
            # unsolvable; that subset simply offers no candidate
            continue
        agree = sum(
            reencode(cand, r.node_id) == r.symbols for r in received
        )
        if agree >= r_count - t_max:
            return cand
    raise DecodeFailure("no reconstruction candidate met the agreement threshold")
