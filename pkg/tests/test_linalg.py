import random
from itertools import combinations

import pytest

from pmrc import (
    FieldMismatchError,
    Fq,
    InconsistentSystemError,
    MatrixFq,
    ParameterError,
    SingularMatrixError,
    smallest_prime_at_least,
)
from pmrc.linalg import (
    hstack,
    inverse,
    left_inverse,
    rank,
    solve,
    solve_any,
    vandermonde,
    vstack,
)

F13 = Fq(13)
F29 = Fq(29)


def test_identity_product():
    a = MatrixFq(F13, [[3, 5], [7, 11], [0, 1]])
    assert MatrixFq.identity(F13, 3) @ a == a


def test_hand_product():
    a = MatrixFq(F13, [[1, 1], [1, 2]])
    b = MatrixFq(F13, [[0], [1]])
    assert (a @ b).to_lists() == [[1], [2]]


def test_solve_identity():
    y = MatrixFq(F13, [[4], [9]])
    assert solve(MatrixFq.identity(F13, 2), y) == y


def test_solve_hand_example():
    a = MatrixFq(F13, [[1, 1], [1, 2]])
    y = MatrixFq(F13, [[1], [2]])
    assert solve(a, y).to_lists() == [[0], [1]]


def test_vandermonde_3x3_invertible_f13():
    v = vandermonde(F13, [1, 2, 3], 3)
    assert rank(v) == 3
    assert (v @ inverse(v)) == MatrixFq.identity(F13, 3)


def test_vandermonde_examples():
    assert vandermonde(F29, [1, 2, 3], 1).to_lists() == [[1], [1], [1]]
    assert vandermonde(F29, [1, 2], 3).to_lists() == [[1, 1, 1], [1, 2, 4]]
    with pytest.raises(ParameterError):
        vandermonde(F29, [1, 2, 2], 2)


def test_vandermonde_any_width_rows_full_rank():
    v = vandermonde(F29, [1, 2, 3, 4, 5, 6], 3)
    for rows in combinations(range(6), 3):
        assert rank(v.take_rows(rows)) == 3


def test_rank_zero_matrix():
    assert rank(MatrixFq.zeros(F13, 3, 4)) == 0


def test_rank_vandermonde_min():
    assert rank(vandermonde(F29, [1, 2, 3, 4, 5], 3)) == 3
    assert rank(vandermonde(F29, [1, 2], 4)) == 2


def test_solve_round_trip_random():
    rng = random.Random(3)
    for _ in range(25):
        rows, cols = rng.randint(2, 6), rng.randint(1, 4)
        rows = max(rows, cols)
        a = vandermonde(F29, rng.sample(range(29), rows), cols)
        x = MatrixFq(F29, [[rng.randrange(29)] for _ in range(cols)])
        assert solve(a, a @ x) == x


def test_solve_errors():
    singular = MatrixFq(F13, [[1, 2], [2, 4]])
    with pytest.raises(SingularMatrixError):
        solve(singular, MatrixFq(F13, [[1], [2]]))
    # inconsistent overdetermined system
    a = MatrixFq(F13, [[1], [1]])
    with pytest.raises(InconsistentSystemError):
        solve(a, MatrixFq(F13, [[1], [2]]))
    with pytest.raises(ParameterError):
        solve(a, MatrixFq(F13, [[1]]))


def test_solve_any_picks_some_solution():
    a = MatrixFq(F13, [[1, 2], [2, 4]])
    y = MatrixFq(F13, [[3], [6]])
    x = solve_any(a, y)
    assert (a @ x) == y


def test_field_mismatch():
    a = MatrixFq(F13, [[1]])
    b = MatrixFq(F29, [[1]])
    with pytest.raises(FieldMismatchError):
        a @ b
    with pytest.raises(FieldMismatchError):
        a + b


def test_entries_must_be_reduced():
    with pytest.raises(ParameterError):
        MatrixFq(F13, [[13]])
    with pytest.raises(ParameterError):
        MatrixFq(F13, [[-1]])


def test_matrix_is_immutable():
    a = MatrixFq(F13, [[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        a.array()[0, 0] = 5


def test_left_inverse():
    a = vandermonde(F29, [1, 2, 3, 4, 5], 3)
    li = left_inverse(a)
    assert (li @ a) == MatrixFq.identity(F29, 3)
    with pytest.raises(SingularMatrixError):
        left_inverse(MatrixFq(F13, [[1, 2], [2, 4], [0, 0]]))


def test_stacking_and_slicing():
    a = MatrixFq(F13, [[1, 2], [3, 4]])
    b = MatrixFq(F13, [[5, 6]])
    assert vstack([a, b]).to_lists() == [[1, 2], [3, 4], [5, 6]]
    assert hstack([a, a]).rows == 2 and hstack([a, a]).cols == 4
    assert a.slice_cols(1, 2).to_lists() == [[2], [4]]
    assert a.T.to_lists() == [[1, 3], [2, 4]]


def test_large_modulus_object_path():
    # crosses the int64 fast-multiply threshold, exercising the object path
    q = smallest_prime_at_least(2**20 + 1)
    f = Fq(q)
    a = MatrixFq(f, [[q - 1, q - 2], [1, q - 1]])
    b = MatrixFq(f, [[q - 1], [q - 1]])
    got = (a @ b).to_lists()
    want = [
        [((q - 1) * (q - 1) + (q - 2) * (q - 1)) % q],
        [((q - 1) + (q - 1) * (q - 1)) % q],
    ]
    assert got == want


def test_product_reproduces_node_share():
    # one psi row times the message matrix equals that node's stored share
    from pmrc import msr_encode, msr_fill_message, msr_params, build_encoding

    params = msr_params(k=3, n=7)
    enc = build_encoding(params, F29)
    payload = tuple(range(1, 7))
    slices = msr_fill_message(payload, params, F29)
    shares = msr_encode(slices, enc)
    for i in range(params.n):
        row = enc.psi.take_rows([i]) @ slices[0].stacked()
        assert tuple(row.array()[0]) == shares[i].symbols
