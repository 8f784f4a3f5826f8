from itertools import combinations

import pytest

from pmrc import (
    CodeMode,
    ConstructionError,
    Fq,
    ParameterError,
    build_psi_mbr,
    build_psi_msr,
    capacity_bound,
    encoding_from_points,
    feasible_pairs,
    mbr_params,
    msr_params,
    resilience_feasible,
)
from pmrc.linalg import rank


def test_msr_params_examples():
    p = msr_params(k=3, n=7)
    assert (p.d, p.alpha, p.message_symbols) == (4, 2, 6)
    p = msr_params(k=2, n=4)
    assert (p.d, p.alpha, p.message_symbols) == (2, 1, 2)
    p = msr_params(k=3, n=7, beta=2)
    assert (p.alpha, p.message_symbols) == (4, 12)


def test_msr_params_rejects_small_n():
    with pytest.raises(ParameterError):
        msr_params(k=3, n=4)  # needs n >= 2k-1 = 5
    with pytest.raises(ParameterError):
        msr_params(k=1, n=3)


def test_mbr_params_examples():
    p = mbr_params(k=2, d=3, n=5)
    assert (p.message_symbols, p.alpha) == (5, 3)
    assert mbr_params(k=3, d=3, n=5).message_symbols == 6
    p = mbr_params(k=2, d=3, n=5, beta=2)
    assert (p.message_symbols, p.alpha) == (10, 6)


def test_mbr_params_rejects_bad_ordering():
    with pytest.raises(ParameterError):
        mbr_params(k=4, d=3, n=6)
    with pytest.raises(ParameterError):
        mbr_params(k=2, d=5, n=5)


def test_capacity_bound_examples():
    assert capacity_bound(2, 3, 2, 1) == 4
    assert capacity_bound(2, 3, 3, 1) == 5
    assert capacity_bound(3, 4, 0, 1) == 0


def test_constructed_codes_meet_bound_exactly():
    for k in (2, 3, 4):
        p = msr_params(k=k, n=2 * k)
        assert p.message_symbols == capacity_bound(p.k, p.d, p.alpha, p.beta)
    for k, d in ((2, 2), (2, 3), (3, 4), (3, 5)):
        p = mbr_params(k=k, d=d, n=d + 2)
        assert p.message_symbols == capacity_bound(p.k, p.d, p.alpha, p.beta)


def test_resilience_feasible():
    p = mbr_params(k=2, d=3, n=6)
    assert resilience_feasible(p, 0, 0)
    assert resilience_feasible(p, 0, 1)  # Delta = 5 <= n-1
    assert not resilience_feasible(p, 2, 1)  # d+s+2t = 7 > 5
    with pytest.raises(ParameterError):
        resilience_feasible(p, -1, 0)


def test_only_zero_budget_when_n_is_d_plus_one():
    p = mbr_params(k=2, d=3, n=4)
    assert feasible_pairs(p) == [(0, 0)]
    for s in range(3):
        for t in range(3):
            if (s, t) != (0, 0):
                assert not resilience_feasible(p, s, t)


def test_feasible_pairs_ordering():
    p = mbr_params(k=3, d=4, n=8)
    pairs = feasible_pairs(p)
    assert pairs[0] == (0, 0)
    assert set(pairs) == {(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1)}


def test_build_psi_msr_lambda_example():
    enc = build_psi_msr(msr_params(k=3, n=7), Fq(29))
    assert enc.points == (1, 2, 3, 4, 5, 6, 7)
    assert enc.lam == (1, 4, 9, 16, 25, 7, 20)
    assert len(set(enc.lam)) == 7


def test_build_psi_msr_splits_consistently():
    enc = build_psi_msr(msr_params(k=3, n=7), Fq(29))
    q = 29
    for i in range(7):
        psi_row = enc.psi.row(i)
        phi_row = enc.phi.row(i)
        assert psi_row[:2] == phi_row
        assert psi_row[2:] == tuple(enc.lam[i] * v % q for v in phi_row)


def test_build_psi_msr_subset_ranks_exhaustive():
    enc = build_psi_msr(msr_params(k=3, n=7), Fq(29))
    for rows in combinations(range(7), 4):
        assert rank(enc.psi.take_rows(rows)) == 4
    for rows in combinations(range(7), 2):
        assert rank(enc.phi.take_rows(rows)) == 2


def test_build_psi_msr_point_search_failure():
    # q = 13 < 4n: only 6 distinct squares exist, the scan must fail
    with pytest.raises(ConstructionError):
        build_psi_msr(msr_params(k=3, n=7), Fq(13))


def test_build_psi_mbr_subset_ranks():
    enc = build_psi_mbr(mbr_params(k=2, d=3, n=5), Fq(23))
    for rows in combinations(range(5), 2):
        assert rank(enc.phi.take_rows(rows)) == 2
    for rows in combinations(range(5), 3):
        assert rank(enc.psi.take_rows(rows)) == 3


def test_build_psi_mbr_subset_ranks_n10():
    enc = build_psi_mbr(mbr_params(k=3, d=4, n=10), Fq(41))
    for rows in combinations(range(10), 4):
        assert rank(enc.psi.take_rows(rows)) == 4


def test_build_psi_mbr_degenerate_d_equals_k():
    enc = build_psi_mbr(mbr_params(k=3, d=3, n=5), Fq(23))
    assert enc.sigma.cols == 0
    assert enc.psi == enc.phi


def test_build_psi_mbr_too_few_points():
    with pytest.raises(ConstructionError):
        build_psi_mbr(mbr_params(k=2, d=3, n=5), Fq(5))


def test_build_mode_mismatch():
    with pytest.raises(ParameterError):
        build_psi_msr(mbr_params(k=2, d=3, n=5), Fq(23))
    with pytest.raises(ParameterError):
        build_psi_mbr(msr_params(k=3, n=7), Fq(29))


def test_encoding_from_points_round_trip():
    for enc in (
        build_psi_msr(msr_params(k=3, n=7), Fq(29)),
        build_psi_mbr(mbr_params(k=2, d=3, n=5), Fq(23)),
    ):
        redone = encoding_from_points(enc.params, enc.field, enc.points)
        assert redone.psi == enc.psi
        assert redone.phi == enc.phi
        assert redone.lam == enc.lam
        assert redone.sigma == enc.sigma


def test_node_id_bounds():
    enc = build_psi_msr(msr_params(k=2, n=5), Fq(257))
    with pytest.raises(ParameterError):
        enc.psi_row(0)
    with pytest.raises(ParameterError):
        enc.psi_row(6)
    assert enc.point_of(1) == enc.points[0]


def test_mode_enum_round_trip():
    assert CodeMode("msr") is CodeMode.MSR
    assert CodeMode("mbr") is CodeMode.MBR
