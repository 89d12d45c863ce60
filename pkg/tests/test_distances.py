import itertools

import numpy as np
import pytest

from bitcore import BitVec, complement, covers, delete_indices
from distances import (
    CoverageBudget,
    adel_batch,
    adel_at_least,
    adel_distance,
    adel_witness,
    check_coverage,
    coverage_batch,
    coverage_deletions,
    deletion_ball,
    deletion_distance,
    lcs,
)
from errors import ContractViolation

ADEL_X = BitVec.of([1, 0, 1, 1, 0, 1, 1])
ADEL_Y = BitVec.of([0, 0, 0, 0, 1, 0, 0])


def all_vectors(n):
    return [BitVec.of(bits) for bits in itertools.product((0, 1), repeat=n)]


def coverage_oracle(y, z):
    ys, zs = y.tolist(), z.tolist()
    for kept in itertools.combinations(range(len(zs)), len(ys)):
        if all(zs[j] <= ys[i] for i, j in enumerate(kept)):
            return True
    return False


def test_worked_deletion_distance_example():
    x, y = BitVec.of([0, 1, 0, 1, 0, 0]), BitVec.of([0, 0, 0, 1, 1, 0])
    assert lcs(x, y) == 4
    assert deletion_distance(x, y) == 1


def test_lcs_edge_cases(bv):
    assert lcs(bv("1010"), bv("1010")) == 4
    assert deletion_distance(bv("1010"), bv("1010")) == -1
    assert lcs(BitVec.zeros(0), bv("11")) == 0
    assert lcs(bv("000"), bv("111")) == 0
    with pytest.raises(ContractViolation):
        deletion_distance(bv("10"), bv("100"))


def test_deletion_distance_symmetric(rng):
    for _ in range(200):
        n = int(rng.integers(1, 12))
        x, y = BitVec(rng.integers(0, 2, n)), BitVec(rng.integers(0, 2, n))
        assert deletion_distance(x, y) == deletion_distance(y, x)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_deletion_distance_matches_ball_disjointness(n):
    vectors = all_vectors(n)
    balls = {d: [set(deletion_ball(v, d)) for v in vectors] for d in range(n + 1)}
    for a, b in itertools.product(range(len(vectors)), repeat=2):
        dist = deletion_distance(vectors[a], vectors[b])
        for d in range(n + 1):
            assert (dist >= d) == balls[d][a].isdisjoint(balls[d][b])


def test_adel_worked_example():
    assert adel_at_least(ADEL_X, ADEL_Y, 2)
    assert not adel_at_least(ADEL_X, ADEL_Y, 4)


def test_adel_example_threshold_by_enumeration():
    # The worked example quotes a distance of 2; direct enumeration of the
    # predicate shows it still holds with 3 deletions on each side.
    quoted = 2
    assert adel_at_least(ADEL_X, ADEL_Y, 3)
    assert adel_distance(ADEL_X, ADEL_Y) == 3
    assert adel_distance(ADEL_X, ADEL_Y) >= quoted


def test_adel_matches_double_enumeration(rng):
    for _ in range(60):
        n = int(rng.integers(1, 7))
        x, y = BitVec(rng.integers(0, 2, n)), BitVec(rng.integers(0, 2, n))
        for d in range(n + 1):
            xs = set(deletion_ball(x, d))
            ys = set(deletion_ball(y, d))
            expected = not any(covers(a, b) for a in xs for b in ys)
            assert adel_at_least(x, y, d) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_adel_batch_matches_predicate_exhaustively(n):
    vectors = all_vectors(n)
    X = np.array([v.bits for v in vectors for _ in vectors])
    Y = np.array([w.bits for _ in vectors for w in vectors])
    for d in range(n + 1):
        expected = [not adel_at_least(v, w, d) for v in vectors for w in vectors]
        assert adel_batch(X, Y, d).tolist() == expected


def test_adel_batch_broadcasts_and_checks(rng):
    x = rng.integers(0, 2, 16)
    Y = rng.integers(0, 2, (40, 16))
    hits = adel_batch(x, Y, 3)
    assert hits.shape == (40,)
    assert hits.tolist() == [not adel_at_least(BitVec(x), BitVec(y), 3) for y in Y]
    assert adel_batch(np.zeros((1, 0)), np.zeros((1, 0)), 0).tolist() == [True]
    with pytest.raises(ContractViolation):
        adel_batch(x, Y[:, :15], 1)
    with pytest.raises(ContractViolation):
        adel_batch(x, Y, 17)


def test_adel_distance_trivial_cases(bv):
    assert adel_distance(bv("1"), bv("0")) == 0
    assert adel_distance(bv("0"), bv("0")) is None
    with pytest.raises(ContractViolation):
        adel_at_least(bv("10"), bv("01"), 3)


def test_adel_failure_is_monotone(rng):
    for _ in range(150):
        n = int(rng.integers(2, 9))
        x, y = BitVec(rng.integers(0, 2, n)), BitVec(rng.integers(0, 2, n))
        failed = False
        for d in range(n + 1):
            holds = adel_at_least(x, y, d)
            if failed:
                assert not holds
            failed = failed or not holds


def test_adel_witness_rechecks(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        x, y = BitVec(rng.integers(0, 2, n)), BitVec(rng.integers(0, 2, n))
        d = int(rng.integers(0, n))
        w = adel_witness(x, y, d)
        if w is None:
            continue
        T1, T2 = w
        assert len(T1) == len(T2) == d
        assert covers(delete_indices(x, T1), delete_indices(y, T2))


def test_check_coverage_examples(bv):
    assert check_coverage(bv("110"), bv("1110"), 1)
    assert check_coverage(bv("110"), bv("1110"), CoverageBudget(1))
    assert not check_coverage(bv("000"), bv("1111"), 1)
    y = bv("0110100")
    assert check_coverage(y, BitVec.zeros(len(y) + 2), 2)


def test_check_coverage_contract(bv):
    with pytest.raises(ContractViolation):
        check_coverage(bv("101"), bv("10"), 1)
    assert not check_coverage(bv("1"), bv("000"), 1)
    with pytest.raises(ContractViolation):
        CoverageBudget(-1)


def test_coverage_deletions_are_a_certificate(bv):
    y, z = bv("110"), bv("1110")
    T = coverage_deletions(y, z, 1)
    assert T == (2,)
    assert covers(delete_indices(z, T), y)


@pytest.mark.parametrize("max_len", [7, pytest.param(8, marks=pytest.mark.slow)])
def test_check_coverage_matches_oracle_exhaustively(max_len):
    lengths = range(max_len - 1, max_len + 1) if max_len == 8 else range(0, max_len + 1)
    for lz in lengths:
        zs = all_vectors(lz)
        for ly in range(max(0, lz - 3), lz + 1):
            for y in all_vectors(ly):
                for z in zs:
                    expected = coverage_oracle(y, z)
                    for t in range(lz - ly, 4):
                        assert check_coverage(y, z, t) == expected


def test_check_coverage_matches_oracle_random(rng):
    for _ in range(10_000):
        lz = int(rng.integers(1, 13))
        t = int(rng.integers(0, 4))
        ly = int(rng.integers(max(0, lz - t), lz + 1))
        y = BitVec(rng.integers(0, 2, ly))
        z = BitVec((rng.random(lz) < 0.4).astype(np.uint8))
        assert check_coverage(y, z, t) == coverage_oracle(y, z)


@pytest.mark.parametrize("ly,lz,t", [(5, 5, 0), (6, 8, 2), (9, 12, 3), (4, 6, 3)])
def test_coverage_batch_agrees_with_scan(rng, ly, lz, t):
    Y = rng.integers(0, 2, (300, ly)).astype(np.uint8)
    Z = (rng.random((300, lz)) < 0.35).astype(np.uint8)
    got = coverage_batch(Y, Z, t)
    expected = [check_coverage(BitVec(a), BitVec(b), t) for a, b in zip(Y, Z)]
    assert got.tolist() == expected


def test_coverage_batch_broadcasts_single_y(rng):
    y = rng.integers(0, 2, 10).astype(np.uint8)
    Z = (rng.random((40, 12)) < 0.3).astype(np.uint8)
    got = coverage_batch(y[None, :], Z, 2)
    assert got.tolist() == [check_coverage(BitVec(y), BitVec(z), 2) for z in Z]


def test_deletion_ball(bv):
    ball = deletion_ball(bv("0011"), 1)
    assert set(ball) == {bv("011"), bv("001")}
    assert ball[bv("011")] == (0,)
    assert ball[bv("001")] == (2,)
    assert deletion_ball(bv("01"), 0) == {bv("01"): ()}


def test_reverse_coverage_identity(rng):
    for _ in range(200):
        n = int(rng.integers(1, 10))
        x, y = BitVec(rng.integers(0, 2, n)), BitVec(rng.integers(0, 2, n))
        assert covers(x, y) == covers(complement(y), complement(x))
