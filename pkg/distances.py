"""Deletion-distance machinery: LCS, deletion distance, the asymmetric
deletion distance predicate and the linear-time coverage check."""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from bitcore import BitVec, complement, delete_indices
from errors import ContractViolation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverageBudget:
    t: int

    def __post_init__(self):
        if self.t < 0:
            raise ContractViolation(f"coverage budget must be >= 0, got {self.t}")


def _budget(t: "CoverageBudget | int") -> int:
    return t.t if isinstance(t, CoverageBudget) else CoverageBudget(int(t)).t


def _same_length(x: BitVec, y: BitVec):
    if len(x) != len(y):
        raise ContractViolation(f"vectors must have equal length ({len(x)} != {len(y)})")


def lcs(x: BitVec, y: BitVec) -> int:
    # Row-by-row quadratic DP. Within a row the left dependency is a running max.
    a, b = x.bits, y.bits
    if len(a) == 0 or len(b) == 0:
        return 0
    prev = np.zeros(len(b) + 1, dtype=np.int64)
    row = np.zeros_like(prev)
    for ch in a:
        cand = np.maximum(prev[1:], np.where(b == ch, prev[:-1] + 1, 0))
        row[1:] = np.maximum.accumulate(cand)
        prev, row = row, prev
    return int(prev[-1])


def deletion_distance(x: BitVec, y: BitVec) -> int:
    _same_length(x, y)
    return len(x) - lcs(x, y) - 1


def coverage_deletions(y: BitVec, z: BitVec, t: "CoverageBudget | int") -> tuple[int, ...] | None:
    """Two-pointer coverage scan.

    Returns the positions of z that were deleted (violations, then the
    unmatched tail) when some subsequence x of z with len(x) = len(y) has
    x <= y, otherwise None.
    """
    budget = _budget(t)
    ys, zs = y.tolist(), z.tolist()
    if len(zs) < len(ys):
        raise ContractViolation(f"z (len {len(zs)}) is shorter than y (len {len(ys)})")
    if len(zs) - len(ys) > budget:
        return None

    i = j = 0
    deleted = []
    while i < len(ys) and j < len(zs):
        if ys[i] >= zs[j]:
            i += 1
            j += 1
        else:
            deleted.append(j)
            j += 1
            budget -= 1
        if budget < 0:
            return None
    if i == len(ys):
        return tuple(deleted) + tuple(range(j, len(zs)))
    return None


def check_coverage(y: BitVec, z: BitVec, t: "CoverageBudget | int") -> bool:
    return coverage_deletions(y, z, t) is not None


def coverage_batch(Y: np.ndarray, Z: np.ndarray, t: int) -> np.ndarray:
    """The coverage scan run in lock-step over a batch.

    Y is (b, ly) or (1, ly), Z is (b, lz) or (1, lz); singleton batches are
    broadcast. Returns a boolean array of length b.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=np.uint8))
    Z = np.atleast_2d(np.asarray(Z, dtype=np.uint8))
    ly, lz = Y.shape[1], Z.shape[1]
    b = max(Y.shape[0], Z.shape[0])
    if lz < ly:
        raise ContractViolation(f"z (len {lz}) is shorter than y (len {ly})")
    if lz - ly > t:
        return np.zeros(b, dtype=bool)
    if ly == 0:
        return np.ones(b, dtype=bool)

    Y = np.broadcast_to(Y, (b, ly))
    Z = np.broadcast_to(Z, (b, lz))
    rows = np.arange(b)
    i = np.zeros(b, dtype=np.int64)
    budget = np.full(b, t, dtype=np.int64)
    alive = np.ones(b, dtype=bool)
    for j in range(lz):
        active = alive & (i < ly)
        if not active.any():
            break
        ok = Y[rows, np.minimum(i, ly - 1)] >= Z[:, j]
        i += active & ok
        budget -= active & ~ok
        alive &= budget >= 0
    return alive & (i == ly)


def adel_batch(X: np.ndarray, Y: np.ndarray, delta: int) -> np.ndarray:
    """True where deleting the same number (at most delta) of positions from
    x and from y leaves no 1-0 match, i.e. where adel_at_least fails.

    Alignment DP over (position in x, deletions in x, deletions in y); the
    position in y follows from those three. X and Y are (b, m) or (1, m).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.uint8))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.uint8))
    if X.shape[1] != Y.shape[1]:
        raise ContractViolation(f"vectors must have equal length ({X.shape[1]} != {Y.shape[1]})")
    m = X.shape[1]
    if not 0 <= delta <= m:
        raise ContractViolation(f"delta must lie in [0, {m}], got {delta}")
    b = max(X.shape[0], Y.shape[0])
    X = np.broadcast_to(X, (b, m))
    Y = np.broadcast_to(Y, (b, m))
    D = delta + 1

    R = np.zeros((b, D, D), dtype=bool)
    R[:, 0, 0] = True
    for i in range(m + 1):
        # deletions in y leave the x position unchanged
        for db in range(1, D):
            for da in range(D):
                if i - da + db - 1 < m:
                    R[:, da, db] |= R[:, da, db - 1]
        if i == m:
            break
        nxt = np.zeros_like(R)
        for da in range(D):
            for db in range(D):
                j = i - da + db
                if j < m:
                    nxt[:, da, db] |= R[:, da, db] & (X[:, i] <= Y[:, j])
                if da + 1 < D:
                    nxt[:, da + 1, db] |= R[:, da, db]
        R = nxt
    return np.diagonal(R, axis1=1, axis2=2).any(axis=1)


def deletion_ball(x: BitVec, d: int) -> dict[BitVec, tuple[int, ...]]:
    """Every distinct (len(x) - d)-subsequence of x, keyed to the
    lexicographically first deletion set producing it."""
    if not 0 <= d <= len(x):
        raise ContractViolation(f"cannot delete {d} symbols from length {len(x)}")
    ball: dict[BitVec, tuple[int, ...]] = {}
    for T in itertools.combinations(range(len(x)), d):
        ball.setdefault(delete_indices(x, T), T)
    return ball


def adel_witness(x: BitVec, y: BitVec, delta: int) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """First (T1, T2) with |T1| = |T2| = delta leaving no 1-0 match, or None.

    For a fixed x' the search for T2 uses x' <= y' <=> not-y' <= not-x', so
    it is one coverage scan of not-y against not-x'.
    """
    _same_length(x, y)
    if delta < 0 or delta > len(x):
        raise ContractViolation(f"delta must lie in [0, {len(x)}], got {delta}")
    not_y = complement(y)
    # ball keys come out in order of their first deletion set
    for xp, T1 in deletion_ball(x, delta).items():
        T2 = coverage_deletions(complement(xp), not_y, delta)
        if T2 is not None:
            return T1, T2
    return None


def adel_at_least(x: BitVec, y: BitVec, delta: int) -> bool:
    return adel_witness(x, y, delta) is None


def adel_distance(x: BitVec, y: BitVec) -> int | None:
    """Largest delta with adel_at_least holding for every smaller value;
    None when x <= y already holds with no deletions."""
    _same_length(x, y)
    if not adel_at_least(x, y, 0):
        return None
    d = 0
    while d < len(x) and adel_at_least(x, y, d + 1):
        d += 1
    return d
