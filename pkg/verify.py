"""Brute-force certification of the combinatorial matrix properties.

Every check enumerates its whole search space (bounded by `cap`) and, when
the property fails, returns the lexicographically first counterexample so
results do not depend on evaluation order. Witnesses can be re-checked
independently with recheck_witness().
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from bitcore import BitMatrix, BitVec, covers, delete_indices, or_columns, weight
from config import ENUMERATION_CAP
from distances import adel_batch, adel_witness, deletion_distance, lcs
from errors import ContractViolation
from utils import check_cap, subsets_up_to

log = logging.getLogger(__name__)

PROPERTIES = ("disjunct", "separable", "del-separable", "del-disjunct", "column-weights")

# Bound on the subset count handed to one adel_batch call.
BATCH_ROWS = 1 << 16


@dataclass(frozen=True)
class PropertyReport:
    name: str
    k: int
    delta: int
    holds: bool
    witness: dict | None = None
    work: int = 0

    def to_lines(self) -> list[str]:
        lines = [
            f"property = {self.name}",
            f"k = {self.k}",
            f"delta = {self.delta}",
            f"holds = {str(self.holds).lower()}",
            f"work = {self.work}",
        ]
        for key, value in (self.witness or {}).items():
            if isinstance(value, (tuple, list)):
                value = " ".join(str(v) for v in value)
            lines.append(f"witness.{key} = {value}")
        return lines


def _others_size(n: int, k: int) -> int:
    return min(k, max(n - 1, 0))


def is_disjunct(B: BitMatrix, k: int, cap: int = ENUMERATION_CAP) -> PropertyReport:
    """No column is covered by the OR of k others (all others when n-1 < k)."""
    n = B.cols
    size = _others_size(n, k)
    work = check_cap("disjunct check", n * math.comb(max(n - 1, 0), size), cap)
    data = B.data.astype(bool)

    for i0 in range(n):
        others = [j for j in range(n) if j != i0]
        combos = np.array(list(itertools.combinations(others, size)), dtype=np.int64)
        if combos.shape[0] == 0:
            continue
        unions = data[:, combos].any(axis=2)
        covered = (data[:, [i0]] <= unions).all(axis=0)
        if covered.any():
            S = tuple(int(j) for j in combos[int(np.argmax(covered))])
            return PropertyReport("disjunct", k, 0, False, {"column": i0, "others": S}, work)
    return PropertyReport("disjunct", k, 0, True, None, work)


def _subset_unions(A: BitMatrix, k: int):
    for size in range(min(k, A.cols) + 1):
        for S in itertools.combinations(range(A.cols), size):
            yield S, or_columns(A, S)


def is_separable(B: BitMatrix, k: int, cap: int = ENUMERATION_CAP) -> PropertyReport:
    work = check_cap("separable check", subsets_up_to(B.cols, k), cap)
    seen: dict[BitVec, tuple[int, ...]] = {}
    for S, union in _subset_unions(B, k):
        if union in seen:
            return PropertyReport("separable", k, 0, False, {"S1": seen[union], "S2": S}, work)
        seen[union] = S
    return PropertyReport("separable", k, 0, True, None, work)


def is_deletion_separable(A: BitMatrix, k: int, delta: int, cap: int = ENUMERATION_CAP) -> PropertyReport:
    """Every pair of distinct subset unions sits at deletion distance >= delta.

    delta = 0 means plain separability.
    """
    if delta < 0:
        raise ContractViolation(f"delta must be >= 0, got {delta}")
    if delta == 0:
        r = is_separable(A, k, cap)
        return PropertyReport("del-separable", k, 0, r.holds, r.witness, r.work)

    count = subsets_up_to(A.cols, k)
    work = check_cap("deletion-separable check", count * (count - 1) // 2, cap)
    unions = list(_subset_unions(A, k))
    limit = A.rows - delta - 1
    for (S1, u1), (S2, u2) in itertools.combinations(unions, 2):
        if lcs(u1, u2) > limit:
            return PropertyReport("del-separable", k, delta, False,
                                  {"S1": S1, "S2": S2, "distance": deletion_distance(u1, u2)}, work)
    return PropertyReport("del-separable", k, delta, True, None, work)


def is_deletion_disjunct(A: BitMatrix, k: int, delta: int, cap: int = ENUMERATION_CAP) -> PropertyReport:
    """adel(A_i0, OR of k others) >= delta for every column and k others."""
    m, n = A.rows, A.cols
    if not 0 <= delta <= m:
        raise ContractViolation(f"delta must lie in [0, {m}], got {delta}")
    size = _others_size(n, k)
    work = check_cap("deletion-disjunct check",
                     n * math.comb(max(n - 1, 0), size) * math.comb(m, delta), cap)
    data = A.data.astype(bool)

    for i0 in range(n):
        others = [j for j in range(n) if j != i0]
        combos = list(itertools.combinations(others, size))
        combos = np.array(combos, dtype=np.int64).reshape(len(combos), size)
        for start in range(0, len(combos), BATCH_ROWS):
            chunk = combos[start:start + BATCH_ROWS]
            unions = data[:, chunk].any(axis=2).T
            hit = adel_batch(A.data[:, i0], unions, delta)
            if hit.any():
                S = tuple(int(j) for j in chunk[int(np.argmax(hit))])
                T1, T2 = adel_witness(A.column(i0), or_columns(A, S), delta)
                witness = {"column": i0, "others": S, "T1": T1, "T2": T2}
                return PropertyReport("del-disjunct", k, delta, False, witness, work)
    return PropertyReport("del-disjunct", k, delta, True, None, work)


def column_weights_ok(A: BitMatrix, delta: int) -> PropertyReport:
    weights = A.data.sum(axis=0, dtype=np.int64)
    light = np.flatnonzero(weights <= delta)
    if light.size:
        i = int(light[0])
        return PropertyReport("column-weights", 0, delta, False, {"column": i, "weight": int(weights[i])}, A.cols)
    return PropertyReport("column-weights", 0, delta, True, None, A.cols)


def check_property(name: str, A: BitMatrix, k: int, delta: int, cap: int = ENUMERATION_CAP) -> PropertyReport:
    if name == "disjunct":
        return is_disjunct(A, k, cap)
    if name == "separable":
        return is_separable(A, k, cap)
    if name == "del-separable":
        return is_deletion_separable(A, k, delta, cap)
    if name == "del-disjunct":
        return is_deletion_disjunct(A, k, delta, cap)
    if name == "column-weights":
        return column_weights_ok(A, delta)
    raise ContractViolation(f"unknown property {name!r}; choose from {', '.join(PROPERTIES)}")


def recheck_witness(report: PropertyReport, A: BitMatrix) -> bool:
    if report.holds:
        return report.witness is None
    w = report.witness or {}
    if report.name == "disjunct":
        return covers(A.column(w["column"]), or_columns(A, w["others"]))
    if report.name in ("separable", "del-separable"):
        if tuple(w["S1"]) == tuple(w["S2"]):
            return False
        u1, u2 = or_columns(A, w["S1"]), or_columns(A, w["S2"])
        if report.delta == 0:
            return u1 == u2
        return deletion_distance(u1, u2) < report.delta
    if report.name == "del-disjunct":
        T1, T2 = tuple(w["T1"]), tuple(w["T2"])
        if len(T1) != report.delta or len(T2) != report.delta or w["column"] in w["others"]:
            return False
        xp = delete_indices(A.column(w["column"]), T1)
        yp = delete_indices(or_columns(A, w["others"]), T2)
        return covers(xp, yp)
    if report.name == "column-weights":
        return weight(A.column(w["column"])) <= report.delta
    raise ContractViolation(f"unknown property {report.name!r}")
