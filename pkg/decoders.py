"""Recovery algorithms, each paired with the scheme kind it serves.

All decoders accept any received length in [m - delta, m]. Lengths outside
that window mean the deletion budget was exceeded and yield a Failed result
instead of an exception.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

import numpy as np

from bitcore import BitMatrix, BitVec, DefectiveSet, expand_runs, runs
from config import ENUMERATION_CAP
from constructions import SchemeKind, TestingScheme
from distances import coverage_batch, deletion_ball
from errors import AmbiguousDecode, ContractViolation, DecodeFailure
from utils import check_cap

log = logging.getLogger(__name__)


class Status(str, Enum):
    EXACT = "Exact"
    FAILED = "Failed"
    AMBIGUOUS = "Ambiguous"


@dataclass(frozen=True)
class DecodeResult:
    recovered: DefectiveSet
    status: Status
    diagnostics: dict = field(default_factory=dict)

    def matches(self, truth: DefectiveSet | Iterable[int]) -> bool:
        return self.recovered.indices == tuple(sorted(truth))

    def to_line(self) -> str:
        return " ".join([self.status.value, *(str(i) for i in self.recovered)])

    @classmethod
    def from_line(cls, line: str, universe: int) -> "DecodeResult":
        status, *items = line.split()
        return cls(DefectiveSet(tuple(int(i) for i in items), universe), Status(status))


def _failed(n: int, reason: str, **diagnostics) -> DecodeResult:
    log.debug("decode failed: %s", reason)
    return DecodeResult(DefectiveSet((), n), Status.FAILED, {"reason": reason, **diagnostics})


def _length_ok(received: BitVec, m: int, delta: int) -> bool:
    return m - delta <= len(received) <= m


def disjunct_decode(B: BitMatrix, y: BitVec) -> DefectiveSet:
    """Start from every item and drop those that appear in a negative test."""
    if len(y) != B.rows:
        raise ContractViolation(f"outcome length {len(y)} != test count {B.rows}")
    negative = B.data[y.bits == 0]
    keep = ~negative.any(axis=0)
    return DefectiveSet(tuple(int(i) for i in np.flatnonzero(keep)), B.cols)


def greedy_complete(received: BitVec, delta: int) -> BitVec:
    """Round every run up to the next multiple of delta+1."""
    if delta < 0:
        raise ContractViolation(f"delta must be >= 0, got {delta}")
    block = delta + 1
    return expand_runs((b, -(-length // block) * block) for b, length in runs(received))


def repetition_decode(scheme: TestingScheme, received: BitVec, delta: int | None = None) -> DecodeResult:
    if scheme.kind is not SchemeKind.REPETITION:
        raise ContractViolation(f"repetition_decode needs a repetition scheme, got {scheme.kind.value}")
    delta = scheme.delta if delta is None else delta
    m, n, block = scheme.m, scheme.n, scheme.aux["block"]
    if not _length_ok(received, m, delta):
        return _failed(n, f"received length {len(received)} outside [{m - delta}, {m}]")

    rebuilt = greedy_complete(received, block - 1)
    if len(rebuilt) != m:
        return _failed(n, f"run rounding rebuilt {len(rebuilt)} outcomes, expected {m}")
    base_outcome = BitVec(rebuilt.bits[::block])
    return DecodeResult(disjunct_decode(scheme.aux["base"], base_outcome), Status.EXACT,
                        {"rebuilt_length": len(rebuilt)})


def bruteforce_dd_decode(A: BitMatrix, received: BitVec, delta: int, cap: int = ENUMERATION_CAP) -> DecodeResult:
    """Keep item j iff some deletion pattern of column j leaves no 1-0 match
    against the received outcomes.

    The pattern size is the actual deletion count m - len(received).
    """
    m, n = A.rows, A.cols
    if not _length_ok(received, m, delta):
        return _failed(n, f"received length {len(received)} outside [{m - delta}, {m}]")
    d = m - len(received)
    work = check_cap("bruteforce decode", n * math.comb(m, d), cap)

    kept = []
    for j in range(n):
        subseqs = deletion_ball(A.column(j), d)
        ball = np.array([v.bits for v in subseqs], dtype=np.uint8).reshape(len(subseqs), m - d)
        if (ball <= received.bits).all(axis=1).any():
            kept.append(j)
    return DecodeResult(DefectiveSet(tuple(kept), n), Status.EXACT, {"subsequences": work})


def coverage_decode(A: BitMatrix, received: BitVec, delta: int) -> DecodeResult:
    """Keep item j iff the coverage check of the received outcomes against
    column j passes with budget delta. Runs over all columns at once."""
    m, n = A.rows, A.cols
    if not _length_ok(received, m, delta):
        return _failed(n, f"received length {len(received)} outside [{m - delta}, {m}]")
    keep = coverage_batch(received.bits[None, :], A.data.T, delta)
    return DecodeResult(DefectiveSet(tuple(int(i) for i in np.flatnonzero(keep)), n), Status.EXACT,
                        {"coverage_calls": n})


def singleton_decode(scheme: TestingScheme, received: BitVec, delta: int | None = None,
                     prefix: str = "proof") -> DecodeResult:
    """Decode every block whose weight looks like a single signature.

    A block from a right node with exactly one defective neighbour keeps
    between h/2 - delta and h/2 + delta ones after at most delta deletions.
    Blocks outside that window are rejected. The inner decoder reads the
    first h/2 - delta bits ("proof") or the first h/2 bits ("half").
    """
    if scheme.kind is not SchemeKind.SAFFRON:
        raise ContractViolation(f"singleton_decode needs a saffron scheme, got {scheme.kind.value}")
    if prefix not in ("proof", "half"):
        raise ContractViolation(f"unknown prefix variant {prefix!r}")
    inner = scheme.aux["inner"]
    delta = scheme.delta if delta is None else delta
    if inner.min_hamming_distance <= 3 * delta:
        raise ContractViolation(
            f"inner distance {inner.min_hamming_distance} must exceed 3*delta = {3 * delta}")

    m, n, M, h = scheme.m, scheme.n, scheme.aux["M"], scheme.aux["h"]
    if not _length_ok(received, m, delta):
        return _failed(n, f"received length {len(received)} outside [{m - delta}, {m}]")

    half = h // 2
    width = half - delta if prefix == "proof" else half
    padded = np.zeros(m, dtype=np.uint8)
    padded[:len(received)] = received.bits
    blocks = padded.reshape(M, h)
    weights = blocks.sum(axis=1, dtype=np.int64)

    diag = dict(blocks_accepted=0, blocks_skipped_zero=0, blocks_rejected_weight=0,
                blocks_ambiguous=0, blocks_failed=0)
    accepted = []
    found = set()
    for j in range(M):
        w = int(weights[j])
        if w == 0:
            diag["blocks_skipped_zero"] += 1
            continue
        if not half - delta <= w <= half + delta:
            diag["blocks_rejected_weight"] += 1
            continue
        accepted.append(j)
        diag["blocks_accepted"] += 1
        try:
            item = inner.decode_index(BitVec(blocks[j, :width]))
        except AmbiguousDecode:
            diag["blocks_ambiguous"] += 1
            log.debug("block %d: ambiguous inner decode", j)
            continue
        except DecodeFailure as e:
            diag["blocks_failed"] += 1
            log.debug("block %d: %s", j, e)
            continue
        if item >= n:
            diag["blocks_failed"] += 1
            log.debug("block %d decoded to item %d outside the universe", j, item)
            continue
        found.add(item)

    diag["accepted_blocks"] = tuple(accepted)
    if not found:
        return DecodeResult(DefectiveSet((), n), Status.FAILED, diag)
    return DecodeResult(DefectiveSet(tuple(found), n), Status.EXACT, diag)


def decode(scheme: TestingScheme, received: BitVec, name: str, delta: int | None = None,
           cap: int = ENUMERATION_CAP, prefix: str = "proof") -> DecodeResult:
    delta = scheme.delta if delta is None else delta
    start = time.perf_counter_ns()
    result = _dispatch(scheme, received, name, delta, cap, prefix)
    elapsed = (time.perf_counter_ns() - start) // 1000
    return replace(result, diagnostics={**result.diagnostics, "runtime_us": elapsed})


def _dispatch(scheme: TestingScheme, received: BitVec, name: str, delta: int, cap: int,
              prefix: str) -> DecodeResult:
    if name == "disjunct":
        if len(received) != scheme.m:
            return _failed(scheme.n, "noiseless decoder received a shortened outcome")
        return DecodeResult(disjunct_decode(scheme.matrix, received), Status.EXACT)
    if name == "repetition":
        return repetition_decode(scheme, received, delta)
    if name == "bruteforce":
        return bruteforce_dd_decode(scheme.matrix, received, delta, cap)
    if name == "coverage":
        return coverage_decode(scheme.matrix, received, delta)
    if name == "singleton":
        return singleton_decode(scheme, received, delta, prefix)
    raise ContractViolation(f"unknown decoder {name!r}")
