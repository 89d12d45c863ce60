"""Test outcomes and the adversarial deletion channel."""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Iterator

import numpy as np

from bitcore import BitVec, DefectiveSet, delete_indices, or_columns
from config import ADVERSARY_CAP
from constructions import TestingScheme
from errors import ContractViolation
from utils import check_cap

log = logging.getLogger(__name__)


class Strategy(str, Enum):
    RANDOM = "random"
    PREFIX = "prefix"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class CorruptionTrace:
    deleted: tuple[int, ...]
    budget: int

    def __post_init__(self):
        deleted = tuple(int(i) for i in self.deleted)
        if any(b <= a for a, b in zip(deleted, deleted[1:])):
            raise ContractViolation(f"deleted indices must be strictly increasing: {deleted}")
        if deleted and deleted[0] < 0:
            raise ContractViolation("deleted indices must be non-negative")
        if len(deleted) > self.budget:
            raise ContractViolation(f"{len(deleted)} deletions exceed the budget {self.budget}")
        object.__setattr__(self, "deleted", deleted)

    def check_length(self, m: int):
        if self.deleted and self.deleted[-1] >= m:
            raise ContractViolation(f"deleted index {self.deleted[-1]} out of range for length {m}")

    def to_line(self) -> str:
        return " ".join(str(i) for i in self.deleted)

    @classmethod
    def from_line(cls, line: str, budget: int) -> "CorruptionTrace":
        return cls(tuple(int(tok) for tok in line.split()), budget)


def run_tests(scheme: TestingScheme, x: DefectiveSet | Iterable[int]) -> BitVec:
    items = tuple(x)
    if len(items) > scheme.k:
        raise ContractViolation(f"{len(items)} defectives exceed the sparsity k={scheme.k}")
    return or_columns(scheme.matrix, items)


def corrupt(y: BitVec, trace: CorruptionTrace) -> BitVec:
    trace.check_length(len(y))
    return delete_indices(y, trace.deleted)


def all_traces(m: int, delta: int) -> Iterator[CorruptionTrace]:
    """Every deletion set of size 0..delta; smaller sets first, each size in
    lexicographic order."""
    for size in range(min(delta, m) + 1):
        for T in itertools.combinations(range(m), size):
            yield CorruptionTrace(T, delta)


def sample_defectives(n: int, k: int, rng: np.random.Generator, exact: bool = False) -> DefectiveSet:
    """Uniform over all subsets of size <= k, or over subsets of size exactly k."""
    k = min(k, n)
    if exact:
        size = k
    else:
        # log C(n, s); the binomials themselves overflow a float for large n
        log_w = np.array([math.lgamma(n + 1) - math.lgamma(s + 1) - math.lgamma(n - s + 1)
                          for s in range(k + 1)])
        w = np.exp(log_w - log_w.max())
        size = int(rng.choice(k + 1, p=w / w.sum()))
    return DefectiveSet(tuple(int(i) for i in rng.choice(n, size=size, replace=False)), n)


@dataclass(frozen=True)
class AdversaryContext:
    # decode maps a received vector to a result exposing matches(truth)
    decode: Callable[[BitVec], object]
    truth: DefectiveSet

    def fails(self, received: BitVec) -> bool:
        return not self.decode(received).matches(self.truth)


def adversary(
    strategy: Strategy | str,
    y: BitVec,
    delta: int,
    context: AdversaryContext | None = None,
    seed: int = 0,
    cap: int = ADVERSARY_CAP,
) -> CorruptionTrace:
    strategy = Strategy(strategy)
    m = len(y)
    if not 0 <= delta <= m:
        raise ContractViolation(f"cannot delete {delta} of {m} outcomes")

    if strategy is Strategy.PREFIX:
        return CorruptionTrace(tuple(range(delta)), delta)
    if strategy is Strategy.RANDOM:
        rng = np.random.default_rng(seed)
        return CorruptionTrace(tuple(sorted(int(i) for i in rng.choice(m, size=delta, replace=False))), delta)

    if context is None:
        raise ContractViolation("the exhaustive adversary needs a decoder context")
    check_cap("exhaustive adversary", math.comb(m, delta), cap)
    first = None
    for T in itertools.combinations(range(m), delta):
        trace = CorruptionTrace(T, delta)
        if first is None:
            first = trace
        if context.fails(corrupt(y, trace)):
            log.info("exhaustive adversary found failing trace %s", trace.to_line())
            return trace
    return first
