"""Binary vector / matrix primitives shared by every other module.

Indices are 0-based throughout. All types are immutable: the backing numpy
arrays are copied on construction and marked read-only, so values can be
shared freely between workers.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from errors import ContractViolation


def _readonly(values, ndim: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == np.bool_ or arr.dtype == np.uint8:
        arr = arr.astype(np.uint8, copy=True)
        bad = arr.size and int(arr.max()) > 1
    else:
        wide = np.array(values, dtype=np.int64)
        bad = wide.size and (int(wide.min()) < 0 or int(wide.max()) > 1)
        arr = wide.astype(np.uint8)
    if arr.ndim != ndim:
        raise ContractViolation(f"expected {ndim}-d bit data, got shape {arr.shape}")
    if bad:
        raise ContractViolation("bit data must only hold 0 and 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BitVec:
    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _readonly(self.bits, 1))

    @classmethod
    def of(cls, values: Iterable[int]) -> "BitVec":
        return cls(np.fromiter((int(v) for v in values), dtype=np.int64))

    @classmethod
    def zeros(cls, length: int) -> "BitVec":
        return cls(np.zeros(length, dtype=np.uint8))

    @classmethod
    def ones(cls, length: int) -> "BitVec":
        return cls(np.ones(length, dtype=np.uint8))

    @classmethod
    def from_string(cls, text: str) -> "BitVec":
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ContractViolation(f"vector text must be 0/1 characters: {text!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    def to_string(self) -> str:
        return (self.bits + ord("0")).tobytes().decode("ascii")

    @property
    def length(self) -> int:
        return int(self.bits.shape[0])

    def tolist(self) -> list[int]:
        return [int(b) for b in self.bits]

    def __len__(self):
        return self.length

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitVec(self.bits[idx])
        return int(self.bits[idx])

    def __iter__(self):
        return iter(self.tolist())

    def __eq__(self, other):
        if not isinstance(other, BitVec):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.length, self.bits.tobytes()))

    def __or__(self, other: "BitVec") -> "BitVec":
        if len(other) != len(self):
            raise ContractViolation("OR of vectors with unequal lengths")
        return BitVec(self.bits | other.bits)

    def __invert__(self) -> "BitVec":
        return complement(self)

    def __repr__(self):
        return f"BitVec('{self.to_string()}')"


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """m x n binary matrix; a row is a pooled test, a column an item signature."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _readonly(self.data, 2))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "BitMatrix":
        if not rows:
            return cls(np.zeros((0, cols or 0), dtype=np.uint8))
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ContractViolation("all rows must have identical length")
        return cls(np.array(rows, dtype=np.uint8))

    @classmethod
    def from_columns(cls, columns: Sequence[BitVec], rows: int = 0) -> "BitMatrix":
        if not columns:
            return cls(np.zeros((rows, 0), dtype=np.uint8))
        if len({len(c) for c in columns}) != 1:
            raise ContractViolation("all columns must have identical length")
        return cls(np.stack([c.bits for c in columns], axis=1))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    def column(self, i: int) -> BitVec:
        if not 0 <= i < self.cols:
            raise ContractViolation(f"column {i} out of range [0, {self.cols})")
        return BitVec(self.data[:, i])

    def row(self, r: int) -> BitVec:
        if not 0 <= r < self.rows:
            raise ContractViolation(f"row {r} out of range [0, {self.rows})")
        return BitVec(self.data[r, :])

    def columns(self) -> list[BitVec]:
        return [self.column(i) for i in range(self.cols)]

    def delete_rows(self, T: Iterable[int]) -> "BitMatrix":
        idx = _index_set(T, self.rows)
        if not idx:
            return self
        return BitMatrix(np.delete(self.data, sorted(idx), axis=0))

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines.extend((r + ord("0")).tobytes().decode("ascii") for r in self.data)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = text.splitlines()
        if not lines:
            raise ContractViolation("empty matrix text")
        try:
            m, n = (int(tok) for tok in lines[0].split())
        except ValueError as e:
            raise ContractViolation(f"bad matrix header {lines[0]!r}") from e
        body = lines[1:1 + m]
        if len(body) != m or any(len(r) != n for r in body):
            raise ContractViolation(f"matrix body does not match header {m}x{n}")
        return cls.from_rows([BitVec.from_string(r).tolist() for r in body], cols=n)

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class DefectiveSet:
    indices: tuple[int, ...]
    universe: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise ContractViolation(f"duplicate defective indices {idx}")
        if any(i < 0 or i >= self.universe for i in idx):
            raise ContractViolation(f"defective index outside [0, {self.universe})")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    @classmethod
    def of(cls, indices: Iterable[int], universe: int) -> "DefectiveSet":
        return cls(tuple(indices), universe)

    @classmethod
    def full(cls, universe: int) -> "DefectiveSet":
        return cls(tuple(range(universe)), universe)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def issuperset(self, other: "DefectiveSet") -> bool:
        return set(self.indices) >= set(other.indices)


def _index_set(T: Iterable[int], length: int) -> set[int]:
    idx = {int(t) for t in T}
    bad = [t for t in idx if t < 0 or t >= length]
    if bad:
        raise ContractViolation(f"indices {sorted(bad)} out of range [0, {length})")
    return idx


def or_columns(A: BitMatrix, S: DefectiveSet | Iterable[int]) -> BitVec:
    idx = list(S)
    bad = [i for i in idx if i < 0 or i >= A.cols]
    if bad:
        raise ContractViolation(f"items {bad} out of range for {A.cols} columns")
    if not idx:
        return BitVec.zeros(A.rows)
    return BitVec(A.data[:, idx].any(axis=1))


def delete_indices(v: BitVec, T: Iterable[int]) -> BitVec:
    idx = _index_set(T, len(v))
    if not idx:
        return v
    return BitVec(np.delete(v.bits, sorted(idx)))


def weight(v: BitVec) -> int:
    return int(np.count_nonzero(v.bits))


def runs(v: BitVec) -> list[tuple[int, int]]:
    if len(v) == 0:
        return []
    starts = np.concatenate(([0], np.flatnonzero(np.diff(v.bits)) + 1))
    lengths = np.diff(np.concatenate((starts, [len(v)])))
    return [(int(v.bits[s]), int(n)) for s, n in zip(starts, lengths)]


def expand_runs(run_list: Iterable[tuple[int, int]]) -> BitVec:
    run_list = list(run_list)
    if not run_list:
        return BitVec.zeros(0)
    symbols, lengths = zip(*run_list)
    return BitVec(np.repeat(np.array(symbols, dtype=np.uint8), lengths))


def complement(v: BitVec) -> BitVec:
    return BitVec(1 - v.bits)


def covers(x: BitVec, y: BitVec) -> bool:
    """True iff x <= y elementwise, i.e. there is no 1-0 match between x and y."""
    if len(x) != len(y):
        raise ContractViolation("coverage compares vectors of equal length")
    return not bool(np.any(x.bits > y.bits))
