"""Prime-field codes: Reed-Solomon codebooks, the l-infinity scaling
embedding, and deletion-correcting inner codes for the singleton decoder."""

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import galois
import numpy as np

from bitcore import BitVec
from errors import AmbiguousDecode, ContractViolation, DecodeFailure

log = logging.getLogger(__name__)

MAX_FIELD = 1 << 16
MAX_RECHECK_WORDS = 1 << 12

# Hamming(7,4) codewords indexed by the 4-bit message; the data sits in the top 4 bits.
HAMMING_74 = [0, 15, 19, 28, 37, 42, 54, 57, 70, 73, 85, 90, 99, 108, 112, 127]
_HAMMING_74_INV = {w: m for m, w in enumerate(HAMMING_74)}

Codeword = tuple[int, ...]


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not 2 <= self.p < MAX_FIELD or not galois.is_prime(self.p):
            raise ContractViolation(f"field modulus must be a prime below {MAX_FIELD}, got {self.p}")

    @cached_property
    def gf(self):
        return galois.GF(self.p)


def next_prime_above(v: int) -> int:
    return int(galois.next_prime(v))


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(1 for x, y in zip(a, b) if x != y)


def linf_gaps(a: Sequence[int], b: Sequence[int]) -> list[int]:
    return [abs(int(x) - int(y)) for x, y in zip(a, b)]


@dataclass(frozen=True)
class Codebook:
    q: int
    N: int
    words: tuple[Codeword, ...]
    min_hamming_distance: int | None = None
    linf_gap: int | None = None

    def __post_init__(self):
        words = tuple(tuple(int(s) for s in w) for w in self.words)
        for w in words:
            if len(w) != self.N:
                raise ContractViolation(f"codeword {w} does not have length {self.N}")
            if any(s < 0 or s >= self.q for s in w):
                raise ContractViolation(f"codeword {w} has a label outside [0, {self.q})")
        object.__setattr__(self, "words", words)

    def __len__(self):
        return len(self.words)

    def as_array(self) -> np.ndarray:
        return np.array(self.words, dtype=np.int64).reshape(len(self.words), self.N)

    def min_hamming(self) -> int:
        if len(self.words) > MAX_RECHECK_WORDS:
            raise ContractViolation(f"pairwise recheck limited to {MAX_RECHECK_WORDS} words")
        W = self.as_array()
        best = self.N
        for i in range(len(W) - 1):
            d = np.count_nonzero(W[i + 1:] != W[i], axis=1)
            best = min(best, int(d.min()))
        return best

    def to_text(self) -> str:
        lines = [f"{self.q} {self.N} {len(self.words)}"]
        lines.extend(" ".join(str(s) for s in w) for w in self.words)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Codebook":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ContractViolation("empty codebook text")
        q, N, count = (int(tok) for tok in lines[0].split())
        words = tuple(tuple(int(tok) for tok in ln.split()) for ln in lines[1:])
        if len(words) != count:
            raise ContractViolation(f"codebook header announces {count} words, found {len(words)}")
        book = cls(q=q, N=N, words=words)
        if len(words) > MAX_RECHECK_WORDS:
            return book
        return cls(q=q, N=N, words=words, min_hamming_distance=book.min_hamming())


def rs_codebook(field_: PrimeField, N: int, K: int) -> Codebook:
    """All p^K polynomials of degree < K evaluated at the points 0..N-1."""
    p = field_.p
    if not 1 <= K <= N:
        raise ContractViolation(f"need 1 <= K <= N, got K={K}, N={N}")
    if N > p:
        raise ContractViolation(f"Reed-Solomon length {N} exceeds field size {p}")
    GF = field_.gf
    points = GF(np.arange(N))
    words = []
    for coeffs in itertools.product(range(p), repeat=K):
        poly = galois.Poly(list(coeffs), field=GF, order="asc")
        words.append(tuple(int(v) for v in np.asarray(poly(points))))
    log.debug("rs_codebook p=%d N=%d K=%d -> %d words", p, N, K, len(words))
    return Codebook(q=p, N=N, words=tuple(words), min_hamming_distance=N - K + 1)


def linf_embed(C: Codebook, delta: int, target: PrimeField) -> Codebook:
    """Scale every label by delta so differing coordinates sit >= delta apart."""
    if delta < 1:
        raise ContractViolation(f"embedding gap must be >= 1, got {delta}")
    if target.p <= delta * C.q + 1:
        raise ContractViolation(
            f"target alphabet {target.p} must exceed delta*q + 1 = {delta * C.q + 1}")
    words = tuple(tuple(delta * s for s in w) for w in C.words)
    return Codebook(q=target.p, N=C.N, words=words,
                    min_hamming_distance=C.min_hamming_distance, linf_gap=delta)


def check_linf(C: Codebook, delta: int, d: int) -> bool:
    if d > C.N:
        raise ContractViolation(f"d={d} exceeds codeword length {C.N}")
    W = C.as_array()
    for i in range(len(W) - 1):
        far = np.count_nonzero(np.abs(W[i + 1:] - W[i]) >= delta, axis=1)
        if far.size and int(far.min()) < d:
            return False
    return True


# -----------------------------
# Deletion-correcting inner codes
# -----------------------------

def index_bits(i: int, K: int) -> tuple[int, ...]:
    if not 0 <= i < (1 << K):
        raise ContractViolation(f"index {i} does not fit in {K} bits")
    return tuple((i >> (K - 1 - b)) & 1 for b in range(K))


def bits_index(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


class DeletionCode(ABC):
    """Binary code correcting up to `radius` deletions.

    decode() raises DecodeFailure (or AmbiguousDecode) instead of guessing.
    """

    message_bits: int
    length: int
    radius: int
    min_hamming_distance: int

    @abstractmethod
    def encode(self, message: Sequence[int]) -> BitVec:
        ...

    @abstractmethod
    def decode(self, received: BitVec) -> tuple[int, ...]:
        ...

    @property
    def capacity(self) -> int:
        return 1 << self.message_bits

    def encode_index(self, i: int) -> BitVec:
        return self.encode(index_bits(i, self.message_bits))

    def decode_index(self, received: BitVec) -> int:
        return bits_index(self.decode(received))

    def describe(self) -> dict:
        return {
            "inner": type(self).__name__,
            "message_bits": self.message_bits,
            "length": self.length,
            "radius": self.radius,
            "min_hamming_distance": self.min_hamming_distance,
        }


@dataclass
class RepetitionDeletionCode(DeletionCode):
    """Outer distance map, then every bit repeated radius+1 times.

    Decoding rounds each observed run up to a multiple of radius+1 (the
    Greedy Complete rule) and reads one bit per block.
    """

    message_bits: int
    radius: int
    pre_distance: int = 1
    length: int = field(init=False)
    min_hamming_distance: int = field(init=False)

    def __post_init__(self):
        if self.message_bits < 1 or self.radius < 0:
            raise ContractViolation("need message_bits >= 1 and radius >= 0")
        if self.pre_distance not in (1, 2, 3):
            raise ContractViolation(f"supported outer distances are 1, 2, 3; got {self.pre_distance}")
        self.length = self.outer_length * (self.radius + 1)
        self.min_hamming_distance = self.pre_distance * (self.radius + 1)

    @property
    def outer_length(self) -> int:
        if self.pre_distance == 1:
            return self.message_bits
        if self.pre_distance == 2:
            return self.message_bits + 1
        return 7 * (-(-self.message_bits // 4))

    def _outer_encode(self, message: tuple[int, ...]) -> list[int]:
        if self.pre_distance == 1:
            return list(message)
        if self.pre_distance == 2:
            return list(message) + [sum(message) % 2]
        padded = list(message) + [0] * (-len(message) % 4)
        out = []
        for c in range(0, len(padded), 4):
            word = HAMMING_74[bits_index(padded[c:c + 4])]
            out.extend((word >> (6 - b)) & 1 for b in range(7))
        return out

    def _outer_decode(self, bits: list[int]) -> tuple[int, ...]:
        if self.pre_distance == 1:
            return tuple(bits)
        if self.pre_distance == 2:
            if sum(bits) % 2:
                raise DecodeFailure("parity check failed")
            return tuple(bits[:-1])
        message = []
        for c in range(0, len(bits), 7):
            word = bits_index(bits[c:c + 7])
            if word not in _HAMMING_74_INV:
                raise DecodeFailure(f"{word:07b} is not a Hamming(7,4) codeword")
            message.extend(index_bits(_HAMMING_74_INV[word], 4))
        if any(message[self.message_bits:]):
            raise DecodeFailure("nonzero padding in decoded message")
        return tuple(message[:self.message_bits])

    def encode(self, message: Sequence[int]) -> BitVec:
        message = tuple(int(b) for b in message)
        if len(message) != self.message_bits or any(b not in (0, 1) for b in message):
            raise ContractViolation(f"message must be {self.message_bits} bits")
        return BitVec(np.repeat(np.array(self._outer_encode(message), dtype=np.uint8), self.radius + 1))

    def decode(self, received: BitVec) -> tuple[int, ...]:
        from decoders import greedy_complete

        if not self.length - self.radius <= len(received) <= self.length:
            raise DecodeFailure(
                f"received length {len(received)} outside [{self.length - self.radius}, {self.length}]")
        rebuilt = greedy_complete(received, self.radius)
        if len(rebuilt) < self.length:
            raise DecodeFailure(f"run rounding produced {len(rebuilt)} < {self.length} bits")
        outer = rebuilt.bits[:self.length:self.radius + 1]
        return self._outer_decode([int(b) for b in outer])


def _is_subsequence(short: Sequence[int], long: Sequence[int]) -> bool:
    it = iter(long)
    return all(any(s == b for b in it) for s in short)


def bruteforce_subsequence_decode(codewords: Sequence[BitVec], received: BitVec, delta: int) -> int:
    """Index of the unique codeword c such that received, truncated to
    len(c) - delta, is a subsequence of c."""
    if not codewords:
        raise DecodeFailure("empty codebook")
    if len(received) < max(len(c) for c in codewords) - delta:
        raise ContractViolation("received word shorter than the deletion budget allows")
    r = received.tolist()
    hits = []
    for idx, c in enumerate(codewords):
        if _is_subsequence(r[:max(len(c) - delta, 0)], c.tolist()):
            hits.append(idx)
            if len(hits) > 1:
                raise AmbiguousDecode(f"received word fits codewords {hits}")
    if not hits:
        raise DecodeFailure("received word fits no codeword")
    return hits[0]


class CodebookSubsequenceCode(DeletionCode):
    """Decodes a base code by exhaustive subsequence search over its first
    `count` codewords."""

    def __init__(self, base: DeletionCode, count: int):
        if count > base.capacity:
            raise ContractViolation(f"base code has only {base.capacity} messages, need {count}")
        self.base = base
        self.message_bits = base.message_bits
        self.length = base.length
        self.radius = base.radius
        self.min_hamming_distance = base.min_hamming_distance
        self.codewords = [base.encode_index(i) for i in range(count)]

    def encode(self, message: Sequence[int]) -> BitVec:
        return self.base.encode(message)

    def decode(self, received: BitVec) -> tuple[int, ...]:
        idx = bruteforce_subsequence_decode(self.codewords, received, self.radius)
        return index_bits(idx, self.message_bits)


def repetition_deletion_code(message_bits: int, delta: int, pre_distance: int = 1) -> RepetitionDeletionCode:
    return RepetitionDeletionCode(message_bits=message_bits, radius=delta, pre_distance=pre_distance)
