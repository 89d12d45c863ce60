"""Builders for the four testing-matrix families.

Each builder returns a TestingScheme tagged with the metadata its decoder
needs. Builders are deterministic functions of (parameters, seed).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from bitcore import BitMatrix
from config import MAX_RESAMPLES, ExperimentConfig
from errors import ContractViolation
from gfcodes import (
    Codebook,
    CodebookSubsequenceCode,
    DeletionCode,
    PrimeField,
    RepetitionDeletionCode,
    check_linf,
    linf_embed,
    next_prime_above,
    rs_codebook,
)
from utils import sha256_bytes

log = logging.getLogger(__name__)


class SchemeKind(str, Enum):
    REPETITION = "repetition"
    BERNOULLI = "bernoulli"
    PADDED_KS = "padded-ks"
    SAFFRON = "saffron"


@dataclass(frozen=True)
class TestingScheme:
    __test__ = False

    matrix: BitMatrix
    kind: SchemeKind
    k: int
    delta: int
    aux: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.matrix.rows

    @property
    def n(self) -> int:
        return self.matrix.cols

    def has_distinct_columns(self) -> bool:
        return _distinct_columns(self.matrix.data)


def _distinct_columns(data: np.ndarray) -> bool:
    return np.unique(data.T, axis=0).shape[0] == data.shape[1]


def repetition_scheme(B: BitMatrix, k: int, delta: int) -> TestingScheme:
    """Repeat every row of the k-disjunct base B delta+1 times."""
    if delta < 0:
        raise ContractViolation(f"delta must be >= 0, got {delta}")
    A = np.repeat(B.data, delta + 1, axis=0)
    return TestingScheme(
        matrix=BitMatrix(A), kind=SchemeKind.REPETITION, k=k, delta=delta,
        aux={"base": B, "block": delta + 1},
    )


def bernoulli_rows(n: int, k: int, delta: int, c: float) -> int:
    return math.ceil(c * (k * k * math.log(n) + delta * k))


def bernoulli_scheme(n: int, k: int, delta: int, c: float, seed: int) -> TestingScheme:
    if k < 1 or n <= k:
        raise ContractViolation(f"need k >= 1 and n > k, got n={n}, k={k}")
    m = bernoulli_rows(n, k, delta, c)
    p = 1.0 / k

    for attempt in range(MAX_RESAMPLES + 1):
        rng = np.random.default_rng(seed + attempt)
        A = rng.random((m, n)) < p
        if p >= 1.0 or _distinct_columns(A):
            break
        log.info("bernoulli seed %d produced duplicate columns, redrawing", seed + attempt)
    else:
        log.warning("bernoulli: duplicate columns persist after %d redraws", MAX_RESAMPLES)
    if p >= 1.0:
        log.warning("bernoulli with k=1 is the all-ones matrix; columns cannot be distinct")

    return TestingScheme(
        matrix=BitMatrix(A), kind=SchemeKind.BERNOULLI, k=k, delta=delta,
        aux={"seed": seed, "seed_used": seed + attempt, "scale_c": c, "p": p, "resamples": attempt},
    )


def padded_k_max(N: int, d: int, delta: int, words: int) -> int:
    if N - d + delta <= 0:
        return max(words - 1, 0)
    if delta == 0:
        # plain Kautz-Singleton: k others may agree with a column in k*(N-d) < N places
        return (N - 1) // (N - d)
    return N // (N - d + delta)


def padded_ks_scheme(C: Codebook, delta: int, d: int | None = None, k: int | None = None) -> TestingScheme:
    """Kautz-Singleton map with delta zeros padded before every symbol.

    Symbol label i becomes a block of length q+delta holding one 1 at
    offset delta+i. Labels of distinct codewords must differ by more than
    delta in at least d coordinates, otherwise delta deletions can slide one
    column onto another.
    """
    d = C.min_hamming_distance if d is None else d
    if d is None:
        d = C.min_hamming()
    if not check_linf(C, delta + 1, d):
        raise ContractViolation(f"codebook lacks the ({delta + 1}, {d})-l_inf distance property")

    block = C.q + delta
    k_max = padded_k_max(C.N, d, delta, len(C))
    if k is not None and k > k_max:
        raise ContractViolation(f"k={k} exceeds k_max={k_max} for N={C.N}, d={d}, delta={delta}")

    A = np.zeros((C.N * block, len(C)), dtype=np.uint8)
    W = C.as_array()
    rows = np.arange(C.N) * block + delta + W
    A[rows, np.arange(len(C))[:, None]] = 1
    return TestingScheme(
        matrix=BitMatrix(A), kind=SchemeKind.PADDED_KS, k=k if k is not None else k_max, delta=delta,
        aux={"codebook": C, "q": C.q, "N": C.N, "d": d, "block": block, "k_max": k_max},
    )


def stack_signatures(graph: BitMatrix, U: BitMatrix) -> BitMatrix:
    """Block j, column i is U_i when right node j touches item i, else zero."""
    if graph.cols != U.cols:
        raise ContractViolation("graph and signature matrix disagree on the item count")
    M, n = graph.rows, graph.cols
    blocks = graph.data[:, None, :] & U.data[None, :, :]
    return BitMatrix(blocks.reshape(M * U.rows, n))


def saffron_right_nodes(n: int, k: int, alpha: float) -> int:
    return math.ceil(math.e * (k * k * math.log(n) + k * (1 + alpha) * math.log(k)))


def saffron_scheme(n: int, k: int, alpha: float, inner: DeletionCode, seed: int) -> TestingScheme:
    if inner.capacity < n:
        raise ContractViolation(f"inner code holds {inner.capacity} messages, need {n}")
    if inner.min_hamming_distance <= 3 * inner.radius:
        raise ContractViolation(
            f"inner distance {inner.min_hamming_distance} must exceed 3*delta = {3 * inner.radius}")

    M = saffron_right_nodes(n, k, alpha)
    rng = np.random.default_rng(seed)
    graph = (rng.random((M, n)) < 1.0 / k).astype(np.uint8)

    codewords = np.stack([inner.encode_index(i).bits for i in range(n)], axis=1)
    U = BitMatrix(np.concatenate([codewords, 1 - codewords], axis=0))
    A = stack_signatures(BitMatrix(graph), U)
    log.debug("saffron n=%d k=%d M=%d h=%d -> m=%d", n, k, M, U.rows, A.rows)
    return TestingScheme(
        matrix=A, kind=SchemeKind.SAFFRON, k=k, delta=inner.radius,
        aux={"graph": BitMatrix(graph), "signatures": U, "h": U.rows, "M": M,
             "inner": inner, "seed": seed, "alpha": alpha},
    )


# -----------------------------
# Build from configuration
# -----------------------------

def inner_code(n: int, delta: int, pre_distance: int, inner: str = "repetition") -> DeletionCode:
    bits = max(1, math.ceil(math.log2(n)))
    code = RepetitionDeletionCode(message_bits=bits, radius=delta, pre_distance=pre_distance)
    if inner == "subsequence":
        return CodebookSubsequenceCode(code, n)
    return code


def padded_ks_from_rs(p: int, N: int, K: int, delta: int, k: int | None = None,
                      target_p: int | None = None) -> TestingScheme:
    C = rs_codebook(PrimeField(p), N, K)
    if delta == 0:
        return padded_ks_scheme(C, 0, d=C.min_hamming_distance, k=k)
    gap = delta + 1
    target = target_p or next_prime_above(gap * C.q + 1)
    E = linf_embed(C, gap, PrimeField(target))
    return padded_ks_scheme(E, delta, d=C.min_hamming_distance, k=k)


def build_scheme(cfg: ExperimentConfig) -> TestingScheme:
    kind = SchemeKind(cfg.construction)
    if kind is SchemeKind.REPETITION:
        if cfg.base_matrix:
            B = BitMatrix.from_text(Path(cfg.base_matrix).read_text(encoding="utf-8"))
        else:
            B = BitMatrix.identity(cfg.n)
        return repetition_scheme(B, cfg.k, cfg.delta)
    if kind is SchemeKind.BERNOULLI:
        return bernoulli_scheme(cfg.n, cfg.k, cfg.delta, cfg.scale_c, cfg.seed)
    if kind is SchemeKind.PADDED_KS:
        scheme = padded_ks_from_rs(cfg.rs_p, cfg.rs_n, cfg.rs_k, cfg.delta, cfg.k, cfg.target_p)
        log.info("padded-ks item count is the codebook size %d", scheme.n)
        return scheme
    code = inner_code(cfg.n, cfg.delta, cfg.pre_distance, cfg.inner)
    return saffron_scheme(cfg.n, cfg.k, cfg.alpha, code, cfg.seed)


# -----------------------------
# Serialization: matrix text + key-value sidecar
# -----------------------------

def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta")


def _codebook_path(path: Path) -> Path:
    return path.with_name(path.name + ".codebook")


def scheme_metadata(scheme: TestingScheme) -> dict:
    meta = {
        "kind": scheme.kind.value,
        "n": scheme.n,
        "m": scheme.m,
        "k": scheme.k,
        "delta": scheme.delta,
        "matrix_sha256": sha256_bytes(scheme.matrix.to_text().encode("utf-8")),
    }
    aux = scheme.aux
    if scheme.kind is SchemeKind.REPETITION:
        meta["block"] = aux["block"]
    elif scheme.kind is SchemeKind.BERNOULLI:
        meta.update(seed=aux["seed"], seed_used=aux["seed_used"], scale_c=aux["scale_c"])
    elif scheme.kind is SchemeKind.PADDED_KS:
        meta.update(q=aux["q"], N=aux["N"], d=aux["d"], block=aux["block"], k_max=aux["k_max"])
    else:
        inner = aux["inner"]
        base = getattr(inner, "base", inner)
        meta.update(seed=aux["seed"], alpha=aux["alpha"], M=aux["M"], h=aux["h"],
                    inner="subsequence" if base is not inner else "repetition",
                    inner_bits=base.message_bits, inner_radius=base.radius,
                    inner_pre_distance=base.pre_distance)
    return meta


def save_scheme(scheme: TestingScheme, path: str | Path) -> dict[str, bytes]:
    """Write the scheme files and return them as {file name: bytes}."""
    path = Path(path)
    meta = scheme_metadata(scheme)
    files = {path.name: scheme.matrix.to_text().encode("utf-8")}
    if scheme.kind is SchemeKind.PADDED_KS:
        cb = _codebook_path(path)
        meta["codebook"] = cb.name
        files[cb.name] = scheme.aux["codebook"].to_text().encode("utf-8")
    files[_meta_path(path).name] = "".join(f"{k} = {v}\n" for k, v in meta.items()).encode("utf-8")
    for name, data in files.items():
        (path.parent / name).write_bytes(data)
    return files


def _read_meta(path: Path) -> dict:
    meta = {}
    for line in _meta_path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = (part.strip() for part in line.split("=", 1))
            meta[key] = value
    return meta


def load_scheme(path: str | Path) -> TestingScheme:
    path = Path(path)
    meta = _read_meta(path)
    text = path.read_text(encoding="utf-8")
    if sha256_bytes(text.encode("utf-8")) != meta.get("matrix_sha256"):
        raise ContractViolation(f"{path}: matrix hash does not match its metadata")
    A = BitMatrix.from_text(text)
    kind = SchemeKind(meta["kind"])
    k, delta = int(meta["k"]), int(meta["delta"])

    if kind is SchemeKind.REPETITION:
        block = int(meta["block"])
        base = BitMatrix(A.data[::block])
        return TestingScheme(A, kind, k, delta, aux={"base": base, "block": block})
    if kind is SchemeKind.BERNOULLI:
        return TestingScheme(A, kind, k, delta, aux={
            "seed": int(meta["seed"]), "seed_used": int(meta["seed_used"]),
            "scale_c": float(meta["scale_c"]), "p": 1.0 / k})
    if kind is SchemeKind.PADDED_KS:
        C = Codebook.from_text((path.parent / meta["codebook"]).read_text(encoding="utf-8"))
        scheme = padded_ks_scheme(C, delta, d=int(meta["d"]), k=k)
    else:
        code = RepetitionDeletionCode(message_bits=int(meta["inner_bits"]),
                                      radius=int(meta["inner_radius"]),
                                      pre_distance=int(meta["inner_pre_distance"]))
        if meta["inner"] == "subsequence":
            code = CodebookSubsequenceCode(code, int(meta["n"]))
        scheme = saffron_scheme(int(meta["n"]), k, float(meta["alpha"]), code, int(meta["seed"]))
    if scheme.matrix != A:
        raise ContractViolation(f"{path}: rebuilt {kind.value} scheme differs from the stored matrix")
    return scheme
