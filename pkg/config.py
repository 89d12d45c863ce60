from dataclasses import dataclass, fields, replace
from pathlib import Path

from errors import ConfigError

# Enumeration and experiment configuration (safe defaults)
ENUMERATION_CAP = 10**6     # brute-force subset evaluations in verify / bruteforce decoding
ADVERSARY_CAP = 10**6       # deletion sets tried by the exhaustive adversary
DEFAULT_SCALE_C = 3.0
DEFAULT_ALPHA = 1.0
DEFAULT_SEED = 0
MAX_RESAMPLES = 64          # bernoulli redraws when columns collide
RNG_NAME = "numpy.random.PCG64"

CSV_COLUMNS = [
    "construction", "n", "m", "k", "delta", "trial", "seed",
    "adversary", "decoder", "success", "time_us",
]

CONSTRUCTIONS = ("repetition", "bernoulli", "padded-ks", "saffron")
ADVERSARIES = ("random", "prefix", "exhaustive")
DECODERS = ("disjunct", "repetition", "bruteforce", "coverage", "singleton")

COMPATIBLE_DECODERS = {
    "repetition": {"repetition", "coverage", "bruteforce", "disjunct"},
    "bernoulli": {"coverage", "bruteforce", "disjunct"},
    "padded-ks": {"coverage", "bruteforce", "disjunct"},
    "saffron": {"singleton", "coverage", "bruteforce", "disjunct"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    construction: str = "bernoulli"
    n: int = 12
    k: int = 2
    delta: int = 2
    scale_c: float = DEFAULT_SCALE_C
    alpha: float = DEFAULT_ALPHA
    base_matrix: str | None = None
    rs_p: int = 5
    rs_n: int = 4
    rs_k: int = 2
    target_p: int | None = None
    inner: str = "repetition"
    pre_distance: int = 3
    prefix: str = "proof"
    adversary: str = "random"
    decoder: str = "coverage"
    trials: int = 10
    seed: int = DEFAULT_SEED
    out: str | None = None
    cap: int = ENUMERATION_CAP
    record_timing: bool = True
    scheme: str | None = None


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key: str, raw):
    kind = _FIELD_TYPES[key]
    if raw is None or not isinstance(raw, str):
        return raw
    text = raw.strip()
    if "None" in str(kind) and text.lower() in ("", "none"):
        return None
    try:
        if kind is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int or kind == (int | None):
            return int(text)
        if kind is float:
            return float(text)
    except ValueError as e:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from e
    return text


def load_config_file(path: str | Path) -> dict:
    """Parse a flat `key = value` document; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


def merge_config(file_values: dict | None, flag_values: dict | None) -> ExperimentConfig:
    """Defaults, then the config file, then explicit flags (None = not given)."""
    merged = dict(file_values or {})
    for key, value in (flag_values or {}).items():
        if value is not None and key in _FIELD_TYPES:
            merged[key] = _coerce(key, value)
    return validate(replace(ExperimentConfig(), **merged))


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.construction not in CONSTRUCTIONS:
        raise ConfigError(f"unknown construction {cfg.construction!r}")
    if cfg.decoder not in DECODERS:
        raise ConfigError(f"unknown decoder {cfg.decoder!r}")
    if cfg.adversary not in ADVERSARIES:
        raise ConfigError(f"unknown adversary {cfg.adversary!r}")
    if cfg.decoder not in COMPATIBLE_DECODERS[cfg.construction]:
        raise ConfigError(f"decoder {cfg.decoder!r} cannot decode a {cfg.construction} scheme")
    if cfg.n < 1 or cfg.k < 1:
        raise ConfigError("n and k must be positive")
    if cfg.delta < 0 or cfg.trials < 0:
        raise ConfigError("delta and trials must be non-negative")
    if cfg.scale_c <= 0 or cfg.alpha < 0 or cfg.cap < 1:
        raise ConfigError("scale_c must be positive, alpha non-negative, cap >= 1")
    if cfg.inner not in ("repetition", "subsequence"):
        raise ConfigError(f"unknown inner decoder {cfg.inner!r}")
    if cfg.prefix not in ("proof", "half"):
        raise ConfigError(f"unknown singleton prefix variant {cfg.prefix!r}")
    return cfg
