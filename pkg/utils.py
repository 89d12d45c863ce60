from datetime import datetime, timezone
import hashlib
import math

from errors import InfeasibleEnumeration


def now_iso():
    return datetime.now(timezone.utc).replace(tzinfo=None).isoformat(timespec="seconds") + "Z"


def sha256_bytes(data: bytes):
    h = hashlib.sha256()
    h.update(data)
    return h.hexdigest()


def check_cap(what: str, count: int, cap: int) -> int:
    if count > cap:
        raise InfeasibleEnumeration(what, count, cap)
    return count


def subsets_up_to(n: int, k: int) -> int:
    return sum(math.comb(n, s) for s in range(0, min(k, n) + 1))
