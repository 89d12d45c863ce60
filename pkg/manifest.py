from pathlib import Path

from utils import sha256_bytes


def build_hashes_txt(files: dict[str, bytes]) -> bytes:
    # Format compatible with common sha256sum style:
    # <sha256>  <path>
    lines = [f"{sha256_bytes(data)}  {name}" for name, data in sorted(files.items())]
    return ("\n".join(lines) + "\n").encode("utf-8")


def check_hashes_txt(text: str, base_dir: str | Path) -> dict[str, bool]:
    """Recompute every listed file's hash; missing files count as mismatches."""
    base_dir = Path(base_dir)
    results = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        digest, name = line.split("  ", 1)
        path = base_dir / name
        results[name] = path.is_file() and sha256_bytes(path.read_bytes()) == digest
    return results
