import sys
from pathlib import Path

# -------------------------------------------------
# Add PROJECT ROOT so the flat modules resolve
# -------------------------------------------------
PROJECT_ROOT = Path(__file__).resolve().parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from cli import main  # noqa: E402

if __name__ == "__main__":
    raise SystemExit(main())
