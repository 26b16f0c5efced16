"""Run the acceptance suite and print one pass/fail line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q",
                              "-rxX", "-p", "no:cacheprovider"], cwd=ROOT))
