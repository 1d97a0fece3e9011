"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    cmd = [sys.executable, "-m", "pytest", "-q", "-p", "no:warnings", "tests/test_acceptance.py", *sys.argv[1:]]
    sys.exit(subprocess.call(cmd, cwd=ROOT))
