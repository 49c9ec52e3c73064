"""Run the eight acceptance criteria and print one PASS/FAIL line for each."""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    args = [str(ROOT / "tests" / "test_acceptance.py"), "-q", "-s", "-p", "no:cacheprovider"]
    sys.exit(pytest.main(args + sys.argv[1:]))
