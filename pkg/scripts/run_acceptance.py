"""Run the acceptance module and print one line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    cmd = [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q", "-s"]
    proc = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True)
    lines = [l for l in proc.stdout.splitlines() if l.startswith(("[PASS]", "[FAIL]"))]
    seen = set()
    for line in lines:
        if line not in seen:  # -s echoes each line, the summary repeats it
            seen.add(line)
            print(line)
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
