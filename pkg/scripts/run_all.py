"""Run every shipped experiment config through the CLI and report exit codes.

Outputs land in out/ at the repository root. Exits non-zero if any subcommand does.
"""
import sys
import time
from pathlib import Path

from infofriction.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
ORDER = ("bounds", "optimize", "scaling", "stencil", "simulate")

if __name__ == "__main__":
    worst = 0
    for sub in ORDER:
        t0 = time.perf_counter()
        code = main([sub, str(CONFIGS / f"{sub}.ini")])
        print(f"{sub:9s} exit {code}  {time.perf_counter() - t0:6.1f}s", flush=True)
        worst = max(worst, code)
    sys.exit(worst)
