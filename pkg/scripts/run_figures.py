"""Run the shipped figure configurations through the command-line driver.

    python scripts/run_figures.py            # every template in configs/
    python scripts/run_figures.py fig3 fig7  # selected templates (prefix match)
    python scripts/run_figures.py --out results fig6
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from bhchaos.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def main_script(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("names", nargs="*", help="config name prefixes (default: all)")
    ap.add_argument("--out", help="root directory for outputs (default: the out key of each config)")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)
    configs = sorted(CONFIGS.glob("*.conf"))
    if args.names:
        configs = [c for c in configs if any(c.stem.startswith(n) for n in args.names)]
    status = 0
    for conf in configs:
        experiment = next(line.split("=", 1)[1].strip() for line in conf.read_text().splitlines()
                          if line.strip().startswith("experiment"))
        cli_args = [experiment, "--config", str(conf), "--threads", str(args.threads)]
        if args.out:
            cli_args += ["--out", str(Path(args.out) / conf.stem)]
        t0 = time.perf_counter()
        code = main(cli_args)
        print(f"{conf.stem}: exit {code} in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main_script())
