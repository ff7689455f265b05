"""Run every config under scripts/configs through the ``sim`` front-end.

    python3 scripts/run_experiments.py [--out results] [--svg] [pattern ...]

The command is chosen from the config name: ``*spectrum`` -> spectrum,
``*trace*`` -> evolve, ``wigner*`` -> wigner, everything else -> sweep.
Patterns are substrings that select a subset of configs.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from nhgauss import cli

CONFIG_DIR = Path(__file__).resolve().parent / "configs"


def command_for(name: str) -> str:
    if name.endswith("spectrum"):
        return "spectrum"
    if "trace" in name:
        return "evolve"
    if name.startswith("wigner"):
        return "wigner"
    return "sweep"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("patterns", nargs="*")
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--svg", action="store_true", help="also render an SVG per table")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    configs = sorted(CONFIG_DIR.glob("*.cfg"))
    if args.patterns:
        configs = [c for c in configs if any(p in c.stem for p in args.patterns)]
    worst = 0
    for cfg in configs:
        cmd = command_for(cfg.stem)
        argv_sim = [cmd, "--config", str(cfg), "--out", str(args.out / f"{cfg.stem}.csv")]
        if args.svg:
            argv_sim += ["--format", "csv+svg"]
        if args.workers is not None:
            argv_sim += ["--workers", str(args.workers)]
        start = time.perf_counter()
        code = cli.main(argv_sim)
        print(f"{cfg.stem:32s} {cmd:9s} exit {code}  {time.perf_counter() - start:6.1f} s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
