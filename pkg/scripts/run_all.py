"""Run every shipped config through the CLI and report exit codes.

    python3 scripts/run_all.py --out runs
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from ionmirror import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--plots", action="store_true")
    args = ap.parse_args(argv)

    worst = 0
    for path in sorted(CONFIGS.glob("*.json")):
        scenario = json.loads(path.read_text()).get("scenario", path.stem)
        argv_cli = [scenario, "--config", str(path), "--out", str(args.out / path.stem)]
        if args.plots:
            argv_cli.append("--emit-plots")
        code = cli.main(argv_cli)
        print(f"{path.name}: exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
