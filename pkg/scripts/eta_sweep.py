"""Worst-case two-beam infidelity versus Lamb-Dicke parameter.

    python3 scripts/eta_sweep.py --out runs/eta-sweep
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ionmirror import mirror as mr  # noqa: E402


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--etas", type=float, nargs="+", default=list(np.geomspace(0.03, 0.3, 10)))
    ap.add_argument("--ratio", type=float, default=2 / 3, help="eta1 / eta2")
    ap.add_argument("--mode", choices=["paper-linear", "exact-carrier-cancel"], default="paper-linear")
    ap.add_argument("--out", type=Path, default=Path("runs/eta-sweep"))
    args = ap.parse_args(argv)

    res = mr.two_beam_eta_scaling(args.etas, eta_ratio=args.ratio, mode=args.mode)
    for eta, inf in zip(res["etas"], res["infidelity"]):
        print(f"eta2={eta:.4f}  worst infidelity={inf:.3e}")
    print(f"log-log slope {res['slope']:.3f}")

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "eta-sweep.json").write_text(json.dumps(res, indent=2, sort_keys=True) + "\n")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(res["etas"], res["infidelity"], "o-")
    ax.set_xlabel("eta2")
    ax.set_ylabel("worst infidelity")
    ax.set_title(f"{args.mode}, slope {res['slope']:.2f}")
    fig.tight_layout()
    fig.savefig(args.out / "eta-sweep.svg", metadata={"Date": None})
    plt.close(fig)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
