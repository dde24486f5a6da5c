"""Compute oracle reference values and freeze them under tests/golden/.

    python3 scripts/freeze_golden.py

The gate dynamics come from closed forms in tests/oracles.py; the package
only supplies the probe states (so random probes match the suite exactly).
"""

from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402

from ionmirror import hilbert as hb  # noqa: E402
from ionmirror import mirror as mr  # noqa: E402

G1, ETA1, ETA2, MAX_LEVEL = 3.0, 0.2, 0.3, 4
ETAS = (0.05, 0.1, 0.2, 0.3)
OUT = ROOT / "tests" / "golden" / "oracle_values.json"


def probe_populations(max_level: int) -> dict[str, list[float]]:
    space = hb.mk_space(2, z=max_level + 3)
    out = {}
    for probe in mr.probe_suite(space, "z", max_level):
        amps = probe.state.amplitudes.reshape(2, -1)[0]
        out[probe.name] = (np.abs(amps) ** 2).tolist()
    return out


def two_beam(pops, g1, eta1, eta2, mode):
    fids = {name: oracles.two_beam_fidelity(p, g1, eta1, eta2, mode) for name, p in pops.items()}
    worst = min(fids, key=fids.get)
    return {"worst_fidelity": fids[worst], "worst_probe": worst, "per_probe": fids}


def main():
    t0 = time.perf_counter()
    pops = probe_populations(MAX_LEVEL)
    doc = {"two_beam": {"g1": G1, "eta1": ETA1, "eta2": ETA2, "max_level": MAX_LEVEL}}
    for mode in ("paper-linear", "exact-carrier-cancel"):
        doc["two_beam"][mode] = two_beam(pops, G1, ETA1, ETA2, mode)
    ratio = ETA1 / ETA2
    infid = [1 - two_beam(pops, G1, ratio * eta, eta, "paper-linear")["worst_fidelity"] for eta in ETAS]
    doc["eta_scaling"] = {
        "etas": list(ETAS),
        "eta_ratio": ratio,
        "infidelity": infid,
        "slope": float(np.polyfit(np.log(ETAS), np.log(infid), 1)[0]),
    }
    pv = {}
    for delta in (100.0, 4000.0):
        g_consistent = 0.5 * 2 / delta
        t_final = math.pi / (2 * g_consistent)
        dt = 2 * math.pi / delta / 20
        pv[str(int(delta))] = {"delta": delta, "t_final": t_final, "dt": dt,
                               "max_population_v": oracles.lambda_system_max_pv(1.0, 1.0, delta, t_final, dt)}
    doc["lambda_max_population_v"] = pv
    OUT.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT} in {time.perf_counter() - t0:.1f} s")
    print(json.dumps({k: doc["two_beam"][k]["worst_fidelity"] for k in ("paper-linear", "exact-carrier-cancel")}))
    print("slope", doc["eta_scaling"]["slope"], "pv", {k: v["max_population_v"] for k, v in pv.items()})


if __name__ == "__main__":
    main()
