"""Command-line scenario runner.

    ionmirror <scenario> [--config PATH] [--out DIR] [--seed N] [--emit-plots]

Exit codes: 0 all thresholds passed, 1 a threshold failed, 2 invalid
config, 3 I/O error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
from pathlib import Path

from . import __version__
from . import config as cfgmod
from .errors import ConfigInvalid, IonMirrorError
from .scenarios import RUNNERS, ScenarioResult

EXIT_OK, EXIT_THRESHOLD, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ionmirror", description="Trapped-ion parity-gate scenarios.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="scenario")
    helps = {
        "design": "feasibility arithmetic: calibrated strengths, parity coupling, pulse time",
        "parity-ideal": "pi/g pulse of g n sigma_x against the reflection operator",
        "parity-two-beam": "two calibrated Raman beams against the reflection operator",
        "rwa-compare": "full interaction-picture series versus its rotating-wave limit",
        "adiabatic-compare": "three-level Raman model versus the eliminated model",
        "not-gate": "parity gate acting as a NOT on even/odd qubits",
        "time-reversal": "reflect-evolve-reflect sequence undoing an anticommuting evolution",
    }
    for name in RUNNERS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", type=Path, help="JSON config (defaults used when omitted)")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--emit-plots", action="store_true", help="write SVG plots next to the report")
    return parser


def _report_document(scenario: str, cfg: dict, result: ScenarioResult) -> dict:
    return {
        "schema_version": cfgmod.SCHEMA_VERSION,
        "scenario": scenario,
        "config": cfg,
        "results": result.results,
        "checks": result.checks,
        "passed": result.passed,
    }


def comparable_report(doc: dict) -> dict:
    """Report without the ``metadata`` block, for determinism comparisons."""
    return {k: v for k, v in doc.items() if k != "metadata"}


def _write_outputs(out: Path, scenario: str, cfg: dict, result: ScenarioResult, plots: bool) -> list[Path]:
    doc = _report_document(scenario, cfg, result)
    doc["metadata"] = {
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "ionmirror_version": __version__,
    }
    written = [cfgmod.atomic_write(out / f"{scenario}.json", cfgmod.dumps_report(doc))]
    if cfg["run"].get("csv", True):
        for name, record in result.records.items():
            written.append(cfgmod.atomic_write(out / f"{scenario}-{name}.csv", record.csv_text()))
    if plots:
        from .plots import plot_bars, plot_record

        for name, record in result.records.items():
            written.append(cfgmod.atomic_write(out / f"{scenario}-{name}.svg", plot_record(record, f"{scenario}: {name}")))
        if result.bars:
            written.append(cfgmod.atomic_write(out / f"{scenario}-fidelity.svg", plot_bars(result.bars, scenario)))
    return written


def run_scenario(scenario: str, config_path: Path | None = None, out: Path = Path("out"), seed: int | None = None,
                 emit_plots: bool = False) -> int:
    try:
        if config_path is None:
            cfg = cfgmod.validate_config({}, scenario)
        else:
            cfg = cfgmod.load_config(config_path, scenario)
        if seed is not None:
            cfg["run"]["seed"] = seed
        result = RUNNERS[scenario](cfg)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IonMirrorError as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        written = _write_outputs(out, scenario, cfg, result, emit_plots)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for check in result.checks:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"[{status}] {check['name']}: {check['value']!r} {check['op']} {check['threshold']!r}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK if result.passed else EXIT_THRESHOLD


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run_scenario(args.scenario, args.config, args.out, args.seed, args.emit_plots)


if __name__ == "__main__":
    sys.exit(main())
