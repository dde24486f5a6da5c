"""JSON documents: parameter sets, scenario configs and reports.

Parameter sets are flat objects.  Frequencies, times, masses and wavenumbers
may be given as unit strings ("3 MHz", "20 us", "9.012 u", "1.2e7 1/m") or as
bare numbers in internal units (rad/us, us, kg, rad/m).  Complex couplings
are either a quantity or ``{"re": q, "im": q}``.

RamanParams schema::

    omega0, omega1, omega2, omegav, omega_a, omega_b   frequency
    g_a, g_b                                           frequency (complex allowed)
    k_a, k_b                                           [wavenumber x3]   (default zeros)
    ion_mass                                           mass              (default 9Be+)

BeamSpec schema::

    strength   frequency
    eta        number
    axis       "x" | "y" | "z" | [theta, phi]
    series_order  integer (default 8)
"""

from __future__ import annotations

import copy
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Mapping

from . import model
from .errors import ConfigInvalid
from .units import parse_quantity

SCHEMA_VERSION = 1


def _quantity_str(value: float, unit: str) -> str:
    return f"{float(value)!r} {unit}"


def _complex_quantity(value, kind: str) -> complex:
    if isinstance(value, Mapping):
        extra = set(value) - {"re", "im"}
        if extra:
            raise ConfigInvalid(f"unknown keys in complex quantity: {sorted(extra)}")
        return complex(parse_quantity(value.get("re", 0.0), kind), parse_quantity(value.get("im", 0.0), kind))
    return complex(parse_quantity(value, kind))


def _complex_to_json(value: complex, unit: str):
    value = complex(value)
    if value.imag == 0:
        return _quantity_str(value.real, unit)
    return {"re": _quantity_str(value.real, unit), "im": _quantity_str(value.imag, unit)}


_RAMAN_FREQS = ("omega0", "omega1", "omega2", "omegav", "omega_a", "omega_b")


def raman_params_from_dict(doc: Mapping) -> model.RamanParams:
    allowed = set(_RAMAN_FREQS) | {"g_a", "g_b", "k_a", "k_b", "ion_mass"}
    _reject_unknown(doc, allowed, "RamanParams")
    missing = [k for k in (*_RAMAN_FREQS, "g_a", "g_b") if k not in doc]
    if missing:
        raise ConfigInvalid(f"RamanParams missing keys: {missing}")
    kwargs: dict[str, Any] = {k: parse_quantity(doc[k], "frequency") for k in _RAMAN_FREQS}
    kwargs["g_a"] = _complex_quantity(doc["g_a"], "frequency")
    kwargs["g_b"] = _complex_quantity(doc["g_b"], "frequency")
    for k in ("k_a", "k_b"):
        if k in doc:
            vec = doc[k]
            if not isinstance(vec, list) or len(vec) != 3:
                raise ConfigInvalid(f"{k} must be a list of three wavenumbers")
            kwargs[k] = tuple(parse_quantity(v, "wavenumber") for v in vec)
    if "ion_mass" in doc:
        kwargs["ion_mass"] = parse_quantity(doc["ion_mass"], "mass")
    try:
        return model.RamanParams(**kwargs)
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc


def raman_params_to_dict(params: model.RamanParams) -> dict:
    out = {k: _quantity_str(getattr(params, k), "rad/us") for k in _RAMAN_FREQS}
    out["g_a"] = _complex_to_json(params.g_a, "rad/us")
    out["g_b"] = _complex_to_json(params.g_b, "rad/us")
    out["k_a"] = [_quantity_str(v, "rad/m") for v in params.k_a]
    out["k_b"] = [_quantity_str(v, "rad/m") for v in params.k_b]
    out["ion_mass"] = _quantity_str(params.ion_mass, "kg")
    return out


def _parse_axis(value):
    if isinstance(value, str):
        if value not in ("x", "y", "z"):
            raise ConfigInvalid(f"unknown axis {value!r}")
        return value
    if isinstance(value, list) and len(value) == 2:
        return (float(value[0]), float(value[1]))
    raise ConfigInvalid(f"axis must be 'x', 'y', 'z' or [theta, phi], got {value!r}")


def beam_from_dict(doc: Mapping) -> model.BeamSpec:
    _reject_unknown(doc, {"strength", "eta", "axis", "series_order"}, "BeamSpec")
    if "strength" not in doc or "eta" not in doc:
        raise ConfigInvalid("BeamSpec needs 'strength' and 'eta'")
    try:
        return model.BeamSpec(
            strength=parse_quantity(doc["strength"], "frequency"),
            eta=float(doc["eta"]),
            axis=_parse_axis(doc.get("axis", "z")),
            series_order=int(doc.get("series_order", model.DEFAULT_SERIES_ORDER)),
        )
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc


def beam_to_dict(beam: model.BeamSpec) -> dict:
    return {
        "strength": _quantity_str(beam.strength, "rad/us"),
        "eta": beam.eta,
        "axis": beam.axis if isinstance(beam.axis, str) else list(beam.axis),
        "series_order": beam.series_order,
    }


def _reject_unknown(doc: Mapping, allowed, where: str):
    if not isinstance(doc, Mapping):
        raise ConfigInvalid(f"{where} must be a JSON object")
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigInvalid(f"unknown keys in {where}: {extra}")


# ---------------------------------------------------------------------------
# scenario configs
#
# Each block maps key -> (kind, default).  Kinds: frequency/time/mass/
# wavenumber (unit-parsed), float, int, str, bool, axis, list3, path, any.
# A default of None means "absent".

_COMMON_RUN = {"seed": ("int", 0), "csv": ("bool", True)}

SCHEMAS: dict[str, dict[str, dict[str, tuple[str, Any]]]] = {
    "design": {
        "params": {
            "g1": ("frequency", "3 MHz"),
            "eta1": ("float", 0.2),
            "eta2": ("float", 0.3),
            "omega0": ("frequency", "11.2 MHz"),
            "omega_A": ("frequency", "1.2 GHz"),
            "detuning": ("frequency", "12 GHz"),
            "calibration": ("str", "paper-linear"),
        },
        "space": {},
        "run": dict(_COMMON_RUN),
        "thresholds": {
            "pulse_time_target": ("time", "20 us"),
            "pulse_time_rel_tol": ("float", 0.05),
            "g_parity_target": ("frequency", "150 kHz"),
            "g_parity_rel_tol": ("float", 1e-9),
        },
    },
    "parity-ideal": {
        "params": {"g": ("frequency", "150 kHz"), "axis": ("axis", "z")},
        "space": {"cutoffs": ("any", {"z": 16})},
        "run": {**_COMMON_RUN, "max_level": ("int", None), "n_random": ("int", 20), "probe_suite": ("path", None)},
        "thresholds": {"max_infidelity": ("float", 1e-10), "min_electronic_return": ("float", 1 - 1e-10)},
    },
    "parity-two-beam": {
        "params": {
            "g1": ("frequency", "3 MHz"),
            "eta1": ("float", 0.2),
            "eta2": ("float", 0.3),
            "calibration": ("str", "paper-linear"),
            "series_order": ("int", model.DEFAULT_SERIES_ORDER),
            "axis": ("axis", "z"),
            "optimize_time": ("bool", False),
        },
        "space": {"cutoffs": ("any", {"z": 7})},
        "run": {**_COMMON_RUN, "max_level": ("int", 4), "n_random": ("int", 20), "probe_suite": ("path", None)},
        "thresholds": {
            "expected_gate_fidelity": ("float", None),
            "golden_tol": ("float", 1e-6),
            "min_gate_fidelity": ("float", None),
        },
    },
    "rwa-compare": {
        "params": {
            "g": ("frequency", 1.0),
            "eta": ("float", 0.2),
            "omega0": ("frequency", 100.0),
            "series_order": ("int", 4),
            "detuning_A": ("frequency", 0.0),
            "axis": ("axis", "z"),
        },
        "space": {"cutoffs": ("any", {"z": 10})},
        "run": {
            **_COMMON_RUN,
            "t_final": ("time", None),
            "dt": ("time", None),
            "initial_fock": ("int", None),
            "max_level": ("int", None),
            "record_every": ("int", 50),
        },
        "thresholds": {"min_fidelity": ("float", 0.999)},
    },
    "adiabatic-compare": {
        "params": {
            "g_a": ("frequency", 1.0),
            "g_b": ("frequency", 1.0),
            "delta_minus": ("frequency", 100.0),
            "delta_plus": ("frequency", None),
            "omega0": ("frequency", 2.0),
            "omega_A": ("frequency", 0.0),
            "eta_a": ("list3", [0.0, 0.0, 0.1]),
            "eta_b": ("list3", [0.0, 0.0, -0.1]),
            "convention": ("str", "consistent"),
        },
        "space": {"cutoffs": ("any", {"z": 8})},
        "run": {**_COMMON_RUN, "t_final": ("time", None), "dt": ("time", None), "initial_fock": ("int", 1)},
        "thresholds": {
            "min_end_fidelity": ("float", 0.99),
            "max_population_v": ("float", None),
            "use_population_envelope": ("bool", True),
        },
    },
    "not-gate": {
        "params": {
            "pair": ("str", "fock"),
            "n_even": ("int", 0),
            "n_odd": ("int", 1),
            "alpha": ("float", 1.2),
            "gate": ("str", "ideal"),
            "axis": ("axis", "z"),
        },
        "space": {"cutoffs": ("any", {"z": 25})},
        "run": dict(_COMMON_RUN),
        "thresholds": {"min_fidelity": ("float", 1 - 1e-9)},
    },
    "time-reversal": {
        "params": {
            "hamiltonian": ("str", "displacement"),
            "coupling": ("frequency", 1.0),
            "time": ("time", 0.5),
            "alpha": ("float", 1.0),
            "axis": ("axis", "z"),
        },
        "space": {"cutoffs": ("any", {"z": 30})},
        "run": dict(_COMMON_RUN),
        "thresholds": {
            "max_identity_residual": ("float", 1e-9),
            "min_recovery_fidelity": ("float", 1 - 1e-8),
            "expect_rejection": ("bool", False),
        },
    },
}

SCENARIOS = tuple(SCHEMAS)


def _coerce(kind: str, value, key: str):
    if value is None:
        return None
    try:
        if kind in ("frequency", "time", "mass", "wavenumber"):
            return parse_quantity(value, kind)
        if kind == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigInvalid(f"{key} must be a number")
            return float(value)
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigInvalid(f"{key} must be an integer")
            return value
        if kind == "bool":
            if not isinstance(value, bool):
                raise ConfigInvalid(f"{key} must be true or false")
            return value
        if kind == "str":
            if not isinstance(value, str):
                raise ConfigInvalid(f"{key} must be a string")
            return value
        if kind == "axis":
            axis = _parse_axis(value)
            if not isinstance(axis, str):
                raise ConfigInvalid(f"{key}: scenarios act on a single axis")
            return axis
        if kind == "list3":
            if not isinstance(value, list) or len(value) != 3:
                raise ConfigInvalid(f"{key} must be a list of three numbers")
            return [float(v) for v in value]
        if kind == "path":
            if not isinstance(value, str):
                raise ConfigInvalid(f"{key} must be a path string")
            return value
        if kind == "any":
            return copy.deepcopy(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(f"{key}: {exc}") from exc
    raise ValueError(f"unknown kind {kind}")


def validate_config(doc: Mapping, scenario: str) -> dict:
    """Check a raw config against the scenario schema and return a normalized copy.

    Unknown keys anywhere are rejected; defaults fill missing keys; quantities
    are converted to internal units.
    """
    if scenario not in SCHEMAS:
        raise ConfigInvalid(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    if not isinstance(doc, Mapping):
        raise ConfigInvalid("config must be a JSON object")
    _reject_unknown(doc, {"scenario", "params", "space", "run", "thresholds"}, "config")
    if "scenario" in doc and doc["scenario"] != scenario:
        raise ConfigInvalid(f"config is for scenario {doc['scenario']!r}, not {scenario!r}")
    schema = SCHEMAS[scenario]
    out: dict[str, Any] = {"scenario": scenario}
    for block, fields in schema.items():
        raw = doc.get(block, {})
        _reject_unknown(raw, fields, f"{block} block")
        values = {}
        for key, (kind, default) in fields.items():
            values[key] = _coerce(kind, raw.get(key, default), f"{block}.{key}")
        out[block] = values
    cutoffs = out["space"].get("cutoffs")
    if cutoffs is not None:
        if not isinstance(cutoffs, Mapping) or not cutoffs:
            raise ConfigInvalid("space.cutoffs must be a non-empty object of axis -> cutoff")
        for axis, n in cutoffs.items():
            if axis not in ("x", "y", "z") or isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise ConfigInvalid(f"invalid cutoff {axis}: {n}")
    return out


def load_config(path, scenario: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: invalid JSON ({exc})") from exc
    return validate_config(doc, scenario)


# ---------------------------------------------------------------------------
# output

def dumps_report(report: Mapping) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return _jsonable(obj.item())
    return obj


def atomic_write(path, text: str) -> Path:
    """Write via a temporary file in the target directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
