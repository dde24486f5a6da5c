"""Unit handling at the configuration boundary.

Internally hbar = 1, times are in microseconds and every frequency is an
angular frequency in rad/us.  Quoted laboratory values such as "3 MHz" are
read as angular-frequency magnitudes, so "3 MHz" becomes 3 rad/us and
"150 kHz" becomes 0.15 rad/us.  A pulse time pi/g then comes out directly in
microseconds.

Wavevectors (rad/m) and the ion mass (kg) stay in SI; they only enter through
the Lamb-Dicke parameter, which converts the trap frequency back to rad/s.
"""

from __future__ import annotations

import re

from scipy import constants

from .errors import ConfigInvalid

TIME_UNIT_S = 1e-6  # one internal time unit in seconds
FREQ_UNIT_RAD_S = 1.0 / TIME_UNIT_S  # one internal frequency unit in rad/s

_FREQ = {"hz": 1e-6, "khz": 1e-3, "mhz": 1.0, "ghz": 1e3, "thz": 1e6, "rad/us": 1.0, "rad/s": 1e-6}
_TIME = {"s": 1e6, "ms": 1e3, "us": 1.0, "µs": 1.0, "ns": 1e-3, "ps": 1e-6}
_MASS = {"kg": 1.0, "u": constants.atomic_mass, "amu": constants.atomic_mass, "da": constants.atomic_mass}
_WAVENUMBER = {"1/m": 1.0, "rad/m": 1.0, "1/um": 1e6, "rad/um": 1e6, "1/nm": 1e9, "rad/nm": 1e9}

KINDS = {"frequency": _FREQ, "time": _TIME, "mass": _MASS, "wavenumber": _WAVENUMBER}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*?)?\s*$")


def parse_quantity(value, kind: str) -> float:
    """Convert ``"3 MHz"``-style strings (or bare numbers, taken as internal units)."""
    if kind not in KINDS:
        raise ValueError(f"unknown quantity kind {kind!r}")
    if isinstance(value, bool):
        raise ConfigInvalid(f"expected a {kind}, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigInvalid(f"expected a {kind}, got {value!r}")
    m = _QUANTITY.match(value)
    if not m:
        raise ConfigInvalid(f"cannot parse {kind} {value!r}")
    number, unit = float(m.group(1)), m.group(2)
    if unit is None:
        return number
    scale = KINDS[kind].get(unit.strip().lower())
    if scale is None:
        raise ConfigInvalid(f"unknown {kind} unit {unit!r} in {value!r}; known: {sorted(KINDS[kind])}")
    return number * scale


def lamb_dicke(k_norm: float, omega0: float, mass_kg: float) -> float:
    """sqrt(hbar / (2 M omega0)) |k| with omega0 in internal units and k in rad/m."""
    return (constants.hbar / (2 * mass_kg * omega0 * FREQ_UNIT_RAD_S)) ** 0.5 * k_norm


def wavenumber_for_eta(eta: float, omega0: float, mass_kg: float) -> float:
    """Inverse of :func:`lamb_dicke`."""
    return eta / lamb_dicke(1.0, omega0, mass_kg)
