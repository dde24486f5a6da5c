"""Unitary propagation, trajectories and state diagnostics."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import hilbert as hb
from . import tolerances as tol
from .errors import EigFailure, NormDrift, NotHermitian, SpaceMismatch, StepTooLarge
from .hilbert import OperatorMatrix, SpaceDescriptor, StateVector

# commutator-free fourth-order Magnus: Gauss nodes and exponent weights
_SQRT3 = math.sqrt(3.0)
_NODES = (0.5 - _SQRT3 / 6, 0.5 + _SQRT3 / 6)
_W_EARLY = 0.25 + _SQRT3 / 6
_W_LATE = 0.25 - _SQRT3 / 6

STEPS_PER_PERIOD = 20


def _hermitian_entries(h: OperatorMatrix) -> np.ndarray:
    if not h.hermitian:
        err = hb.hermiticity_error(h.entries)
        if err >= tol.EXACT * max(1.0, float(np.max(np.abs(h.entries), initial=0.0))):
            raise NotHermitian(f"max |H - H^dag| = {err:.3e}")
    return h.entries


def _eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        vals, vecs = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise EigFailure("non-finite eigendecomposition")
    return vals, vecs


def _expm_hermitian(matrix: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i matrix t)`` for Hermitian ``matrix``."""
    vals, vecs = _eigh(matrix)
    return (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T


class Spectral:
    """Cached eigendecomposition of a constant Hamiltonian, for evaluating many times."""

    def __init__(self, h: OperatorMatrix):
        self.space = h.space
        self.energies, self.vectors = _eigh(_hermitian_entries(h))

    def propagator(self, t: float) -> OperatorMatrix:
        u = (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T
        return OperatorMatrix(self.space, u)

    def states(self, psi0: StateVector, times: Sequence[float]) -> np.ndarray:
        """Amplitudes at every time, shape ``(len(times), dim)``."""
        if psi0.space != self.space:
            raise SpaceMismatch("initial state and Hamiltonian live in different spaces")
        coeffs = self.vectors.conj().T @ psi0.amplitudes
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return (phases * coeffs) @ self.vectors.T


def propagator(h: OperatorMatrix, t: float) -> OperatorMatrix:
    """``exp(-i H t)`` via Hermitian eigendecomposition."""
    return Spectral(h).propagator(t)


def _checked_state(space: SpaceDescriptor, amps: np.ndarray, reference_norm: float = 1.0) -> StateVector:
    drift = abs(np.linalg.norm(amps) - reference_norm)
    if drift > tol.NORM_DRIFT:
        raise NormDrift(f"norm drift {drift:.3e} exceeds {tol.NORM_DRIFT}")
    return StateVector._unchecked(space, amps)


def evolve_const(h: OperatorMatrix, t: float, psi0: StateVector) -> StateVector:
    if h.space != psi0.space:
        raise SpaceMismatch("initial state and Hamiltonian live in different spaces")
    amps = Spectral(h).states(psi0, [t])[0]
    return _checked_state(psi0.space, amps)


# ---------------------------------------------------------------------------
# observables

def overlap(a: StateVector, b: StateVector) -> complex:
    if a.space != b.space:
        raise SpaceMismatch("states live in different spaces")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|^2`` clipped to [0, 1]."""
    return float(min(1.0, max(0.0, abs(overlap(a, b)) ** 2)))


def electronic_populations(psi: StateVector) -> np.ndarray:
    tensor = psi.amplitudes.reshape(psi.space.electronic_dim, -1)
    return np.sum(np.abs(tensor) ** 2, axis=1)


def reduced_electronic_state(psi: StateVector) -> np.ndarray:
    m = psi.amplitudes.reshape(psi.space.electronic_dim, -1)
    return m @ m.conj().T


def reduced_electronic_purity(psi: StateVector) -> float:
    rho = reduced_electronic_state(psi)
    return float(np.real(np.trace(rho @ rho)))


def mean_occupation(psi: StateVector, axis: str) -> float:
    grid = psi.space.occupation_grid(axis)
    return float(np.sum(grid * np.abs(psi.amplitudes) ** 2))


def energy(h: OperatorMatrix, psi: StateVector) -> float:
    return float(np.real(np.vdot(psi.amplitudes, h.entries @ psi.amplitudes)))


def vibrational_component(psi: StateVector, level="-") -> np.ndarray:
    """Unnormalized vibrational amplitudes attached to one electronic level."""
    idx = psi.space.level_index(level)
    return psi.amplitudes.reshape(psi.space.electronic_dim, -1)[idx].copy()


# ---------------------------------------------------------------------------
# trajectories

@dataclass
class EvolutionRecord:
    space: SpaceDescriptor
    times: np.ndarray
    states: list[StateVector]
    observables: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("one state per time point is required")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not self.observables:
            self.observables = observables_for(self.space, [s.amplitudes for s in self.states])

    @property
    def final(self) -> StateVector:
        return self.states[-1]

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(self.observables["norm_drift"]))

    def csv_text(self) -> str:
        """One row per time point: time, level populations, mean occupations, norm drift."""
        names = list(self.observables)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["time", *names])
        for i, t in enumerate(self.times):
            writer.writerow([repr(float(t)), *(repr(float(self.observables[n][i])) for n in names)])
        return buf.getvalue()

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.write_text(self.csv_text(), encoding="utf-8")
        return path

    def to_dict(self, include_amplitudes: bool = False) -> dict:
        out = {
            "space": self.space.to_dict(),
            "times": [float(t) for t in self.times],
            "observables": {k: [float(v) for v in vals] for k, vals in self.observables.items()},
        }
        if include_amplitudes:
            out["amplitudes"] = [
                {"re": [float(x) for x in s.amplitudes.real], "im": [float(x) for x in s.amplitudes.imag]}
                for s in self.states
            ]
        return out

    def to_json(self, path, include_amplitudes: bool = False) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(include_amplitudes), indent=2, sort_keys=True), encoding="utf-8")
        return path


def observables_for(space: SpaceDescriptor, amplitudes: Sequence[np.ndarray] | np.ndarray) -> dict[str, np.ndarray]:
    amps = np.asarray(amplitudes)
    probs = np.abs(amps) ** 2
    per_level = probs.reshape(len(amps), space.electronic_dim, -1).sum(axis=2)
    out = {}
    for i, level in enumerate(space.levels):
        out[f"population[{level}]"] = per_level[:, i]
    for axis in space.axes:
        out[f"mean_n[{axis}]"] = probs @ space.occupation_grid(axis)
    out["norm_drift"] = np.abs(np.sqrt(probs.sum(axis=1)) - 1.0)
    return out


def evolve_trajectory(h: OperatorMatrix, times: Sequence[float], psi0: StateVector) -> EvolutionRecord:
    """Exact trajectory under a constant Hamiltonian, sampled at ``times``."""
    amps = Spectral(h).states(psi0, times)
    record = EvolutionRecord(psi0.space, times, [StateVector._unchecked(psi0.space, a) for a in amps])
    if record.max_norm_drift > tol.NORM_DRIFT:
        raise NormDrift(f"norm drift {record.max_norm_drift:.3e} exceeds {tol.NORM_DRIFT}")
    return record


def magnus4_step(h_of_t: Callable[[float], OperatorMatrix], t: float, dt: float) -> np.ndarray:
    """One commutator-free fourth-order Magnus step from ``t`` to ``t + dt``.

    ``U = exp(-i dt (w_late H1 + w_early H2)) exp(-i dt (w_early H1 + w_late H2))``
    with ``H1, H2`` sampled at the two Gauss nodes.
    """
    h1 = _hermitian_entries(h_of_t(t + _NODES[0] * dt))
    h2 = _hermitian_entries(h_of_t(t + _NODES[1] * dt))
    first = _expm_hermitian(_W_EARLY * h1 + _W_LATE * h2, dt)
    second = _expm_hermitian(_W_LATE * h1 + _W_EARLY * h2, dt)
    return second @ first


def evolve_timedep(
    h_of_t: Callable[[float], OperatorMatrix],
    t0: float,
    t1: float,
    dt: float,
    psi0: StateVector,
    max_frequency: float | None = None,
    record_every: int = 1,
) -> EvolutionRecord:
    """Propagate under ``H(t)`` with the commutator-free fourth-order Magnus scheme.

    The step is shrunk so that ``(t1 - t0)`` is an integer number of steps;
    ``dt`` itself must resolve the fastest frequency with at least
    ``STEPS_PER_PERIOD`` steps per period.  ``max_frequency`` defaults to the
    ``max_frequency`` attribute of ``h_of_t`` when present.
    """
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    if max_frequency is None:
        max_frequency = getattr(h_of_t, "max_frequency", 0.0)
    if max_frequency > 0 and dt > 2 * math.pi / max_frequency / STEPS_PER_PERIOD:
        raise StepTooLarge(
            f"dt={dt:.3e} exceeds 2pi/(20 w_max)={2 * math.pi / max_frequency / STEPS_PER_PERIOD:.3e}"
        )
    space = psi0.space
    if getattr(h_of_t, "space", space) != space:
        raise SpaceMismatch("initial state and Hamiltonian live in different spaces")
    n_steps = max(1, math.ceil((t1 - t0) / dt - 1e-9))
    h = (t1 - t0) / n_steps
    psi = psi0.amplitudes.copy()
    times = [t0]
    amps = [psi.copy()]
    for k in range(n_steps):
        t = t0 + k * h
        psi = magnus4_step(h_of_t, t, h) @ psi
        if (k + 1) % record_every == 0 or k + 1 == n_steps:
            times.append(t0 + (k + 1) * h)
            amps.append(psi.copy())
    record = EvolutionRecord(space, times, [StateVector._unchecked(space, a) for a in amps])
    if record.max_norm_drift > tol.NORM_DRIFT:
        raise NormDrift(f"norm drift {record.max_norm_drift:.3e} exceeds {tol.NORM_DRIFT}")
    return record


def unitarity_error(u: OperatorMatrix | np.ndarray) -> float:
    m = u.entries if isinstance(u, OperatorMatrix) else np.asarray(u)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
