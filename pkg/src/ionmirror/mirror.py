"""Gate-level checks: parity pulse, two-beam realization, NOT gate, time reversal, Raman elimination."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import evolve as ev
from . import hilbert as hb
from . import model
from . import tolerances as tol
from .errors import (
    AnticommutationFailure,
    CutoffExceeded,
    NotParityEigenstate,
    ProbeNotGround,
    RatioTooSmall,
    SpaceMismatch,
)
from .hilbert import OperatorMatrix, SpaceDescriptor, StateVector

MIN_DETUNING_RATIO = 10.0


# ---------------------------------------------------------------------------
# probe suite

@dataclass(frozen=True)
class Probe:
    name: str
    state: StateVector


def _restricted(space: SpaceDescriptor, amps: np.ndarray, max_level: int | None) -> StateVector:
    if max_level is not None:
        amps = amps * hb.support_mask(space, max_level=max_level)
    return StateVector.normalized(space, amps)


def make_probe(space: SpaceDescriptor, axis: str, spec: Mapping, max_level: int | None = None) -> Probe:
    """One probe from a JSON-style description.

    Kinds: ``fock`` (``n``), ``coherent`` (``alpha``), ``cat`` (``alpha``,
    ``parity``), ``random`` (``seed``).  All probes start in ``|->``;
    ``max_level`` projects onto ``n <= max_level`` on every mode and renormalizes.
    """
    kind = spec["kind"]
    if kind == "fock":
        state = hb.fock_state(space, "-", {axis: int(spec["n"])})
        name = f"fock[{int(spec['n'])}]"
    elif kind == "coherent":
        alpha = complex(spec["alpha"])
        amps, _ = hb.coherent_amplitudes(alpha, space.cutoff(axis))
        state = _restricted(space, hb._mode_product_state(space, "-", axis, amps), max_level)
        name = f"coherent[{spec['alpha']}]"
    elif kind == "cat":
        alpha = complex(spec["alpha"])
        parity = spec.get("parity", "even")
        plus, _ = hb.coherent_amplitudes(alpha, space.cutoff(axis))
        minus, _ = hb.coherent_amplitudes(-alpha, space.cutoff(axis))
        vib = plus + minus if parity == "even" else plus - minus
        state = _restricted(space, hb._mode_product_state(space, "-", axis, vib), max_level)
        name = f"cat[{spec['alpha']},{parity}]"
    elif kind == "random":
        seed = int(spec["seed"])
        limit = max_level if max_level is not None else space.cutoff(axis) - 3
        state = hb.random_state(space, seed, level="-", max_level=limit)
        name = f"random[{seed}]"
    else:
        raise ValueError(f"unknown probe kind {kind!r}")
    return Probe(name, state)


def default_probe_specs(max_level: int = 6, n_random: int = 20, seed: int = 0) -> list[dict]:
    """Fock ladder ``0..min(6, max_level)``, two coherent states, two cats, seeded random states."""
    specs: list[dict] = [{"kind": "fock", "n": n} for n in range(min(6, max_level) + 1)]
    specs += [{"kind": "coherent", "alpha": 0.5}, {"kind": "coherent", "alpha": 1.0}]
    specs += [{"kind": "cat", "alpha": 1.0, "parity": "even"}, {"kind": "cat", "alpha": 1.0, "parity": "odd"}]
    specs += [{"kind": "random", "seed": seed + i} for i in range(n_random)]
    return specs


def probe_suite(
    space: SpaceDescriptor, axis: str = "z", max_level: int | None = None, n_random: int = 20, seed: int = 0
) -> list[Probe]:
    """Documented probe suite; ``max_level`` defaults to ``N - 3`` so the top two levels stay empty."""
    if max_level is None:
        max_level = space.cutoff(axis) - 3
    return [make_probe(space, axis, s, max_level) for s in default_probe_specs(max_level, n_random, seed)]


def load_probe_suite(path, space: SpaceDescriptor, axis: str = "z") -> list[Probe]:
    """Read ``{"max_level": int | null, "probes": [...]}`` (or the default suite via ``"default": true``)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    max_level = doc.get("max_level")
    if doc.get("default"):
        return probe_suite(space, axis, max_level, doc.get("n_random", 20), doc.get("seed", 0))
    return [make_probe(space, axis, s, max_level) for s in doc["probes"]]


# ---------------------------------------------------------------------------
# parity gate

@dataclass
class GateReport:
    gate_fidelity: float
    gate_fidelity_mean: float
    disentanglement_purity: float
    electronic_return_population: float
    pulse_time: float
    per_probe: dict[str, float] = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    @property
    def worst_infidelity(self) -> float:
        return 1.0 - self.gate_fidelity

    def to_dict(self) -> dict:
        return asdict(self)


def _check_probes(probes: Sequence[Probe], space: SpaceDescriptor, axis: str):
    for p in probes:
        if p.state.space != space:
            raise SpaceMismatch(f"probe {p.name} lives in a different space")
        pops = ev.electronic_populations(p.state)
        if pops[0] < 1 - tol.EXACT:
            raise ProbeNotGround(f"probe {p.name} has population {1 - pops[0]:.3e} outside |->")
        for a in space.axes:
            top = hb.top_level_population(p.state, a)
            if top > 1e-10:
                raise CutoffExceeded(f"probe {p.name} occupies the top two Fock levels of {a} ({top:.3e})")


def _gate_metrics(u: np.ndarray, probes: Sequence[Probe], reflection: np.ndarray) -> tuple[dict, float, float]:
    space = probes[0].state.space
    fids, purities, returns = {}, [], []
    for p in probes:
        out = StateVector._unchecked(space, u @ p.state.amplitudes)
        target = StateVector._unchecked(space, reflection @ p.state.amplitudes)
        fids[p.name] = ev.fidelity(target, out)
        purities.append(ev.reduced_electronic_purity(out))
        returns.append(ev.electronic_populations(out)[0])
    return fids, min(purities), min(returns)


def parity_gate_fidelity(
    h_realized: OperatorMatrix,
    g_nominal: float,
    space: SpaceDescriptor,
    axis: str,
    probes: Sequence[Probe],
    pulse_time: float | None = None,
    optimize_time: bool = False,
    parameters: Mapping | None = None,
) -> GateReport:
    """Compare the pulse ``exp(-i H t)``, ``t = pi/|g_nominal|``, with the reflection of ``axis``.

    Fidelities are overlaps between the evolved state and ``Pi_axis psi``
    (electronic factor left in ``|->``).  With ``optimize_time`` the pulse time
    is tuned within +-10 % of nominal to maximize the worst-case fidelity.
    """
    if h_realized.space != space:
        raise SpaceMismatch("Hamiltonian and space differ")
    if not probes:
        raise ValueError("at least one probe is required")
    _check_probes(probes, space, axis)
    t_nominal = math.pi / abs(g_nominal) if pulse_time is None else float(pulse_time)
    reflection = hb.reflection_operator(space, axis).entries
    spectral = ev.Spectral(h_realized)

    def worst(t):
        fids, _, _ = _gate_metrics(spectral.propagator(t).entries, probes, reflection)
        return min(fids.values())

    t = t_nominal
    if optimize_time:
        res = minimize_scalar(lambda t: -worst(t), bounds=(0.9 * t_nominal, 1.1 * t_nominal), method="bounded",
                              options={"xatol": 1e-10 * t_nominal})
        t = float(res.x)
    u = spectral.propagator(t).entries
    fids, purity, returned = _gate_metrics(u, probes, reflection)
    values = list(fids.values())
    echo = {"g_nominal": g_nominal, "axis": axis, "nominal_pulse_time": t_nominal, "optimized": optimize_time}
    echo.update(parameters or {})
    return GateReport(
        gate_fidelity=min(values),
        gate_fidelity_mean=float(np.mean(values)),
        disentanglement_purity=purity,
        electronic_return_population=returned,
        pulse_time=t,
        per_probe=fids,
        parameters=echo,
    )


def ideal_gate(space: SpaceDescriptor, axis: str = "z", g: float = 1.0) -> OperatorMatrix:
    """Propagator of ``g n sigma_x`` over ``pi/|g|``; equals ``Pi_axis`` on both electronic levels."""
    return ev.propagator(model.parity_hamiltonian(g, space, axis), math.pi / abs(g))


def two_beam_gate(
    g1: float,
    eta1: float,
    eta2: float,
    space: SpaceDescriptor,
    axis: str = "z",
    mode: str = "paper-linear",
    probes: Sequence[Probe] | None = None,
    series_order: int = model.DEFAULT_SERIES_ORDER,
    optimize_time: bool = False,
) -> GateReport:
    """Calibrate two beams, build their Hamiltonian and score the pi/g_parity pulse."""
    b1, b2, g_parity = model.calibrated_beams(g1, eta1, eta2, mode, axis, series_order)
    h = model.two_beam_hamiltonian(b1, b2, space)
    if probes is None:
        probes = probe_suite(space, axis)
    params = {"g1": g1, "g2": b2.strength, "eta1": eta1, "eta2": eta2, "g_parity": g_parity,
              "calibration": mode, "series_order": series_order}
    return parity_gate_fidelity(h, g_parity, space, axis, probes, optimize_time=optimize_time, parameters=params)


def two_beam_eta_scaling(
    etas: Sequence[float],
    g1: float = 3.0,
    eta_ratio: float = 2.0 / 3.0,
    max_level: int = 4,
    axis: str = "z",
    mode: str = "paper-linear",
    series_order: int = model.DEFAULT_SERIES_ORDER,
) -> dict:
    """Worst-case infidelity versus ``eta2 = eta``, ``eta1 = eta_ratio * eta``, and its log-log slope.

    The default ratio keeps ``eta1/eta2 = 0.2/0.3`` so ``eta = 0.3`` is the
    feasibility point of the scheme.
    """
    space = hb.mk_space(2, {axis: max_level + 3})
    probes = probe_suite(space, axis, max_level)
    infid = []
    for eta in etas:
        rep = two_beam_gate(g1, eta_ratio * eta, eta, space, axis, mode, probes, series_order)
        infid.append(rep.worst_infidelity)
    slope = float(np.polyfit(np.log(etas), np.log(infid), 1)[0])
    return {"etas": list(map(float, etas)), "eta_ratio": eta_ratio, "infidelity": infid, "slope": slope}


# ---------------------------------------------------------------------------
# NOT gate

@dataclass
class NotGateReport:
    fidelity_plus_to_minus: float
    fidelity_minus_to_plus: float
    qubit_overlap: float
    involution_fidelity: float

    def to_dict(self) -> dict:
        return asdict(self)


def not_gate_check(phi_even: StateVector, phi_odd: StateVector, gate: OperatorMatrix, axis: str = "z") -> NotGateReport:
    """Score ``gate`` as a NOT on the qubit ``psi_+- = (phi_e +- phi_o)/sqrt(2)``."""
    space = phi_even.space
    if phi_odd.space != space or gate.space != space:
        raise SpaceMismatch("states and gate live in different spaces")
    pi = hb.reflection_operator(space, axis).entries
    err_e = float(np.max(np.abs(pi @ phi_even.amplitudes - phi_even.amplitudes)))
    err_o = float(np.max(np.abs(pi @ phi_odd.amplitudes + phi_odd.amplitudes)))
    if err_e > tol.PARITY_EIGEN:
        raise NotParityEigenstate(f"phi_even is not parity-even (residual {err_e:.3e})")
    if err_o > tol.PARITY_EIGEN:
        raise NotParityEigenstate(f"phi_odd is not parity-odd (residual {err_o:.3e})")
    plus = hb.superposition([(1 / math.sqrt(2), phi_even), (1 / math.sqrt(2), phi_odd)])
    minus = hb.superposition([(1 / math.sqrt(2), phi_even), (-1 / math.sqrt(2), phi_odd)])
    g = gate.entries
    out_plus = StateVector._unchecked(space, g @ plus.amplitudes)
    out_minus = StateVector._unchecked(space, g @ minus.amplitudes)
    twice = StateVector._unchecked(space, g @ out_plus.amplitudes)
    return NotGateReport(
        fidelity_plus_to_minus=ev.fidelity(out_plus, minus),
        fidelity_minus_to_plus=ev.fidelity(out_minus, plus),
        qubit_overlap=abs(ev.overlap(plus, minus)),
        involution_fidelity=ev.fidelity(twice, plus),
    )


# ---------------------------------------------------------------------------
# time reversal

@dataclass
class TimeReversalReport:
    anticommutator_norm: float
    identity_residual: float
    recovery_fidelity: float
    three_pulse_fidelity: float
    time: float

    def to_dict(self) -> dict:
        return asdict(self)


def time_reversal_check(
    h_target: OperatorMatrix,
    t: float,
    space: SpaceDescriptor,
    axis: str,
    psi0: StateVector,
    gate: OperatorMatrix | None = None,
) -> TimeReversalReport:
    """Check ``Pi U(t) Pi = U(t)^-1`` for a Hamiltonian that anticommutes with ``Pi``.

    ``recovery_fidelity`` applies the reference reflection;
    ``three_pulse_fidelity`` applies ``gate`` (default: the ideal pi/g pulse) in
    its place, i.e. reflect, evolve for ``t``, reflect, starting from ``U(t) psi0``.
    """
    if h_target.space != space or psi0.space != space:
        raise SpaceMismatch("Hamiltonian, state and space must agree")
    pi = hb.reflection_operator(space, axis).entries
    h = h_target.entries
    anti = float(np.max(np.abs(pi @ h + h @ pi)))
    if anti >= tol.ANTICOMMUTATION:
        raise AnticommutationFailure(f"|Pi H + H Pi|_max = {anti:.3e} >= {tol.ANTICOMMUTATION}")
    u = ev.propagator(h_target, t).entries
    loop = pi @ u @ pi @ u
    residual = float(np.max(np.abs(loop - np.eye(space.dim))))
    recovered = StateVector._unchecked(space, loop @ psi0.amplitudes)
    if gate is None:
        gate = ideal_gate(space, axis)
    psi_t = u @ psi0.amplitudes
    restored = StateVector._unchecked(space, gate.entries @ (u @ (gate.entries @ psi_t)))
    return TimeReversalReport(
        anticommutator_norm=anti,
        identity_residual=residual,
        recovery_fidelity=ev.fidelity(recovered, psi0),
        three_pulse_fidelity=ev.fidelity(restored, psi0),
        time=t,
    )


def displacement_coupling(space: SpaceDescriptor, strength: float, axis: str = "z") -> OperatorMatrix:
    """``strength (a + a^dag) sigma_x``: position-coupled, anticommutes with the axis reflection."""
    h = strength * (hb.sigma_x(space).entries @ hb.position_quadrature(space, axis).entries)
    return OperatorMatrix(space, h, hermitian=True)


# ---------------------------------------------------------------------------
# adiabatic elimination

@dataclass
class EliminationReport:
    max_population_v: float
    population_v_envelope: float
    end_fidelity: float
    end_fidelity_nominal_coefficients: float
    detuning_over_coupling: float
    t_final: float
    convention: str
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def population_v_envelope(params: model.RamanParams, safety: float = 4.0) -> float:
    """``safety * 4 (|g_a|^2 + |g_b|^2) / D^2`` with ``D`` the smaller detuning."""
    d = min(abs(params.delta_minus), abs(params.delta_plus))
    return safety * 4 * (abs(params.g_a) ** 2 + abs(params.g_b) ** 2) / d**2


def _max_level_population(spectral: ev.Spectral, psi0: StateVector, times: np.ndarray, level: int,
                          chunk: int = 20000) -> float:
    """Largest population of one electronic level over ``times``, evaluated in chunks."""
    space = psi0.space
    rows = slice(level * space.vib_dim, (level + 1) * space.vib_dim)
    coeffs = spectral.vectors.conj().T @ psi0.amplitudes
    vecs = spectral.vectors[rows]
    best = 0.0
    for start in range(0, len(times), chunk):
        t = times[start:start + chunk]
        amps = (np.exp(-1j * np.outer(t, spectral.energies)) * coeffs) @ vecs.T
        best = max(best, float(np.max(np.sum(np.abs(amps) ** 2, axis=1))))
    return best


def adiabatic_elimination_check(
    params: model.RamanParams,
    space3: SpaceDescriptor,
    psi0: StateVector,
    t_final: float,
    dt: float,
    convention: str = "consistent",
    return_records: bool = False,
    record_points: int = 2001,
):
    """Co-evolve the full three-level model and the eliminated model from ``psi0``.

    Reports the largest ``|v>`` population of the full trajectory (sampled every
    ``dt``) and the end-state fidelity between the two models.  The fidelity
    obtained with the nominal elimination coefficients is reported alongside.
    With ``return_records`` both trajectories are also returned, sampled at
    ``record_points`` evenly spaced times.
    """
    ratio = params.validity_report()["detuning_over_coupling"]
    if ratio < MIN_DETUNING_RATIO:
        raise RatioTooSmall(f"|D|/|g| = {ratio:.3g} < {MIN_DETUNING_RATIO}")
    if psi0.space != space3:
        raise SpaceMismatch("initial state must live in the three-level space")
    if ev.electronic_populations(psi0)[2] > tol.EXACT:
        raise ValueError("initial state must have no |v> population")
    n = max(1, math.ceil(t_final / dt - 1e-9))
    times = np.linspace(0.0, t_final, n + 1)
    full = ev.Spectral(model.full_lambda_hamiltonian(params, space3))
    eff = ev.Spectral(model.effective_lambda_hamiltonian(params, space3, convention))
    nominal = ev.Spectral(model.effective_lambda_hamiltonian(params, space3, "nominal"))
    end_full = StateVector._unchecked(space3, full.states(psi0, [t_final])[0])
    end_eff = StateVector._unchecked(space3, eff.states(psi0, [t_final])[0])
    end_nominal = StateVector._unchecked(space3, nominal.states(psi0, [t_final])[0])
    report = EliminationReport(
        max_population_v=_max_level_population(full, psi0, times, space3.level_index("v")),
        population_v_envelope=population_v_envelope(params),
        end_fidelity=ev.fidelity(end_full, end_eff),
        end_fidelity_nominal_coefficients=ev.fidelity(end_full, end_nominal),
        detuning_over_coupling=ratio,
        t_final=t_final,
        convention=convention,
        parameters={
            "delta_minus": params.delta_minus,
            "delta_plus": params.delta_plus,
            "g_a": [complex(params.g_a).real, complex(params.g_a).imag],
            "g_b": [complex(params.g_b).real, complex(params.g_b).imag],
            "omega0": params.omega0,
            "samples": int(n + 1),
        },
    )
    if return_records:
        sample = np.linspace(0.0, t_final, record_points)
        records = []
        for spectral in (full, eff):
            amps = spectral.states(psi0, sample)
            records.append(ev.EvolutionRecord(space3, sample, [StateVector._unchecked(space3, a) for a in amps]))
        return report, records[0], records[1]
    return report
