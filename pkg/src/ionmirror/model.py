"""Physical parameters and Hamiltonian builders (hbar = 1, frequencies in rad/us).

Three-level Raman model
-----------------------
The laboratory Hamiltonian of the Lambda system is::

    H = w1 |-><-| + w2 |+><+| + wv |v><v| + w0 sum_j n_j
        - [ g_a e^{-i(k_a.r - w_a t)} |-><v| + g_b e^{-i(k_b.r - w_b t)} |+><v| + h.c. ]

:func:`full_lambda_hamiltonian` removes the optical time dependence with the
exact unitary frame change ``R(t) = exp(i t [w1 |-><-| + (w1 + w_a - w_b) |+><+|
+ (w1 + w_a) |v><v|])``.  In that frame::

    H_rot = delta |+><+| - D_minus |v><v| + w0 sum_j n_j
            - [ g_a e^{-i k_a.r} |-><v| + g_b e^{-i k_b.r} |+><v| + h.c. ]

with ``D_minus = w_a - (wv - w1)``, ``D_plus = w_b - (wv - w2)`` and the
two-photon detuning ``delta = D_plus - D_minus``.  The laboratory state is
recovered as ``psi_lab(t) = R(t)^dag psi_rot(t)``.

Positions enter as ``k.r = sum_j eta_j (a_j + a_j^dag)`` with
``eta_j = sqrt(hbar / (2 M w0)) k_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

from . import hilbert as hb
from . import units
from .errors import (
    AxisMismatch,
    DegenerateEtas,
    MissingAxis,
    WrongElectronicDim,
    ZeroDetuning,
)
from .hilbert import OperatorMatrix, SpaceDescriptor

Direction = Union[str, tuple[float, float]]

BE9_MASS_KG = 9.0121831 * units.constants.atomic_mass
DEFAULT_SERIES_ORDER = 8


@dataclass(frozen=True)
class RamanParams:
    """Constants of the Lambda scheme; frequencies in rad/us, k in rad/m."""

    omega0: float
    omega1: float
    omega2: float
    omegav: float
    omega_a: float
    omega_b: float
    g_a: complex
    g_b: complex
    k_a: tuple[float, float, float] = (0.0, 0.0, 0.0)
    k_b: tuple[float, float, float] = (0.0, 0.0, 0.0)
    ion_mass: float = BE9_MASS_KG

    def __post_init__(self):
        object.__setattr__(self, "k_a", tuple(float(v) for v in self.k_a))
        object.__setattr__(self, "k_b", tuple(float(v) for v in self.k_b))
        if len(self.k_a) != 3 or len(self.k_b) != 3:
            raise ValueError("wavevectors must have three components")
        if self.omega0 <= 0:
            raise ValueError("trap frequency must be positive")
        if self.ion_mass <= 0:
            raise ValueError("ion mass must be positive")

    @classmethod
    def from_detunings(
        cls,
        g_a: complex,
        g_b: complex,
        delta_minus: float,
        delta_plus: float | None = None,
        *,
        omega0: float = 1.0,
        omega_A: float = 0.0,
        omegav: float = 1e6,
        eta_a: Sequence[float] = (0.0, 0.0, 0.0),
        eta_b: Sequence[float] = (0.0, 0.0, 0.0),
        ion_mass: float = BE9_MASS_KG,
    ) -> RamanParams:
        """Build from detunings and per-axis Lamb-Dicke components instead of absolute frequencies."""
        if delta_plus is None:
            delta_plus = delta_minus
        k_unit = units.wavenumber_for_eta(1.0, omega0, ion_mass)
        return cls(
            omega0=omega0,
            omega1=0.0,
            omega2=omega_A,
            omegav=omegav,
            omega_a=delta_minus + omegav,
            omega_b=delta_plus + omegav - omega_A,
            g_a=g_a,
            g_b=g_b,
            k_a=tuple(k_unit * e for e in eta_a),
            k_b=tuple(k_unit * e for e in eta_b),
            ion_mass=ion_mass,
        )

    @property
    def delta_minus(self) -> float:
        return self.omega_a - (self.omegav - self.omega1)

    @property
    def delta_plus(self) -> float:
        return self.omega_b - (self.omegav - self.omega2)

    @property
    def two_photon_detuning(self) -> float:
        return self.delta_plus - self.delta_minus

    @property
    def omega_A(self) -> float:
        return self.omega2 - self.omega1

    def eta_components(self, which: str) -> np.ndarray:
        k = np.asarray(self.k_a if which == "a" else self.k_b)
        return units.lamb_dicke(1.0, self.omega0, self.ion_mass) * k

    def validity_report(self) -> dict:
        """Ratios behind the large-detuning, weak-coupling conditions (all should be >> 1)."""
        d = min(abs(self.delta_minus), abs(self.delta_plus))
        g = max(abs(self.g_a), abs(self.g_b))
        spread = abs(self.delta_minus - self.delta_plus)
        return {
            "detuning_over_coupling": d / g if g else math.inf,
            "detuning_over_two_photon_detuning": d / spread if spread else math.inf,
            "delta_minus": self.delta_minus,
            "delta_plus": self.delta_plus,
        }


@dataclass(frozen=True)
class EffectiveParams:
    omega1_t: float
    omega2_t: float
    omegav_t: float
    g_eff: complex
    k_L: tuple[float, float, float]
    omega_L: float
    eta_L: float
    convention: str = "nominal"

    @property
    def omegaA_t(self) -> float:
        """Stark-shifted transition frequency."""
        return self.omega2_t - self.omega1_t

    @property
    def raman_detuning(self) -> float:
        """``omega_L - omegaA_t``; zero on the Raman resonance."""
        return self.omega_L - self.omegaA_t


def derive_effective(params: RamanParams, convention: str = "nominal") -> EffectiveParams:
    """Effective two-level parameters after eliminating ``|v>``.

    ``convention="nominal"`` uses the textbook-style closed forms as usually quoted::

        w1~ = w1 - 2|g_a|^2/D_minus      w2~ = w2 - 2|g_b|^2/D_plus
        wv~ = wv + |g_a|^2/D_minus + |g_b|^2/D_plus
        g   = g_a g_b^* (1/D_minus + 1/D_plus)

    ``convention="consistent"`` uses second-order perturbation theory in the
    rotating frame of :func:`full_lambda_hamiltonian`, which is what the full
    model actually converges to::

        w1~ = w1 + |g_a|^2/D_minus       w2~ = w2 + |g_b|^2/D_plus
        wv~ = wv - |g_a|^2/D_minus - |g_b|^2/D_plus
        g   = -g_a g_b^* (1/D_minus + 1/D_plus) / 2

    Both write the coupling as ``-[g e^{-i k_L.r} |-><+| + h.c.]``.
    """
    dm, dp = params.delta_minus, params.delta_plus
    if dm == 0 or dp == 0:
        raise ZeroDetuning(f"detunings must be nonzero (D_minus={dm}, D_plus={dp})")
    ga2, gb2 = abs(params.g_a) ** 2, abs(params.g_b) ** 2
    cross = params.g_a * np.conj(params.g_b) * (1 / dm + 1 / dp)
    if convention == "nominal":
        w1 = params.omega1 - 2 * ga2 / dm
        w2 = params.omega2 - 2 * gb2 / dp
        wv = params.omegav + ga2 / dm + gb2 / dp
        g = cross
    elif convention == "consistent":
        w1 = params.omega1 + ga2 / dm
        w2 = params.omega2 + gb2 / dp
        wv = params.omegav - ga2 / dm - gb2 / dp
        g = -cross / 2
    else:
        raise ValueError(f"unknown convention {convention!r}")
    k_L = tuple(a - b for a, b in zip(params.k_a, params.k_b))
    eta_L = units.lamb_dicke(float(np.linalg.norm(k_L)), params.omega0, params.ion_mass)
    return EffectiveParams(
        omega1_t=w1,
        omega2_t=w2,
        omegav_t=wv,
        g_eff=complex(g),
        k_L=k_L,
        omega_L=params.omega_a - params.omega_b,
        eta_L=eta_L,
        convention=convention,
    )


# ---------------------------------------------------------------------------
# plane waves

def _direction_weights(space: SpaceDescriptor, direction: Direction) -> dict[str, float]:
    if isinstance(direction, str):
        space.cutoff(direction)
        return {direction: 1.0}
    theta, phi = direction
    weights = {a: w for a, w in hb.direction_weights(theta, phi).items() if abs(w) > 1e-15}
    missing = [a for a in weights if a not in space.axes]
    if missing:
        raise MissingAxis(f"direction {direction} has components along absent axes {missing}")
    return weights


def _single_mode_plane_wave(cutoff: int, eta: float, pad: int) -> np.ndarray:
    n = cutoff + pad
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1)
    vals, vecs = np.linalg.eigh(eta * (a + a.T))
    full = (vecs * np.exp(-1j * vals)) @ vecs.conj().T
    return full[:cutoff, :cutoff]


def _product_over_axes(space: SpaceDescriptor, factors: dict[str, np.ndarray]) -> np.ndarray:
    vib = np.ones((1, 1), dtype=complex)
    for axis, n in space.cutoffs:
        vib = np.kron(vib, factors.get(axis, np.eye(n)))
    return vib


def _vib_plane_wave(space: SpaceDescriptor, etas: dict[str, float], pad: int) -> np.ndarray:
    factors = {a: _single_mode_plane_wave(space.cutoff(a), e, pad) for a, e in etas.items() if e != 0}
    return _product_over_axes(space, factors)


def plane_wave_operator(space: SpaceDescriptor, direction: Direction, eta: float, pad: int = 0) -> OperatorMatrix:
    """``exp(-i eta (a_L + a_L^dag))`` by exact exponentiation, identity on the electronic factor.

    The generator separates over axes, so the exponential is a product of
    single-mode exponentials.  ``pad`` extra Fock levels per mode are used
    while exponentiating and then discarded, which moves truncation artifacts
    away from the represented block; ``pad=0`` is the plain truncated-space
    exponential.
    """
    if eta < 0:
        raise ValueError("eta must be non-negative")
    etas = {a: eta * w for a, w in _direction_weights(space, direction).items()}
    vib = _vib_plane_wave(space, etas, pad)
    return OperatorMatrix(space, np.kron(np.eye(space.electronic_dim), vib))


def plane_wave_series(space: SpaceDescriptor, direction: Direction, eta: float, j_max: int) -> OperatorMatrix:
    """Normally ordered expansion ``e^{-eta^2/2} sum_{s,j<=j_max} (-i eta)^{s+j}/(s! j!) (a_L^dag)^j a_L^s``."""
    if eta < 0:
        raise ValueError("eta must be non-negative")
    a_L = _mode_annihilation(space, direction)
    a_dag = a_L.conj().T
    up = [np.eye(space.dim, dtype=complex)]
    down = [np.eye(space.dim, dtype=complex)]
    for _ in range(j_max):
        up.append(a_dag @ up[-1])
        down.append(a_L @ down[-1])
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for j in range(j_max + 1):
        for s in range(j_max + 1):
            coeff = (-1j * eta) ** (s + j) / (math.factorial(s) * math.factorial(j))
            out += coeff * (up[j] @ down[s])
    return OperatorMatrix(space, math.exp(-eta**2 / 2) * out)


def _mode_annihilation(space: SpaceDescriptor, direction: Direction) -> np.ndarray:
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for axis, w in _direction_weights(space, direction).items():
        out += w * hb.annihilation(space, axis).entries
    return out


def _mode_number(space: SpaceDescriptor, direction: Direction) -> np.ndarray:
    if isinstance(direction, str):
        return hb.number_op(space, direction).entries
    a = _mode_annihilation(space, direction)
    return a.conj().T @ a


# ---------------------------------------------------------------------------
# Lambda-system Hamiltonians

def _require_electronic(space: SpaceDescriptor, dim: int):
    if space.electronic_dim != dim:
        raise WrongElectronicDim(f"expected electronic_dim={dim}, got {space.electronic_dim}")


def _k_plane_wave(space: SpaceDescriptor, params: RamanParams, k, pad: int) -> np.ndarray:
    etas = units.lamb_dicke(1.0, params.omega0, params.ion_mass) * np.asarray(k, dtype=float)
    needed = {}
    for axis, eta in zip(hb.AXES, etas):
        if eta != 0:
            if axis not in space.axes:
                raise MissingAxis(f"wavevector has a component along absent axis {axis}")
            needed[axis] = float(eta)
    return _vib_plane_wave(space, needed, pad)


def _trap_energy(space: SpaceDescriptor, omega0: float) -> np.ndarray:
    total = np.zeros(space.dim)
    for axis in space.axes:
        total += space.occupation_grid(axis)
    return omega0 * total


def full_lambda_hamiltonian(params: RamanParams, space: SpaceDescriptor, pad: int = 0) -> OperatorMatrix:
    """Three-level Raman Hamiltonian in the frame rotating with both lasers (see module docs)."""
    _require_electronic(space, 3)
    vib_dim = space.vib_dim
    h = np.diag(_trap_energy(space, params.omega0)).astype(complex)
    h += np.kron(np.diag([0.0, params.two_photon_detuning, -params.delta_minus]), np.eye(vib_dim))
    pw_a = _k_plane_wave(space, params, params.k_a, pad)
    pw_b = _k_plane_wave(space, params, params.k_b, pad)
    e_mv = np.zeros((3, 3))
    e_mv[0, 2] = 1.0
    e_pv = np.zeros((3, 3))
    e_pv[1, 2] = 1.0
    coupling = params.g_a * np.kron(e_mv, pw_a) + params.g_b * np.kron(e_pv, pw_b)
    h -= coupling + coupling.conj().T
    return OperatorMatrix(space, h, hermitian=True)


def effective_lambda_hamiltonian(
    params: RamanParams, space: SpaceDescriptor, convention: str = "consistent", pad: int = 0
) -> OperatorMatrix:
    """Eliminated model embedded in the three-level space, same rotating frame as the full model.

    ``|v>`` keeps only its (shifted) energy and is decoupled.
    """
    _require_electronic(space, 3)
    eff = derive_effective(params, convention)
    shifts = [
        eff.omega1_t - params.omega1,
        params.two_photon_detuning + eff.omega2_t - params.omega2,
        -params.delta_minus + eff.omegav_t - params.omegav,
    ]
    h = np.diag(_trap_energy(space, params.omega0)).astype(complex)
    h += np.kron(np.diag(shifts), np.eye(space.vib_dim))
    e_mp = np.zeros((3, 3))
    e_mp[0, 1] = 1.0
    coupling = eff.g_eff * np.kron(e_mp, _k_plane_wave(space, params, eff.k_L, pad))
    h -= coupling + coupling.conj().T
    return OperatorMatrix(space, h, hermitian=True)


# ---------------------------------------------------------------------------
# vibronic series (two-level, interaction picture)

@dataclass(frozen=True)
class BeamSpec:
    """One effective Raman beam: strength in rad/us, Lamb-Dicke parameter, direction, series order."""

    strength: float
    eta: float
    axis: Direction = "z"
    series_order: int = DEFAULT_SERIES_ORDER

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.series_order < 0:
            raise ValueError("series_order must be non-negative")
        if not isinstance(self.axis, str):
            object.__setattr__(self, "axis", tuple(float(v) for v in self.axis))


def vibronic_coefficients(eta: float, n_levels: int, order: int = DEFAULT_SERIES_ORDER) -> np.ndarray:
    """``e^{-eta^2/2} sum_{j<=order} (-1)^j eta^{2j} / j!^2 * n!/(n-j)!`` for ``n = 0..n_levels-1``."""
    n = np.arange(n_levels, dtype=float)
    total = np.zeros(n_levels)
    falling = np.ones(n_levels)
    for j in range(order + 1):
        if j > 0:
            falling = falling * np.clip(n - (j - 1), 0, None)
        total += (-1) ** j * eta ** (2 * j) / math.factorial(j) ** 2 * falling
    return math.exp(-eta**2 / 2) * total


def series_convergence(beam: BeamSpec, n_levels: int) -> float:
    """Largest change in the per-level coefficient between orders ``J`` and ``J-1``."""
    if beam.series_order == 0:
        return float(np.max(np.abs(vibronic_coefficients(beam.eta, n_levels, 0))))
    hi = vibronic_coefficients(beam.eta, n_levels, beam.series_order)
    lo = vibronic_coefficients(beam.eta, n_levels, beam.series_order - 1)
    return float(np.max(np.abs(hi - lo)))


def _vibronic_vib_operator(beam: BeamSpec, space: SpaceDescriptor) -> np.ndarray:
    """Vibrational factor of the resonant series, acting on the full space (including I_el)."""
    if isinstance(beam.axis, str):
        n = space.cutoff(beam.axis)
        coeffs = vibronic_coefficients(beam.eta, n, beam.series_order)
        return np.diag(coeffs[space.occupation_grid(beam.axis)]).astype(complex)
    a_L = _mode_annihilation(space, beam.axis)
    a_dag = a_L.conj().T
    out = np.zeros((space.dim, space.dim), dtype=complex)
    term = np.eye(space.dim, dtype=complex)
    for j in range(beam.series_order + 1):
        if j > 0:
            term = a_dag @ term @ a_L
        out += (-1) ** j * beam.eta ** (2 * j) / math.factorial(j) ** 2 * term
    return math.exp(-beam.eta**2 / 2) * out


def vibronic_series_hamiltonian(beam: BeamSpec, space: SpaceDescriptor) -> OperatorMatrix:
    """Resonant, rotating-wave vibronic Hamiltonian ``-g f(n_L) sigma_x``."""
    _require_electronic(space, 2)
    h = -beam.strength * (hb.sigma_x(space).entries @ _vibronic_vib_operator(beam, space))
    return OperatorMatrix(space, h, hermitian=True)


@dataclass(frozen=True, eq=False)
class TimeDependentHamiltonian:
    """``H(t) = static + sum_k (e^{i nu_k t} B_k + h.c.)``."""

    space: SpaceDescriptor
    static: np.ndarray
    components: tuple[tuple[float, np.ndarray], ...] = field(default=())

    def __call__(self, t: float) -> OperatorMatrix:
        h = self.static.astype(complex, copy=True)
        for nu, b in self.components:
            term = np.exp(1j * nu * t) * b
            h += term + term.conj().T
        return OperatorMatrix(self.space, h, hermitian=True)

    @property
    def max_frequency(self) -> float:
        return max((abs(nu) for nu, _ in self.components), default=0.0)

    def __add__(self, other: TimeDependentHamiltonian) -> TimeDependentHamiltonian:
        if self.space != other.space:
            raise ValueError("space mismatch")
        return TimeDependentHamiltonian(self.space, self.static + other.static, self.components + other.components)

    @classmethod
    def constant(cls, h: OperatorMatrix) -> TimeDependentHamiltonian:
        return cls(h.space, np.array(h.entries))


def timedep_interaction_hamiltonian(
    beam: BeamSpec,
    space: SpaceDescriptor,
    omega0: float,
    detuning_A: float = 0.0,
    keep_offdiagonal: bool = True,
) -> TimeDependentHamiltonian:
    """Interaction-picture vibronic Hamiltonian before the rotating-wave step.

    ``H(t) = -g e^{-eta^2/2} sum_{s,j<=J} (-i eta)^{s+j}/(s! j!) (a^dag)^j a^s
    e^{i (j-s) w0 t} |-><+| e^{-i detuning_A t} + h.c.``, ``J = beam.series_order``,
    where ``detuning_A = wA~ - w_L``.  With ``keep_offdiagonal=False`` only the
    ``j = s`` terms are retained.
    """
    _require_electronic(space, 2)
    order = beam.series_order
    a_L = _mode_annihilation(space, beam.axis)
    a_dag = a_L.conj().T
    up = [np.eye(space.dim, dtype=complex)]
    down = [np.eye(space.dim, dtype=complex)]
    for _ in range(order):
        up.append(a_dag @ up[-1])
        down.append(a_L @ down[-1])
    lower = hb.electronic_transition(space, "+", "-").entries  # |-><+|
    prefactor = -beam.strength * math.exp(-beam.eta**2 / 2)
    by_sideband: dict[int, np.ndarray] = {}
    for j in range(order + 1):
        for s in range(order + 1):
            if j != s and not keep_offdiagonal:
                continue
            coeff = prefactor * (-1j * beam.eta) ** (s + j) / (math.factorial(s) * math.factorial(j))
            term = coeff * (up[j] @ down[s])
            by_sideband[j - s] = by_sideband.get(j - s, 0) + term
    components = tuple(
        ((m * omega0 - detuning_A), lower @ mat) for m, mat in sorted(by_sideband.items())
    )
    return TimeDependentHamiltonian(space, np.zeros((space.dim, space.dim), dtype=complex), components)


# ---------------------------------------------------------------------------
# two-beam parity scheme

CALIBRATION_MODES = ("paper-linear", "exact-carrier-cancel")


def calibrate_two_beams(g1: float, eta1: float, eta2: float, mode: str = "paper-linear") -> tuple[float, float]:
    """Second beam strength cancelling the carrier, and the resulting parity coupling.

    ``paper-linear`` enforces ``g1 (1 - eta1^2/2) + g2 (1 - eta2^2/2) = 0``;
    ``exact-carrier-cancel`` enforces ``g1 e^{-eta1^2/2} + g2 e^{-eta2^2/2} = 0``.
    Both report the leading-order parity coupling ``-g1 (eta2^2 - eta1^2)``.
    """
    if eta1 == eta2:
        raise DegenerateEtas(f"eta1 == eta2 == {eta1}: the parity coupling vanishes")
    if not (0 <= eta1 < 1 and 0 <= eta2 < 1):
        raise ValueError("Lamb-Dicke parameters must lie in [0, 1)")
    if mode == "paper-linear":
        g2 = -g1 * (1 - eta1**2 / 2) / (1 - eta2**2 / 2)
    elif mode == "exact-carrier-cancel":
        g2 = -g1 * math.exp(-(eta1**2) / 2) / math.exp(-(eta2**2) / 2)
    else:
        raise ValueError(f"unknown calibration mode {mode!r}; expected one of {CALIBRATION_MODES}")
    g_parity = -g1 * (eta2**2 - eta1**2)
    return g2, g_parity


def calibrated_beams(
    g1: float, eta1: float, eta2: float, mode: str = "paper-linear", axis: Direction = "z",
    series_order: int = DEFAULT_SERIES_ORDER,
) -> tuple[BeamSpec, BeamSpec, float]:
    g2, g_parity = calibrate_two_beams(g1, eta1, eta2, mode)
    return (
        BeamSpec(g1, eta1, axis, series_order),
        BeamSpec(g2, eta2, axis, series_order),
        g_parity,
    )


def two_beam_hamiltonian(beam1: BeamSpec, beam2: BeamSpec, space: SpaceDescriptor) -> OperatorMatrix:
    if beam1.axis != beam2.axis:
        raise AxisMismatch(f"beams must share a direction: {beam1.axis} vs {beam2.axis}")
    return vibronic_series_hamiltonian(beam1, space) + vibronic_series_hamiltonian(beam2, space)


def parity_hamiltonian(g: float, space: SpaceDescriptor, axis: Direction = "z") -> OperatorMatrix:
    """``g n_L sigma_x``."""
    _require_electronic(space, 2)
    h = g * (hb.sigma_x(space).entries @ _mode_number(space, axis))
    return OperatorMatrix(space, h, hermitian=True)


def with_strength(beam: BeamSpec, strength: float) -> BeamSpec:
    return replace(beam, strength=strength)
