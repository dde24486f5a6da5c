"""Composite electronic x vibrational Hilbert spaces in a truncated Fock basis.

Basis ordering is fixed: electronic index slowest, then the x, y, z modes,
with the last present axis fastest.  For a space with electronic dimension
``d`` and cutoffs ``N_x, N_y, N_z`` the basis vector ``|level, n_x, n_y, n_z>``
sits at index::

    ((level * N_x + n_x) * N_y + n_y) * N_z + n_z

Absent axes are simply dropped from the formula.  Electronic levels are
``'-'`` (ground, index 0), ``'+'`` (excited, index 1) and ``'v'`` (auxiliary,
index 2, three-level spaces only).

A cutoff ``N`` keeps Fock levels ``0..N-1``.  Operators are built directly in
the truncated space, so identities such as ``[a, a^dag] = 1`` fail on the top
level; states should keep the two highest levels empty (see
:func:`max_occupied_level`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import tolerances as tol
from .errors import (
    CutoffExceeded,
    InvalidDimension,
    MissingAxis,
    NormZero,
    NotHermitian,
    SpaceMismatch,
    UnknownAxis,
    UnknownLevel,
)

AXES = ("x", "y", "z")
LEVELS = ("-", "+", "v")


@dataclass(frozen=True)
class SpaceDescriptor:
    electronic_dim: int
    cutoffs: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if self.electronic_dim not in (2, 3):
            raise InvalidDimension(f"electronic_dim must be 2 or 3, got {self.electronic_dim}")
        if not self.cutoffs:
            raise InvalidDimension("at least one vibrational axis is required")
        axes = [a for a, _ in self.cutoffs]
        if list(axes) != sorted(axes, key=AXES.index) or len(set(axes)) != len(axes):
            raise InvalidDimension(f"axes must be distinct and ordered x, y, z: {axes}")
        for axis, n in self.cutoffs:
            if axis not in AXES:
                raise UnknownAxis(f"unknown axis {axis!r}")
            if int(n) != n or n < 1:
                raise InvalidDimension(f"cutoff for axis {axis} must be >= 1, got {n}")

    @property
    def axes(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.cutoffs)

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.cutoffs)

    @property
    def vib_dim(self) -> int:
        return math.prod(self.mode_dims)

    @property
    def dim(self) -> int:
        return self.electronic_dim * self.vib_dim

    @property
    def levels(self) -> tuple[str, ...]:
        return LEVELS[: self.electronic_dim]

    def cutoff(self, axis: str) -> int:
        for a, n in self.cutoffs:
            if a == axis:
                return n
        raise UnknownAxis(f"axis {axis!r} not present in space with axes {self.axes}")

    def level_index(self, level) -> int:
        if isinstance(level, (int, np.integer)):
            idx = int(level)
        elif level in LEVELS:
            idx = LEVELS.index(level)
        else:
            raise UnknownLevel(f"unknown electronic level {level!r}")
        if not 0 <= idx < self.electronic_dim:
            raise UnknownLevel(f"level {level!r} not present for electronic_dim={self.electronic_dim}")
        return idx

    def index(self, level, occupation: Mapping[str, int] | None = None) -> int:
        """Basis index of ``|level, n>``; axes missing from ``occupation`` are in vacuum."""
        occupation = dict(occupation or {})
        for axis in occupation:
            self.cutoff(axis)
        idx = self.level_index(level)
        for axis, n_max in self.cutoffs:
            n = int(occupation.get(axis, 0))
            if not 0 <= n < n_max:
                raise CutoffExceeded(f"n_{axis}={n} outside 0..{n_max - 1}")
            idx = idx * n_max + n
        return idx

    def unindex(self, index: int) -> tuple[int, dict[str, int]]:
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} outside 0..{self.dim - 1}")
        occupation = {}
        for axis, n_max in reversed(self.cutoffs):
            index, occupation[axis] = divmod(index, n_max)
        return index, {a: occupation[a] for a in self.axes}

    def occupation_grid(self, axis: str) -> np.ndarray:
        """Fock number of ``axis`` for every basis index."""
        pos = self.axes.index(axis) if axis in self.axes else None
        if pos is None:
            raise UnknownAxis(f"axis {axis!r} not present in space with axes {self.axes}")
        shape = (self.electronic_dim, *self.mode_dims)
        grid = np.indices(shape)[pos + 1]
        return grid.reshape(-1)

    def to_dict(self) -> dict:
        return {"electronic_dim": self.electronic_dim, "cutoffs": dict(self.cutoffs)}


def mk_space(electronic_dim: int, cutoffs: Mapping[str, int] | None = None, **axis_cutoffs) -> SpaceDescriptor:
    """Build a space, e.g. ``mk_space(2, {"z": 12})`` or ``mk_space(3, x=2, y=2, z=2)``."""
    merged = dict(cutoffs or {})
    merged.update(axis_cutoffs)
    for axis in merged:
        if axis not in AXES:
            raise UnknownAxis(f"unknown axis {axis!r}")
    ordered = tuple((a, merged[a]) for a in AXES if a in merged)
    return SpaceDescriptor(int(electronic_dim), ordered)


def _check_same_space(a: SpaceDescriptor, b: SpaceDescriptor):
    if a != b:
        raise SpaceMismatch(f"space mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense operator on a :class:`SpaceDescriptor`.

    When ``hermitian`` is set the matrix is checked on construction.
    """

    space: SpaceDescriptor
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (self.space.dim, self.space.dim):
            raise InvalidDimension(f"matrix shape {entries.shape} does not match space dimension {self.space.dim}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if self.hermitian:
            err = hermiticity_error(entries)
            if err >= tol.EXACT * max(1.0, float(np.max(np.abs(entries), initial=0.0))):
                raise NotHermitian(f"max |A - A^dag| = {err:.3e}")

    @property
    def dim(self) -> int:
        return self.space.dim

    def dag(self) -> OperatorMatrix:
        return OperatorMatrix(self.space, self.entries.conj().T, self.hermitian)

    def apply(self, state: StateVector) -> np.ndarray:
        _check_same_space(self.space, state.space)
        return self.entries @ state.amplitudes

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            _check_same_space(self.space, other.space)
            return OperatorMatrix(self.space, self.entries @ other.entries)
        if isinstance(other, StateVector):
            return self.apply(other)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        _check_same_space(self.space, other.space)
        return OperatorMatrix(self.space, self.entries + other.entries, self.hermitian and other.hermitian)

    def __sub__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        _check_same_space(self.space, other.space)
        return OperatorMatrix(self.space, self.entries - other.entries, self.hermitian and other.hermitian)

    def __neg__(self):
        return OperatorMatrix(self.space, -self.entries, self.hermitian)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        real = np.isreal(scalar)
        return OperatorMatrix(self.space, scalar * self.entries, self.hermitian and bool(real))

    __rmul__ = __mul__

    def __repr__(self):
        return f"OperatorMatrix(dim={self.dim}, hermitian={self.hermitian})"


def hermiticity_error(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix)
    return float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))


@dataclass(frozen=True, eq=False)
class StateVector:
    space: SpaceDescriptor
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (self.space.dim,):
            raise InvalidDimension(f"amplitude length {amps.shape[0]} does not match dimension {self.space.dim}")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NormZero("zero state vector")
        if abs(norm - 1.0) > tol.NORM:
            raise ValueError(f"state norm {norm!r} differs from 1 by more than {tol.NORM}; use StateVector.normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, space: SpaceDescriptor, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0 or not np.isfinite(norm):
            raise NormZero("cannot normalize a zero vector")
        return cls(space, amps / norm)

    @classmethod
    def _unchecked(cls, space: SpaceDescriptor, amplitudes) -> StateVector:
        # propagation results: drift is checked by the caller against NORM_DRIFT
        obj = object.__new__(cls)
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(obj, "space", space)
        object.__setattr__(obj, "amplitudes", amps)
        return obj

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``(electronic_dim, N_first_axis, ..., N_last_axis)``."""
        return self.amplitudes.reshape(self.space.electronic_dim, *self.space.mode_dims)

    def __repr__(self):
        return f"StateVector(dim={self.space.dim})"


# ---------------------------------------------------------------------------
# operators

def _single_mode_annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def embed_mode_operator(space: SpaceDescriptor, axis: str, op: np.ndarray) -> np.ndarray:
    """``I_el (x) ... (x) op_axis (x) ...`` with identities on the other factors."""
    space.cutoff(axis)
    factors = [np.eye(space.electronic_dim)]
    for a, n in space.cutoffs:
        factors.append(op if a == axis else np.eye(n))
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def embed_electronic_operator(space: SpaceDescriptor, op: np.ndarray) -> np.ndarray:
    return np.kron(op, np.eye(space.vib_dim))


def annihilation(space: SpaceDescriptor, axis: str) -> OperatorMatrix:
    a = _single_mode_annihilation(space.cutoff(axis))
    return OperatorMatrix(space, embed_mode_operator(space, axis, a))


def creation(space: SpaceDescriptor, axis: str) -> OperatorMatrix:
    return annihilation(space, axis).dag()


def number_op(space: SpaceDescriptor, axis: str) -> OperatorMatrix:
    n = space.cutoff(axis)
    return OperatorMatrix(space, embed_mode_operator(space, axis, np.diag(np.arange(n, dtype=float))), hermitian=True)


def position_quadrature(space: SpaceDescriptor, axis: str) -> OperatorMatrix:
    """``a + a^dag`` along ``axis`` (position in units of the ground-state half width)."""
    a = annihilation(space, axis).entries
    return OperatorMatrix(space, a + a.conj().T, hermitian=True)


def direction_weights(theta: float, phi: float) -> dict[str, float]:
    """Projection of the unit vector with polar angle ``theta`` and azimuth ``phi`` onto x, y, z."""
    return {
        "x": math.sin(theta) * math.cos(phi),
        "y": math.sin(theta) * math.sin(phi),
        "z": math.cos(theta),
    }


def rotated_mode(space: SpaceDescriptor, theta: float, phi: float) -> OperatorMatrix:
    """Annihilation operator of the mode along direction ``(theta, phi)``.

    Uses a_L = cos(theta) a_z + sin(theta) cos(phi) a_x + sin(theta) sin(phi) a_y;
    the adjoint gives a_L^dag.  Angle naming follows the convention in which
    ``theta`` is measured from the z axis.
    """
    missing = [a for a in AXES if a not in space.axes]
    if missing:
        raise MissingAxis(f"rotated_mode needs all three axes, missing {missing}")
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for axis, w in direction_weights(theta, phi).items():
        out += w * annihilation(space, axis).entries
    return OperatorMatrix(space, out)


def electronic_transition(space: SpaceDescriptor, from_level, to_level) -> OperatorMatrix:
    """``|to><from|`` tensored with the identity on every mode."""
    i = space.level_index(from_level)
    j = space.level_index(to_level)
    e = np.zeros((space.electronic_dim, space.electronic_dim), dtype=complex)
    e[j, i] = 1.0
    return OperatorMatrix(space, embed_electronic_operator(space, e), hermitian=(i == j))


def sigma_x(space: SpaceDescriptor) -> OperatorMatrix:
    """``|-><+| + |+><-|``; acts as zero on ``|v>`` in three-level spaces."""
    return OperatorMatrix(
        space,
        electronic_transition(space, "+", "-").entries + electronic_transition(space, "-", "+").entries,
        hermitian=True,
    )


def identity(space: SpaceDescriptor) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.dim), hermitian=True)


def reflection_operator(space: SpaceDescriptor, axis: str) -> OperatorMatrix:
    """Specular reflection of one axis: ``diag((-1)**n_axis)``."""
    signs = 1.0 - 2.0 * (space.occupation_grid(axis) % 2)
    return OperatorMatrix(space, np.diag(signs), hermitian=True)


def space_reversal(space: SpaceDescriptor) -> OperatorMatrix:
    missing = [a for a in AXES if a not in space.axes]
    if missing:
        raise MissingAxis(f"space reversal needs all three axes, missing {missing}")
    out = np.eye(space.dim, dtype=complex)
    for axis in AXES:
        out = out @ reflection_operator(space, axis).entries
    return OperatorMatrix(space, out, hermitian=True)


# ---------------------------------------------------------------------------
# states

def fock_state(space: SpaceDescriptor, level="-", occupation: Mapping[str, int] | None = None, **n) -> StateVector:
    occ = dict(occupation or {})
    occ.update(n)
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index(level, occ)] = 1.0
    return StateVector(space, amps)


def coherent_amplitudes(alpha: complex, cutoff: int) -> tuple[np.ndarray, float]:
    """Truncated coherent-state amplitudes and their squared norm before renormalization."""
    amps = np.empty(cutoff, dtype=complex)
    amps[0] = np.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps, float(np.vdot(amps, amps).real)


def _mode_product_state(space: SpaceDescriptor, level, axis: str, mode_amps: np.ndarray) -> np.ndarray:
    el = np.zeros(space.electronic_dim, dtype=complex)
    el[space.level_index(level)] = 1.0
    out = el
    for a, n in space.cutoffs:
        if a == axis:
            factor = mode_amps
        else:
            factor = np.zeros(n, dtype=complex)
            factor[0] = 1.0
        out = np.kron(out, factor)
    return out


def _check_occupancy(space: SpaceDescriptor, axis: str, mean_n: float):
    n = space.cutoff(axis)
    if mean_n + 5 * math.sqrt(mean_n) >= n - 2:
        warnings.warn(
            f"coherent amplitude with <n>={mean_n:.3g} is close to the cutoff N_{axis}={n}",
            RuntimeWarning,
            stacklevel=3,
        )


def coherent_state(space: SpaceDescriptor, axis: str, alpha: complex, level="-") -> StateVector:
    """Coherent state ``|alpha>`` on ``axis`` (other modes in vacuum), renormalized after truncation."""
    _check_occupancy(space, axis, abs(alpha) ** 2)
    amps, _ = coherent_amplitudes(alpha, space.cutoff(axis))
    return StateVector.normalized(space, _mode_product_state(space, level, axis, amps))


def cat_state(space: SpaceDescriptor, axis: str, alpha: complex, parity: str = "even", level="-") -> StateVector:
    """``|alpha> + |-alpha>`` (even) or ``|alpha> - |-alpha>`` (odd), normalized."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    _check_occupancy(space, axis, abs(alpha) ** 2)
    plus, _ = coherent_amplitudes(alpha, space.cutoff(axis))
    minus, _ = coherent_amplitudes(-alpha, space.cutoff(axis))
    amps = plus + minus if parity == "even" else plus - minus
    return StateVector.normalized(space, _mode_product_state(space, level, axis, amps))


def random_state(
    space: SpaceDescriptor,
    seed: int,
    level=None,
    max_level: int | Mapping[str, int] | None = None,
) -> StateVector:
    """Seeded Gaussian random state.

    ``level`` confines the electronic factor to one level; ``max_level``
    confines every mode (or the named modes) to ``n <= max_level``.
    """
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    amps = amps * support_mask(space, level, max_level)
    return StateVector.normalized(space, amps)


def support_mask(space: SpaceDescriptor, level=None, max_level: int | Mapping[str, int] | None = None) -> np.ndarray:
    mask = np.ones(space.dim, dtype=bool)
    if level is not None:
        mask &= np.repeat(np.arange(space.electronic_dim), space.vib_dim) == space.level_index(level)
    if max_level is not None:
        limits = max_level if isinstance(max_level, Mapping) else {a: max_level for a in space.axes}
        for axis, n_max in limits.items():
            mask &= space.occupation_grid(axis) <= n_max
    return mask


def superposition(terms: Iterable[tuple[complex, StateVector]]) -> StateVector:
    terms = list(terms)
    if not terms:
        raise NormZero("empty superposition")
    space = terms[0][1].space
    amps = np.zeros(space.dim, dtype=complex)
    for coeff, state in terms:
        _check_same_space(space, state.space)
        amps += coeff * state.amplitudes
    return StateVector.normalized(space, amps)


def max_occupied_level(state: StateVector, axis: str, threshold: float = 1e-14) -> int:
    """Highest Fock level of ``axis`` carrying probability above ``threshold`` (-1 if none)."""
    probs = np.abs(state.amplitudes) ** 2
    grid = state.space.occupation_grid(axis)
    occupied = grid[probs > threshold]
    return int(occupied.max()) if occupied.size else -1


def top_level_population(state: StateVector, axis: str, levels: int = 2) -> float:
    """Probability in the ``levels`` highest Fock levels of ``axis``."""
    n = state.space.cutoff(axis)
    grid = state.space.occupation_grid(axis)
    return float(np.sum(np.abs(state.amplitudes[grid >= n - levels]) ** 2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def interior_mask(space: SpaceDescriptor, margin: int = 1, axes: Sequence[str] | None = None) -> np.ndarray:
    """Basis indices where every (listed) mode sits below ``N - margin``."""
    mask = np.ones(space.dim, dtype=bool)
    for axis in axes or space.axes:
        mask &= space.occupation_grid(axis) < space.cutoff(axis) - margin
    return mask
