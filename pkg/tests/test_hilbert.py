import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionmirror import hilbert as hb
from ionmirror.errors import (
    CutoffExceeded,
    InvalidDimension,
    MissingAxis,
    NormZero,
    UnknownAxis,
    UnknownLevel,
)

import oracles

EXACT = 1e-12


def test_dimensions():
    assert hb.mk_space(2, {"z": 4}).dim == 8
    assert hb.mk_space(3, x=2, y=2, z=2).dim == 24


@pytest.mark.parametrize("args", [(2, {"z": 0}), (4, {"z": 3}), (2, {}), (2, {"w": 3})])
def test_invalid_spaces(args):
    with pytest.raises((InvalidDimension, UnknownAxis)):
        hb.mk_space(*args)


def test_index_formula_matches_docs():
    space = hb.mk_space(3, x=2, y=3, z=4)
    assert space.index("+", {"x": 1, "y": 2, "z": 3}) == ((1 * 2 + 1) * 3 + 2) * 4 + 3


@settings(max_examples=60, deadline=None)
@given(
    el=st.sampled_from([2, 3]),
    nx=st.integers(1, 3),
    ny=st.integers(1, 3),
    nz=st.integers(1, 4),
    data=st.data(),
)
def test_index_round_trip(el, nx, ny, nz, data):
    space = hb.mk_space(el, x=nx, y=ny, z=nz)
    i = data.draw(st.integers(0, space.dim - 1))
    level, occ = space.unindex(i)
    assert space.index(level, occ) == i


def test_index_errors():
    space = hb.mk_space(2, z=3)
    with pytest.raises(CutoffExceeded):
        space.index("-", {"z": 3})
    with pytest.raises(UnknownLevel):
        space.index("v")
    with pytest.raises(UnknownAxis):
        space.index("-", {"x": 0})


def test_annihilation_ladder():
    space = hb.mk_space(2, z=5)
    a = hb.annihilation(space, "z")
    out = a.apply(hb.fock_state(space, "-", z=1))
    expected = np.zeros(space.dim)
    expected[space.index("-", {"z": 0})] = 1.0
    assert np.allclose(out, expected, atol=EXACT)
    assert np.allclose(a.apply(hb.fock_state(space, "-", z=0)), 0, atol=EXACT)
    for n in range(1, 5):
        for level in "-+":
            assert a.entries[space.index(level, {"z": n - 1}), space.index(level, {"z": n})] == pytest.approx(
                math.sqrt(n), abs=EXACT
            )
    # one nonzero per column at most
    assert np.count_nonzero(a.entries) == 2 * 4


def test_commutator_identity_below_cutoff():
    space = hb.mk_space(2, z=6)
    a = hb.annihilation(space, "z").entries
    comm = hb.commutator(a, a.conj().T)
    mask = space.occupation_grid("z") <= 4
    assert np.allclose(comm[np.ix_(mask, mask)], np.eye(mask.sum()), atol=EXACT)
    top = space.index("-", {"z": 5})
    assert comm[top, top] == pytest.approx(-5)  # truncation artifact


def test_number_operator():
    space = hb.mk_space(2, z=4)
    n = hb.number_op(space, "z")
    assert np.allclose(np.diag(n.entries)[:4], [0, 1, 2, 3])
    a = hb.annihilation(space, "z")
    # sqrt(n)**2 rounds in the last bit, so equality holds to machine precision
    assert np.max(np.abs(n.entries - (hb.creation(space, "z") @ a).entries)) <= 4 * np.finfo(float).eps
    assert np.array_equal(hb.creation(space, "z").entries, a.entries.conj().T)


def test_rotated_mode():
    space = hb.mk_space(2, x=3, y=3, z=3)
    assert np.allclose(hb.rotated_mode(space, 0, 0).entries, hb.annihilation(space, "z").entries, atol=EXACT)
    assert np.allclose(hb.rotated_mode(space, math.pi / 2, 0).entries, hb.annihilation(space, "x").entries,
                       atol=EXACT)
    with pytest.raises(MissingAxis):
        hb.rotated_mode(hb.mk_space(2, z=3), 0.1, 0.2)


@settings(max_examples=20, deadline=None)
@given(theta=st.floats(0, math.pi), phi=st.floats(0, 2 * math.pi))
def test_rotated_mode_commutator_interior(theta, phi):
    space = hb.mk_space(2, x=3, y=3, z=3)
    a = hb.rotated_mode(space, theta, phi).entries
    comm = hb.commutator(a, a.conj().T)
    mask = hb.interior_mask(space, margin=1)
    assert np.allclose(comm[np.ix_(mask, mask)], np.eye(mask.sum()), atol=1e-12)


def test_electronic_transitions():
    space = hb.mk_space(3, z=2)
    sx = hb.sigma_x(space)
    assert sx.hermitian and hb.hermiticity_error(sx.entries) < EXACT
    lower = hb.electronic_transition(space, "+", "-").entries
    assert np.allclose(lower @ lower, 0)
    pv = hb.electronic_transition(space, "v", "v").entries
    assert np.allclose(pv @ pv, pv)
    with pytest.raises(UnknownLevel):
        hb.electronic_transition(hb.mk_space(2, z=2), "v", "-")


def test_reflection_examples():
    space = hb.mk_space(2, z=5)
    pi = hb.reflection_operator(space, "z")
    f3 = hb.fock_state(space, "-", z=3)
    f0 = hb.fock_state(space, "-", z=0)
    assert np.allclose(pi.apply(f3), -f3.amplitudes)
    assert np.allclose(pi.apply(f0), f0.amplitudes)


@pytest.mark.parametrize("axes", [{"z": 5}, {"x": 3, "y": 2, "z": 4}])
def test_reflection_invariants(axes):
    space = hb.mk_space(2, axes)
    for axis in space.axes:
        pi = hb.reflection_operator(space, axis).entries
        eye = np.eye(space.dim)
        assert hb.hermiticity_error(pi) < EXACT
        assert np.max(np.abs(pi.conj().T @ pi - eye)) < EXACT
        assert np.max(np.abs(pi @ pi - eye)) < EXACT
        for other in space.axes:
            n = hb.number_op(space, other).entries
            assert np.max(np.abs(hb.commutator(pi, n))) < EXACT
        a = hb.annihilation(space, axis).entries
        mask = hb.interior_mask(space, margin=1, axes=[axis])
        conj = (pi @ a @ pi)[np.ix_(mask, mask)]
        assert np.max(np.abs(conj + a[np.ix_(mask, mask)])) < EXACT


def test_reflection_of_coherent_state():
    space = hb.mk_space(2, z=20)
    plus = hb.coherent_state(space, "z", 1.0)
    minus = hb.coherent_state(space, "z", -1.0)
    reflected = hb.StateVector(space, hb.reflection_operator(space, "z").apply(plus))
    assert abs(np.vdot(reflected.amplitudes, minus.amplitudes)) ** 2 >= 1 - 1e-8


def test_space_reversal():
    space = hb.mk_space(2, x=3, y=3, z=5)
    rev = hb.space_reversal(space)
    assert np.allclose(rev.apply(hb.fock_state(space, "-", x=1, y=1, z=1)),
                       -hb.fock_state(space, "-", x=1, y=1, z=1).amplitudes)
    assert np.allclose(rev.apply(hb.fock_state(space, "+", x=2, y=0, z=4)),
                       hb.fock_state(space, "+", x=2, y=0, z=4).amplitudes)
    assert np.allclose(rev.entries @ rev.entries, np.eye(space.dim))
    expected = (hb.reflection_operator(space, "x") @ hb.reflection_operator(space, "y")
                @ hb.reflection_operator(space, "z")).entries
    assert np.array_equal(rev.entries, expected)
    with pytest.raises(MissingAxis):
        hb.space_reversal(hb.mk_space(2, z=3))


def test_fock_state_single_amplitude():
    space = hb.mk_space(2, z=4)
    assert np.count_nonzero(hb.fock_state(space, "-", z=2).amplitudes) == 1
    with pytest.raises(CutoffExceeded):
        hb.fock_state(space, "-", z=4)


def test_coherent_truncation_deficit():
    _, norm2 = hb.coherent_amplitudes(1.0, 20)
    assert norm2 >= 1 - 1e-10
    tail = 1 - oracles.coherent_populations(1.0, 1000)[:20].sum()
    assert 1 - norm2 == pytest.approx(tail, abs=1e-15)


def test_coherent_near_cutoff_warns():
    with pytest.warns(RuntimeWarning):
        hb.coherent_state(hb.mk_space(2, z=6), "z", 1.5)


def test_random_state_deterministic():
    space = hb.mk_space(2, z=6)
    a = hb.random_state(space, 7)
    b = hb.random_state(space, 7)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, hb.random_state(space, 8).amplitudes)
    assert a.norm == pytest.approx(1, abs=1e-12)


def test_state_norm_checks():
    space = hb.mk_space(2, z=2)
    with pytest.raises(NormZero):
        hb.StateVector(space, np.zeros(space.dim))
    with pytest.raises(ValueError):
        hb.StateVector(space, np.ones(space.dim))
    with pytest.raises(NormZero):
        hb.superposition([(1.0, hb.fock_state(space, "-")), (-1.0, hb.fock_state(space, "-"))])


def test_cat_parity():
    space = hb.mk_space(2, z=25)
    pi = hb.reflection_operator(space, "z")
    even = hb.cat_state(space, "z", 1.2, "even")
    odd = hb.cat_state(space, "z", 1.2, "odd")
    assert np.max(np.abs(pi.apply(even) - even.amplitudes)) < 1e-12
    assert np.max(np.abs(pi.apply(odd) + odd.amplitudes)) < 1e-12
    assert abs(np.vdot(even.amplitudes, odd.amplitudes)) < 1e-12


def test_operator_hermitian_flag_checked():
    space = hb.mk_space(2, z=2)
    m = np.zeros((4, 4))
    m[0, 1] = 1.0
    with pytest.raises(ValueError):
        hb.OperatorMatrix(space, m, hermitian=True)


def test_guards():
    space = hb.mk_space(2, z=6)
    psi = hb.fock_state(space, "-", z=3)
    assert hb.max_occupied_level(psi, "z") == 3
    assert hb.top_level_population(psi, "z") == 0
    assert hb.top_level_population(hb.fock_state(space, "-", z=4), "z") == 1
