"""Brute-force oracle checks: state construction, tensor expectations vs
closed forms, the sixteen amplitude predictions, CHSH maximization."""

import json

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from spherelab import qmref
from spherelab.geometry import coplanar_direction, random_unit_vectors, spherical_direction

RNG = np.random.default_rng(303)

SQ2 = np.sqrt(2.0)


def test_singlet_amplitudes():
    state = qmref.singlet_state()
    assert np.allclose(state.amplitudes, [0.0, 1 / SQ2, -1 / SQ2, 0.0], atol=0.0)


def test_hardy_state_limits():
    # theta = pi/2 is the product state -|++>.
    amps = qmref.hardy_state(np.pi / 2).amplitudes
    assert np.allclose(amps, [-1.0, 0.0, 0.0, 0.0], atol=1e-15)
    # theta = 0 is the maximally entangled (|+-> + |-+>)/sqrt(2).
    amps = qmref.hardy_state(0.0).amplitudes
    assert np.allclose(amps, [0.0, 1 / SQ2, 1 / SQ2, 0.0], atol=0.0)
    with pytest.raises(ValueError):
        qmref.hardy_state(2.0)


def test_ghz_state_amplitudes():
    assert np.allclose(qmref.ghz3_state(0.0, 1.3).amplitudes, np.eye(8)[0], atol=0.0)
    amps = qmref.ghz3_state(np.pi / 3, 0.25).amplitudes
    assert amps[0] == pytest.approx(np.cos(np.pi / 6))
    assert amps[7] == pytest.approx(np.sin(np.pi / 6) * np.exp(-0.25j))
    amps4 = qmref.ghz4_state().amplitudes
    assert amps4[0b0011] == pytest.approx(1 / SQ2) and amps4[0b1100] == pytest.approx(-1 / SQ2)


def test_state_validation():
    with pytest.raises(ValueError):
        qmref.StateVector(2, np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        qmref.general_state([1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        qmref.make_state("nope")
    assert qmref.make_state("hardy", theta=0.3).n_qubits == 2


def test_state_json_round_trip():
    state = qmref.ghz3_state(0.7, 1.1)
    back = qmref.StateVector.from_json(state.to_json())
    assert back.n_qubits == 3
    assert np.array_equal(back.amplitudes, state.amplitudes)
    obs = qmref.SpinObservable(tuple(random_unit_vectors(RNG, 3)))
    back_obs = qmref.SpinObservable.from_json(obs.to_json())
    assert all(np.array_equal(a, b) for a, b in zip(obs.directions, back_obs.directions))


def test_spin_matrix_is_hermitian_involution():
    for n in random_unit_vectors(RNG, 50):
        m = qmref.spin_matrix(n)
        assert np.allclose(m, m.conj().T, atol=0.0)
        assert np.allclose(m @ m, np.eye(2), atol=1e-15)


def test_singlet_perfect_anticorrelation():
    state = qmref.singlet_state()
    for n in random_unit_vectors(RNG, 100):
        assert qmref.pair_expectation(state, n, n) == pytest.approx(-1.0, abs=1e-12)
    a = np.array([1.0, 0.0, 0.0])
    b = np.array([0.0, 0.0, 1.0])
    assert qmref.pair_expectation(state, a, b) == pytest.approx(0.0, abs=1e-12)


def test_singlet_is_minus_dot_product():
    state = qmref.singlet_state()
    for _ in range(300):
        a, b = random_unit_vectors(RNG, 2)
        assert qmref.pair_expectation(state, a, b) == pytest.approx(-np.dot(a, b), abs=1e-12)


def test_singlet_rotational_invariance():
    state = qmref.singlet_state()
    a, b = random_unit_vectors(RNG, 2)
    base = qmref.pair_expectation(state, a, b)
    for rot in Rotation.random(1000, rng=np.random.default_rng(7)):
        assert abs(qmref.pair_expectation(state, rot.apply(a), rot.apply(b)) - base) < 1e-12


def test_expectation_validation():
    with pytest.raises(ValueError):
        qmref.tensor_expectation(qmref.singlet_state(), qmref.SpinObservable((np.array([0.0, 0.0, 1.0]),)))


def test_ghz4_oracle_equals_closed_form():
    state = qmref.ghz4_state()
    z = np.array([0.0, 0.0, 1.0])
    assert qmref.tensor_expectation(state, qmref.SpinObservable((z, z, z, z))) == pytest.approx(1.0, abs=1e-12)
    for _ in range(500):
        theta = RNG.uniform(0, np.pi, 4)
        phi = RNG.uniform(0, 2 * np.pi, 4)
        dirs = tuple(spherical_direction(t, p) for t, p in zip(theta, phi))
        brute = qmref.tensor_expectation(state, qmref.SpinObservable(dirs))
        assert brute == pytest.approx(qmref.ghz4_expectation_closed_form(theta, phi), abs=1e-12)


def test_ghz3_oracle_equals_closed_form():
    for _ in range(500):
        alpha, delta = RNG.uniform(0, np.pi), RNG.uniform(0, 2 * np.pi)
        theta = RNG.uniform(0, np.pi, 3)
        phi = RNG.uniform(0, 2 * np.pi, 3)
        dirs = tuple(spherical_direction(t, p) for t, p in zip(theta, phi))
        brute = qmref.tensor_expectation(qmref.ghz3_state(alpha, delta), qmref.SpinObservable(dirs))
        assert brute == pytest.approx(
            qmref.ghz3_expectation_closed_form(theta, phi, alpha, delta), abs=1e-12
        )


def test_hardy_amplitudes_match_closed_forms_on_grid():
    for theta in np.linspace(0.0, np.pi / 2, 21):
        for s1, s2 in qmref.HARDY_PAIRS:
            brute = qmref.hardy_amplitude(theta, s1, s2)
            closed = qmref.hardy_amplitude_closed_form(theta, s1, s2)
            assert brute == pytest.approx(closed, abs=1e-12), (theta, s1, s2)


def test_hardy_vanishing_and_forced_amplitudes():
    for theta in np.linspace(0.0, np.pi / 2, 21):
        assert qmref.hardy_amplitude(theta, "a'+", "b+") == pytest.approx(0.0, abs=1e-12)
        assert qmref.hardy_amplitude(theta, "a+", "b'+") == pytest.approx(0.0, abs=1e-12)
        assert qmref.hardy_amplitude(theta, "a-", "b-") == pytest.approx(0.0, abs=1e-12)
    # The forced joint amplitude at theta = pi/4: sin t cos^2 t / sqrt(1 + cos^2 t).
    val = qmref.hardy_amplitude(np.pi / 4, "a'+", "b'+")
    assert val == pytest.approx(0.2886751345948129, abs=1e-12)
    assert val == pytest.approx(1.0 / (2.0 * np.sqrt(3.0)), abs=1e-15)
    assert qmref.hardy_amplitude(0.0, "a'+", "b'+") == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        qmref.hardy_amplitude(0.3, "c+", "b+")


def test_chsh_qm_values():
    state = qmref.singlet_state()
    quad = [np.deg2rad(t) for t in (0.0, 90.0, 225.0, 135.0)]
    dirs = [coplanar_direction(t) for t in quad]
    # Direct cosine evaluation of this quadruple gives +2 sqrt(2).
    assert qmref.chsh_qm(state, *dirs) == pytest.approx(2 * SQ2, abs=1e-12)
    quad_neg = [np.deg2rad(t) for t in (0.0, 90.0, 45.0, -45.0)]
    dirs_neg = [coplanar_direction(t) for t in quad_neg]
    assert qmref.chsh_qm(state, *dirs_neg) == pytest.approx(-2 * SQ2, abs=1e-12)
    # Collapsed string: a = a', b = b'.
    a, b = random_unit_vectors(RNG, 2)
    collapsed = qmref.chsh_qm(state, a, a, b, b)
    assert collapsed == pytest.approx(2.0 * qmref.pair_expectation(state, a, b), abs=1e-12)
    assert -2.0 - 1e-12 <= collapsed <= 2.0 + 1e-12


def test_chsh_product_state_classical_bound():
    product = qmref.general_state([1.0, 0.0, 0.0, 0.0])
    worst = 0.0
    for t in RNG.uniform(0, 2 * np.pi, (10_000, 4)):
        worst = max(worst, abs(qmref.chsh_qm(product, *(coplanar_direction(ti) for ti in t))))
    assert worst <= 2.0 + 1e-9


def test_maximize_chsh():
    value, angles = qmref.maximize_chsh(qmref.singlet_state(), seed=5)
    assert value == pytest.approx(2 * SQ2, abs=1e-6)
    dirs = [coplanar_direction(t) for t in angles]
    assert abs(qmref.chsh_qm(qmref.singlet_state(), *dirs)) == pytest.approx(value, abs=1e-9)
    # Product state stays below the classical bound.
    value_prod, _ = qmref.maximize_chsh(qmref.general_state([1.0, 0.0, 0.0, 0.0]), seed=5)
    assert value_prod <= 2.0 + 1e-6
    # theta = 0 member of the family is maximally entangled again.
    value_h0, _ = qmref.maximize_chsh(qmref.hardy_state(0.0), seed=5)
    assert value_h0 == pytest.approx(2 * SQ2, abs=1e-6)


def test_expectation_stays_in_physical_range():
    for _ in range(200):
        amps = RNG.standard_normal(8) + 1j * RNG.standard_normal(8)
        state = qmref.general_state(amps / np.linalg.norm(amps))
        obs = qmref.SpinObservable(tuple(random_unit_vectors(RNG, 3)))
        val = qmref.tensor_expectation(state, obs)
        assert -1.0 - 1e-12 <= val <= 1.0 + 1e-12
