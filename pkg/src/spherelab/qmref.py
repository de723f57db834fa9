"""Brute-force quantum-mechanical oracle.

Everything here is computed the dumb, explicit way: state vectors as
2^n complex amplitude arrays (site 1 = most significant bit, bit 0 is
spin up), spin observables as Kronecker products of sigma . n matrices,
expectations as matrix-vector contractions.  No closed form is trusted;
the closed-form expressions live in *_closed_form companions so the two
routes can be compared.

The spin matrix uses polar/azimuthal angles via
n = (sin t cos p, sin t sin p, cos t), which gives

    sigma . n = [[nz, nx - i ny], [nx + i ny, -nz]].

States implemented: the two-particle singlet, the one-parameter Hardy
state, and the three- and four-particle GHZ states, all written in the
z basis with the amplitudes exactly as conventionally printed (no
re-phasing: amplitude-level checks are used, not just probabilities).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .geometry import coplanar_direction, require_unit

NORM_TOL = 1e-12

_SQ2 = np.sqrt(2.0)

# The four single-site settings per side: plain ("a"/"b") along z, primed
# ("a'"/"b'") rotated by the Hardy angle 2*theta in the polar plane.
SITE1_SETTINGS = ("a+", "a-", "a'+", "a'-")
SITE2_SETTINGS = ("b+", "b-", "b'+", "b'-")
HARDY_PAIRS = tuple((s1, s2) for s1 in SITE1_SETTINGS for s2 in SITE2_SETTINGS)


@dataclass(frozen=True)
class StateVector:
    """Normalized state over a 2^n spin-z basis (site 1 = most significant bit)."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if not 1 <= self.n_qubits <= 4:
            raise ValueError(f"n_qubits must be 1..4, got {self.n_qubits}")
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(f"expected {2**self.n_qubits} amplitudes, got {amps.shape}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi| = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def to_json(self) -> str:
        pairs = [[z.real, z.imag] for z in self.amplitudes]
        return json.dumps({"n_qubits": self.n_qubits, "amplitudes": pairs})

    @classmethod
    def from_json(cls, doc: str) -> "StateVector":
        data = json.loads(doc)
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(int(data["n_qubits"]), amps)


@dataclass(frozen=True)
class SpinObservable:
    """sigma.n_1 (x) ... (x) sigma.n_k for unit directions n_i."""

    directions: tuple

    def __post_init__(self):
        dirs = tuple(require_unit(n) for n in self.directions)
        object.__setattr__(self, "directions", dirs)

    @property
    def n_sites(self) -> int:
        return len(self.directions)

    def matrix(self) -> np.ndarray:
        m = np.array([[1.0 + 0j]])
        for n in self.directions:
            m = np.kron(m, spin_matrix(n))
        return m

    def to_json(self) -> str:
        return json.dumps({"directions": [list(n) for n in self.directions]})

    @classmethod
    def from_json(cls, doc: str) -> "SpinObservable":
        return cls(tuple(np.asarray(d, float) for d in json.loads(doc)["directions"]))


def spin_matrix(n) -> np.ndarray:
    nx, ny, nz = require_unit(n)
    return np.array([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]])


def singlet_state() -> StateVector:
    """(|+-> - |-+>)/sqrt(2); rotationally invariant."""
    return StateVector(2, np.array([0.0, 1.0, -1.0, 0.0]) / _SQ2)


def hardy_state(theta: float) -> StateVector:
    """One-parameter family with amplitudes
    (cos t (|+-> + |-+>) - sin t |++>) / sqrt(1 + cos^2 t);
    maximally entangled at t = 0, product state -|++> at t = pi/2.
    """
    if not 0.0 <= theta <= np.pi / 2 + 1e-12:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta!r}")
    ct, st = np.cos(theta), np.sin(theta)
    amps = np.array([-st, ct, ct, 0.0]) / np.sqrt(1.0 + ct**2)
    return StateVector(2, amps)


def ghz4_state() -> StateVector:
    """(|++--> - |--++>)/sqrt(2)."""
    amps = np.zeros(16)
    amps[0b0011] = 1.0 / _SQ2
    amps[0b1100] = -1.0 / _SQ2
    return StateVector(4, amps)


def ghz3_state(alpha: float, delta: float) -> StateVector:
    """cos(a/2)|+++> + sin(a/2) e^{-i d} |--->."""
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = np.cos(alpha / 2)
    amps[0b111] = np.sin(alpha / 2) * np.exp(-1j * delta)
    return StateVector(3, amps)


def general_state(amplitudes) -> StateVector:
    amps = np.asarray(amplitudes, dtype=complex)
    n = int(np.log2(amps.size))
    if 2**n != amps.size:
        raise ValueError(f"amplitude count {amps.size} is not a power of two")
    return StateVector(n, amps)


def make_state(kind: str, **params) -> StateVector:
    """Dispatcher: singlet | hardy(theta) | ghz4 | ghz3(alpha, delta) | general(amplitudes)."""
    if kind == "singlet":
        return singlet_state()
    if kind == "hardy":
        return hardy_state(params["theta"])
    if kind == "ghz4":
        return ghz4_state()
    if kind == "ghz3":
        return ghz3_state(params["alpha"], params["delta"])
    if kind == "general":
        return general_state(params["amplitudes"])
    raise ValueError(f"unknown state kind {kind!r}")


def tensor_expectation(state: StateVector, obs: SpinObservable) -> float:
    """<psi| sigma.n_1 (x) ... |psi> by explicit contraction; real, in [-1, 1]."""
    if obs.n_sites != state.n_qubits:
        raise ValueError(f"observable has {obs.n_sites} sites, state has {state.n_qubits}")
    psi = state.amplitudes
    val = complex(np.vdot(psi, obs.matrix() @ psi))
    if abs(val.imag) > 1e-12:
        raise AssertionError(f"expectation has imaginary residue {val.imag!r}")
    return val.real


def pair_expectation(state: StateVector, a, b) -> float:
    return tensor_expectation(state, SpinObservable((a, b)))


def _site_vector(setting: str, theta: float) -> np.ndarray:
    """Single-site eigenvector in the z basis for a plain or primed setting.

    Plain settings are the z eigenstates; primed ones are rotated by
    |',+> = cos t |+> + sin t |->  and  |',-> = -sin t |+> + cos t |->.
    """
    primed = "'" in setting
    sign = setting[-1]
    ct, st = np.cos(theta), np.sin(theta)
    if not primed:
        return np.array([1.0, 0.0]) if sign == "+" else np.array([0.0, 1.0])
    return np.array([ct, st]) if sign == "+" else np.array([-st, ct])


def hardy_amplitude(theta: float, site1: str, site2: str) -> float:
    """<psi_hardy(theta) | site1 (x) site2> via explicit basis rotation."""
    if site1 not in SITE1_SETTINGS or site2 not in SITE2_SETTINGS:
        raise ValueError(f"bad setting pair ({site1!r}, {site2!r})")
    psi = hardy_state(theta).amplitudes
    product = np.kron(_site_vector(site1, theta), _site_vector(site2, theta))
    val = complex(np.vdot(psi, product))
    return val.real


def hardy_amplitude_closed_form(theta: float, site1: str, site2: str) -> float:
    """The printed closed form for each of the sixteen setting pairs.

    All share the normalization 1/sqrt(1 + cos^2 t).  Kept separate from
    hardy_amplitude so the two routes stay independently checkable.
    """
    ct, st = np.cos(theta), np.sin(theta)
    s = np.sqrt(1.0 + ct**2)
    table = {
        ("a+", "b+"): -st,
        ("a+", "b-"): ct,
        ("a+", "b'+"): 0.0,
        ("a+", "b'-"): 1.0,
        ("a-", "b+"): ct,
        ("a-", "b-"): 0.0,
        ("a-", "b'+"): ct**2,
        ("a-", "b'-"): -st * ct,
        ("a'+", "b+"): 0.0,
        ("a'+", "b-"): ct**2,
        ("a'+", "b'+"): st * ct**2,
        ("a'+", "b'-"): ct**3,
        ("a'-", "b+"): 1.0,
        ("a'-", "b-"): -st * ct,
        ("a'-", "b'+"): ct**3,
        ("a'-", "b'-"): -st * (1.0 + ct**2),
    }
    return table[(site1, site2)] / s


def chsh_qm(state: StateVector, a, ap, b, bp) -> float:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    if state.n_qubits != 2:
        raise ValueError("CHSH needs a 2-qubit state")
    return (
        pair_expectation(state, a, b)
        + pair_expectation(state, a, bp)
        + pair_expectation(state, ap, b)
        - pair_expectation(state, ap, bp)
    )


def maximize_chsh(state: StateVector, starts: int = 12, seed: int = 0):
    """Numerical supremum of |CHSH| over coplanar angle quadruples.

    Multi-start local search (signed max and min separately, then the
    larger magnitude).  Returns (value, angles) with value = sup |CHSH|
    and angles the arg-max quadruple (radians, x-z plane).
    """
    if state.n_qubits != 2:
        raise ValueError("CHSH needs a 2-qubit state")

    def chsh_of(t):
        return chsh_qm(state, *(coplanar_direction(ti) for ti in t))

    rng = np.random.default_rng(seed)
    structured = [
        np.array([0.0, np.pi / 2, np.pi / 4, -np.pi / 4]),
        np.array([0.0, np.pi / 2, 5 * np.pi / 4, 3 * np.pi / 4]),
    ]
    best_val, best_t = 0.0, np.zeros(4)
    for sgn in (1.0, -1.0):
        for t0 in structured + [rng.uniform(0, 2 * np.pi, 4) for _ in range(starts)]:
            res = optimize.minimize(
                lambda t: -sgn * chsh_of(t),
                t0,
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000},
            )
            if -res.fun > best_val:
                best_val, best_t = -res.fun, res.x
    return best_val, np.mod(best_t, 2 * np.pi)


def ghz4_expectation_closed_form(theta, phi) -> float:
    """cos t1 cos t2 cos t3 cos t4 - sin t1 sin t2 sin t3 sin t4 cos(p1 + p2 - p3 - p4)."""
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    return float(
        np.prod(np.cos(theta))
        - np.prod(np.sin(theta)) * np.cos(phi[0] + phi[1] - phi[2] - phi[3])
    )


def ghz3_expectation_closed_form(theta, phi, alpha: float, delta: float) -> float:
    """cos a cos t1 cos t2 cos t3 + sin a sin t1 sin t2 sin t3 cos(p1 + p2 + p3 + d)."""
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    return float(
        np.cos(alpha) * np.prod(np.cos(theta))
        + np.sin(alpha) * np.prod(np.sin(theta)) * np.cos(np.sum(phi) + delta)
    )
