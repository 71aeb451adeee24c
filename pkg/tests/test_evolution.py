import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import expm_propagator, random_hermitian, random_vector
from relstate.errors import DimMismatch, RoleError
from relstate.evolution import Hamiltonian, energy, evolve, propagator
from relstate.hilbert import Operator, StateVector, basis_state

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_zero_duration_is_identity(rng):
    H = random_hermitian(rng, 5)
    np.testing.assert_allclose(propagator(H, 0.0).U.matrix, np.eye(5), atol=1e-12)


def test_sigma_x_quarter_period():
    U = propagator(SIGMA_X, np.pi / 2).U
    # cos(t) I - i sin(t) sigma_x at t = pi/2
    np.testing.assert_allclose(U.matrix @ [1, 0], [0, -1j], atol=1e-12)


def test_diagonal_exponential():
    U = propagator(np.diag([1.0, -1.0]), np.pi).U
    np.testing.assert_allclose(U.matrix, -np.eye(2), atol=1e-12)


def test_non_hermitian_rejected():
    with pytest.raises(RoleError):
        propagator(np.array([[0, 1], [0, 0]]), 1.0)
    with pytest.raises(RoleError):
        propagator(Operator(np.array([[0, 1], [2, 0]]), "general"), 1.0)


def test_propagator_matches_expm(rng):
    for _ in range(20):
        d = int(rng.integers(2, 10))
        H = random_hermitian(rng, d)
        dt = float(rng.uniform(-3, 3))
        P = propagator(H, dt)
        np.testing.assert_allclose(P.U.matrix, expm_propagator(H, dt), atol=1e-9)
        assert P.duration == dt and P.U.role == "unitary"


def test_propagator_composition(rng):
    H = Hamiltonian(random_hermitian(rng, 6))
    t1, t2 = 0.7, 1.9
    np.testing.assert_allclose(H.unitary(t1 + t2), H.unitary(t2) @ H.unitary(t1), atol=1e-8)


def test_evolve_null_hamiltonian(rng):
    psi = StateVector(random_vector(rng, 4))
    np.testing.assert_allclose(evolve(psi, np.zeros((4, 4)), 0.0, 3.0).amplitudes, psi.amplitudes, atol=1e-15)


def test_evolve_rabi():
    out = evolve(basis_state(2, 0), SIGMA_X, 0.0, np.pi / 2)
    np.testing.assert_allclose(out.amplitudes, [0, -1j], atol=1e-12)


def test_evolve_reversible(rng):
    H = random_hermitian(rng, 6)
    psi = StateVector(random_vector(rng, 6))
    back = evolve(evolve(psi, H, 0.0, 2.5), H, 2.5, 0.0)
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-8)


def test_evolve_dim_mismatch():
    with pytest.raises(DimMismatch):
        evolve(basis_state(3, 0), SIGMA_X, 0.0, 1.0)


@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-20, 20))
@settings(max_examples=60, deadline=None)
def test_norm_preserved(seed, t):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 12))
    psi = StateVector(random_vector(rng, d))
    out = evolve(psi, random_hermitian(rng, d), 0.0, t)
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


@given(seed=st.integers(0, 2**32 - 1), t1=st.floats(0, 5), t2=st.floats(0, 5))
@settings(max_examples=40, deadline=None)
def test_evolve_composes(seed, t1, t2):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, 5)
    psi = StateVector(random_vector(rng, 5))
    direct = evolve(psi, H, 0.0, t1 + t2)
    stepped = evolve(evolve(psi, H, 0.0, t1), H, t1, t1 + t2)
    np.testing.assert_allclose(direct.amplitudes, stepped.amplitudes, atol=1e-8)


def test_energy_conserved(rng):
    H = random_hermitian(rng, 7)
    psi = StateVector(random_vector(rng, 7))
    e0 = energy(psi, H)
    for t in np.linspace(0, 10, 41):
        assert energy(evolve(psi, H, 0.0, t), H) == pytest.approx(e0, abs=1e-8)
