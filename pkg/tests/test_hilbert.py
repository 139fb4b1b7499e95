import numpy as np
import pytest

from qreconstruct.errors import DimMismatch, NotHermitian, NotPositive, TraceNotOne
from qreconstruct.hilbert import (
    FockBasis,
    Observable,
    ObservationLevel,
    dm_validate,
    expectation,
    fock_operators,
    gibbs_state,
    pauli_word,
    von_neumann_entropy,
)


def test_dm_validate_accepts_physical_matrix():
    rho = dm_validate(np.diag([0.5, 0.5]), FockBasis(1))
    assert rho.dim == 2


def test_dm_validate_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        dm_validate(np.array([[0.5, 1.0], [0.0, 0.5]]), FockBasis(1))


def test_dm_validate_rejects_wrong_trace():
    with pytest.raises(TraceNotOne):
        dm_validate(np.diag([0.7, 0.7]), FockBasis(1))


def test_dm_validate_rejects_negative_eigenvalue():
    with pytest.raises(NotPositive):
        dm_validate(np.diag([1.5, -0.5]), FockBasis(1))


def test_entropy_of_pure_and_mixed_states():
    pure = dm_validate(np.diag([1.0, 0.0]), FockBasis(1))
    mixed = dm_validate(np.diag([0.5, 0.5]), FockBasis(1))
    assert von_neumann_entropy(pure) < 1e-12
    assert abs(von_neumann_entropy(mixed) - np.log(2.0)) < 1e-12


def test_gibbs_state_reproduces_thermal_weights():
    n_op = np.diag(np.arange(4).astype(complex))
    obs = [Observable("n", n_op, None if False else 1.0)]
    beta = 0.9
    sigma, log_z = gibbs_state(obs, np.array([beta]))
    weights = np.exp(-beta * np.arange(4))
    weights /= weights.sum()
    assert np.max(np.abs(np.diag(sigma.elements).real - weights)) < 1e-12
    assert abs(log_z - np.log(np.sum(np.exp(-beta * np.arange(4))))) < 1e-12


def test_expectation_matches_trace():
    rho = dm_validate(np.diag([0.2, 0.8]), FockBasis(1))
    obs = Observable("n", np.diag([0.0, 1.0]), None)
    assert abs(expectation(rho, obs) - 0.8) < 1e-12


def test_fock_operators_commutator():
    ops = fock_operators(30)
    comm = ops["a"] @ ops["a_dagger"] - ops["a_dagger"] @ ops["a"]
    # the commutator is the identity except at the truncation corner
    assert np.max(np.abs(comm[:-1, :-1] - np.eye(30))) < 1e-12


def test_pauli_word_products():
    assert np.allclose(pauli_word("X") @ pauli_word("X"), np.eye(2))
    zz = pauli_word("ZZ")
    assert np.allclose(zz, np.diag([1.0, -1.0, -1.0, 1.0]))
    assert np.allclose(pauli_word("XY"), np.kron(pauli_word("X"), pauli_word("Y")))


def test_observation_level_requires_consistent_dims():
    a = Observable("a", np.eye(2), 1.0)
    b = Observable("b", np.eye(3), 1.0)
    with pytest.raises(DimMismatch):
        ObservationLevel([a, b])


def test_observation_level_requires_means():
    with pytest.raises(ValueError):
        ObservationLevel([Observable("a", np.eye(2), None)])
