"""Property-based checks of the structural invariants.

Hypothesis drives the randomized inputs; budgets are kept small because
each example solves an eigenproblem or a quadrature.
"""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from qreconstruct.bayes import spin1_posterior_directions
from qreconstruct.hilbert import Observable, expectation, gibbs_state
from qreconstruct.maxent import closed_form_reconstruct, spec_from_state
from qreconstruct.spin import SpinLevel, pauli_means, spin_maxent
from qreconstruct.states import Coherent, StateSpec, Thermal, make_state
from qreconstruct.tomography import deviation
from qreconstruct.wigner import PhaseGrid, wigner_from_dm

_SETTINGS = settings(max_examples=15, deadline=None)


def _random_two_spin_state(seed: int):
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    m /= np.trace(m).real
    from qreconstruct.hilbert import DensityMatrix, SpinProductBasis

    return DensityMatrix(m, SpinProductBasis(2))


@_SETTINGS
@given(st.integers(min_value=0, max_value=10_000))
def test_entropy_never_increases_under_level_extension(seed):
    rho = _random_two_spin_state(seed)
    words_coarse = ["ZI", "IZ"]
    words_fine = ["ZI", "IZ", "ZZ"]
    coarse = spin_maxent(SpinLevel(words_coarse, list(pauli_means(rho, words_coarse).values())))
    fine = spin_maxent(SpinLevel(words_fine, list(pauli_means(rho, words_fine).values())))
    assert fine.entropy <= coarse.entropy + 1e-8


@_SETTINGS
@given(st.integers(min_value=0, max_value=10_000))
def test_log_partition_gradient_is_minus_the_mean(seed):
    rng = np.random.Generator(np.random.Philox(seed))
    dim = 4
    obs = []
    for k in range(2):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        obs.append(Observable(f"G{k}", (g + g.conj().T) / 2.0, 0.0))
    lambdas = rng.normal(size=2) * 0.5
    sigma, _ = gibbs_state(obs, lambdas)
    eps = 1e-6
    for k in range(2):
        up, down = lambdas.copy(), lambdas.copy()
        up[k] += eps
        down[k] -= eps
        grad = (gibbs_state(obs, up)[1] - gibbs_state(obs, down)[1]) / (2 * eps)
        assert abs(grad + expectation(sigma, obs[k])) < 1e-5


@_SETTINGS
@given(
    st.floats(min_value=-1.2, max_value=1.2),
    st.floats(min_value=-1.2, max_value=1.2),
)
def test_wigner_normalization_for_coherent_states(re, im):
    rho = make_state(StateSpec(Coherent(complex(re, im)), 40))
    grid = wigner_from_dm(rho, PhaseGrid(-6.5, 6.5, -6.5, 6.5, 121, 121))
    qs, ps = grid.axes()
    total = np.trapezoid(np.trapezoid(grid.values, ps, axis=1), qs)
    assert abs(total / np.pi - 1.0) < 1e-6


@_SETTINGS
@given(
    st.integers(min_value=0, max_value=10_000),
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
)
def test_spin1_posterior_is_rotation_covariant(seed, rx, ry, rz):
    rng = np.random.Generator(np.random.Philox(seed))
    dirs = []
    for _ in range(3):
        d = rng.normal(size=3)
        dirs.append((d / np.linalg.norm(d), int(rng.choice([-1, 1]))))
    rot = Rotation.from_rotvec([rx, ry, rz]).as_matrix()
    base = spin1_posterior_directions(dirs)
    rotated = spin1_posterior_directions([(rot @ d, s) for d, s in dirs])

    def bloch(m):
        return np.array(
            [
                2.0 * m.elements[0, 1].real,
                -2.0 * m.elements[0, 1].imag,
                (m.elements[0, 0] - m.elements[1, 1]).real,
            ]
        )

    assert np.max(np.abs(bloch(rotated.rho) - rot @ bloch(base.rho))) < 1e-9


@_SETTINGS
@given(st.floats(min_value=0.1, max_value=3.0))
def test_field_level_entropy_order_on_thermal_states(nbar):
    rho = make_state(StateSpec(Thermal(nbar), 80))
    s1 = closed_form_reconstruct(spec_from_state("O1", rho), 80)["entropy"]
    s2 = closed_form_reconstruct(spec_from_state("O2", rho), 80)["entropy"]
    assert s2 <= s1 + 1e-9


@_SETTINGS
@given(st.integers(min_value=0, max_value=10_000))
def test_deviation_is_a_symmetric_premetric(seed):
    rng = np.random.Generator(np.random.Philox(seed))
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert deviation(a, b) >= 0.0
    assert abs(deviation(a, b) - deviation(b, a)) < 1e-12
    assert deviation(a, a) == 0.0
