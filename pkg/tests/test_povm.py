import numpy as np
import pytest

from qreconstruct.errors import DimMismatch, InvalidPovm, RankDeficiency
from qreconstruct.povm import (
    Povm,
    build_F,
    build_phase_povm,
    build_spin_povm,
    mean_fidelity,
    neumark_extend,
    rotation,
    spin_coherent,
)


def test_spin_kernel_examples():
    f = build_F("spin", 1)
    assert np.allclose(np.diag(f.matrix), [1.0 / 6.0, 1.0 / 3.0])
    assert abs(f.bound - 2.0 / 3.0) < 1e-12
    for n in range(1, 9):
        assert abs(build_F("spin", n).bound - (n + 1) / (n + 2)) < 1e-12


def test_phase_kernel_examples():
    f = build_F("phase", 1)
    assert abs(f.matrix[0, 1] - 1.0 / 8.0) < 1e-15
    assert np.max(np.abs(f.matrix - f.matrix.conj().T)) < 1e-15
    # the naive dimension bound exceeds unity once N > 2
    assert build_F("phase", 3).bound > 1.0


def test_build_F_rejects_bad_input():
    with pytest.raises(DimMismatch):
        build_F("spin", 0)
    with pytest.raises(DimMismatch):
        build_F("other", 2)


def test_spin_povm_shape_and_positivity():
    for n in (1, 3, 5):
        povm = build_spin_povm(n)
        assert len(povm.elements) == (n + 1) ** 2
        assert povm.completeness_defect() < 1e-10
        for el, w in zip(povm.elements, povm.weights):
            vals = np.linalg.eigvalsh(el)
            assert vals.min() > -1e-12
            # rank one with trace c_r^2/(N+1)
            assert abs(vals[-1] - w) < 1e-12
            assert np.sum(vals > 1e-12) <= 1


def test_spin_povm_attains_the_bound():
    report = mean_fidelity(build_spin_povm(4), samples=200_000, seed=1)
    assert abs(report.closed_sum - 5.0 / 6.0) < 1e-9
    assert abs(report.mc_estimate - 5.0 / 6.0) < 2e-3
    assert abs(report.closed_sum - report.bound) < 1e-9


def test_jittered_guesses_never_beat_the_bound():
    rng = np.random.Generator(np.random.Philox(2))
    povm = build_spin_povm(2)
    jittered = Povm(
        elements=povm.elements,
        guesses=[
            (t + rng.uniform(-0.05, 0.05), p + rng.uniform(-0.05, 0.05))
            for t, p in povm.guesses
        ],
        task="spin",
        copies=2,
    )
    report = mean_fidelity(jittered, samples=10_000, seed=3)
    assert report.closed_sum <= report.bound + 1e-12
    assert report.closed_sum < 0.75


def test_random_measurement_stays_below_the_bound():
    # an isotropic measurement with fixed guesses is far from optimal
    povm = build_spin_povm(3)
    flat = Povm(
        elements=povm.elements,
        guesses=[(0.0, 0.0)] * len(povm.elements),
        task="spin",
        copies=3,
    )
    report = mean_fidelity(flat, samples=10_000, seed=4)
    assert report.closed_sum < report.bound - 0.05


def test_phase_povm_projectors_and_operator():
    povm, fbar, phase_op = build_phase_povm(3)
    assert abs(fbar - mean_fidelity(povm, samples=50_000, seed=5).closed_sum) < 1e-12
    for s, p in enumerate(povm.elements):
        for t, q in enumerate(povm.elements):
            prod = p @ q
            expected = p if s == t else np.zeros_like(p)
            assert np.max(np.abs(prod - expected)) < 1e-12
    eigs = np.sort(np.linalg.eigvalsh(phase_op))
    assert np.allclose(eigs, sorted(2.0 * np.pi * s / 4.0 for s in range(4)))


def test_phase_fidelity_small_n():
    _, f1, _ = build_phase_povm(1)
    assert abs(f1 - 0.75) < 1e-12


def test_incomplete_povm_rejected():
    bad = Povm(
        elements=[0.5 * np.eye(2)],
        guesses=[(0.0, 0.0)],
        task="spin",
        copies=1,
    )
    with pytest.raises(InvalidPovm):
        mean_fidelity(bad)
    undercomplete = Povm(
        elements=[0.4 * np.diag([1.0, 0.0]), 0.4 * np.diag([0.0, 1.0])],
        guesses=[(0.0, 0.0)] * 2,
        task="spin",
        copies=1,
    )
    with pytest.raises(RankDeficiency):
        neumark_extend(undercomplete)


def test_neumark_on_projective_measurement_is_trivial():
    povm = Povm(
        elements=[np.diag([1.0, 0.0]), np.diag([0.0, 1.0])],
        guesses=[(0.0, 0.0)] * 2,
        task="spin",
        copies=1,
    )
    result = neumark_extend(povm)
    assert result.ancilla_dim == 1
    assert result.recovery_error < 1e-12


def test_rotation_is_unitary_and_moves_highest_weight():
    u = rotation(4, 0.7, 1.3)
    assert np.max(np.abs(u @ u.conj().T - np.eye(5))) < 1e-12
    vec = spin_coherent(4, 0.0, 0.0)
    assert abs(abs(vec[-1]) - 1.0) < 1e-12
    north = spin_coherent(1, 0.0, 0.5)
    south = spin_coherent(1, np.pi, 0.0)
    assert abs(abs(north.conj() @ south)) < 1e-12


def test_neumark_handles_complex_gram_matrices():
    # POVMs built from azimuthally rotated directions have complex-valued
    # Gram matrices, so the dilation must conjugate the eigenvector basis
    # consistently when completing the unitary.
    result = neumark_extend(build_spin_povm(4))
    full = result.unitary.shape[0]
    assert result.recovery_error < 1e-12
    assert np.max(np.abs(result.unitary @ result.unitary.conj().T - np.eye(full))) < 1e-9
