import numpy as np
import pytest

from qreconstruct.errors import GridTooCoarse, NotFockBasis
from qreconstruct.hilbert import SpinProductBasis, DensityMatrix
from qreconstruct.states import Coherent, Fock, StateSpec, Thermal, make_state
from qreconstruct.wigner import (
    PhaseGrid,
    analytic_wigner,
    fock_kernel,
    quadrature_pdf,
    wigner_from_dm,
)


def test_vacuum_kernel_peak_is_two():
    assert abs(fock_kernel(0, 0, np.array([0.0 + 0.0j]))[0] - 2.0) < 1e-14


def test_coherent_wigner_is_displaced_gaussian():
    alpha = 0.8 + 0.3j
    rho = make_state(StateSpec(Coherent(alpha), 40))
    grid = wigner_from_dm(rho, PhaseGrid(-3.0, 3.0, -3.0, 3.0, 41, 41))
    xs, ys = grid.axes()
    xi = xs[None, :] + 1j * ys[:, None]
    expected = 2.0 * np.exp(-2.0 * np.abs(xi - alpha) ** 2)
    assert np.max(np.abs(grid.values - expected)) < 1e-9


def test_fock_one_wigner_is_negative_at_origin():
    rho = make_state(StateSpec(Fock(1), 10))
    grid = wigner_from_dm(rho, PhaseGrid(-0.01, 0.01, -0.01, 0.01, 3, 3))
    assert grid.values[1, 1] < -1.9


def test_analytic_thermal_matches_numeric():
    nbar = 1.5
    rho = make_state(StateSpec(Thermal(nbar), 80))
    grid = wigner_from_dm(rho, PhaseGrid(-2.0, 2.0, -2.0, 2.0, 21, 21))
    xs, ys = grid.axes()
    xi = xs[None, :] + 1j * ys[:, None]
    expected = analytic_wigner("thermal", "Oth", {"nbar": nbar}, xi)
    assert np.max(np.abs(grid.values - expected)) < 1e-8


def test_quadrature_pdf_normalization_and_rotation():
    rho = make_state(StateSpec(Coherent(1.0), 40))
    xs = np.linspace(-6.0, 6.0, 601)
    for theta in (0.0, np.pi / 3):
        dist = quadrature_pdf(rho, theta, xs)
        assert abs(np.trapezoid(dist.w, xs) - 1.0) < 1e-9
    # mean of the rotated quadrature follows sqrt(2)|alpha| cos(theta)
    mean0 = np.trapezoid(quadrature_pdf(rho, 0.0, xs).w * xs, xs)
    mean90 = np.trapezoid(quadrature_pdf(rho, np.pi / 2, xs).w * xs, xs)
    assert abs(mean0 - np.sqrt(2.0)) < 1e-9
    assert abs(mean90) < 1e-9


def test_wigner_rejects_spin_basis_and_empty_grid():
    spin = DensityMatrix(np.eye(2) / 2.0, SpinProductBasis(1))
    with pytest.raises(NotFockBasis):
        wigner_from_dm(spin, PhaseGrid(-1, 1, -1, 1, 5, 5))
    rho = make_state(StateSpec(Fock(0), 5))
    with pytest.raises(GridTooCoarse):
        wigner_from_dm(rho, PhaseGrid(-1, 1, -1, 1, 0, 5))
