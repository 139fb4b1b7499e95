"""Wigner functions and quadrature distributions.

Conventions: the phase-space coordinate is the complex amplitude
xi = x + i y, normalized so the vacuum peaks at W(0) = 2 and
(1/pi) int int W dx dy = 1.  The quadrature q relates to the grid axis by
q = sqrt(2) Re(xi), so the theta = 0 marginal is
w(q) = (1/(pi sqrt(2))) int W(q/sqrt(2), y) dy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, eval_laguerre, gammaln, ive

from .errors import GridTooCoarse, NotFockBasis, UnsupportedCombination
from .hilbert import DensityMatrix, FockBasis
from .states import oscillator_eigenfunction


@dataclass
class PhaseGrid:
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    nx: int
    np_: int
    values: np.ndarray | None = None

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.x_min, self.x_max, self.nx),
            np.linspace(self.p_min, self.p_max, self.np_),
        )


@dataclass
class QuadratureDist:
    theta: float
    xs: np.ndarray
    w: np.ndarray


def fock_kernel(m: int, n: int, xi: np.ndarray) -> np.ndarray:
    """Wigner kernel W_{|m><n|}(xi) of the Fock dyadic |m><n|.

    For m >= n:
    W = 2 (-1)^n sqrt(n!/m!) (2 conj(xi))^(m-n) e^{-2|xi|^2} L_n^{m-n}(4|xi|^2);
    orientation locked to the coherent-state Gaussian 2 e^{-2|xi-alpha|^2}.
    """
    xi = np.asarray(xi, dtype=complex)
    r2 = 4.0 * np.abs(xi) ** 2
    if m == n:
        return 2.0 * (-1.0) ** n * np.exp(-0.5 * r2) * eval_laguerre(n, r2)
    if m < n:
        return np.conj(fock_kernel(n, m, xi))
    k = m - n
    pref = 2.0 * (-1.0) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
    return pref * (2.0 * np.conj(xi)) ** k * np.exp(-0.5 * r2) * eval_genlaguerre(n, k, r2)


def wigner_from_dm(rho: DensityMatrix, grid: PhaseGrid) -> PhaseGrid:
    """W(xi) = sum_mn rho_mn W_{|m><n|}(xi) on the grid."""
    if not isinstance(rho.basis, FockBasis):
        raise NotFockBasis("Wigner evaluation requires the Fock basis")
    if grid.nx <= 0 or grid.np_ <= 0:
        raise GridTooCoarse("grid must contain at least one node per axis")
    xs, ys = grid.axes()
    xi = xs[None, :] + 1j * ys[:, None]
    values = np.zeros(xi.shape)
    m = rho.elements
    dim = rho.dim
    for i in range(dim):
        if m[i, i].real != 0:
            values += m[i, i].real * fock_kernel(i, i, xi).real
        for j in range(i + 1, dim):
            if m[i, j] == 0 and m[j, i] == 0:
                continue
            values += 2.0 * np.real(m[j, i] * fock_kernel(j, i, xi))
    out = PhaseGrid(grid.x_min, grid.x_max, grid.p_min, grid.p_max, grid.nx, grid.np_)
    out.values = values
    return out


def quadrature_pdf(rho: DensityMatrix, theta: float, xs: np.ndarray) -> QuadratureDist:
    """Distribution of the rotated quadrature q cos(theta) + p sin(theta):
    w(x) = sum rho_{n1 n2} psi_{n1}(x) psi_{n2}(x) exp(-i theta (n1 - n2))."""
    if not isinstance(rho.basis, FockBasis):
        raise NotFockBasis("quadrature distributions require the Fock basis")
    xs = np.asarray(xs, dtype=float)
    dim = rho.dim
    psis = oscillator_eigenfunction(np.arange(dim), xs)
    phases = np.exp(-1j * theta * np.arange(dim))
    amps = phases[:, None] * psis  # row n: psi_n(x) e^{-i theta n}
    w = np.einsum("nx,nm,mx->x", amps, rho.elements, amps.conj(), optimize=True)
    return QuadratureDist(theta=theta, xs=xs, w=w.real)


def gaussian_wigner(n_eff: float, m_eff: complex, gamma: complex, xi: np.ndarray) -> np.ndarray:
    """Wigner function of the Gaussian state with centered moments
    <dada^dag>_sym - 1/2 = N, <da^2> = M, mean amplitude gamma.

    In grid coordinates (x, y) the covariance is
    Var x = (N + 1/2 + Re M)/2, Var y = (N + 1/2 - Re M)/2, Cov = Im M / 2,
    and W = (1/(2 sqrt(det Sigma))) exp(-delta^T Sigma^-1 delta / 2).
    """
    xi = np.asarray(xi, dtype=complex)
    sxx = 0.5 * (n_eff + 0.5 + m_eff.real)
    syy = 0.5 * (n_eff + 0.5 - m_eff.real)
    sxy = 0.5 * m_eff.imag
    det = sxx * syy - sxy ** 2
    if det <= 0:
        raise UnsupportedCombination("moments do not define a positive covariance")
    dx = xi.real - complex(gamma).real
    dy = xi.imag - complex(gamma).imag
    quad = (syy * dx ** 2 - 2 * sxy * dx * dy + sxx * dy ** 2) / det
    return (0.5 / np.sqrt(det)) * np.exp(-0.5 * quad)


def analytic_wigner(state_kind: str, level: str, params: dict, point) -> np.ndarray:
    """Closed-form (reconstructed) Wigner functions for the tabulated
    (state kind, observation level) combinations.

    Levels: 'Oth' (thermal), 'O1' (displaced thermal), 'O2' (Gaussian),
    'OA' (photon-number mixture), 'OD1', and 'O0' (complete).  Series forms
    truncate when the term magnitude drops below 1e-12.
    """
    xi = np.asarray(point, dtype=complex)
    kind = state_kind.lower()

    if level == "Oth":
        return gaussian_wigner(params["nbar"], 0.0, 0.0, xi)

    if level == "O1":
        gamma = complex(params["gamma"])
        return gaussian_wigner(params["nbar"] - abs(gamma) ** 2, 0.0, gamma, xi)

    if level == "O2":
        return gaussian_wigner(
            params["N"], complex(params["M"]), complex(params.get("gamma", 0.0)), xi
        )

    if level == "OD1":
        # Mixture of the vacuum and a thermal state: with P = 1 - P_0 and
        # nt = nbar/P - 1, W = (P_0 - P/nt) W_vac + P (nt+1)/nt W_th(nt).
        p0, nbar = params["P0"], params["nbar"]
        p = 1.0 - p0
        nt = nbar / p - 1.0
        w_vac = gaussian_wigner(0.0, 0.0, 0.0, xi)
        w_th = gaussian_wigner(nt, 0.0, 0.0, xi)
        return (p0 - p / nt) * w_vac + p * (nt + 1.0) / nt * w_th

    if level == "OA":
        if kind == "coherent":
            nbar = params["nbar"]
            r = np.abs(xi)
            arg = 4.0 * r * np.sqrt(nbar)
            # Poisson mixture of Fock kernels resums to a Bessel function:
            # W = 2 e^{-2 r^2 - 2 nbar} I_0(4 r sqrt(nbar)).
            return 2.0 * ive(0, arg) * np.exp(-2.0 * (r - np.sqrt(nbar)) ** 2)
        if kind == "fock":
            return fock_kernel(params["n"], params["n"], xi).real
        if "P_n" in params:
            pn = np.asarray(params["P_n"], dtype=float)
            total = np.zeros(np.shape(xi))
            peak = 0.0
            for n, p in enumerate(pn):
                if p == 0.0:
                    continue
                term = p * fock_kernel(n, n, xi).real
                total = total + term
                peak = max(peak, float(np.max(np.abs(term))))
                if n > 10 and float(np.max(np.abs(term))) < 1e-12 * max(peak, 1.0):
                    break
            return total
        raise UnsupportedCombination(f"OA needs a photon distribution for {kind!r}")

    if level == "O0":
        if kind == "coherent":
            alpha = complex(params["alpha"])
            return 2.0 * np.exp(-2.0 * np.abs(xi - alpha) ** 2)
        if kind == "fock":
            return fock_kernel(params["n"], params["n"], xi).real
        if kind in ("squeezed", "squeezedvacuum"):
            eta = params["eta"]
            n_ = eta ** 2 / (1 - eta ** 2)
            m_ = eta / (1 - eta ** 2)
            return gaussian_wigner(n_, m_, 0.0, xi)
        if kind in ("evencat", "oddcat"):
            a = float(params["alpha"])
            sign = 1.0 if kind == "evencat" else -1.0
            norm = 1.0 + sign * np.exp(-2.0 * a ** 2)
            w = (
                np.exp(-2.0 * np.abs(xi - a) ** 2)
                + np.exp(-2.0 * np.abs(xi + a) ** 2)
                + sign * 2.0 * np.exp(-2.0 * np.abs(xi) ** 2) * np.cos(4.0 * a * xi.imag)
            )
            return w / norm

    raise UnsupportedCombination(f"no tabulated formula for {state_kind!r} on {level!r}")
