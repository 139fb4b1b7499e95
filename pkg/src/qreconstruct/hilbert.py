"""Truncated-Hilbert-space linear algebra.

Density-matrix validation, von Neumann entropy, generalized canonical (Gibbs)
states, expectation values, and the standard bosonic operators on a truncated
Fock space.  Conventions: hbar = 1, q = (a + a^dag)/sqrt(2),
p = (a - a^dag)/(i sqrt(2)).  All functions are pure; returned arrays are
never mutated afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional
import warnings

import numpy as np
from scipy.linalg import eigh, expm

from .errors import (
    DimMismatch,
    NotHermitian,
    NotPositive,
    Overflow,
    TraceNotOne,
)


@dataclass(frozen=True)
class Tolerances:
    """Central numeric tolerances used across the package."""

    herm: float = 1e-10
    trace: float = 1e-9
    psd: float = 1e-8
    tail_mass: float = 1e-8


TOLS = Tolerances()


@dataclass(frozen=True)
class FockBasis:
    n_max: int

    @property
    def dim(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True)
class SpinProductBasis:
    sites: int

    @property
    def dim(self) -> int:
        return 2 ** self.sites


Basis = FockBasis | SpinProductBasis


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix over a basis."""

    def __init__(self, elements: np.ndarray, basis: Basis):
        self.elements = np.asarray(elements, dtype=complex)
        self.basis = basis
        self.dim = self.elements.shape[0]

    def __repr__(self) -> str:  # pragma: no cover
        return f"DensityMatrix(dim={self.dim}, basis={self.basis})"


@dataclass
class Observable:
    """A named Hermitian matrix, optionally tagged with its measured mean."""

    label: str
    elements: np.ndarray
    measured_mean: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.elements.shape[0]


class ObservationLevel:
    """Ordered set of observables with measured means: the constraint set
    against which the maximum-entropy state is selected."""

    def __init__(self, observables: list[Observable], check_independence: bool = True):
        if not observables:
            raise ValueError("observation level needs at least one observable")
        dims = {o.dim for o in observables}
        if len(dims) != 1:
            raise DimMismatch(f"observables span several dims: {sorted(dims)}")
        for o in observables:
            if o.measured_mean is None:
                raise ValueError(f"observable {o.label!r} lacks a measured mean")
        self.observables = list(observables)
        self.dim = observables[0].dim
        if check_independence:
            self._check_linear_independence()

    def _check_linear_independence(self) -> None:
        vecs = np.stack([o.elements.ravel() for o in self.observables])
        gram = (vecs @ vecs.conj().T).real
        scale = np.sqrt(np.outer(np.diag(gram), np.diag(gram)))
        scale[scale == 0] = 1.0
        rank = np.linalg.matrix_rank(gram / scale, tol=1e-9)
        if rank < len(self.observables):
            warnings.warn(
                "observation level is numerically rank-deficient "
                f"(rank {rank} < {len(self.observables)}); the solver will "
                "use pseudo-inverse steps",
                stacklevel=3,
            )

    @property
    def means(self) -> np.ndarray:
        return np.array([o.measured_mean for o in self.observables], dtype=float)

    @property
    def matrices(self) -> np.ndarray:
        return np.stack([o.elements for o in self.observables])


@dataclass
class LagrangeSolution:
    lambdas: np.ndarray
    sigma: DensityMatrix
    entropy: float
    log_partition: float
    converged: bool
    residual: float


def dm_validate(elements: np.ndarray, basis: Basis, tols: Tolerances = TOLS) -> DensityMatrix:
    """Validate Hermiticity, unit trace, and positivity; return a DensityMatrix."""
    m = np.asarray(elements, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    herm_err = np.max(np.abs(m - m.conj().T))
    if herm_err > tols.herm:
        raise NotHermitian(f"max |rho - rho^dag| = {herm_err:.3e} > {tols.herm}")
    tr_err = abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag)
    if tr_err > tols.trace:
        raise TraceNotOne(f"|Tr rho - 1| = {tr_err:.3e} > {tols.trace}")
    w = np.linalg.eigvalsh(m)
    if w[0] < -tols.psd:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3e} < -{tols.psd}")
    return DensityMatrix(m, basis)


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """-sum r ln r over eigenvalues, with 0 ln 0 := 0.  In nats."""
    m = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho)
    w = np.linalg.eigvalsh(m)
    w = np.clip(w.real, 0.0, None)
    nz = w[w > 0]
    return float(-np.sum(nz * np.log(nz)))


def gibbs_state(
    observables: list[Observable], lambdas: np.ndarray, basis: Optional[Basis] = None
) -> tuple[DensityMatrix, float]:
    """exp(-sum lambda_v G_v)/Z via Hermitian eigendecomposition.

    Returns (sigma, log Z).  The exponent is max-shifted internally, so only a
    genuinely astronomical spectrum raises Overflow.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if len(lambdas) != len(observables):
        raise DimMismatch("one lambda per observable required")
    dim = observables[0].dim
    exponent = np.zeros((dim, dim), dtype=complex)
    for lam, obs in zip(lambdas, observables):
        exponent += lam * obs.elements
    e, v = eigh(exponent)
    # sigma = exp(-E)/Z; shift by the smallest energy for stability.
    if np.ptp(e) > 1400.0:
        raise Overflow("exponent spectrum spread exceeds exp range even after shifting")
    shift = e.min()
    w = np.exp(-(e - shift))
    z_shifted = w.sum()
    log_z = float(np.log(z_shifted) - shift)
    probs = w / z_shifted
    sigma = (v * probs) @ v.conj().T
    sigma = 0.5 * (sigma + sigma.conj().T)
    if basis is None:
        basis = FockBasis(dim - 1) if dim > 0 else FockBasis(0)
    return DensityMatrix(sigma, basis), log_z


def expectation(rho: DensityMatrix, obs: Observable) -> float:
    """Tr(rho G); the (tiny) imaginary part of the trace is discarded."""
    if rho.dim != obs.dim:
        raise DimMismatch(f"rho dim {rho.dim} != observable dim {obs.dim}")
    val = np.trace(rho.elements @ obs.elements)
    return float(val.real)


def fock_operators(n_max: int) -> dict:
    """Standard operators on the (n_max+1)-dim truncated Fock space.

    Returns a dict with keys a, a_dagger, n, q, p and callables
    displacement(alpha), squeeze(r), rotation(theta); displacement and squeeze
    are matrix exponentials of the truncated generators.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    dim = n_max + 1
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = np.sqrt(n)
    ad = a.conj().T
    nmat = ad @ a
    q = (a + ad) / np.sqrt(2.0)
    p = (a - ad) / (1j * np.sqrt(2.0))

    def displacement(alpha: complex) -> np.ndarray:
        gen = alpha * ad - np.conj(alpha) * a
        return expm(gen)

    def squeeze(r: complex) -> np.ndarray:
        gen = 0.5 * (np.conj(r) * (a @ a) - r * (ad @ ad))
        return expm(gen)

    def rotation(theta: float) -> np.ndarray:
        # exp(i theta n): phase rotation of the mode.
        return np.diag(np.exp(1j * theta * np.arange(dim)))

    return {
        "a": a,
        "a_dagger": ad,
        "n": nmat,
        "q": q,
        "p": p,
        "displacement": displacement,
        "squeeze": squeeze,
        "rotation": rotation,
    }


# Pauli matrices and spin-word helpers (shared by the spin and bayes modules).

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_word(word: str) -> np.ndarray:
    """Tensor product of single-site Pauli matrices, e.g. 'ZZI' or 'XY'."""
    word = word.upper()
    out = np.array([[1.0 + 0j]])
    for ch in word:
        if ch not in PAULI:
            raise ValueError(f"unknown Pauli factor {ch!r}")
        out = np.kron(out, PAULI[ch])
    return out


def check_tail_mass(rho_elements: np.ndarray, tols: Tolerances = TOLS) -> float:
    """Occupation above the top five Fock levels; warn if non-negligible."""
    diag = np.diag(rho_elements).real
    tail = float(diag[max(0, len(diag) - 5):].sum())
    if tail > tols.tail_mass:
        warnings.warn(
            f"tail mass {tail:.3e} above the truncation check {tols.tail_mass}",
            stacklevel=3,
        )
    return tail
