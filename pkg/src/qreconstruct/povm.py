"""Optimal finite POVMs for state and phase estimation from N copies.

A measurement on N identically prepared qubits is scored by the mean
fidelity between the true single-qubit state and the guess attached to
each outcome.  Averaging over the group of preparations reduces the
score to a trace against a fixed positive operator F, which yields a
sharp upper bound and an explicit finite POVM attaining it: rotated
highest-weight projectors over an equidistant polar grid for spin
estimation, and discrete-Fourier projectors for phase estimation.  A
Monte Carlo audit cross-checks the closed-sum fidelity, and a Neumark
dilation turns any rank-one POVM into a unitary plus a von Neumann
measurement on system + ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.linalg import expm

from .errors import (
    DimMismatch,
    InvalidPovm,
    NegativeWeight,
    RankDeficiency,
    SingularSystem,
)

_COMPLETENESS_TOL = 1e-8


@dataclass(frozen=True)
class FOperator:
    """Group-averaged fidelity kernel for an estimation task.

    Attributes
    ----------
    task : str
        Either ``"spin"`` (estimate a pure qubit state from N copies)
        or ``"phase"`` (estimate a U(1) phase shift on N qubits).
    copies : int
        Number N of identically prepared qubits.
    matrix : ndarray
        Hermitian (N+1)x(N+1) kernel in the symmetric-subspace basis,
        ordered by ascending weight m = -N/2 .. N/2 (spin) or photon
        number q = 0 .. N (phase).
    lambda_max : float
        Largest eigenvalue of the kernel.
    bound : float
        Upper bound lambda_max * (N+1) on the mean fidelity of any
        complete POVM.  For the phase task the bound exceeds unity and
        is not tight.
    """

    task: str
    copies: int
    matrix: np.ndarray
    lambda_max: float
    bound: float


@dataclass
class Povm:
    """Finite positive operator-valued measure with per-outcome guesses.

    Attributes
    ----------
    elements : list of ndarray
        Positive Hermitian matrices summing to the identity.
    guesses : list
        One guess per element: an ``(theta, psi)`` pair of Euler angles
        for spin estimation, or a scalar phase.
    task : str
        ``"spin"`` or ``"phase"``.
    copies : int
        Number of copies N the POVM acts on (dimension is N+1).
    weights : list of float
        Trace of each element (c_r^2 scaled by the azimuthal
        multiplicity for the spin construction).
    """

    elements: list[np.ndarray]
    guesses: list
    task: str
    copies: int
    weights: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.elements:
            raise DimMismatch("POVM needs at least one element")
        dim = self.elements[0].shape[0]
        for el in self.elements:
            if el.shape != (dim, dim):
                raise DimMismatch("POVM elements must share one dimension")
        if len(self.guesses) != len(self.elements):
            raise DimMismatch("one guess per POVM element required")
        if not self.weights:
            self.weights = [float(np.trace(el).real) for el in self.elements]

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def completeness_defect(self) -> float:
        """Max-norm distance of the element sum from the identity."""
        total = np.sum(self.elements, axis=0)
        return float(np.max(np.abs(total - np.eye(self.dim))))


@dataclass(frozen=True)
class FidelityReport:
    """Closed-sum mean fidelity with an independent Monte Carlo audit."""

    closed_sum: float
    mc_estimate: float
    mc_stderr: float
    bound: float


@dataclass(frozen=True)
class NeumarkResult:
    """Unitary dilation of a rank-one POVM.

    Attributes
    ----------
    unitary : ndarray
        Unitary on the system x ancilla space; applying it and then
        measuring the computational-basis projector ``p_r`` reproduces
        outcome r of the original POVM.
    projectors : list of ndarray
        The computational-basis projectors, one per POVM element.
    ancilla_state : ndarray
        Reference ancilla vector (first basis vector).
    ancilla_dim : int
        Dimension of the ancilla space.
    gram : ndarray
        Gram matrix of the embedded outcome vectors; its spectrum is
        d ones and R - d zeros for a complete POVM.
    recovery_error : float
        Largest elementwise deviation between the original elements and
        the ones recovered from the dilation.
    """

    unitary: np.ndarray
    projectors: list[np.ndarray]
    ancilla_state: np.ndarray
    ancilla_dim: int
    gram: np.ndarray
    recovery_error: float


def _angular_momentum(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Jy and Jz for spin j = (dim-1)/2, basis ordered m = -j .. j."""
    j = (dim - 1) / 2.0
    m = np.arange(dim) - j
    jz = np.diag(m)
    # ladder elements <m+1|J+|m> = sqrt(j(j+1) - m(m+1))
    up = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jplus = np.zeros((dim, dim))
    jplus[np.arange(1, dim), np.arange(dim - 1)] = up
    jy = (jplus - jplus.T) / (2j)
    return jy, jz


def rotation(copies: int, theta: float, psi: float) -> np.ndarray:
    """Rotation exp(-i psi Jz) exp(-i theta Jy) for spin j = copies/2."""
    jy, jz = _angular_momentum(copies + 1)
    return expm(-1j * psi * jz) @ expm(-1j * theta * jy)


def spin_coherent(copies: int, theta: float, psi: float) -> np.ndarray:
    """Rotated highest-weight vector of spin j = copies/2."""
    vec = np.zeros(copies + 1, dtype=complex)
    vec[-1] = 1.0
    return rotation(copies, theta, psi) @ vec


def _bloch_direction(theta: float, psi: float) -> np.ndarray:
    """Bloch unit vector of the rotated single-qubit up state."""
    v = spin_coherent(1, theta, psi)
    down, up = v[0], v[1]
    return np.array(
        [
            2.0 * (np.conj(up) * down).real,
            2.0 * (np.conj(up) * down).imag,
            abs(up) ** 2 - abs(down) ** 2,
        ]
    )


def build_F(task: str, copies: int) -> FOperator:
    """Group-averaged fidelity kernel for ``task`` on ``copies`` qubits.

    Parameters
    ----------
    task : str
        ``"spin"`` yields the diagonal kernel with entries
        (N/2 + m + 1)/((N+2)(N+1)); ``"phase"`` yields the tridiagonal
        binomial kernel.
    copies : int
        Number of qubit copies N >= 1.
    """
    if copies < 1:
        raise DimMismatch("need at least one copy")
    n = copies
    dim = n + 1
    if task == "spin":
        diag = (np.arange(dim) + 1.0) / ((n + 2) * (n + 1))
        matrix = np.diag(diag)
        lam = diag[-1]
        bound = lam * dim
    elif task == "phase":
        amp = np.sqrt([comb(n, k) for k in range(dim)])
        matrix = (
            2.0 * np.diag(amp**2)
            + np.diag(amp[:-1] * amp[1:], k=1)
            + np.diag(amp[:-1] * amp[1:], k=-1)
        ) / 2.0 ** (n + 2)
        lam = float(np.linalg.eigvalsh(matrix)[-1])
        bound = lam * dim
    else:
        raise DimMismatch(f"unknown task {task!r}")
    return FOperator(task=task, copies=n, matrix=matrix, lambda_max=float(lam), bound=float(bound))


def _solve_polar_weights(copies: int, thetas: np.ndarray) -> np.ndarray:
    """Weights c_r^2 making the rotated projectors resolve the diagonal.

    Solves sum_r c_r^2 |<m|R(theta_r)|j,j>|^2 = 1 for every weight m.
    """
    n = copies
    dim = n + 1
    # |<m|R(theta)|j,j>|^2 = C(N, k) cos(theta/2)^(2k) sin(theta/2)^(2(N-k))
    k = np.arange(dim)[:, None]
    c2 = np.cos(thetas / 2.0)[None, :] ** 2
    s2 = np.sin(thetas / 2.0)[None, :] ** 2
    binom = np.array([comb(n, int(kk)) for kk in range(dim)])[:, None]
    design = binom * c2**k * s2 ** (n - k)
    try:
        weights = np.linalg.solve(design, np.ones(dim))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    return weights


def build_spin_povm(copies: int) -> Povm:
    """Optimal finite POVM for qubit-state estimation from N copies.

    Uses N+1 equidistant polar angles and N+1 discrete azimuthal phases,
    giving (N+1)^2 rank-one elements proportional to rotated
    highest-weight projectors.  On a negative polar weight the grid is
    shifted by half a step and the solve retried once.
    """
    if copies < 1:
        raise DimMismatch("need at least one copy")
    n = copies
    dim = n + 1
    thetas = np.arange(dim) * np.pi / n
    weights = _solve_polar_weights(n, thetas)
    if np.min(weights) < -1e-10:
        thetas = thetas + np.pi / (2 * n)
        weights = _solve_polar_weights(n, thetas)
        if np.min(weights) < -1e-10:
            raise NegativeWeight(
                f"no nonnegative polar weights: min c_r^2 = {np.min(weights):.3e}"
            )
    weights = np.clip(weights, 0.0, None)
    psis = 2.0 * np.pi * np.arange(dim) / dim
    elements, guesses, traces = [], [], []
    for r, theta in enumerate(thetas):
        for psi in psis:
            vec = spin_coherent(n, theta, psi)
            elements.append((weights[r] / dim) * np.outer(vec, vec.conj()))
            guesses.append((float(theta), float(psi)))
            traces.append(float(weights[r] / dim))
    return Povm(elements=elements, guesses=guesses, task="spin", copies=n, weights=traces)


def build_phase_povm(copies: int) -> tuple[Povm, float, np.ndarray]:
    """Optimal phase-estimation measurement on N qubits.

    Returns the POVM of N+1 discrete-Fourier projectors, the closed-form
    mean fidelity, and the Hermitian phase operator whose eigenvalues
    are the guesses.
    """
    if copies < 1:
        raise DimMismatch("need at least one copy")
    n = copies
    dim = n + 1
    q = np.arange(dim)
    elements, guesses = [], []
    for s in range(dim):
        vec = np.exp(2j * np.pi * s * q / dim) / np.sqrt(dim)
        elements.append(np.outer(vec, vec.conj()))
        guesses.append(2.0 * np.pi * s / dim)
    povm = Povm(elements=elements, guesses=guesses, task="phase", copies=n)
    fbar = 0.5 + sum(
        np.sqrt(comb(n, i) * comb(n, i + 1)) for i in range(n)
    ) / 2.0 ** (n + 1)
    phase_operator = sum(g * el for g, el in zip(guesses, povm.elements))
    return povm, float(fbar), phase_operator


def _closed_sum(povm: Povm, f_op: FOperator) -> float:
    """Mean fidelity sum_r Tr[O_r U_r F U_r^dag] over the guesses."""
    total = 0.0
    for el, guess in zip(povm.elements, povm.guesses):
        if povm.task == "spin":
            theta, psi = guess
            u = rotation(povm.copies, theta, psi)
        else:
            u = np.diag(np.exp(1j * guess * np.arange(povm.dim)))
        total += float(np.trace(el @ u @ f_op.matrix @ u.conj().T).real)
    return total


def _mc_audit_spin(povm: Povm, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo mean fidelity over uniformly random pure qubit states."""
    n = povm.copies
    dim = n + 1
    cos_t = rng.uniform(-1.0, 1.0, size=samples)
    thetas = np.arccos(cos_t)
    psis = rng.uniform(0.0, 2.0 * np.pi, size=samples)
    # symmetric-subspace coherent vectors, vectorized over samples
    k = np.arange(dim)[None, :]
    m = k - n / 2.0
    binom = np.sqrt([comb(n, int(kk)) for kk in range(dim)])[None, :]
    states = (
        binom
        * np.cos(thetas[:, None] / 2.0) ** k
        * np.sin(thetas[:, None] / 2.0) ** (n - k)
        * np.exp(-1j * m * psis[:, None])
    )
    truth_dirs = np.stack(
        [
            np.sin(thetas) * np.cos(psis),
            np.sin(thetas) * np.sin(psis),
            np.cos(thetas),
        ],
        axis=1,
    )
    vecs = []
    for el, w in zip(povm.elements, povm.weights):
        vals, eigvecs = np.linalg.eigh(el)
        vecs.append(np.sqrt(max(vals[-1], 0.0)) * eigvecs[:, -1])
    vmat = np.array(vecs)  # (R, dim), rows sqrt(w_r) * Psi_r
    guess_dirs = np.array([_bloch_direction(t, p) for t, p in povm.guesses])
    probs = np.abs(states @ vmat.conj().T) ** 2  # (samples, R)
    fids = 0.5 * (1.0 + truth_dirs @ guess_dirs.T)  # (samples, R)
    per_sample = np.sum(probs * fids, axis=1)
    return float(np.mean(per_sample)), float(np.std(per_sample, ddof=1) / np.sqrt(samples))


def _mc_audit_phase(povm: Povm, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo mean fidelity over uniformly random phase shifts."""
    n = povm.copies
    dim = n + 1
    phases = rng.uniform(0.0, 2.0 * np.pi, size=samples)
    q = np.arange(dim)[None, :]
    binom = np.sqrt([comb(n, int(k)) for k in range(dim)])[None, :]
    states = binom * np.exp(1j * phases[:, None] * q) / 2.0 ** (n / 2.0)
    proj_vecs = np.array(
        [np.exp(2j * np.pi * s * np.arange(dim) / dim) / np.sqrt(dim) for s in range(dim)]
    )
    probs = np.abs(states @ proj_vecs.conj().T) ** 2  # (samples, dim)
    guesses = np.array(povm.guesses)
    fids = 0.5 * (1.0 + np.cos(guesses[None, :] - phases[:, None]))
    per_sample = np.sum(probs * fids, axis=1)
    return float(np.mean(per_sample)), float(np.std(per_sample, ddof=1) / np.sqrt(samples))


def mean_fidelity(
    povm: Povm,
    samples: int = 200_000,
    seed: int = 0,
) -> FidelityReport:
    """Closed-sum mean fidelity of a POVM plus a Monte Carlo audit.

    Parameters
    ----------
    povm : Povm
        Complete POVM with per-element guesses.
    samples : int
        Monte Carlo budget for the independent audit (>= 2e5 keeps the
        audit within a few parts in a thousand).
    seed : int
        Seed for the audit's random stream.

    Raises
    ------
    InvalidPovm
        If the elements do not resolve the identity.
    """
    defect = povm.completeness_defect()
    if defect > _COMPLETENESS_TOL:
        raise InvalidPovm(f"completeness defect {defect:.3e}")
    f_op = build_F(povm.task, povm.copies)
    closed = _closed_sum(povm, f_op)
    rng = np.random.Generator(np.random.Philox(seed))
    if povm.task == "spin":
        mc, se = _mc_audit_spin(povm, samples, rng)
    else:
        mc, se = _mc_audit_phase(povm, samples, rng)
    return FidelityReport(closed_sum=closed, mc_estimate=mc, mc_stderr=se, bound=f_op.bound)


def neumark_extend(povm: Povm) -> NeumarkResult:
    """Dilate a rank-one POVM to a unitary plus projective measurement.

    Embeds each outcome as c_r |Psi_r> x |0> in system x ancilla space,
    diagonalizes the Gram matrix of the embedded vectors, and completes
    the d nonzero eigenvectors to an orthonormal basis; the unitary maps
    that basis onto computational-basis vectors so that measuring
    ``p_r`` after the unitary reproduces outcome r.

    Raises
    ------
    RankDeficiency
        If the Gram trace deviates from the system dimension, i.e. the
        elements do not resolve the identity.
    """
    d = povm.dim
    n_out = len(povm.elements)
    if n_out < d:
        raise DimMismatch("need at least as many outcomes as dimensions")
    # rank-one factors c_r |Psi_r>
    factors = []
    for el in povm.elements:
        vals, vecs = np.linalg.eigh(el)
        factors.append(np.sqrt(max(vals[-1], 0.0)) * vecs[:, -1])
    anc_dim = int(np.ceil(n_out / d))
    full = d * anc_dim
    ancilla = np.zeros(anc_dim)
    ancilla[0] = 1.0
    psi = np.array([np.kron(f, ancilla) for f in factors])  # (R, full)
    gram = psi @ psi.conj().T
    if abs(np.trace(gram).real - d) > 1e-8:
        raise RankDeficiency(
            f"Gram trace {np.trace(gram).real:.6f} differs from dimension {d}"
        )
    vals, v = np.linalg.eigh(gram)
    order = np.argsort(vals)[::-1]
    vals, v = vals[order], v[:, order]
    # orthonormal span of the embedded vectors
    span = (psi.T @ v[:, :d].conj()) / np.sqrt(vals[:d])  # (full, d) columns
    # complete to an orthonormal basis of the full space
    u_full, _, _ = np.linalg.svd(span)
    comp = u_full[:, d:]
    basis = np.hstack([span, comp])  # (full, full) orthonormal columns
    # target basis: rotate the first R computational vectors by V
    p_bar = np.eye(full, dtype=complex)
    p_bar[:n_out, :n_out] = v.conj()
    unitary = p_bar @ basis.conj().T
    projectors = [np.outer(np.eye(full)[r], np.eye(full)[r]) for r in range(n_out)]
    # recovery audit: O_r = Tr_A[U^dag p_r U (1 x |0><0|)]
    err = 0.0
    for r, el in enumerate(povm.elements):
        m = unitary.conj().T @ projectors[r] @ unitary
        m4 = m.reshape(d, anc_dim, d, anc_dim)
        recovered = m4[:, 0, :, 0]
        err = max(err, float(np.max(np.abs(recovered - el))))
    if err > 1e-9:
        raise InvalidPovm(f"dilation recovery error {err:.3e}")
    uu = unitary @ unitary.conj().T
    if np.max(np.abs(uu - np.eye(full))) > 1e-9:
        raise InvalidPovm("dilation unitary failed the unitarity check")
    return NeumarkResult(
        unitary=unitary,
        projectors=projectors,
        ancilla_state=ancilla,
        ancilla_dim=anc_dim,
        gram=gram,
        recovery_error=err,
    )
