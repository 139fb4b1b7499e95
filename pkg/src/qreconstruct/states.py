"""Reference states of the truncated bosonic mode and their statistics.

Coherent, Fock, squeezed vacuum, even/odd coherent superpositions (cats),
thermal, rectangular (flat wavefunction), and the incoherent/coherent pairs
used by the tomography benchmarks.  Every constructor returns a validated
density matrix; analytic statistics are read off the matrix directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from .errors import NotFockBasis, OrderTooHigh, TailMassTooLarge
from .hilbert import (
    DensityMatrix,
    FockBasis,
    TOLS,
    check_tail_mass,
    dm_validate,
    fock_operators,
)


@dataclass(frozen=True)
class Coherent:
    alpha: complex


@dataclass(frozen=True)
class Fock:
    n: int


@dataclass(frozen=True)
class SqueezedVacuum:
    eta: float  # |eta| < 1


@dataclass(frozen=True)
class EvenCat:
    alpha: float


@dataclass(frozen=True)
class OddCat:
    alpha: float


@dataclass(frozen=True)
class Thermal:
    nbar: float


@dataclass(frozen=True)
class Rectangular:
    alpha1: float


@dataclass(frozen=True)
class IncoherentPair:
    alpha1: complex
    alpha2: complex


@dataclass(frozen=True)
class CoherentPair:
    alpha1: complex
    alpha2: complex


Kind = Union[
    Coherent, Fock, SqueezedVacuum, EvenCat, OddCat,
    Thermal, Rectangular, IncoherentPair, CoherentPair,
]


@dataclass(frozen=True)
class StateSpec:
    kind: Kind
    n_max: int


def _coherent_vector(alpha: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha) + 1e-300) - 0.5 * gammaln(n + 1)
    phase = np.exp(1j * n * np.angle(alpha)) if alpha != 0 else np.ones(n_max + 1)
    vec = np.exp(log_mag) * phase
    if alpha == 0:
        vec = np.zeros(n_max + 1, dtype=complex)
        vec[0] = 1.0
    return vec


def _squeezed_vector(eta: float, n_max: int) -> np.ndarray:
    # |eta> = (1-eta^2)^{1/4} sum_n sqrt((2n)!)/(2^n n!) eta^n |2n>
    vec = np.zeros(n_max + 1)
    for m in range(0, n_max + 1, 2):
        n = m // 2
        log_coef = 0.5 * gammaln(2 * n + 1) - n * np.log(2.0) - gammaln(n + 1)
        vec[m] = np.sign(eta) ** n * np.exp(log_coef + n * np.log(abs(eta) + 1e-300))
        if eta == 0 and n > 0:
            vec[m] = 0.0
    vec *= (1 - eta ** 2) ** 0.25
    return vec.astype(complex)


def oscillator_eigenfunction(n_values: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """psi_n(x) for all n up to max(n_values), via the stable Hermite-function
    recurrence.  Returns array of shape (len(n_values), len(xs))."""
    n_top = int(np.max(n_values))
    xs = np.asarray(xs, dtype=float)
    psis = np.zeros((n_top + 1, len(xs)))
    psis[0] = np.pi ** -0.25 * np.exp(-0.5 * xs ** 2)
    if n_top >= 1:
        psis[1] = np.sqrt(2.0) * xs * psis[0]
    for n in range(1, n_top):
        psis[n + 1] = np.sqrt(2.0 / (n + 1)) * xs * psis[n] - np.sqrt(n / (n + 1)) * psis[n - 1]
    return psis[np.asarray(n_values, dtype=int)]


def _rectangular_vector(alpha1: float, n_max: int) -> np.ndarray:
    # Flat wavefunction psi(x) = 1/sqrt(4 alpha1) on [-2 alpha1, 2 alpha1];
    # Fock overlaps by composite Gauss-Legendre, 64 nodes per oscillation.
    half = 2.0 * alpha1
    panels = max(n_max, 4)
    nodes, weights = np.polynomial.legendre.leggauss(64)
    edges = np.linspace(-half, half, panels + 1)
    xs = np.concatenate([
        0.5 * (edges[i + 1] - edges[i]) * nodes + 0.5 * (edges[i] + edges[i + 1])
        for i in range(panels)
    ])
    ws = np.concatenate([0.5 * (edges[i + 1] - edges[i]) * weights for i in range(panels)])
    psis = oscillator_eigenfunction(np.arange(n_max + 1), xs)
    amp = 1.0 / np.sqrt(4.0 * alpha1)
    vec = psis @ (ws * amp)
    # The discontinuous wavefunction has polynomially decaying Fock overlaps;
    # the truncated projection is renormalized rather than rejected.
    vec /= np.linalg.norm(vec)
    return vec.astype(complex)


def make_state(spec: StateSpec) -> DensityMatrix:
    """Construct the normalized truncated density matrix for the spec."""
    n_max = spec.n_max
    dim = n_max + 1
    kind = spec.kind
    basis = FockBasis(n_max)

    if isinstance(kind, Fock):
        if kind.n > n_max:
            raise TailMassTooLarge(f"Fock({kind.n}) does not fit in n_max={n_max}")
        vec = np.zeros(dim, dtype=complex)
        vec[kind.n] = 1.0
        rho = np.outer(vec, vec.conj())
    elif isinstance(kind, Coherent):
        vec = _coherent_vector(kind.alpha, n_max)
        rho = np.outer(vec, vec.conj())
    elif isinstance(kind, SqueezedVacuum):
        if not abs(kind.eta) < 1:
            raise ValueError("squeezed vacuum requires |eta| < 1")
        vec = _squeezed_vector(kind.eta, n_max)
        rho = np.outer(vec, vec.conj())
    elif isinstance(kind, (EvenCat, OddCat)):
        a = float(kind.alpha)
        plus = _coherent_vector(a, n_max)
        minus = _coherent_vector(-a, n_max)
        if isinstance(kind, EvenCat):
            norm = 1.0 / np.sqrt(2.0 * (1.0 + np.exp(-2 * a ** 2)))
            vec = norm * (plus + minus)
        else:
            norm = 1.0 / np.sqrt(2.0 * (1.0 - np.exp(-2 * a ** 2)))
            vec = norm * (plus - minus)
        rho = np.outer(vec, vec.conj())
    elif isinstance(kind, Thermal):
        nbar = kind.nbar
        if nbar < 0:
            raise ValueError("thermal nbar must be >= 0")
        n = np.arange(dim)
        if nbar == 0:
            pn = np.zeros(dim)
            pn[0] = 1.0
        else:
            pn = np.exp(n * np.log(nbar / (nbar + 1))) / (nbar + 1)
        rho = np.diag(pn).astype(complex)
    elif isinstance(kind, Rectangular):
        vec = _rectangular_vector(kind.alpha1, n_max)
        rho = np.outer(vec, vec.conj())
    elif isinstance(kind, IncoherentPair):
        v1 = _coherent_vector(kind.alpha1, n_max)
        v2 = _coherent_vector(kind.alpha2, n_max)
        rho = 0.5 * (np.outer(v1, v1.conj()) + np.outer(v2, v2.conj()))
    elif isinstance(kind, CoherentPair):
        v1 = _coherent_vector(kind.alpha1, n_max)
        v2 = _coherent_vector(kind.alpha2, n_max)
        vec = v1 + v2
        vec /= np.linalg.norm(vec)
        rho = np.outer(vec, vec.conj())
    else:
        raise ValueError(f"unknown state kind {kind!r}")

    tr = np.trace(rho).real
    lost = max(0.0, 1.0 - tr)
    if lost > 1e-4:
        raise TailMassTooLarge(
            f"truncation loses {lost:.3e} probability above n_max={n_max}"
        )
    rho = rho / tr
    # Fock states are exactly representable; the rectangular state is a
    # renormalized projection whose polynomial tail is expected.
    if not isinstance(kind, (Fock, Rectangular)):
        check_tail_mass(rho, TOLS)
    return dm_validate(rho, basis)


def state_stats(rho: DensityMatrix) -> dict:
    """Mean photon number, quadrature means/variances, Mandel Q, P_n."""
    if not isinstance(rho.basis, FockBasis):
        raise NotFockBasis("statistics are defined for the Fock basis")
    ops = fock_operators(rho.dim - 1)
    m = rho.elements

    def ev(op: np.ndarray) -> float:
        return float(np.trace(m @ op).real)

    nbar = ev(ops["n"])
    n2 = ev(ops["n"] @ ops["n"])
    q_mean = ev(ops["q"])
    p_mean = ev(ops["p"])
    var_q = ev(ops["q"] @ ops["q"]) - q_mean ** 2
    var_p = ev(ops["p"] @ ops["p"]) - p_mean ** 2
    var_n = n2 - nbar ** 2
    mandel_q = (var_n - nbar) / nbar if nbar > 0 else 0.0
    return {
        "nbar": nbar,
        "q_mean": q_mean,
        "p_mean": p_mean,
        "var_q": var_q,
        "var_p": var_p,
        "mandel_Q": mandel_q,
        "photon_distribution": np.diag(m).real.copy(),
    }


def central_moments(rho: DensityMatrix, orders: list[tuple[int, int]]) -> dict:
    """Symmetrized (Weyl-ordered) central moments <{q^k p^l}> - means.

    Weyl ordering is realized as the average over all distinct orderings of k
    copies of (q - <q>) and l copies of (p - <p>).  Limited to k + l <= 4.
    """
    from itertools import permutations

    if not isinstance(rho.basis, FockBasis):
        raise NotFockBasis("moments are defined for the Fock basis")
    ops = fock_operators(rho.dim - 1)
    m = rho.elements
    q_mean = float(np.trace(m @ ops["q"]).real)
    p_mean = float(np.trace(m @ ops["p"]).real)
    dq = ops["q"] - q_mean * np.eye(rho.dim)
    dp = ops["p"] - p_mean * np.eye(rho.dim)
    out = {}
    for (k, l) in orders:
        if k + l > 4:
            raise OrderTooHigh(f"order {k}+{l} exceeds 4")
        if k + l == 0:
            out[(k, l)] = 1.0
            continue
        factors = ["q"] * k + ["p"] * l
        perms = set(permutations(factors))
        acc = 0.0
        for perm in perms:
            prod = np.eye(rho.dim, dtype=complex)
            for f in perm:
                prod = prod @ (dq if f == "q" else dp)
            acc += float(np.trace(m @ prod).real)
        out[(k, l)] = acc / len(perms)
    return out


def parse_state_spec(tokens: dict[str, str]) -> StateSpec:
    """Build a StateSpec from CLI key=value tokens,
    e.g. {'kind': 'evencat', 'alpha': '1.414', 'nmax': '40'}."""
    kind_name = tokens["kind"].lower()
    n_max = int(tokens.get("nmax", 40))

    def fc(key: str) -> complex:
        return complex(tokens[key].replace(" ", ""))

    def fr(key: str) -> float:
        return float(tokens[key])

    if kind_name == "coherent":
        if "alpha" in tokens:
            kind: Kind = Coherent(fc("alpha"))
        else:
            kind = Coherent(complex(np.sqrt(fr("nbar"))))
    elif kind_name == "fock":
        kind = Fock(int(tokens["n"]))
    elif kind_name in ("squeezed", "squeezedvacuum"):
        kind = SqueezedVacuum(fr("eta"))
    elif kind_name == "evencat":
        kind = EvenCat(fr("alpha"))
    elif kind_name == "oddcat":
        kind = OddCat(fr("alpha"))
    elif kind_name == "thermal":
        kind = Thermal(fr("nbar"))
    elif kind_name == "rectangular":
        kind = Rectangular(fr("alpha1"))
    elif kind_name == "incoherentpair":
        kind = IncoherentPair(fc("alpha1"), fc("alpha2"))
    elif kind_name == "coherentpair":
        kind = CoherentPair(fc("alpha1"), fc("alpha2"))
    else:
        raise ValueError(f"unknown state kind {kind_name!r}")
    return StateSpec(kind=kind, n_max=n_max)
