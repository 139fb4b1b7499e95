"""Bayesian state estimation for one and two spins-1/2.

Posterior means over pure-state manifolds with the invariant measure, the
infinite-data limits for the standard observation levels, and the purification
scheme that estimates an impure single spin by integrating over pure two-spin
states and tracing out the ancilla.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .errors import PurityViolation, QuadratureUnderflow, UnsupportedCombination
from .hilbert import PAULI, DensityMatrix, SpinProductBasis, pauli_word

_AXES = {"X": 0, "Y": 1, "Z": 2}


@dataclass
class MeasurementRecord:
    """Ordered outcomes (observable id, +-1).

    Observable ids: single spin — 'X', 'Y', 'Z'; two spins — two-letter Pauli
    words with exactly one or two non-identity letters (e.g. 'ZI', 'XZ').
    The purified single-spin scheme measures only the first spin of the pair,
    so its ids are the single-spin letters.
    """

    entries: list[tuple[str, int]]
    system: str = "spin1"

    def __post_init__(self) -> None:
        if self.system not in ("spin1", "spin2", "spin1_purified"):
            raise ValueError(f"unknown system {self.system!r}")
        norm = []
        for obs, s in self.entries:
            obs = obs.upper()
            if s not in (1, -1):
                raise ValueError(f"outcome {s} must be +-1")
            if self.system == "spin2":
                if len(obs) != 2 or any(c not in "IXYZ" for c in obs) or obs == "II":
                    raise ValueError(f"bad two-spin observable {obs!r}")
            else:
                if obs not in _AXES:
                    raise ValueError(f"bad observable {obs!r} for {self.system}")
            norm.append((obs, s))
        self.entries = norm

    @classmethod
    def from_string(cls, text: str, system: str = "spin1") -> "MeasurementRecord":
        """One entry per line: `observable outcome`, e.g. 'z +1' or 'xz -1'."""
        entries = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            obs, out = line.split()
            entries.append((obs, int(out)))
        return cls(entries, system)

    def counts(self) -> Counter:
        return Counter(self.entries)


@dataclass
class PosteriorResult:
    rho: DensityMatrix
    evidence_weight: float  # mean rescaled likelihood; diagnostic only
    std_error: float  # worst-case standard error over Bloch coefficients


# ---------------------------------------------------------------------------
# single spin: Bloch-sphere manifold, product Gauss-Legendre quadrature


def _spin1_grid(n_theta: int, n_phi: int):
    """Nodes and weights for the measure sin(theta) dtheta dphi, using
    Gauss-Legendre in cos(theta) and in phi."""
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    v, wv = np.polynomial.legendre.leggauss(n_phi)
    phi = np.pi * (v + 1.0)
    w = np.outer(wu, wv * np.pi).ravel()
    cos_t = np.repeat(u, n_phi)
    phi = np.tile(phi, n_theta)
    sin_t = np.sqrt(np.clip(1.0 - cos_t ** 2, 0.0, None))
    dirs = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=1)
    return dirs, w


def spin1_likelihood(record: MeasurementRecord, theta: float, phi: float) -> float:
    """Product over entries of p(s | rho(theta, phi)) = (1 + s r_i)/2."""
    r = np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )
    out = 1.0
    for obs, s in record.entries:
        out *= 0.5 * (1.0 + s * r[_AXES[obs]])
    return float(out)


def _log_likelihood_spin1(record: MeasurementRecord, dirs: np.ndarray) -> np.ndarray:
    ll = np.zeros(len(dirs))
    for (obs, s), n in record.counts().items():
        p = 0.5 * (1.0 + s * dirs[:, _AXES[obs]])
        ll += n * np.log(np.clip(p, 1e-300, None))
    return ll


def _weighted_bloch(
    dirs: np.ndarray, weights: np.ndarray, ll: np.ndarray
) -> tuple[np.ndarray, float, float]:
    top = float(np.max(ll)) if len(ll) else 0.0
    if not np.isfinite(top):
        raise QuadratureUnderflow("likelihood vanished on every quadrature node")
    like = np.exp(ll - top)
    evidence = float(np.sum(weights * like))
    if evidence < 1e-300:
        raise QuadratureUnderflow(f"evidence {evidence:.3e} below 1e-300")
    bloch = (weights * like) @ dirs / evidence
    wsum = float(np.sum(np.abs(weights)))
    n_eff = wsum ** 2 / float(np.sum(weights ** 2))
    resid = (like * weights)[:, None] * (dirs - bloch)
    se = np.sqrt(np.max(np.sum(resid ** 2, axis=0))) / evidence / np.sqrt(n_eff)
    return bloch, evidence / wsum, float(se)


def _bloch_dm(bloch: np.ndarray) -> DensityMatrix:
    rho = 0.5 * (
        np.eye(2, dtype=complex)
        + bloch[0] * PAULI["X"]
        + bloch[1] * PAULI["Y"]
        + bloch[2] * PAULI["Z"]
    )
    return DensityMatrix(rho, SpinProductBasis(1))


def spin1_posterior_directions(
    dirs_signs: list[tuple[np.ndarray, int]], n_theta: int = 64, n_phi: int = 64
) -> PosteriorResult:
    """Posterior for measurements along arbitrary unit directions; used to
    verify rotational covariance of the Bloch-sphere measure."""
    nodes, w = _spin1_grid(n_theta, n_phi)
    ll = np.zeros(len(nodes))
    for d, s in dirs_signs:
        p = 0.5 * (1.0 + s * nodes @ np.asarray(d, dtype=float))
        ll += np.log(np.clip(p, 1e-300, None))
    bloch, ev, se = _weighted_bloch(nodes, w, ll)
    return PosteriorResult(_bloch_dm(bloch), ev, se)


# ---------------------------------------------------------------------------
# two spins: Schmidt-decomposition manifold, quasi-random integration


def _pair_params(n_points: int) -> np.ndarray:
    """Deterministic Sobol points mapped so the invariant measure
    cos^2(a) sin(a) sin(t1) sin(t2) da dpsi dphi1 dt1 dphi2 dt2 becomes the
    uniform density of the unit cube."""
    sampler = qmc.Sobol(d=6, scramble=False)
    u = sampler.random(n_points)
    out = np.empty_like(u)
    out[:, 0] = np.arccos(np.cbrt(1.0 - 2.0 * u[:, 0]))  # alpha
    out[:, 1] = 2.0 * np.pi * u[:, 1]  # psi
    out[:, 2] = 2.0 * np.pi * u[:, 2]  # phi1
    out[:, 3] = np.arccos(1.0 - 2.0 * u[:, 3])  # theta1
    out[:, 4] = 2.0 * np.pi * u[:, 4]  # phi2
    out[:, 5] = np.arccos(1.0 - 2.0 * u[:, 5])  # theta2
    return out


def _pair_coefficients(params: np.ndarray) -> dict[str, np.ndarray]:
    """Pauli-word coefficients of the pure two-spin family: the state is
    1/4 [ I + sum_w c_w(params) w ] over the fifteen non-identity words."""
    alpha, psi = params[:, 0], params[:, 1]
    frames = []
    for phi, theta in ((params[:, 2], params[:, 3]), (params[:, 4], params[:, 5])):
        st, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        r = np.stack([st * cp, st * sp, ct], axis=1)
        k = np.stack([sp, -cp, np.zeros_like(sp)], axis=1)
        ell = np.stack([ct * cp, ct * sp, -st], axis=1)
        frames.append((r, k, ell))
    (r1, k1, l1), (r2, k2, l2) = frames
    ca = np.cos(alpha)
    sa_cp = np.sin(alpha) * np.cos(psi)
    sa_sp = np.sin(alpha) * np.sin(psi)
    coeffs: dict[str, np.ndarray] = {}
    letters = "XYZ"
    for i in range(3):
        coeffs[letters[i] + "I"] = ca * r1[:, i]
        coeffs["I" + letters[i]] = ca * r2[:, i]
        for j in range(3):
            coeffs[letters[i] + letters[j]] = (
                r1[:, i] * r2[:, j]
                + sa_cp * (k1[:, i] * k2[:, j] - l1[:, i] * l2[:, j])
                - sa_sp * (k1[:, i] * l2[:, j] + l1[:, i] * k2[:, j])
            )
    return coeffs


def pair_likelihood(record: MeasurementRecord, params: np.ndarray) -> float:
    """Likelihood of a two-spin record at one manifold point."""
    coeffs = _pair_coefficients(np.asarray(params, dtype=float).reshape(1, 6))
    out = 1.0
    for obs, s in record.entries:
        out *= 0.5 * (1.0 + s * float(coeffs[obs][0]))
    return float(out)


def _pair_posterior(
    record: MeasurementRecord, n_points: int
) -> tuple[dict[str, float], float, float]:
    params = _pair_params(n_points)
    coeffs = _pair_coefficients(params)
    ll = np.zeros(n_points)
    for (obs, s), n in record.counts().items():
        p = 0.5 * (1.0 + s * coeffs[obs])
        ll += n * np.log(np.clip(p, 1e-300, None))
    top = float(np.max(ll))
    if not np.isfinite(top):
        raise QuadratureUnderflow("likelihood vanished at every sample point")
    like = np.exp(ll - top)
    evidence = float(np.mean(like))
    if evidence < 1e-300:
        raise QuadratureUnderflow(f"evidence {evidence:.3e} below 1e-300")
    means, se_max = {}, 0.0
    for w, c in coeffs.items():
        mean = float(np.mean(like * c)) / evidence
        resid = like * (c - mean)
        se = float(np.std(resid)) / (evidence * np.sqrt(n_points))
        means[w] = mean
        se_max = max(se_max, se)
    return means, evidence, se_max


def posterior_estimate(
    record: MeasurementRecord,
    n_theta: int = 64,
    n_phi: int = 64,
    n_points: int = 2 ** 18,
) -> PosteriorResult:
    """Measure-weighted posterior mean of the pure-state manifold.

    Single spin uses product Gauss-Legendre quadrature (n_theta x n_phi);
    the two-spin manifolds use n_points quasi-random samples and report the
    worst coefficient standard error.
    """
    if record.system == "spin1":
        nodes, w = _spin1_grid(n_theta, n_phi)
        ll = _log_likelihood_spin1(record, nodes)
        bloch, ev, se = _weighted_bloch(nodes, w, ll)
        return PosteriorResult(_bloch_dm(bloch), ev, se)

    pair_record = record
    if record.system == "spin1_purified":
        pair_record = MeasurementRecord(
            [(obs + "I", s) for obs, s in record.entries], "spin2"
        )
    means, ev, se = _pair_posterior(pair_record, n_points)
    if record.system == "spin1_purified":
        bloch = np.array([means["XI"], means["YI"], means["ZI"]])
        return PosteriorResult(_bloch_dm(bloch), ev, se)
    rho = np.eye(4, dtype=complex)
    for w, m in means.items():
        rho += m * pauli_word(w)
    return PosteriorResult(DensityMatrix(rho / 4.0, SpinProductBasis(2)), ev, se)


# ---------------------------------------------------------------------------
# infinite-data limits

_PURITY_TOL = 1e-9


def asymptotic_estimate(system: str, means: dict[str, float]) -> DensityMatrix:
    """Infinite-measurement limit of the Bayesian posterior.

    Single spin ('spin1'): the microcanonical average over pure states with
    the measured Bloch components; with all three components measured the
    limit exists only when the purity condition sum <s_i>^2 = 1 holds.
    Two spins ('spin2') support the levels {z1, z2}, {z1, z1 z2}, and
    {z1, z2, z1 z2}, whose limits fill in the unmeasured word with a
    1/s_max-weighted product.  'spin1_purified' drops the purity constraint
    and reproduces the maximum-entropy forms.
    """
    means = {k.upper(): float(v) for k, v in means.items()}
    if system in ("spin1", "spin1_purified"):
        if not set(means) <= set(_AXES):
            raise UnsupportedCombination(f"bad single-spin level {set(means)}")
        if system == "spin1" and len(means) == 3:
            total = sum(v * v for v in means.values())
            if abs(total - 1.0) > _PURITY_TOL:
                raise PurityViolation(total)
        bloch = np.array([means.get(a, 0.0) for a in ("X", "Y", "Z")])
        return _bloch_dm(bloch)

    if system != "spin2":
        raise UnsupportedCombination(f"unknown system {system!r}")
    keys = frozenset(means)
    coeffs = dict(means)
    if keys == {"ZI", "IZ"}:
        s_max = max(abs(means["ZI"]), abs(means["IZ"]))
        coeffs["ZZ"] = means["ZI"] * means["IZ"] / s_max if s_max > 0 else 0.0
    elif keys == {"ZI", "ZZ"}:
        s_max = max(abs(means["ZI"]), abs(means["ZZ"]))
        coeffs["IZ"] = means["ZI"] * means["ZZ"] / s_max if s_max > 0 else 0.0
    elif keys == {"ZI", "IZ", "ZZ"}:
        pass
    else:
        raise UnsupportedCombination(f"unsupported two-spin level {set(means)}")
    rho = np.eye(4, dtype=complex)
    for w, m in coeffs.items():
        rho += m * pauli_word(w)
    return DensityMatrix(rho / 4.0, SpinProductBasis(2))


# ---------------------------------------------------------------------------
# concentration of the outcome-frequency distribution


def concentration_check(alphas: np.ndarray, N: float) -> dict:
    """Moments of the normalized likelihood-frequency distribution
    prod x_i^(alpha_i N) on the simplex — a Dirichlet law with parameters
    alpha_i N + 1.  As N grows, <x_i> -> alpha_i and the variances vanish,
    which is the lemma behind the infinite-data limits above."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0) or abs(alphas.sum() - 1.0) > 1e-12:
        raise ValueError("alphas must be positive and sum to 1")
    a = alphas * N + 1.0
    total = a.sum()
    mean = a / total
    second = a * (a + 1.0) / (total * (total + 1.0))
    var = second - mean ** 2
    return {"means": mean, "second_moments": second, "variances": var}
