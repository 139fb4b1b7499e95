"""Maximum-entropy reconstruction for systems of one to three spins-1/2.

Observation levels are sets of Pauli words with measured means.  Small named
levels admit closed-form reconstructions; the rest go through the generic
Lagrange solver.  Levels whose maximum-entropy state leaves free coefficients
on the boundary of the physical set are handled by a parametric scan that
keeps only positive-semidefinite candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .errors import NoPhysicalPoint, UnphysicalMeans, UnsupportedPreset
from .hilbert import (
    DensityMatrix,
    Observable,
    ObservationLevel,
    SpinProductBasis,
    pauli_word,
    von_neumann_entropy,
)
from .maxent import LagrangeSolution, SolverOptions, solve_lagrange

_PSD_TOL = 1e-9


@dataclass
class SpinLevel:
    """Pauli words with their measured means, over `sites` spins."""

    words: list[str]
    means: list[float]
    preset: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("spin level needs at least one word")
        if len(self.means) != len(self.words):
            raise ValueError("one mean per word required")
        sites = len(self.words[0])
        for w in self.words:
            if len(w) != sites or any(c not in "IXYZ" for c in w):
                raise ValueError(f"bad Pauli word {w!r}")
            if set(w) == {"I"}:
                raise ValueError("the identity word cannot be a level member")
        for m in self.means:
            if abs(m) > 1.0 + 1e-12:
                raise UnphysicalMeans(f"mean {m} outside [-1, 1]")

    @property
    def sites(self) -> int:
        return len(self.words[0])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.words, self.means))

    @classmethod
    def from_string(cls, text: str) -> "SpinLevel":
        """Parse entries like 'ZZI=1 IZZ=1 XXX=0.707 YYY=-0.707'."""
        words, means = [], []
        for item in text.split():
            word, _, value = item.partition("=")
            if not value:
                raise ValueError(f"entry {item!r} lacks '=value'")
            words.append(word.upper())
            means.append(float(value))
        return cls(words, means)

    @classmethod
    def from_preset(cls, name: str, means: dict[str, float]) -> "SpinLevel":
        info = preset_info(name)
        try:
            vals = [float(means[w]) for w in info["measured"]]
        except KeyError as exc:
            raise KeyError(f"preset {name} needs a mean for word {exc}") from exc
        return cls(list(info["measured"]), vals, preset=name.upper())


# Named observation levels.  "free" lists the unmeasured words whose
# coefficients the parametric completion scans.
SPIN_PRESETS: dict[str, dict] = {
    "A1": {"sites": 1, "measured": ("Z",), "free": ()},
    "B1": {"sites": 1, "measured": ("Z", "X"), "free": ()},
    "COMP1": {"sites": 1, "measured": ("Z", "X", "Y"), "free": ()},
    "A2": {"sites": 2, "measured": ("ZI", "IZ"), "free": ()},
    "B2": {"sites": 2, "measured": ("ZI", "IZ", "ZZ"), "free": ()},
    "C2": {"sites": 2, "measured": ("ZI", "IZ", "ZZ", "IX"), "free": ()},
    "D2": {"sites": 2, "measured": ("ZI", "IZ", "ZZ", "IX", "IY"), "free": ()},
    "E2": {"sites": 2, "measured": ("ZZ", "XX"), "free": ()},
    "G2": {"sites": 2, "measured": ("ZZ", "XX", "XY", "YX", "YY"), "free": ()},
    "H2": {"sites": 2, "measured": ("XX", "XY", "YX", "YY"), "free": ("ZZ",)},
    "I2": {"sites": 2, "measured": ("ZZ", "XX", "YY"), "free": ()},
    "J2": {"sites": 2, "measured": ("ZZ", "XX"), "free": ("ZX", "XZ", "YY")},
    "B3": {"sites": 3, "measured": ("ZZI", "IZZ"), "free": ()},
    "C3": {"sites": 3, "measured": ("ZZI", "IZZ", "XXX", "YYY"), "free": ()},
}


def preset_info(name: str) -> dict:
    key = name.upper()
    if key not in SPIN_PRESETS:
        raise UnsupportedPreset(f"unknown preset {name!r}")
    return SPIN_PRESETS[key]


def _word_sum(coeffs: dict[str, float], sites: int) -> np.ndarray:
    dim = 2 ** sites
    out = np.eye(dim, dtype=complex)
    for word, c in coeffs.items():
        if c != 0.0:
            out += c * pauli_word(word)
    return out / dim


def _check_psd(rho: np.ndarray, context: str) -> None:
    w = np.linalg.eigvalsh(rho)
    if w[0] < -_PSD_TOL:
        raise UnphysicalMeans(f"{context}: smallest eigenvalue {w[0]:.3e}")


def _binary_entropy(r: float) -> float:
    """Entropy of a single spin with Bloch-vector length r."""
    p = 0.5 * (1.0 + min(abs(r), 1.0))
    if p >= 1.0 - 1e-300:
        return 0.0
    return -p * np.log(p) - (1 - p) * np.log(1 - p)


def bell_state(phi: float) -> DensityMatrix:
    """Projector onto (|00> + e^{i phi} |11>)/sqrt(2)."""
    vec = np.zeros(4, dtype=complex)
    vec[0] = 1.0 / np.sqrt(2)
    vec[3] = np.exp(1j * phi) / np.sqrt(2)
    return DensityMatrix(np.outer(vec, vec.conj()), SpinProductBasis(2))


def ghz_state(phi: float) -> DensityMatrix:
    """Projector onto (|000> + e^{i phi} |111>)/sqrt(2)."""
    vec = np.zeros(8, dtype=complex)
    vec[0] = 1.0 / np.sqrt(2)
    vec[7] = np.exp(1j * phi) / np.sqrt(2)
    return DensityMatrix(np.outer(vec, vec.conj()), SpinProductBasis(3))


def pauli_means(rho: DensityMatrix, words: list[str]) -> dict[str, float]:
    return {
        w: float(np.trace(rho.elements @ pauli_word(w)).real) for w in words
    }


def spin_closed_form(preset: str, means: dict[str, float]) -> dict:
    """Closed-form maximum-entropy state, entropy, and the predicted means of
    unmeasured words implied by the level's operator algebra.

    Presets C2, D2, and J2 have no closed form here and raise
    UnsupportedPreset; use spin_maxent or parametric_completion for them.
    """
    key = preset.upper()
    info = preset_info(key)
    xi = {w: float(means[w]) for w in info["measured"]}
    for w, v in xi.items():
        if abs(v) > 1.0 + 1e-12:
            raise UnphysicalMeans(f"mean <{w}> = {v} outside [-1, 1]")

    if key in ("A1", "B1", "COMP1"):
        rho = _word_sum(xi, 1)
        r = np.sqrt(sum(v * v for v in xi.values()))
        if r > 1.0 + 1e-12:
            raise UnphysicalMeans(f"Bloch vector length {r} > 1")
        return {
            "rho": DensityMatrix(rho, SpinProductBasis(1)),
            "entropy": _binary_entropy(r),
            "predicted_means": {},
        }

    if key == "A2":
        z1, z2 = xi["ZI"], xi["IZ"]
        coeffs = dict(xi)
        coeffs["ZZ"] = z1 * z2
        rho = _word_sum(coeffs, 2)
        return {
            "rho": DensityMatrix(rho, SpinProductBasis(2)),
            "entropy": _binary_entropy(z1) + _binary_entropy(z2),
            "predicted_means": {"ZZ": z1 * z2},
        }

    if key in ("B2", "I2"):
        rho = _word_sum(xi, 2)
        _check_psd(rho, key)
        return {
            "rho": DensityMatrix(rho, SpinProductBasis(2)),
            "entropy": von_neumann_entropy(rho),
            "predicted_means": {},
        }

    if key == "E2":
        zz, xx = xi["ZZ"], xi["XX"]
        coeffs = dict(xi)
        coeffs["YY"] = -zz * xx
        rho = _word_sum(coeffs, 2)
        _check_psd(rho, key)
        # ZZ and XX commute; the joint eigenvalues factorize.
        probs = [
            (1 + a * zz) * (1 + b * xx) / 4 for a in (1, -1) for b in (1, -1)
        ]
        ent = -sum(p * np.log(p) for p in probs if p > 1e-300)
        return {
            "rho": DensityMatrix(rho, SpinProductBasis(2)),
            "entropy": float(ent),
            "predicted_means": {"YY": -zz * xx},
        }

    if key in ("G2", "H2"):
        return _planar_two_spin(key, xi)

    if key == "B3":
        z12, z23 = xi["ZZI"], xi["IZZ"]
        coeffs = dict(xi)
        coeffs["ZIZ"] = z12 * z23
        rho = _word_sum(coeffs, 3)
        _check_psd(rho, key)
        return {
            "rho": DensityMatrix(rho, SpinProductBasis(3)),
            "entropy": von_neumann_entropy(rho),
            "predicted_means": {"ZIZ": z12 * z23},
        }

    if key == "C3":
        return _ghz_minimal_level(xi)

    raise UnsupportedPreset(
        f"preset {key} has no closed form; use spin_maxent"
    )


def _planar_two_spin(key: str, xi: dict[str, float]) -> dict:
    """Levels built from the four in-plane correlations, with the z-z
    correlation either measured (G2) or predicted (H2)."""
    b_val = xi["XX"] + xi["YY"] - 1j * (xi["XY"] - xi["YX"])
    d_val = xi["XX"] - xi["YY"] + 1j * (xi["XY"] + xi["YX"])
    abs_b, abs_d = abs(b_val), abs(d_val)
    predicted: dict[str, float] = {}
    if key == "H2":
        zz = xi["XY"] * xi["YX"] - xi["XX"] * xi["YY"]
        predicted["ZZ"] = zz
        n_vals = [
            1 + 0.5 * (abs_d + abs_b),
            1 + 0.5 * (abs_d - abs_b),
            1 - 0.5 * (abs_d - abs_b),
            1 - 0.5 * (abs_d + abs_b),
        ]
        if min(n_vals) < -1e-12:
            raise UnphysicalMeans(f"H2: |B| + |D| = {abs_b + abs_d} > 2")
        ent = -sum((n / 2) * np.log(n / 2) for n in n_vals if n > 1e-300)
    else:
        zz = xi["ZZ"]
    m_vals = [1 + zz + abs_d, 1 + zz - abs_d, 1 - zz + abs_b, 1 - zz - abs_b]
    if min(m_vals) < -_PSD_TOL:
        raise UnphysicalMeans(f"{key}: eigenvalue {min(m_vals) / 4:.3e} < 0")
    if key == "G2":
        ent = -sum((m / 4) * np.log(m / 4) for m in m_vals if m > 1e-300)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = (1 + zz) / 4
    rho[1, 1] = rho[2, 2] = (1 - zz) / 4
    rho[0, 3] = np.conj(d_val) / 4
    rho[3, 0] = d_val / 4
    rho[1, 2] = np.conj(b_val) / 4
    rho[2, 1] = b_val / 4
    return {
        "rho": DensityMatrix(rho, SpinProductBasis(2)),
        "entropy": float(ent),
        "predicted_means": predicted,
    }


def _ghz_minimal_level(xi: dict[str, float]) -> dict:
    """Level {z1 z2, z2 z3, xxx, yyy}: the two-spin words commute with the
    three-spin words, and the exponent splits into commuting halves whose
    algebra generates the listed predicted words."""
    z12, z23 = xi["ZZI"], xi["IZZ"]
    zx, zy = xi["XXX"], xi["YYY"]
    coeffs = dict(xi)
    predicted = {
        "ZIZ": z12 * z23,
        "YYX": -zx * z12,
        "XYY": -zx * z23,
        "YXY": -zx * z12 * z23,
        "XXY": -zy * z12,
        "YXX": -zy * z23,
        "XYX": -zy * z12 * z23,
    }
    coeffs.update(predicted)
    rho = _word_sum(coeffs, 3)
    _check_psd(rho, "C3")
    return {
        "rho": DensityMatrix(rho, SpinProductBasis(3)),
        "entropy": von_neumann_entropy(rho),
        "predicted_means": predicted,
    }


def spin_maxent(
    level: SpinLevel, opts: Optional[SolverOptions] = None
) -> LagrangeSolution:
    """Numerical maximum-entropy state for an arbitrary spin level."""
    obs = [
        Observable(w, pauli_word(w), m) for w, m in zip(level.words, level.means)
    ]
    return solve_lagrange(
        ObservationLevel(obs), opts, basis=SpinProductBasis(level.sites)
    )


_GRID_STEPS = {1: 1e-3, 2: 1e-2, 3: 2e-2}


def parametric_completion(
    level: SpinLevel, free_words: Optional[list[str]] = None
) -> dict:
    """Scan the coefficients of the unmeasured words over [-1, 1]^d, discard
    candidates that are not positive semidefinite, and return the physical
    point of maximum entropy (one local refinement pass; ties break toward
    the lexicographically first grid point).

    Needed when the physical parametric set touches its boundary, where the
    exponential-family solver cannot reach the solution at finite multipliers.
    """
    if free_words is None:
        if level.preset is None:
            raise ValueError("free_words required for non-preset levels")
        free_words = list(preset_info(level.preset)["free"])
    d = len(free_words)
    if not 1 <= d <= 3:
        raise ValueError("parametric completion supports 1 to 3 free words")

    sites = level.sites
    dim = 2 ** sites
    base = np.eye(dim, dtype=complex)
    for w, m in zip(level.words, level.means):
        base += m * pauli_word(w)
    free_ops = np.stack([pauli_word(w) for w in free_words])

    def scan(
        axes: list[np.ndarray], slack: float
    ) -> tuple[Optional[np.ndarray], float]:
        # `slack` loosens the positivity filter by the largest eigenvalue
        # shift one grid step can cause, so a feasible set of measure zero
        # is not missed between grid points.
        grids = np.meshgrid(*axes, indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)  # (P, d)
        mats = (base + np.tensordot(coords, free_ops, axes=(1, 0))) / dim
        evals = np.linalg.eigvalsh(mats)
        ok = evals[:, 0] >= -(_PSD_TOL + slack)
        if not np.any(ok):
            return None, -np.inf
        ev = np.clip(evals[ok], 1e-300, None)
        ents = -np.sum(ev * np.log(ev), axis=1)
        # Clipping negative eigenvalues inflates the apparent entropy, so a
        # bare argmax would drift off the feasible set; penalize residual
        # negativity steeply enough to dominate that logarithmic gain.
        viol = np.clip(-(evals[ok, 0] + _PSD_TOL), 0.0, None)
        best = int(np.argmax(ents - 1e3 * viol))
        return coords[ok][best], float(ents[best])

    step = _GRID_STEPS[d]
    axis = np.arange(-1.0, 1.0 + step / 2, step)
    best_pt, best_ent = scan([axis] * d, slack=d * step / dim)
    if best_pt is None:
        raise NoPhysicalPoint(
            f"no positive-semidefinite candidate over {free_words}"
        )
    for _ in range(2):
        fine = step / 20
        refined_axes = [
            np.clip(np.arange(c - step, c + step + fine / 2, fine), -1.0, 1.0)
            for c in best_pt
        ]
        pt, ent = scan(refined_axes, slack=d * fine / dim)
        if pt is None:
            break
        best_pt, best_ent = pt, ent
        step = fine

    coeffs = dict(zip(level.words, level.means))
    coeffs.update({w: float(v) for w, v in zip(free_words, best_pt)})
    rho = _word_sum(coeffs, sites)
    return {
        "rho": DensityMatrix(rho, SpinProductBasis(sites)),
        "free_values": {w: float(v) for w, v in zip(free_words, best_pt)},
        "entropy": best_ent,
    }
