"""Maximum-entropy reconstruction.

A generic Lagrange-multiplier solver for arbitrary observation levels
(convex dual minimization with an exact covariance Hessian), plus the
closed-form field observation levels: thermal, displaced thermal, Gaussian,
photon-statistics levels, and the number-moment level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize, root
from scipy.special import logsumexp

from .errors import (
    Infeasible,
    MaxIterExceeded,
    SuperThermal,
    Unphysical,
)
from .hilbert import (
    DensityMatrix,
    FockBasis,
    LagrangeSolution,
    Observable,
    ObservationLevel,
    dm_validate,
    fock_operators,
    von_neumann_entropy,
)


@dataclass
class SolverOptions:
    max_iter: int = 500
    grad_tol: float = 1e-9  # infinity norm of the constraint residual
    backtrack_beta: float = 0.5
    backtrack_c: float = 1e-4
    infeasible_fallback: bool = False
    lambda_boundary: float = 40.0  # |lambda| beyond which a tiny residual counts as converged


def _loewner_kernel(log_w: np.ndarray, w: np.ndarray) -> np.ndarray:
    """k(w_i, w_j) = (w_i - w_j)/(ln w_i - ln w_j), k(w, w) = w.

    This is the kernel of the Kubo (canonical) correlation, which is the
    exact Hessian of the dual potential ln Z + lambda.G.
    """
    dlog = log_w[:, None] - log_w[None, :]
    dw = w[:, None] - w[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = dw / dlog
    same = np.abs(dlog) < 1e-12
    avg = 0.5 * (w[:, None] + w[None, :])
    k[same] = avg[same]
    return k


class _DualState:
    """Eigendecomposition cache for one lambda point."""

    def __init__(self, g_stack: np.ndarray, lambdas: np.ndarray):
        exponent = np.tensordot(lambdas, g_stack, axes=1)
        e, v = eigh(exponent)
        shift = e.min()
        log_w_un = -(e - shift)
        log_z_shift = logsumexp(log_w_un)
        self.log_z = float(log_z_shift - shift)
        self.log_w = log_w_un - log_z_shift  # ln of sigma eigenvalues
        self.w = np.exp(self.log_w)
        self.v = v
        # K_nu = V^dag G_nu V
        self.k_ops = np.einsum("ia,nij,jb->nab", v.conj(), g_stack, v, optimize=True)
        self.means = np.einsum("naa,a->n", self.k_ops, self.w, optimize=True).real

    def dual_value(self, targets: np.ndarray, lambdas: np.ndarray) -> float:
        return self.log_z + float(lambdas @ targets)

    def hessian(self) -> np.ndarray:
        k = _loewner_kernel(self.log_w, self.w)
        weighted = self.k_ops * k[None, :, :]
        h = np.einsum("nab,mab->nm", weighted, self.k_ops.conj(), optimize=True).real
        return h - np.outer(self.means, self.means)

    def sigma(self) -> np.ndarray:
        s = (self.v * self.w) @ self.v.conj().T
        return 0.5 * (s + s.conj().T)


def solve_lagrange(
    level: ObservationLevel,
    opts: Optional[SolverOptions] = None,
    basis=None,
) -> LagrangeSolution:
    """Minimize F(lambda) = ln Z + sum lambda_v G_v over the multipliers.

    Newton steps with the exact covariance Hessian and backtracking line
    search; at convergence Tr(sigma G_v) = G_v within grad_tol and
    S = ln Z + lambda . G.  If the constraints are inconsistent and
    infeasible_fallback is set, the squared constraint deviation is minimized
    instead and the solution is flagged converged=False.
    """
    opts = opts or SolverOptions()
    g_stack = level.matrices
    targets = level.means
    m = len(targets)
    lambdas = np.zeros(m)
    state = _DualState(g_stack, lambdas)
    best_res = np.inf
    stall = 0
    converged = False

    for _ in range(opts.max_iter):
        resid = state.means - targets
        res_inf = float(np.max(np.abs(resid)))
        if res_inf < opts.grad_tol:
            converged = True
            break
        if res_inf > 0.999 * best_res:
            stall += 1
        else:
            stall = 0
            best_res = res_inf
        if res_inf < 1e-7 and np.max(np.abs(lambdas)) >= opts.lambda_boundary and stall >= 3:
            # Constraint attainable only on the boundary of the exponential
            # family (means at extreme values); accepted at double precision.
            converged = True
            break
        if stall >= 50:
            break

        grad = targets - state.means  # gradient of F
        h = state.hessian()
        # Levenberg regularization, escalated until the step decreases F.
        tau = 1e-12 * max(1.0, float(np.trace(h)) / m)
        step = None
        for _ in range(12):
            try:
                step = np.linalg.solve(h + tau * np.eye(m), resid)
                break
            except np.linalg.LinAlgError:
                tau *= 100.0
        if step is None or not np.all(np.isfinite(step)):
            step = np.linalg.pinv(h, rcond=1e-12) @ resid

        f0 = state.dual_value(targets, lambdas)
        slope = float(grad @ step)
        if slope > 0:  # not a descent direction; fall back to -grad
            step = -grad
            slope = float(grad @ step)
        t = 1.0
        accepted = None
        for _ in range(40):
            trial = lambdas + t * step
            cand = _DualState(g_stack, trial)
            if cand.dual_value(targets, trial) <= f0 + opts.backtrack_c * t * slope:
                accepted = (trial, cand)
                break
            t *= opts.backtrack_beta
        if accepted is None:
            stall += 10
            continue
        lambdas, state = accepted

    resid = state.means - targets
    res_inf = float(np.max(np.abs(resid)))

    if not converged and opts.infeasible_fallback:
        lambdas, state = _least_deviation(g_stack, targets, lambdas)
        resid = state.means - targets
        res_inf = float(np.max(np.abs(resid)))
    elif not converged:
        if stall >= 50:
            raise Infeasible(
                f"constraint residual stalled at {res_inf:.3e}; the constraint "
                "set appears empty (enable infeasible_fallback for the "
                "least-deviation estimate)"
            )
        raise MaxIterExceeded(f"no convergence after {opts.max_iter} iterations "
                              f"(residual {res_inf:.3e})")

    sigma = state.sigma()
    dm = DensityMatrix(sigma, basis if basis is not None else FockBasis(level.dim - 1))
    entropy = state.log_z + float(lambdas @ state.means)
    return LagrangeSolution(
        lambdas=lambdas,
        sigma=dm,
        entropy=float(entropy),
        log_partition=state.log_z,
        converged=converged,
        residual=res_inf,
    )


def _least_deviation(g_stack: np.ndarray, targets: np.ndarray, lambdas0: np.ndarray):
    """Minimize sum_v (Tr(sigma(lambda) G_v) - G_v)^2 over lambda."""

    def objective(lam: np.ndarray):
        st = _DualState(g_stack, lam)
        r = st.means - targets
        grad = -2.0 * (st.hessian() @ r)
        return float(r @ r), grad

    res = minimize(objective, lambdas0, jac=True, method="L-BFGS-B",
                   options={"maxiter": 2000, "ftol": 1e-16, "gtol": 1e-12})
    lam = res.x
    return lam, _DualState(g_stack, lam)


# ---------------------------------------------------------------------------
# Closed-form field observation levels
# ---------------------------------------------------------------------------

FIELD_LEVELS = ("Oth", "O1", "O2", "OA", "OB", "OC", "OD1", "OD2", "On")


@dataclass
class FieldLevelSpec:
    """A field observation level and its measured means.

    Required keys of ``measured`` per level:
      Oth: nbar | O1: nbar, gamma | O2: nbar, M, gamma (M and N centered
      on gamma: N = nbar - |gamma|^2, M = <a^2> - gamma^2)
      OA: P_n (complete distribution) | OB: P_even (values of P_{2n}), nbar
      OC: P_odd (values of P_{2n+1}), nbar | OD1: P0, nbar
      OD2: P_N, nbar (integer) | On: n_mean, n2_mean
    """

    level: str
    measured: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.level not in FIELD_LEVELS:
            raise ValueError(f"unknown field level {self.level!r}")
        self.validate()

    def validate(self) -> None:
        m = self.measured
        if self.level == "O2":
            gamma = complex(m.get("gamma", 0.0))
            n_c = float(m["nbar"]) - abs(gamma) ** 2
            m_c = abs(complex(m["M"]))
            if n_c < -1e-12:
                raise Unphysical(f"O2 requires N >= 0, got N = {n_c:.6g}")
            if n_c * (n_c + 1.0) < m_c ** 2 - 1e-12:
                raise Unphysical(
                    f"O2 requires N(N+1) >= |M|^2: {n_c * (n_c + 1):.6g} < {m_c ** 2:.6g}"
                )
        if self.level == "O1":
            if float(m["nbar"]) - abs(complex(m["gamma"])) ** 2 < -1e-12:
                raise Unphysical("O1 requires nbar >= |gamma|^2")
        for key in ("P_n", "P_even", "P_odd"):
            if key in m and float(np.sum(m[key])) > 1.0 + 1e-9:
                raise Unphysical(f"sum of {key} exceeds 1")


def _thermal_pn(nbar: float, dim: int) -> np.ndarray:
    n = np.arange(dim)
    if nbar <= 0:
        pn = np.zeros(dim)
        pn[0] = 1.0
        return pn
    return np.exp(n * np.log(nbar / (nbar + 1.0)) - np.log(nbar + 1.0))


def thermal_entropy(nbar: float) -> float:
    if nbar <= 0:
        return 0.0
    return float((nbar + 1.0) * np.log(nbar + 1.0) - nbar * np.log(nbar))


def _entropy_of_pn(pn: np.ndarray) -> float:
    pn = np.clip(np.asarray(pn, dtype=float), 0.0, None)
    nz = pn[pn > 0]
    return float(-np.sum(nz * np.log(nz)))


def _squeeze_to_moments(n_c: float, m_c: complex, gamma: complex, n_max: int) -> np.ndarray:
    """Density matrix of the displaced squeezed thermal state with centered
    moments (N, M) and mean amplitude gamma.

    Built on an enlarged internal space so the truncated squeeze/displacement
    exponentials are accurate, then cropped to the requested dimension.
    """
    n_int = n_max + max(20, n_max // 2)
    ops = fock_operators(n_int)
    chi = np.sqrt((n_c + 0.5) ** 2 - abs(m_c) ** 2) - 0.5
    chi = max(chi, 0.0)
    if abs(m_c) < 1e-300:
        r = 0.0
        theta = 0.0
    else:
        arg = abs(m_c) / (n_c + 0.5)
        r = 0.5 * np.arctanh(min(arg, 1.0 - 1e-16))
        theta = np.angle(m_c)
    rho = np.diag(_thermal_pn(chi, n_int + 1)).astype(complex)
    sq = ops["squeeze"](-r * np.exp(1j * theta))
    rho = sq @ rho @ sq.conj().T
    if gamma != 0:
        d = ops["displacement"](gamma)
        rho = d @ rho @ d.conj().T
    rho = rho[: n_max + 1, : n_max + 1]
    rho /= np.trace(rho).real
    return rho


def closed_form_reconstruct(spec: FieldLevelSpec, n_max: int) -> dict:
    """The paper's explicit MaxEnt state and entropy for a field level.

    Returns {'rho': DensityMatrix, 'entropy': float, 'P_n': array or None}.
    """
    m = spec.measured
    dim = n_max + 1
    level = spec.level

    if level == "Oth":
        nbar = float(m["nbar"])
        pn = _thermal_pn(nbar, dim)
        rho = np.diag(pn)
        return {"rho": _as_dm(rho, n_max), "entropy": thermal_entropy(nbar), "P_n": pn}

    if level == "O1":
        nbar, gamma = float(m["nbar"]), complex(m["gamma"])
        n_eff = max(nbar - abs(gamma) ** 2, 0.0)
        rho = _squeeze_to_moments(n_eff, 0.0, gamma, n_max)
        return {
            "rho": _as_dm(rho, n_max),
            "entropy": thermal_entropy(n_eff),
            "P_n": np.diag(rho).real,
        }

    if level == "O2":
        gamma = complex(m.get("gamma", 0.0))
        n_c = float(m["nbar"]) - abs(gamma) ** 2
        m_c = complex(m["M"])
        chi = np.sqrt((n_c + 0.5) ** 2 - abs(m_c) ** 2) - 0.5
        chi = max(chi, 0.0)
        rho = _squeeze_to_moments(n_c, m_c, gamma, n_max)
        return {
            "rho": _as_dm(rho, n_max),
            "entropy": thermal_entropy(chi),
            "P_n": np.diag(rho).real,
        }

    if level == "OA":
        pn = np.zeros(dim)
        given = np.asarray(m["P_n"], dtype=float)
        pn[: len(given)] = given[:dim]
        if abs(pn.sum() - 1.0) > 1e-6:
            raise Unphysical("OA requires the complete photon distribution")
        pn /= pn.sum()
        rho = np.diag(pn)
        return {"rho": _as_dm(rho, n_max), "entropy": _entropy_of_pn(pn), "P_n": pn}

    if level in ("OB", "OC"):
        pn = _photon_parity_level(level, m, dim)
        rho = np.diag(pn)
        return {"rho": _as_dm(rho, n_max), "entropy": _entropy_of_pn(pn), "P_n": pn}

    if level == "OD1":
        p0, nbar = float(m["P0"]), float(m["nbar"])
        p = 1.0 - p0
        if nbar < p:
            raise Unphysical("OD1 requires nbar >= 1 - P0")
        pn = np.zeros(dim)
        pn[0] = p0
        n = np.arange(1, dim)
        if nbar > p:
            base = (nbar - p) / nbar
            pn[1:] = (p ** 2 / (nbar - p)) * base ** n
        else:
            pn[1] = p
        # S_D1 = -P0 ln P0 - (nbar - P) ln(nbar - P) - 2P ln P + nbar ln nbar
        def xlnx(x: float) -> float:
            return x * np.log(x) if x > 0 else 0.0
        entropy = -xlnx(p0) - xlnx(nbar - p) - 2.0 * xlnx(p) + xlnx(nbar)
        return {"rho": _as_dm(np.diag(pn), n_max), "entropy": float(entropy), "P_n": pn}

    if level == "OD2":
        p_n, nbar_f = float(m["P_N"]), float(m["nbar"])
        nbar = int(round(nbar_f))
        if abs(nbar - nbar_f) > 1e-9:
            raise Unphysical("OD2 requires an integer mean photon number")
        pn = np.zeros(dim)
        n = np.arange(dim)
        denom = (1.0 + nbar) ** (1 + nbar) - nbar ** nbar
        pn = (1.0 - p_n) * (1.0 + nbar) ** nbar / denom * (nbar / (1.0 + nbar)) ** n
        pn[nbar] = p_n
        if np.any(pn < -1e-12):
            raise Unphysical("OD2 distribution has negative entries")
        q = 1.0 - p_n
        entropy = (
            -(p_n * np.log(p_n) if p_n > 0 else 0.0)
            - (q * np.log(q) if q > 0 else 0.0)
            + q * np.log((1.0 + nbar) ** (1 + nbar) / nbar ** nbar - 1.0)
        )
        return {"rho": _as_dm(np.diag(pn), n_max), "entropy": float(entropy), "P_n": pn}

    if level == "On":
        return _number_moment_level(m, n_max)

    raise ValueError(f"unknown level {level!r}")


def _photon_parity_level(level: str, m: dict, dim: int) -> np.ndarray:
    nbar = float(m["nbar"])
    pn = np.zeros(dim)
    if level == "OB":
        given = np.asarray(m["P_even"], dtype=float)
        p_meas = 1.0 - given.sum()
        n_meas = nbar - float(np.sum(2 * np.arange(len(given)) * given))
        if p_meas < -1e-12 or n_meas < p_meas - 1e-12:
            raise Unphysical("OB requires P_odd >= 0 and nbar_odd >= P_odd")
        pn[0:dim:2][: len(given)] = given[: (dim + 1) // 2]
        n = np.arange((dim - 1) // 2 + 1)
        if n_meas > p_meas > 0:
            ratio = (n_meas - p_meas) / (n_meas + p_meas)
            vals = (2 * p_meas ** 2 / (n_meas + p_meas)) * ratio ** n
            pn[1:dim:2] = vals[: len(pn[1:dim:2])]
        elif p_meas > 0:
            pn[1] = p_meas
    else:  # OC
        given = np.asarray(m["P_odd"], dtype=float)
        p_meas = 1.0 - given.sum()
        n_meas = nbar - float(np.sum((2 * np.arange(len(given)) + 1) * given))
        if p_meas < -1e-12 or n_meas < -1e-12:
            raise Unphysical("OC requires P_even >= 0 and nbar_even >= 0")
        pn[1:dim:2][: len(given)] = given[: dim // 2]
        n = np.arange((dim + 1) // 2)
        if n_meas > 0:
            ratio = n_meas / (n_meas + 2 * p_meas)
            vals = (2 * p_meas ** 2 / (n_meas + 2 * p_meas)) * ratio ** n
            pn[0:dim:2] = vals[: len(pn[0:dim:2])]
        else:
            pn[0] = p_meas
    return pn


def _number_moment_level(m: dict, n_max: int) -> dict:
    n_mean = float(m["n_mean"])
    n2_mean = float(m["n2_mean"])
    var = n2_mean - n_mean ** 2
    if var < 0:
        raise Unphysical("variance of n is negative")
    q_mandel = (var - n_mean) / n_mean if n_mean > 0 else -1.0
    if q_mandel > n_mean:
        raise SuperThermal(
            f"Q = {q_mandel:.6g} > nbar = {n_mean:.6g}: the number-moment "
            "level has no normalizable maximum-entropy state"
        )
    # P_m ~ exp(-l1 m - l2 m^2) on a support comfortably beyond n_max.
    support = np.arange(0, max(n_max + 1, int(n_mean + 12 * np.sqrt(max(var, 0.05)) + 10)))

    def moments(lams: np.ndarray) -> np.ndarray:
        logp = -lams[0] * support - lams[1] * support ** 2
        logp -= logsumexp(logp)
        p = np.exp(logp)
        return np.array([p @ support - n_mean, p @ support ** 2 - n2_mean])

    var0 = max(var, 1e-12)
    # Continuum (broad) regime: Gaussian width gives l2 = 1/(2 var); discrete
    # (narrow) regime: nearest-neighbor occupation gives l2 = ln(2/var).
    l2_init = 1.0 / (2.0 * var0) if var0 >= 1.0 else np.log(2.0 / var0)
    sol = None
    for l2_try in (l2_init, 1.0 / (2.0 * var0), np.log(2.0 / var0) if var0 < 2 else 1.0):
        cand = root(moments, np.array([-2.0 * l2_try * n_mean, l2_try]),
                    method="hybr", tol=1e-13)
        if cand.success and np.max(np.abs(moments(cand.x))) < 1e-9:
            sol = cand
            break
    if sol is None:
        raise Unphysical("number-moment solve failed to converge")
    logp = -sol.x[0] * support - sol.x[1] * support ** 2
    logp -= logsumexp(logp)
    p_full = np.exp(logp)
    pn = p_full[: n_max + 1].copy()
    if pn.sum() < 1.0 - 1e-8:
        raise Unphysical(f"n_max={n_max} truncates {1 - pn.sum():.3e} of the distribution")
    entropy = _entropy_of_pn(p_full)
    pn /= pn.sum()
    return {
        "rho": _as_dm(np.diag(pn), n_max),
        "entropy": entropy,
        "P_n": pn,
        "lambdas": sol.x,
    }


def _as_dm(rho: np.ndarray, n_max: int) -> DensityMatrix:
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1.0) < 1e-6:  # absorb geometric-tail truncation loss
        rho = rho / tr
    return dm_validate(rho, FockBasis(n_max))


# Known entropy order relations: (coarser, finer) meaning S_finer <= S_coarser.
_ORDER_RELATIONS = [
    ("Oth", "O1"), ("O1", "O2"), ("O2", "O0"),
    ("Oth", "OB"), ("Oth", "OC"), ("Oth", "OD1"), ("Oth", "OD2"),
    ("OB", "OA"), ("OC", "OA"), ("OD1", "OB"), ("OA", "O0"),
]


def level_entropy_chain(specs: list[FieldLevelSpec], n_max: int) -> dict:
    """Entropies of several levels of one source state, with partial-order
    verdicts for the known coarser/finer relations."""
    entropies = {}
    for spec in specs:
        entropies[spec.level] = closed_form_reconstruct(spec, n_max)["entropy"]
    verdicts = []
    for coarse, fine in _ORDER_RELATIONS:
        if coarse in entropies and fine in entropies:
            ok = entropies[fine] <= entropies[coarse] + 1e-9
            verdicts.append({"relation": f"S_{fine} <= S_{coarse}", "holds": bool(ok)})
    return {"entropies": entropies, "verdicts": verdicts}


def observation_level_for(spec: FieldLevelSpec, n_max: int) -> ObservationLevel:
    """The Hermitian observable set of a field level, for the generic solver.

    Complex-valued constraints (gamma, M) are split into Hermitian pairs.
    """
    ops = fock_operators(n_max)
    a, ad, nmat = ops["a"], ops["a_dagger"], ops["n"]
    m = spec.measured
    obs: list[Observable] = []

    def proj(k: int) -> np.ndarray:
        p = np.zeros((n_max + 1, n_max + 1))
        p[k, k] = 1.0
        return p

    if spec.level == "Oth":
        obs.append(Observable("n", nmat, float(m["nbar"])))
    elif spec.level in ("O1", "O2"):
        gamma = complex(m["gamma"])
        obs.append(Observable("n", nmat, float(m["nbar"])))
        obs.append(Observable("Re a", (a + ad) / 2, gamma.real))
        obs.append(Observable("Im a", (a - ad) / 2j, gamma.imag))
        if spec.level == "O2":
            mu = complex(m["M"]) + gamma ** 2  # raw <a^2>
            a2 = a @ a
            obs.append(Observable("Re a^2", (a2 + a2.conj().T) / 2, mu.real))
            obs.append(Observable("Im a^2", (a2 - a2.conj().T) / 2j, mu.imag))
    elif spec.level == "OA":
        pn = np.asarray(m["P_n"], dtype=float)
        for k, p in enumerate(pn[: n_max + 1]):
            obs.append(Observable(f"P_{k}", proj(k), float(p)))
    elif spec.level == "OB":
        obs.append(Observable("n", nmat, float(m["nbar"])))
        for k, p in enumerate(np.asarray(m["P_even"], dtype=float)):
            if 2 * k <= n_max:
                obs.append(Observable(f"P_{2 * k}", proj(2 * k), float(p)))
    elif spec.level == "OC":
        obs.append(Observable("n", nmat, float(m["nbar"])))
        for k, p in enumerate(np.asarray(m["P_odd"], dtype=float)):
            if 2 * k + 1 <= n_max:
                obs.append(Observable(f"P_{2 * k + 1}", proj(2 * k + 1), float(p)))
    elif spec.level == "OD1":
        obs.append(Observable("n", nmat, float(m["nbar"])))
        obs.append(Observable("P_0", proj(0), float(m["P0"])))
    elif spec.level == "OD2":
        nb = int(round(float(m["nbar"])))
        obs.append(Observable("n", nmat, float(m["nbar"])))
        obs.append(Observable(f"P_{nb}", proj(nb), float(m["P_N"])))
    elif spec.level == "On":
        obs.append(Observable("n", nmat, float(m["n_mean"])))
        obs.append(Observable("n^2", nmat @ nmat, float(m["n2_mean"])))
    else:
        raise ValueError(f"unknown level {spec.level!r}")
    return ObservationLevel(obs)


def spec_from_state(level: str, rho: DensityMatrix) -> FieldLevelSpec:
    """Measure the means a field level needs, directly from a state."""
    from .states import state_stats

    stats = state_stats(rho)
    pn = stats["photon_distribution"]
    ops = fock_operators(rho.dim - 1)
    gamma = complex(np.trace(rho.elements @ ops["a"]))
    mu = complex(np.trace(rho.elements @ ops["a"] @ ops["a"]))
    measured: dict
    if level == "Oth":
        measured = {"nbar": stats["nbar"]}
    elif level == "O1":
        measured = {"nbar": stats["nbar"], "gamma": gamma}
    elif level == "O2":
        measured = {"nbar": stats["nbar"], "gamma": gamma, "M": mu - gamma ** 2}
    elif level == "OA":
        measured = {"P_n": pn}
    elif level == "OB":
        measured = {"nbar": stats["nbar"], "P_even": pn[0::2]}
    elif level == "OC":
        measured = {"nbar": stats["nbar"], "P_odd": pn[1::2]}
    elif level == "OD1":
        measured = {"nbar": stats["nbar"], "P0": float(pn[0])}
    elif level == "OD2":
        nb = int(round(stats["nbar"]))
        measured = {"nbar": float(nb), "P_N": float(pn[nb])}
    elif level == "On":
        n = np.arange(rho.dim)
        measured = {"n_mean": float(pn @ n), "n2_mean": float(pn @ n ** 2)}
    else:
        raise ValueError(f"unknown level {level!r}")
    return FieldLevelSpec(level=level, measured=measured)
