"""Quantum-state reconstruction for truncated field modes and small spins.

Maximum-entropy reconstruction on incomplete observation levels, homodyne
tomography by pattern functions and by constrained entropy maximization,
Bayesian inference from finite measurement records, and optimal finite
POVMs for state and phase estimation.
"""

from .bayes import (
    MeasurementRecord,
    PosteriorResult,
    asymptotic_estimate,
    concentration_check,
    posterior_estimate,
)
from .hilbert import (
    DensityMatrix,
    FockBasis,
    Observable,
    ObservationLevel,
    SpinProductBasis,
    expectation,
    gibbs_state,
    von_neumann_entropy,
)
from .maxent import (
    FIELD_LEVELS,
    FieldLevelSpec,
    SolverOptions,
    closed_form_reconstruct,
    level_entropy_chain,
    solve_lagrange,
    spec_from_state,
    thermal_entropy,
)
from .povm import (
    FidelityReport,
    FOperator,
    NeumarkResult,
    Povm,
    build_F,
    build_phase_povm,
    build_spin_povm,
    mean_fidelity,
    neumark_extend,
)
from .spin import (
    SpinLevel,
    bell_state,
    ghz_state,
    parametric_completion,
    pauli_means,
    spin_closed_form,
    spin_maxent,
)
from .states import StateSpec, make_state, parse_state_spec, state_stats
from .tomography import (
    Tomogram,
    deviation,
    direct_sampling,
    maxent_tomo,
    pattern_functions,
    simulate_tomogram,
)
from .wigner import PhaseGrid, QuadratureDist, quadrature_pdf, wigner_from_dm

__all__ = [name for name in dir() if not name.startswith("_")]
