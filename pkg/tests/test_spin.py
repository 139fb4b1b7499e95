import numpy as np
import pytest

from qreconstruct.errors import NoPhysicalPoint, UnphysicalMeans, UnsupportedPreset
from qreconstruct.hilbert import von_neumann_entropy
from qreconstruct.spin import (
    SPIN_PRESETS,
    SpinLevel,
    bell_state,
    ghz_state,
    parametric_completion,
    pauli_means,
    spin_closed_form,
    spin_maxent,
)


def test_bell_state_means():
    bell = bell_state(np.pi / 4)
    means = pauli_means(bell, ["ZZ", "XX", "YY", "XY", "YX", "ZI", "IZ"])
    assert abs(means["ZZ"] - 1.0) < 1e-12
    assert abs(means["XX"] - np.cos(np.pi / 4)) < 1e-12
    assert abs(means["YY"] + np.cos(np.pi / 4)) < 1e-12
    assert abs(means["XY"] - np.sin(np.pi / 4)) < 1e-12
    assert abs(means["ZI"]) < 1e-12 and abs(means["IZ"]) < 1e-12


def test_single_spin_levels():
    result = spin_closed_form("A1", {"Z": 0.6})
    assert np.max(np.abs(result["rho"].elements - np.diag([0.8, 0.2]))) < 1e-12
    result = spin_closed_form("COMP1", {"Z": 0.0, "X": 1.0, "Y": 0.0})
    assert result["entropy"] < 1e-10


def test_factorized_level_predicts_pair_correlation():
    rho = spin_closed_form("A2", {"ZI": 0.5, "IZ": -0.4})
    assert abs(rho["predicted_means"]["ZZ"] - (-0.2)) < 1e-12


def test_closed_forms_agree_with_numeric_solver():
    # a partially mixed two-spin state keeps every level strictly interior
    means = {"ZI": 0.3, "IZ": -0.2, "ZZ": 0.25}
    closed = spin_closed_form("B2", means)
    numeric = spin_maxent(SpinLevel.from_preset("B2", means))
    assert numeric.converged
    assert np.max(np.abs(closed["rho"].elements - numeric.sigma.elements)) < 1e-8
    assert abs(closed["entropy"] - numeric.entropy) < 1e-8


def test_planar_level_predicts_zz_on_bell_state():
    bell = bell_state(np.pi / 2)
    means = pauli_means(bell, ["XX", "XY", "YX", "YY"])
    result = spin_closed_form("H2", means)
    assert abs(result["predicted_means"]["ZZ"] - 1.0) < 1e-9


def test_correlation_level_predicts_yy():
    bell = bell_state(0.0)
    means = pauli_means(bell, ["ZZ", "XX"])
    result = spin_closed_form("E2", means)
    assert abs(result["predicted_means"]["YY"] + 1.0) < 1e-9
    assert result["entropy"] < 1e-9


def test_ghz_levels():
    ghz = ghz_state(0.3)
    b3 = spin_closed_form("B3", pauli_means(ghz, ["ZZI", "IZZ"]))
    assert abs(b3["entropy"] - np.log(2.0)) < 1e-9
    assert abs(b3["predicted_means"]["ZIZ"] - 1.0) < 1e-9
    c3 = spin_closed_form("C3", pauli_means(ghz, ["ZZI", "IZZ", "XXX", "YYY"]))
    assert c3["entropy"] < 1e-9
    assert np.max(np.abs(c3["rho"].elements - ghz.elements)) < 1e-9


def test_presets_without_closed_form_fall_back_to_solver():
    bell = bell_state(0.0)
    for preset in ("C2", "D2"):
        words = list(SPIN_PRESETS[preset]["measured"])
        means = pauli_means(bell, words)
        with pytest.raises(UnsupportedPreset):
            spin_closed_form(preset, means)
        numeric = spin_maxent(SpinLevel.from_preset(preset, means))
        assert abs(numeric.entropy - np.log(2.0)) < 1e-6


def test_parametric_completion_reaches_the_boundary_point():
    bell = bell_state(0.0)
    level = SpinLevel.from_preset("J2", pauli_means(bell, ["ZZ", "XX"]))
    completed = parametric_completion(level)
    # positivity pins the free YY coefficient at -zz*xx
    assert abs(completed["free_values"]["YY"] + 1.0) < 2e-3
    assert abs(completed["free_values"]["ZX"]) < 2e-3
    assert abs(completed["free_values"]["XZ"]) < 2e-3
    reference = spin_closed_form("E2", pauli_means(bell, ["ZZ", "XX"]))
    assert np.max(np.abs(completed["rho"].elements - reference["rho"].elements)) < 0.01


def test_zero_means_give_maximally_mixed_state():
    result = spin_closed_form("G2", {w: 0.0 for w in ("ZZ", "XX", "XY", "YX", "YY")})
    assert np.max(np.abs(result["rho"].elements - np.eye(4) / 4.0)) < 1e-12
    assert abs(result["entropy"] - 2.0 * np.log(2.0)) < 1e-12


def test_unphysical_means_rejected():
    with pytest.raises(UnphysicalMeans):
        spin_closed_form("B2", {"ZI": 1.0, "IZ": 1.0, "ZZ": -1.0})


def test_completion_with_no_physical_point_raises():
    # ZZ = XX = YY = 1 is outside the physical set for every ZX value
    level = SpinLevel(["ZZ", "XX", "YY"], [1.0, 1.0, 1.0], preset=None)
    with pytest.raises(NoPhysicalPoint):
        parametric_completion(level, free_words=["ZX"])


def test_level_validation():
    with pytest.raises(ValueError):
        SpinLevel(["ZZ"], [1.0, 0.5])
    with pytest.raises(ValueError):
        SpinLevel(["ZZ", "X"], [1.0, 0.5])
