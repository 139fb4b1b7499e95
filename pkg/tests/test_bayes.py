import numpy as np
import pytest

from qreconstruct.bayes import (
    MeasurementRecord,
    asymptotic_estimate,
    concentration_check,
    posterior_estimate,
    spin1_likelihood,
)
from qreconstruct.errors import PurityViolation, UnsupportedCombination


def test_record_parsing_and_counts():
    record = MeasurementRecord.from_string("z +1\nx -1\n# comment\nz +1\n")
    assert record.system == "spin1"
    assert record.counts()[("Z", 1)] == 2
    assert record.counts()[("X", -1)] == 1


def test_record_rejects_bad_entries():
    with pytest.raises(ValueError):
        MeasurementRecord([("q", 1)], "spin1")
    with pytest.raises(ValueError):
        MeasurementRecord([("z", 2)], "spin1")
    with pytest.raises(ValueError):
        MeasurementRecord([("z", 1)], "spin9")


def test_single_outcome_posterior_oracle():
    result = posterior_estimate(MeasurementRecord([("z", +1)], "spin1"))
    assert abs(result.rho.elements[0, 0].real - 2.0 / 3.0) < 1e-9
    result = posterior_estimate(MeasurementRecord([("x", -1)], "spin1"))
    assert abs(result.rho.elements[0, 1].real + 1.0 / 6.0) < 1e-9


def test_posterior_mean_sharpens_with_repeated_outcomes():
    values = []
    for n in (1, 4, 16, 64):
        record = MeasurementRecord([("z", +1)] * n, "spin1")
        rho = posterior_estimate(record).rho.elements
        values.append((rho[0, 0] - rho[1, 1]).real)
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] > 0.9


def test_spin1_likelihood_factorizes():
    record = MeasurementRecord([("z", +1), ("x", -1)], "spin1")
    theta, phi = 0.7, 1.9
    like = spin1_likelihood(record, theta, phi)
    pz = 0.5 * (1.0 + np.cos(theta))
    px = 0.5 * (1.0 - np.sin(theta) * np.cos(phi))
    assert abs(like - pz * px) < 1e-12


def test_two_spin_posterior_concentrates_on_product_state():
    record = MeasurementRecord([("zi", +1), ("iz", +1)] * 12, "spin2")
    result = posterior_estimate(record, n_points=2**15)
    assert result.rho.elements[0, 0].real > 0.8
    assert result.rho.elements.shape == (4, 4)


def test_purified_single_outcome_oracle():
    record = MeasurementRecord([("z", +1)], "spin1_purified")
    result = posterior_estimate(record, n_points=2**16)
    assert abs(result.rho.elements[0, 0].real - 0.6) < 5e-3
    assert abs(result.rho.elements[1, 1].real - 0.4) < 5e-3


def test_asymptotic_estimates_and_guards():
    rho = asymptotic_estimate("spin1", {"z": 0.4})
    assert np.allclose(np.diag(rho.elements).real, [0.7, 0.3])
    with pytest.raises(PurityViolation):
        asymptotic_estimate("spin1", {"x": 0.3, "y": 0.3, "z": 0.3})
    with pytest.raises(UnsupportedCombination):
        asymptotic_estimate("spin2", {"XX": 0.1})
    with pytest.raises(UnsupportedCombination):
        asymptotic_estimate("spin3", {"z": 0.1})


def test_posterior_consistent_with_asymptotics():
    # many outcomes drawn from a known state: posterior approaches the
    # asymptotic limit for the measured level
    rng = np.random.Generator(np.random.Philox(9))
    theta = 1.1
    entries = []
    for _ in range(4000):
        entries.append(("z", 1 if rng.uniform() < 0.5 * (1 + np.cos(theta)) else -1))
    for _ in range(4000):
        entries.append(("x", 1 if rng.uniform() < 0.5 * (1 + np.sin(theta)) else -1))
    record = MeasurementRecord(entries, "spin1")
    posterior = posterior_estimate(record).rho.elements
    counts = record.counts()
    z_mean = (counts[("Z", 1)] - counts[("Z", -1)]) / 4000
    x_mean = (counts[("X", 1)] - counts[("X", -1)]) / 4000
    limit = asymptotic_estimate("spin1", {"z": z_mean, "x": x_mean}).elements
    assert np.max(np.abs(posterior - limit)) < 0.05


def test_concentration_moments():
    alphas = np.array([0.3, 0.7])
    report = concentration_check(alphas, 0.0)
    assert np.allclose(report["means"], [0.5, 0.5])
    report = concentration_check(alphas, 1e6)
    assert np.max(np.abs(report["means"] - alphas)) < 1e-5
    assert np.max(report["variances"]) < 1e-6
