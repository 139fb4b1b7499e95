import json

import numpy as np
import pytest

from qreconstruct.cli import main
from qreconstruct.povm import build_spin_povm, mean_fidelity
from qreconstruct.serialization import (
    format_fidelity_report,
    read_matrix,
    read_tomogram,
    write_matrix,
    write_povm,
    write_tomogram,
)
from qreconstruct.states import Coherent, StateSpec, make_state
from qreconstruct.tomography import simulate_tomogram


def test_matrix_roundtrip(tmp_path):
    rng = np.random.Generator(np.random.Philox(1))
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    path = tmp_path / "m.mat"
    write_matrix(m, path)
    assert np.array_equal(read_matrix(path), m)


def test_tomogram_roundtrip(tmp_path):
    rho = make_state(StateSpec(Coherent(0.7), 20))
    thetas = np.arange(3) * np.pi / 3
    xs = np.linspace(-2.0, 2.0, 9)
    tomogram = simulate_tomogram(rho, thetas, xs, mode="noisy", eta=0.1, seed=5)
    path = tmp_path / "t.csv"
    write_tomogram(tomogram, path)
    loaded = read_tomogram(path)
    assert loaded.mode == "noisy" and loaded.eta == 0.1 and loaded.seed == 5
    assert np.max(np.abs(loaded.values - tomogram.values)) < 1e-15


def test_povm_serialization_and_report(tmp_path):
    povm = build_spin_povm(1)
    path = tmp_path / "p.txt"
    write_povm(povm, path)
    text = path.read_text()
    assert text.startswith("povm 4 2 spin 1")
    assert text.count("# guess") == 4
    report = mean_fidelity(povm, samples=10_000, seed=0)
    line = format_fidelity_report(report)
    parts = [float(x) for x in line.split(",")]
    assert len(parts) == 4 and abs(parts[0] - 2.0 / 3.0) < 1e-9


def test_cmd_field_maxent(tmp_path):
    out = tmp_path / "run"
    code = main(
        [
            "field-maxent",
            "--state",
            "kind=coherent nbar=2 nmax=30",
            "--level",
            "O1",
            "--grid-points",
            "21",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    report = (out / "report.txt").read_text()
    entropy = float(report.split("entropy:")[1])
    assert entropy < 1e-7
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "field-maxent"
    assert (out / "sigma.mat").exists() and (out / "wigner.csv").exists()


def test_cmd_field_maxent_superthermal_exit_code(tmp_path):
    out = tmp_path / "run"
    code = main(
        [
            "field-maxent",
            "--state",
            "kind=squeezed eta=0.5 nmax=40",
            "--level",
            "On",
            "--out",
            str(out),
        ]
    )
    assert code == 2
    assert "SuperThermal" in (out / "report.txt").read_text()


def test_cmd_tomo_deterministic(tmp_path):
    args = [
        "tomo",
        "--state",
        "kind=fock n=1 nmax=12",
        "--ntheta",
        "4",
        "--nx",
        "13",
        "--mode",
        "noisy",
        "--eta",
        "0.05",
        "--seed",
        "7",
    ]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    for name in ("tomogram.csv", "rho_pattern.mat", "rho_maxent.mat", "deltas.txt"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_cmd_tomo_requires_seed_for_noise(tmp_path):
    code = main(
        [
            "tomo",
            "--state",
            "kind=fock n=1 nmax=10",
            "--mode",
            "noisy",
            "--eta",
            "0.1",
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert code == 3


def test_cmd_spin(tmp_path):
    out = tmp_path / "run"
    code = main(
        ["spin", "--system", "bell", "--phi", "0", "--level", "OE2", "--out", str(out)]
    )
    assert code == 0
    report = (out / "report.txt").read_text()
    entropy = float(report.split("entropy:")[1])
    assert entropy < 1e-7
    assert "predicted YY" in report


def test_cmd_bayes(tmp_path):
    records = tmp_path / "records.txt"
    records.write_text("z +1\n")
    out = tmp_path / "run"
    code = main(
        ["bayes", "--system", "spin1", "--records", str(records), "--out", str(out)]
    )
    assert code == 0
    rho = read_matrix(out / "rho.mat")
    assert abs(rho[0, 0].real - 2.0 / 3.0) < 1e-6


def test_cmd_povm(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(
        ["povm", "--task", "spin", "--n", "4", "--samples", "20000", "--out", str(out)]
    )
    assert code == 0
    line = capsys.readouterr().out.strip()
    closed, mc, se, bound = (float(x) for x in line.split(","))
    assert abs(closed - 5.0 / 6.0) < 1e-9 and abs(bound - closed) < 1e-9


def test_cmd_povm_phase_writes_operator(tmp_path):
    out = tmp_path / "run"
    code = main(
        ["povm", "--task", "phase", "--n", "2", "--samples", "20000", "--out", str(out)]
    )
    assert code == 0
    op = read_matrix(out / "phase_operator.mat")
    eigs = np.sort(np.linalg.eigvalsh(op))
    assert np.allclose(eigs, sorted(2.0 * np.pi * s / 3.0 for s in range(3)))
