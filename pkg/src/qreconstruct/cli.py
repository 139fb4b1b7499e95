"""Command-line workflows: one subcommand per reconstruction task.

Every run writes its outputs plus a ``manifest.json`` recording the
command, options, seed, library version, and wall time, so any result
can be reproduced from its manifest alone.  Exit codes: 0 success,
2 domain error (unphysical or infeasible inputs), 3 I/O error,
4 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib.metadata import version as _pkg_version
from pathlib import Path

import numpy as np

from .bayes import MeasurementRecord, posterior_estimate
from .errors import DomainError, MaxIterExceeded
from .maxent import FieldLevelSpec, closed_form_reconstruct, spec_from_state
from .povm import build_phase_povm, build_spin_povm, mean_fidelity
from .serialization import (
    format_fidelity_report,
    write_matrix,
    write_phase_grid,
    write_povm,
    write_tomogram,
)
from .spin import (
    SpinLevel,
    bell_state,
    ghz_state,
    parametric_completion,
    pauli_means,
    preset_info,
    spin_closed_form,
    spin_maxent,
)
from .states import make_state, parse_state_spec, state_stats
from .tomography import (
    deviation,
    direct_sampling,
    maxent_tomo,
    simulate_tomogram,
)
from .wigner import PhaseGrid, wigner_from_dm


def _parse_tokens(text: str) -> dict[str, str]:
    """Split 'kind=coherent nbar=2' into a token dict."""
    tokens = {}
    for item in text.split():
        key, _, value = item.partition("=")
        if not value:
            raise ValueError(f"token {item!r} lacks '=value'")
        tokens[key.lower()] = value
    return tokens


def _write_manifest(out: Path, command: str, options: dict, seed, elapsed: float) -> None:
    manifest = {
        "command": command,
        "options": {k: v for k, v in options.items() if k != "func"},
        "seed": seed,
        "version": _pkg_version("artifact"),
        "wall_time_s": round(elapsed, 3),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_field_maxent(args: argparse.Namespace) -> int:
    start = time.time()
    out = _out_dir(args.out)
    tokens = _parse_tokens(args.state)
    spec = parse_state_spec(tokens)
    rho = make_state(spec)
    try:
        level = spec_from_state(args.level, rho)
        result = closed_form_reconstruct(level, spec.n_max)
    except DomainError as exc:
        (out / "report.txt").write_text(f"error: {type(exc).__name__}: {exc}\n")
        raise
    sigma = result["rho"]
    write_matrix(sigma.elements, out / "sigma.mat")
    grid = PhaseGrid(-5.0, 5.0, -5.0, 5.0, args.grid_points, args.grid_points)
    write_phase_grid(wigner_from_dm(sigma, grid), out / "wigner.csv")
    lines = [
        f"state: {args.state}",
        f"level: {args.level}",
        f"n_max: {spec.n_max}",
        f"entropy: {result['entropy']:.12e}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    _write_manifest(out, "field-maxent", vars(args), None, time.time() - start)
    return 0


def cmd_tomo(args: argparse.Namespace) -> int:
    start = time.time()
    out = _out_dir(args.out)
    if args.mode == "noisy" and args.seed is None:
        raise ValueError("--seed is required for noisy tomograms")
    tokens = _parse_tokens(args.state)
    spec = parse_state_spec(tokens)
    rho = make_state(spec)
    thetas = np.arange(args.ntheta) * np.pi / args.ntheta
    xs = np.linspace(-args.xmax, args.xmax, args.nx)
    tomogram = simulate_tomogram(
        rho, thetas, xs, mode=args.mode, eta=args.eta, seed=args.seed
    )
    write_tomogram(tomogram, out / "tomogram.csv")
    direct = direct_sampling(tomogram, spec.n_max, dim_cap=args.dim_cap)
    write_matrix(direct.matrix, out / "rho_pattern.mat")
    nbar = state_stats(rho)["nbar"]
    solution = maxent_tomo(tomogram, nbar, spec.n_max)
    write_matrix(solution.sigma.elements, out / "rho_maxent.mat")
    d = direct.matrix.shape[0]
    delta_pattern = deviation(rho.elements[:d, :d], direct.matrix)
    delta_maxent = deviation(rho.elements, solution.sigma.elements)
    lines = [
        f"delta_pattern: {delta_pattern:.12e}",
        f"delta_maxent: {delta_maxent:.12e}",
        f"non_psd: {direct.non_psd}",
        f"converged: {solution.converged}",
    ]
    (out / "deltas.txt").write_text("\n".join(lines) + "\n")
    _write_manifest(out, "tomo", vars(args), args.seed, time.time() - start)
    return 0


def cmd_spin(args: argparse.Namespace) -> int:
    start = time.time()
    out = _out_dir(args.out)
    preset = args.level.upper().lstrip("O") if args.level else None
    if args.system == "bell":
        rho_true = bell_state(args.phi)
    elif args.system == "ghz":
        rho_true = ghz_state(args.phi)
    else:
        rho_true = None
    if args.means:
        level = SpinLevel.from_string(args.means)
        if preset:
            level.preset = preset
    else:
        if rho_true is None or preset is None:
            raise ValueError("need --means, or --system with --level")
        words = list(preset_info(preset)["measured"])
        level = SpinLevel.from_preset(preset, pauli_means(rho_true, words))
    lines = [f"level: {level.words}", f"means: {[round(m, 12) for m in level.means]}"]
    try:
        result = spin_closed_form(level.preset, level.as_dict()) if level.preset else None
    except DomainError:
        result = None
    if result is not None:
        sigma, entropy = result["rho"], result["entropy"]
        for word, value in sorted(result.get("predicted_means", {}).items()):
            lines.append(f"predicted {word}: {value:.12e}")
    else:
        solution = spin_maxent(level)
        sigma, entropy = solution.sigma, solution.entropy
    if args.complete:
        completed = parametric_completion(level)
        sigma, entropy = completed["rho"], completed["entropy"]
        for word, value in sorted(completed["free_values"].items()):
            lines.append(f"completed {word}: {value:.12e}")
    write_matrix(sigma.elements, out / "sigma.mat")
    lines.append(f"entropy: {entropy:.12e}")
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    _write_manifest(out, "spin", vars(args), None, time.time() - start)
    return 0


def cmd_bayes(args: argparse.Namespace) -> int:
    start = time.time()
    out = _out_dir(args.out)
    record = MeasurementRecord.from_string(
        Path(args.records).read_text(), system=args.system
    )
    result = posterior_estimate(record, n_points=args.n_points)
    write_matrix(result.rho.elements, out / "rho.mat")
    lines = [
        f"system: {args.system}",
        f"entries: {len(record.entries)}",
        f"evidence_weight: {result.evidence_weight:.12e}",
        f"std_error: {result.std_error:.3e}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    _write_manifest(out, "bayes", vars(args), None, time.time() - start)
    return 0


def cmd_povm(args: argparse.Namespace) -> int:
    start = time.time()
    out = _out_dir(args.out)
    if args.task == "spin":
        povm = build_spin_povm(args.n)
    else:
        povm, _, phase_operator = build_phase_povm(args.n)
        write_matrix(phase_operator, out / "phase_operator.mat")
    report = mean_fidelity(povm, samples=args.samples, seed=args.seed)
    write_povm(povm, out / "povm.txt")
    line = format_fidelity_report(report)
    print(line)
    (out / "fidelity.txt").write_text(line + "\n")
    _write_manifest(out, "povm", vars(args), args.seed, time.time() - start)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qreconstruct",
        description="Quantum-state reconstruction workflows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field-maxent", help="closed-form field reconstruction")
    p.add_argument("--state", required=True, help="e.g. 'kind=coherent nbar=2 nmax=30'")
    p.add_argument("--level", required=True, help="observation level, e.g. O1")
    p.add_argument("--grid-points", type=int, default=81)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_field_maxent)

    p = sub.add_parser("tomo", help="homodyne tomography reconstruction")
    p.add_argument("--state", required=True)
    p.add_argument("--ntheta", type=int, default=4)
    p.add_argument("--nx", type=int, default=13)
    p.add_argument("--xmax", type=float, default=2.0)
    p.add_argument("--mode", choices=["exact", "noisy"], default="exact")
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dim-cap", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("spin", help="spin observation-level reconstruction")
    p.add_argument("--system", choices=["bell", "ghz"], default=None)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--level", default=None, help="preset name, e.g. E2 or OE2")
    p.add_argument("--means", default=None, help="e.g. 'ZZ=1 XX=1'")
    p.add_argument("--complete", action="store_true", help="scan free coefficients")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spin)

    p = sub.add_parser("bayes", help="Bayesian posterior from a measurement record")
    p.add_argument("--system", choices=["spin1", "spin2", "spin1_purified"], required=True)
    p.add_argument("--records", required=True, help="file with 'observable outcome' lines")
    p.add_argument("--n-points", type=int, default=2**18)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bayes)

    p = sub.add_parser("povm", help="optimal POVM synthesis and fidelity audit")
    p.add_argument("--task", choices=["spin", "phase"], required=True)
    p.add_argument("--n", type=int, required=True, help="number of copies")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_povm)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MaxIterExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
