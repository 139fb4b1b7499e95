"""Text output formats shared by the command-line workflows.

Complex matrices are written as a ``dim`` header followed by row-major
``re im`` pairs, one entry per line.  Grids and tomograms are plain CSV
with comment lines for scalar metadata, ready to plot without parsing
code.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .povm import FidelityReport, Povm
from .tomography import Tomogram
from .wigner import PhaseGrid, QuadratureDist


def write_matrix(matrix: np.ndarray, path: str | Path) -> None:
    """Write a complex matrix as `dim d` plus row-major `re im` lines."""
    m = np.asarray(matrix, dtype=complex)
    dim = m.shape[0]
    lines = [f"dim {dim}"]
    for entry in m.reshape(-1):
        lines.append(f"{entry.real:.17e} {entry.imag:.17e}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path: str | Path) -> np.ndarray:
    """Read a matrix written by :func:`write_matrix`."""
    lines = Path(path).read_text().strip().splitlines()
    head = lines[0].split()
    if head[0] != "dim":
        raise ValueError(f"missing dim header in {path}")
    dim = int(head[1])
    entries = np.array(
        [complex(float(a), float(b)) for a, b in (ln.split() for ln in lines[1:])]
    )
    if entries.size != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, found {entries.size}")
    return entries.reshape(dim, dim)


def write_phase_grid(grid: PhaseGrid, path: str | Path) -> None:
    """CSV with header q,p,w, one row per phase-space node."""
    qs, ps = grid.axes()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "p", "w"])
        for i, q in enumerate(qs):
            for j, p in enumerate(ps):
                writer.writerow([f"{q:.12g}", f"{p:.12g}", f"{grid.values[i, j]:.17e}"])


def write_quadrature_dist(dist: QuadratureDist, path: str | Path) -> None:
    """CSV `x,w` preceded by a `# theta=` comment."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# theta={dist.theta:.12g}\n")
        writer = csv.writer(fh)
        writer.writerow(["x", "w"])
        for x, w in zip(dist.xs, dist.w):
            writer.writerow([f"{x:.12g}", f"{w:.17e}"])


def write_tomogram(tomogram: Tomogram, path: str | Path) -> None:
    """CSV `theta,x,value` with mode, eta, and seed in comment lines."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# mode={tomogram.mode}\n")
        fh.write(f"# eta={tomogram.eta:.12g}\n")
        fh.write(f"# seed={tomogram.seed if tomogram.seed is not None else ''}\n")
        writer = csv.writer(fh)
        writer.writerow(["theta", "x", "value"])
        for m, theta in enumerate(tomogram.thetas):
            for l, x in enumerate(tomogram.xs):
                writer.writerow(
                    [f"{theta:.12g}", f"{x:.12g}", f"{tomogram.values[l, m]:.17e}"]
                )


def read_tomogram(path: str | Path) -> Tomogram:
    """Read a tomogram written by :func:`write_tomogram`."""
    mode, eta, seed = "exact", 0.0, None
    rows: list[tuple[float, float, float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                if key == "mode":
                    mode = value
                elif key == "eta":
                    eta = float(value)
                elif key == "seed" and value:
                    seed = int(value)
                continue
            if line.startswith("theta"):
                continue
            t, x, v = line.split(",")
            rows.append((float(t), float(x), float(v)))
    thetas = sorted({r[0] for r in rows})
    xs = sorted({r[1] for r in rows})
    values = np.zeros((len(xs), len(thetas)))
    t_idx = {t: i for i, t in enumerate(thetas)}
    x_idx = {x: i for i, x in enumerate(xs)}
    for t, x, v in rows:
        values[x_idx[x], t_idx[t]] = v
    return Tomogram(
        thetas=np.array(thetas),
        xs=np.array(xs),
        values=values,
        mode=mode,
        eta=eta,
        seed=seed,
    )


def write_povm(povm: Povm, path: str | Path) -> None:
    """Matrix-format blocks, one per element, each annotated with its guess."""
    buf = io.StringIO()
    buf.write(f"povm {len(povm.elements)} {povm.dim} {povm.task} {povm.copies}\n")
    for el, guess in zip(povm.elements, povm.guesses):
        if isinstance(guess, tuple):
            buf.write("# guess " + " ".join(f"{g:.12g}" for g in guess) + "\n")
        else:
            buf.write(f"# guess {guess:.12g}\n")
        buf.write(f"dim {povm.dim}\n")
        for entry in np.asarray(el, dtype=complex).reshape(-1):
            buf.write(f"{entry.real:.17e} {entry.imag:.17e}\n")
    Path(path).write_text(buf.getvalue())


def format_fidelity_report(report: FidelityReport) -> str:
    """The one-line `closed_sum, mc_estimate, mc_stderr, bound` summary."""
    return (
        f"{report.closed_sum:.12f}, {report.mc_estimate:.12f}, "
        f"{report.mc_stderr:.3e}, {report.bound:.12f}"
    )
