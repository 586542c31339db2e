"""JSON and CSV formats shared by the CLI, the scenario harness, and tests.

Graph JSON:      {"n": int, "edges": [[i, j, w], ...]} with 0-indexed i < j.
Partition JSON:  {"assignment": [c_0, ..., c_{n-1}]}.
Basis JSON:      {"eigenvalues": [...], "vertex_vectors": [[row-major]]}.
Trajectory CSV:  header "t,theta_0..theta_{n-1}" (or alpha_*); floats are
                 written with 17 significant digits so every value
                 round-trips bit-exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .graph import WeightedGraph, VertexPartition
from .spectral import SpectralBasis
from .dynamics import Trajectory, CoefficientTrajectory

__all__ = [
    "save_graph",
    "load_graph",
    "save_partition",
    "load_partition",
    "save_basis",
    "write_phase_csv",
    "write_coefficient_csv",
    "read_timeseries_csv",
    "load_vector",
]


def save_graph(g: WeightedGraph, path) -> None:
    payload = {
        "n": g.n,
        "edges": [[int(i), int(j), float(w)] for i, j, w in g.edges],
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def load_graph(path) -> WeightedGraph:
    payload = json.loads(Path(path).read_text())
    return WeightedGraph(payload["n"], payload["edges"])


def save_partition(p: VertexPartition, path) -> None:
    payload = {"assignment": [int(c) for c in p.assignment]}
    Path(path).write_text(json.dumps(payload) + "\n")


def load_partition(path) -> VertexPartition:
    payload = json.loads(Path(path).read_text())
    return VertexPartition(payload["assignment"])


def save_basis(basis: SpectralBasis, path) -> None:
    payload = {
        "eigenvalues": [float(v) for v in basis.eigenvalues],
        "vertex_vectors": [[float(x) for x in row] for row in basis.vertex_vectors],
    }
    Path(path).write_text(json.dumps(payload) + "\n")


def _write_timeseries(path, times: np.ndarray, series: np.ndarray, prefix: str) -> None:
    cols = series.shape[1]
    header = "t," + ",".join(f"{prefix}_{i}" for i in range(cols))
    lines = [header]
    for t, row in zip(times, series):
        lines.append(",".join(f"{v:.17g}" for v in (t, *row)))
    Path(path).write_text("\n".join(lines) + "\n")


def write_phase_csv(traj: Trajectory, path) -> None:
    _write_timeseries(path, traj.times, traj.states, "theta")


def write_coefficient_csv(ctraj: CoefficientTrajectory, path) -> None:
    _write_timeseries(path, ctraj.times, ctraj.coeffs, "alpha")


def read_timeseries_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a trajectory CSV back as (times, values)."""
    raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return raw[:, 0], raw[:, 1:]


def load_vector(spec: str, expected_len: int | None = None) -> np.ndarray:
    """Parse a vector given inline as a JSON array or as a path to one."""
    text = spec.strip()
    if not text.startswith("["):
        text = Path(spec).read_text()
    vec = np.asarray(json.loads(text), dtype=float)
    if vec.ndim != 1:
        raise ValueError("expected a flat JSON array")
    if expected_len is not None and vec.size != expected_len:
        raise ValueError(f"expected {expected_len} entries, got {vec.size}")
    return vec
