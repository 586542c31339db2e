"""Almost equitable partition verification and its quantitative relaxation.

The central object is the equitable-error matrix E = P L^pi - L P. Column q
of L P holds each vertex's (negated) out-weight sum into cell q, while
P L^pi holds the cell averages of those sums, so E collects per-vertex
deviations from cell-average connectivity. E vanishes exactly when the
partition is almost equitable; otherwise each quotient eigenpair (lambda, v)
satisfies L (P v) = lambda (P v) - E v, and the residual eps = E v is bounded
through the singular values and row sums of E. Small-but-nonzero E defines a
quasi-equitable partition (QEP), scored here by a dimensionless quality
number.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import (
    WeightedGraph,
    VertexPartition,
    degrees,
    indicator_matrix,
    laplacian,
    quotient_matrix,
)
from .spectral import SpectralBasis, eigendecompose_general

__all__ = [
    "AepReport",
    "ModeErrorBound",
    "EquitableErrorReport",
    "ApproximationBoundReport",
    "equitable_error_matrix",
    "check_aep",
    "equitable_error",
    "approximation_bound",
    "qep_score",
]


@dataclass(frozen=True)
class AepReport:
    """Outcome of an almost-equitable-partition check at a tolerance.

    max_deviation is the largest absolute entry of E = P L^pi - L P, i.e.
    the worst per-vertex deviation of an out-weight sum from its cell
    average; per_vertex_deviations is E itself (n x k).
    """

    is_aep: bool
    max_deviation: float
    per_vertex_deviations: np.ndarray
    tol: float


@dataclass(frozen=True)
class ModeErrorBound:
    """Equitable error of one quotient eigenpair with its bound chain.

    epsilon_norm <= bound_sigma <= bound_rowsum, where
    epsilon_norm = ||E v||, bound_sigma = sigma_1(E) ||v||, and
    bound_rowsum = 2 k ||v|| max_i sum_j |E_ij|.
    """

    eigenvalue: float
    vector: np.ndarray
    epsilon_norm: float
    bound_sigma: float
    bound_rowsum: float


@dataclass(frozen=True)
class EquitableErrorReport:
    E: np.ndarray
    sigma1: float
    max_row_sum: float
    per_mode: tuple[ModeErrorBound, ...]


@dataclass(frozen=True)
class ApproximationBoundReport:
    """Truncated eigenbasis approximation of a lifted quotient eigenvector.

    retained holds the indices i with |lambda_i - lambda| <= gamma; the
    approximation u is the projection of P v onto those eigenvectors, and
    actual_error = ||P v - u|| <= bound = (delta / gamma) sqrt(n - |A|)
    with delta = ||E v||.
    """

    eigenvalue: float
    gamma: float
    retained: tuple[int, ...]
    delta: float
    actual_error: float
    bound: float
    truncated: np.ndarray


def equitable_error_matrix(mat: np.ndarray, partition: VertexPartition) -> np.ndarray:
    """E = P M^pi - M P for any square matrix M over the partition."""
    mat = np.asarray(mat, dtype=float)
    pmat = indicator_matrix(partition)
    return pmat @ quotient_matrix(mat, partition) - mat @ pmat


def _sigma1(mat: np.ndarray) -> float:
    """Largest singular value via the symmetric k x k Gram matrix."""
    gram = mat.T @ mat
    return float(np.sqrt(max(0.0, np.linalg.eigvalsh(gram)[-1])))


def check_aep(
    g: WeightedGraph, partition: VertexPartition, tol: float = 1e-9
) -> AepReport:
    """Check whether a partition is a (weighted) almost equitable partition.

    Equivalent characterizations: every vertex of cell i carries the same
    total edge weight into each other cell j, and the indicator column space
    is Laplacian-invariant (L P = P L^pi). The report uses the algebraic
    deviation max |P L^pi - L P|, which is zero exactly when the
    combinatorial condition holds.
    """
    if partition.n != g.n:
        raise ValueError("partition does not match graph size")
    err = equitable_error_matrix(laplacian(g), partition)
    max_dev = float(np.abs(err).max(initial=0.0))
    return AepReport(
        is_aep=max_dev <= tol,
        max_deviation=max_dev,
        per_vertex_deviations=err,
        tol=tol,
    )


def equitable_error(g: WeightedGraph, partition: VertexPartition) -> EquitableErrorReport:
    """Equitable-error matrix with per-quotient-mode norms and bounds."""
    if partition.n != g.n:
        raise ValueError("partition does not match graph size")
    lap = laplacian(g)
    err = equitable_error_matrix(lap, partition)
    sigma1 = _sigma1(err)
    max_row_sum = float(np.abs(err).sum(axis=1).max(initial=0.0))
    q_eigenvalues, q_vectors = eigendecompose_general(quotient_matrix(lap, partition))
    per_mode = []
    for r in range(partition.k):
        v = q_vectors[:, r]
        vnorm = float(np.linalg.norm(v))
        per_mode.append(
            ModeErrorBound(
                eigenvalue=float(q_eigenvalues[r]),
                vector=v,
                epsilon_norm=float(np.linalg.norm(err @ v)),
                bound_sigma=sigma1 * vnorm,
                bound_rowsum=2.0 * partition.k * vnorm * max_row_sum,
            )
        )
    return EquitableErrorReport(
        E=err, sigma1=sigma1, max_row_sum=max_row_sum, per_mode=tuple(per_mode)
    )


def approximation_bound(
    g: WeightedGraph,
    partition: VertexPartition,
    basis: SpectralBasis,
    mode: tuple[float, np.ndarray],
    gamma: float,
) -> ApproximationBoundReport:
    """Bound the truncation error of P v in a spectral window around lambda.

    mode is a quotient eigenpair (lambda, v); v is used exactly as supplied.
    Retains eigenvectors of L with eigenvalues within gamma of lambda,
    projects P v onto them, and reports the actual truncation error next to
    the guaranteed bound (||E v|| / gamma) sqrt(n - |retained|).
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if partition.n != g.n or basis.n != g.n:
        raise ValueError("graph, partition, and basis sizes must agree")
    lam, v = mode
    v = np.asarray(v, dtype=float)
    if v.shape != (partition.k,):
        raise ValueError("quotient eigenvector length does not match cell count")
    err = equitable_error_matrix(laplacian(g), partition)
    delta = float(np.linalg.norm(err @ v))
    lifted = indicator_matrix(partition) @ v
    coeffs = basis.vertex_vectors.T @ lifted
    retained = np.flatnonzero(np.abs(basis.eigenvalues - lam) <= gamma)
    truncated = basis.vertex_vectors[:, retained] @ coeffs[retained]
    actual = float(np.linalg.norm(lifted - truncated))
    bound = (delta / gamma) * np.sqrt(g.n - retained.size)
    return ApproximationBoundReport(
        eigenvalue=float(lam),
        gamma=float(gamma),
        retained=tuple(int(i) for i in retained),
        delta=delta,
        actual_error=actual,
        bound=float(bound),
        truncated=truncated,
    )


def qep_score(g: WeightedGraph, partition: VertexPartition) -> float:
    """Dimensionless quasi-equitable-partition quality: sigma_1(E) over the
    mean vertex out-weight sum. Zero exactly for an almost equitable
    partition; grows with the deviation from cell-average connectivity.
    """
    if partition.n != g.n:
        raise ValueError("partition does not match graph size")
    err = equitable_error_matrix(laplacian(g), partition)
    return _sigma1(err) / float(degrees(g).mean())
