"""Laplacian eigenbasis machinery.

Symmetric eigendecomposition with a deterministic sign convention, the
paired down-edge eigenvectors e^(r) = B^T v^(r), transforms between vertex
signals and spectral coefficients, a dense general eigensolver for (small,
nonsymmetric) quotient Laplacians, and detection of the partition-constant
"structural" modes that carry cluster-synchronized dynamics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph, VertexPartition, incidence, indicator_matrix, laplacian

__all__ = [
    "SpectralBasis",
    "CoefficientVector",
    "eigendecompose",
    "eigendecompose_general",
    "spectral_basis",
    "decompose",
    "structural_indices",
]


def _fix_signs(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Flip each column so its first nonzero component is positive.

    Eigenvectors are only defined up to sign; pinning the sign makes
    decompositions and trajectories reproducible run to run.
    """
    out = vectors.copy()
    for c in range(out.shape[1]):
        col = out[:, c]
        nz = np.flatnonzero(np.abs(col) > tol * max(1.0, np.abs(col).max()))
        if nz.size and col[nz[0]] < 0:
            out[:, c] = -col
    return out


@dataclass(frozen=True)
class SpectralBasis:
    """Orthonormal Laplacian eigenbasis with paired edge-space vectors.

    eigenvalues:    (n,) ascending, eigenvalue 0 first on a connected graph.
    vertex_vectors: (n, n), column r is the unit eigenvector v^(r).
    edge_vectors:   (m, n), column r is e^(r) = B^T v^(r), an eigenvector of
                    the down-edge Laplacian B^T B W with the same eigenvalue.
                    None when the basis was built from a bare matrix with no
                    incidence information.
    """

    eigenvalues: np.ndarray
    vertex_vectors: np.ndarray
    edge_vectors: np.ndarray | None

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def m(self) -> int:
        if self.edge_vectors is None:
            raise ValueError("basis carries no edge vectors")
        return int(self.edge_vectors.shape[0])


@dataclass(frozen=True)
class CoefficientVector:
    """Spectral coefficients alpha of a vertex signal, alpha_r = v^(r) . theta."""

    alpha: np.ndarray
    basis: SpectralBasis

    def reconstruct(self) -> np.ndarray:
        """Return V alpha, the vertex signal the coefficients describe."""
        return self.basis.vertex_vectors @ self.alpha


def eigendecompose(
    lap: np.ndarray,
    incidence_matrix: np.ndarray | None = None,
    sym_tol: float = 1e-10,
) -> SpectralBasis:
    """Eigendecompose a symmetric (Laplacian) matrix into a SpectralBasis.

    Eigenvalues come out ascending and eigenvectors orthonormal with the
    first-nonzero-positive sign convention. When the signed incidence matrix
    is supplied, the paired down-edge eigenvectors B^T v^(r) are attached.

    Raises ValueError if the input is not symmetric within sym_tol;
    propagates numpy.linalg.LinAlgError if the iteration fails to converge.
    """
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError("expected a square matrix")
    if np.abs(lap - lap.T).max(initial=0.0) > sym_tol:
        raise ValueError(f"matrix is not symmetric within {sym_tol}")
    eigenvalues, vectors = np.linalg.eigh(lap)
    vectors = _fix_signs(vectors)
    edge_vectors = None
    if incidence_matrix is not None:
        edge_vectors = np.asarray(incidence_matrix, dtype=float).T @ vectors
    return SpectralBasis(
        eigenvalues=eigenvalues, vertex_vectors=vectors, edge_vectors=edge_vectors
    )


def spectral_basis(g: WeightedGraph) -> SpectralBasis:
    """Full spectral basis of a graph: Laplacian eigenpairs plus edge vectors."""
    return eigendecompose(laplacian(g), incidence_matrix=incidence(g))


def eigendecompose_general(
    mat: np.ndarray,
    imag_tol: float = 1e-8,
    residual_tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Real eigenpairs of a small dense matrix, e.g. a quotient Laplacian.

    Quotient Laplacians of symmetric matrices are similar to symmetric
    matrices, so their spectra are real; imaginary parts beyond imag_tol
    (relative to the matrix scale) signal that the input is not such a
    quotient and raise ValueError. Returns (eigenvalues ascending,
    unit eigenvectors as columns) with the first-nonzero-positive sign
    convention; each pair satisfies ||M v - lambda v|| <= residual_tol ||v||.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    eigenvalues, vectors = np.linalg.eig(mat)
    scale = max(1.0, np.abs(mat).max(initial=0.0))
    if np.abs(eigenvalues.imag).max(initial=0.0) > imag_tol * scale:
        raise ValueError("matrix has complex eigenvalues beyond tolerance")
    if np.abs(vectors.imag).max(initial=0.0) > imag_tol:
        # Complex-conjugate vector pairs with real eigenvalues: realign by
        # taking real/imag parts would change the pairs, so reject instead.
        raise ValueError("matrix has complex eigenvectors beyond tolerance")
    eigenvalues = eigenvalues.real
    vectors = vectors.real
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    vectors = _fix_signs(vectors)
    resid = np.linalg.norm(mat @ vectors - vectors * eigenvalues, axis=0)
    if np.any(resid > residual_tol * scale):
        raise ValueError("eigenpair residual exceeds tolerance")
    return eigenvalues, vectors


def decompose(theta: np.ndarray, basis: SpectralBasis) -> CoefficientVector:
    """Project a vertex signal onto the eigenbasis: alpha_r = v^(r) . theta."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (basis.n,):
        raise ValueError(f"signal length {theta.shape} does not match basis size {basis.n}")
    return CoefficientVector(alpha=basis.vertex_vectors.T @ theta, basis=basis)


def structural_indices(
    basis: SpectralBasis,
    partition: VertexPartition,
    tol: float = 1e-8,
    gap_tol: float = 1e-8,
) -> list[int]:
    """Indices of eigenvectors constant within each partition cell.

    A mode is structural when its eigenvector lies in the column space of
    the partition indicator (equivalently, is cell-constant within tol).
    Mode 0 is always structural on a connected graph. Eigenvalues closer
    than gap_tol are treated as one degenerate block: individual
    representatives inside such a block are arbitrary, so the block's
    eigenspace is projected onto the indicator column space and the number
    of structural directions is counted from the singular values; the
    lowest indices of the block stand in for those directions.

    For an exact almost equitable partition this returns exactly k indices.
    """
    if partition.n != basis.n:
        raise ValueError("partition does not match basis size")
    lam = basis.eigenvalues
    vecs = basis.vertex_vectors
    cells = partition.cells()
    # Orthonormal basis of col(P): indicator columns scaled by 1/sqrt(size).
    q = indicator_matrix(partition) / np.sqrt(partition.sizes())[None, :]

    blocks: list[list[int]] = [[0]]
    for r in range(1, basis.n):
        if lam[r] - lam[r - 1] < gap_tol:
            blocks[-1].append(r)
        else:
            blocks.append([r])

    out: list[int] = []
    for block in blocks:
        if len(block) == 1:
            v = vecs[:, block[0]]
            dev = max(np.abs(v[c] - v[c].mean()).max() for c in cells)
            if dev <= tol:
                out.append(block[0])
        else:
            # Residual of the block eigenspace against col(P), computed as
            # singular values of (I - Q Q^T) U directly: the 1 - s^2 route
            # through Q^T U loses half the float precision near s = 1.
            block_vecs = vecs[:, block]
            resid_mat = block_vecs - q @ (q.T @ block_vecs)
            resid = np.linalg.svd(resid_mat, compute_uv=False)
            count = int(np.sum(resid <= tol))
            out.extend(block[:count])
    return out
