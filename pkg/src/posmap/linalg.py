#!/usr/bin/env python3
"""
Posmap Linalg - dense complex matrix primitives

This module provides the matrix algebra every other posmap module consumes:
- Validation of complex matrices (shape, finiteness)
- Products, conjugate transpose and Kronecker products
- Hermitian eigendecomposition, singular values and the trace norm
- PSD checks with an explicit tolerance
- Haar-random vectors and unitaries

A ComplexMatrix is a 2-D numpy array of dtype complex128. The Kronecker
convention is numpy's: kron(A, B)[i*B.rows + k, j*B.cols + l] = A[i, j]*B[k, l].
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from src.posmap.config import DEFAULT_TOL
from src.posmap.errors import LinalgError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EigenResult:
    """Spectrum of a Hermitian matrix, ascending, with orthonormal eigenvectors as columns"""
    values: np.ndarray
    vectors: np.ndarray


class PsdCheck(NamedTuple):
    is_psd: bool
    min_eigenvalue: float


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """
    Coerce data to a finite complex128 2-D array

    Args:
        data: Nested sequence or numpy array
        name: Label used in error messages

    Returns:
        A new complex128 array
    """
    try:
        matrix = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise LinalgError(f"{name} is not a complex matrix: {str(e)}")
    if matrix.ndim != 2:
        raise LinalgError(f"{name} must be 2-dimensional, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise LinalgError(f"{name} has non-finite entries")
    return matrix


def _require_square(a: np.ndarray, name: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"{name} must be square, got shape {a.shape}")


def _require_hermitian(a: np.ndarray, tol: float, name: str) -> None:
    _require_square(a, name)
    deviation = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if deviation > tol * scale:
        logger.error(f"{name} is not hermitian: max |A - A^dagger| = {deviation:.3e}")
        raise LinalgError(f"{name} is not hermitian within {tol:g} (max deviation {deviation:.3e})")


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit dimension check"""
    if a.shape[1] != b.shape[0]:
        raise LinalgError(f"dimension mismatch: {a.shape} times {b.shape}")
    return a @ b


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose"""
    return a.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor indexing blocks"""
    return np.kron(a, b)


def matrix_unit(n: int, i: int, j: int, cols: Optional[int] = None) -> np.ndarray:
    """E_ij as an n x cols matrix (0-based indices)"""
    unit = np.zeros((n, n if cols is None else cols), dtype=np.complex128)
    unit[i, j] = 1.0
    return unit


def hermitian_eig(a: np.ndarray, tol: float = DEFAULT_TOL) -> EigenResult:
    """
    Full spectrum of a Hermitian matrix

    Args:
        a: Square matrix, Hermitian within tol (relative to max(1, max|a|))
        tol: Hermiticity tolerance

    Returns:
        EigenResult with ascending eigenvalues and matching orthonormal eigenvectors
    """
    _require_hermitian(a, tol, "eigen input")
    values, vectors = np.linalg.eigh((a + a.conj().T) / 2)
    return EigenResult(values=values, vectors=vectors)


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values in descending order"""
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values, ||A||_1 = Tr((A^dagger A)^(1/2))"""
    return float(np.sum(singular_values(a)))


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value (0 for an empty matrix)"""
    values = singular_values(a)
    return float(values[0]) if values.size else 0.0


def is_psd(a: np.ndarray, tol: float = DEFAULT_TOL) -> PsdCheck:
    """
    Positive semidefiniteness within tol

    Args:
        a: Square Hermitian matrix
        tol: Allowed negative eigenvalue magnitude (also the Hermiticity tolerance)

    Returns:
        PsdCheck(is_psd, min_eigenvalue)
    """
    _require_hermitian(a, tol, "PSD input")
    min_eigenvalue = float(np.linalg.eigvalsh((a + a.conj().T) / 2)[0])
    return PsdCheck(min_eigenvalue >= -tol, min_eigenvalue)


def range_basis(p: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Orthonormal basis of the range of an orthogonal projection

    Gram-Schmidt over the columns of p in order, so a diagonal projection
    yields standard basis vectors in increasing index order.

    Args:
        p: Orthogonal projection (p^2 = p = p^dagger within tol)
        tol: Projection tolerance

    Returns:
        dim x rank matrix with orthonormal columns
    """
    _require_hermitian(p, tol, "projection")
    if np.max(np.abs(p @ p - p), initial=0.0) > tol * max(1.0, p.shape[0]):
        raise LinalgError("matrix is not idempotent, so not a projection")
    rank = int(round(float(np.trace(p).real)))
    basis = np.zeros((p.shape[0], 0), dtype=np.complex128)
    threshold = np.sqrt(tol)
    for column in p.T:
        if basis.shape[1] == rank:
            break
        residual = column - basis @ (basis.conj().T @ column)
        residual = residual - basis @ (basis.conj().T @ residual)
        norm = np.linalg.norm(residual)
        if norm > threshold:
            basis = np.column_stack([basis, residual / norm])
    if basis.shape[1] != rank:
        raise LinalgError(f"projection range has {basis.shape[1]} independent columns, trace says {rank}")
    return basis


def haar_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """count x dim array of unit vectors, uniform on the complex sphere"""
    vectors = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the phase-corrected QR of a complex Gaussian matrix"""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
