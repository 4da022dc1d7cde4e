"""Dense spectral kernels: singular values, Hermitian eigensystems, matrix
functions and Schatten norms.

Sort orders are fixed: eigenvalues ascending, singular values descending.
Matrix exponentials are only ever taken of Hermitian matrices, so they go
through the eigendecomposition and come out unitary to rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InputError, NumericalError

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray   # ascending, real
    vectors: np.ndarray  # unitary, eigenvectors in columns

    def apply(self, phi) -> np.ndarray:
        """V diag(phi(lambda)) V^H."""
        w = np.asarray(phi(self.values))
        return (self.vectors * w) @ self.vectors.conj().T

    def diagonal(self, phi, rows=None) -> np.ndarray:
        """Diagonal of ``apply(phi)`` (optionally its first ``rows`` entries)
        without forming the full matrix."""
        V = self.vectors if rows is None else self.vectors[:rows]
        return (np.abs(V) ** 2) @ np.asarray(phi(self.values))


def singular_values(A) -> np.ndarray:
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise InputError("singular_values: matrix has non-finite entries")
    try:
        return scipy.linalg.svdvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def hermitian_eig(A, herm_tol: float = HERMITIAN_TOL) -> EigenSystem:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"hermitian_eig needs a square matrix, got shape {A.shape}")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > herm_tol * max(scale, np.finfo(float).tiny):
        raise InputError("matrix is not Hermitian within tolerance")
    H = 0.5 * (A + A.conj().T)
    if np.iscomplexobj(H) and not np.any(H.imag):
        H = H.real
    try:
        w, v = scipy.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigh did not converge: {exc}") from exc
    return EigenSystem(w, v)


def matrix_function(A, phi, herm_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """phi(A) for Hermitian A and a vectorised scalar function phi."""
    return hermitian_eig(A, herm_tol).apply(phi)


def matrix_exp_unitary(A, t: float, herm_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """exp(i t A) for Hermitian A."""
    return hermitian_eig(A, herm_tol).apply(lambda lam: np.exp(1j * t * lam))


def schatten_norm(A, p) -> float:
    """(sum sigma_j^p)^(1/p); ``p=math.inf`` gives the operator norm."""
    p = float(p)
    if not p >= 1:
        raise InputError(f"Schatten index must be >= 1, got {p}")
    s = singular_values(A)
    if s.size == 0:
        return 0.0
    if math.isinf(p):
        return float(s[0])
    if p == 2:
        return float(np.linalg.norm(s))
    top = s[0]
    if top == 0:
        return 0.0
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))
