"""Small Hermitian matrix-factorization helpers used by several modules."""

from __future__ import annotations

import numpy as np

from .exceptions import NotPositiveDefinite


def hermitian_eig(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    w, V = np.linalg.eigh(Q)
    return w, V


def hermitian_sqrt(Q: np.ndarray) -> np.ndarray:
    """Hermitian square root L with L @ L = Q (so also L @ L* = Q).

    Q must be Hermitian positive semidefinite; tiny negative eigenvalues from
    roundoff are clipped to zero.
    """
    w, V = hermitian_eig(np.asarray(Q, dtype=np.complex128))
    if w[-1] > 0 and w[0] < -1e-12 * w[-1]:
        raise NotPositiveDefinite(
            f"matrix is not PSD (min eigenvalue {w[0]:.3e})"
        )
    s = np.sqrt(np.clip(w, 0.0, None))
    return (V * s) @ V.conj().T


def hermitian_sqrt_inv(Q: np.ndarray) -> np.ndarray:
    """Hermitian Z with Z @ Z = inv(Q), for Hermitian positive definite Q."""
    w, V = hermitian_eig(np.asarray(Q, dtype=np.complex128))
    if w[0] <= 0.0:
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return (V / np.sqrt(w)) @ V.conj().T
