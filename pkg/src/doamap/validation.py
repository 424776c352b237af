"""Input validation helpers shared across the package.

These follow the scikit-learn convention of check_* functions that either
return a validated (possibly converted) array or raise with a named message.
"""

from __future__ import annotations

import numpy as np

from .exceptions import NotPositiveDefinite

HALF_PI = np.pi / 2.0


def check_angle(theta: float, name: str = "theta") -> float:
    """Validate a single angle in radians, |theta| <= pi/2."""
    theta = float(theta)
    if not np.isfinite(theta):
        raise ValueError(f"{name} must be finite, got {theta!r}")
    if abs(theta) > HALF_PI + 1e-12:
        raise ValueError(f"{name} must lie in [-pi/2, pi/2], got {theta!r} rad")
    return theta


def check_angles(thetas, name: str = "thetas") -> np.ndarray:
    """Validate a 1-D array of angles in radians, each in [-pi/2, pi/2]."""
    arr = np.asarray(thetas, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D array of angles")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(np.abs(arr) > HALF_PI + 1e-12):
        raise ValueError(f"{name} must lie in [-pi/2, pi/2]")
    return arr


def check_snapshot_matrix(X, name: str = "X", min_cols: int = 0) -> np.ndarray:
    """Validate a complex sensor-by-snapshot matrix.

    Accepts anything array-like; returns a C-contiguous complex128 2-D array.
    """
    arr = np.ascontiguousarray(X, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (sensors x snapshots), got ndim={arr.ndim}")
    if arr.shape[0] < 1:
        raise ValueError(f"{name} must have at least one sensor row")
    if arr.shape[1] < min_cols:
        raise ValueError(f"{name} needs at least {min_cols} snapshot columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_hermitian(X, name: str = "X", tol: float = 1e-10) -> np.ndarray:
    """Validate Hermitian symmetry to elementwise tolerance `tol`."""
    arr = np.asarray(X, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    scale = max(1.0, float(np.abs(arr).max()))
    if np.abs(arr - arr.conj().T).max() > tol * scale:
        raise ValueError(f"{name} is not Hermitian to tolerance {tol}")
    return arr


def check_hermitian_pd(X, name: str = "X", tol: float = 1e-10) -> np.ndarray:
    """Validate that `X` is Hermitian positive definite.

    Raises NotPositiveDefinite when the smallest eigenvalue is <= 0.
    """
    arr = check_hermitian(X, name=name, tol=tol)
    w = np.linalg.eigvalsh(arr)
    if w[0] <= 0.0:
        raise NotPositiveDefinite(
            f"{name} is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return arr
