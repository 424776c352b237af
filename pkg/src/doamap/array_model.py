"""Uniform linear array manifold: steering vectors and their angle derivatives.

Conventions
-----------
Angles are measured from broadside, in radians, with domain [-pi/2, pi/2].
Element 0 is the phase reference, so element k of the steering vector is

    a_k(theta) = exp(-1j * 2*pi * spacing * k * sin(theta)),   k = 0..m-1,

with `spacing` in wavelengths (0.5 for a half-wavelength array).  Every
element has unit modulus, hence ||a(theta)||^2 = m for all theta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateAngles
from .validation import check_angle, check_angles

COINCIDENT_TOL = 1e-12  # radians; closer angle pairs make A rank deficient


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array with `m` sensors at `spacing` wavelengths apart."""

    m: int
    spacing: float = 0.5

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"sensor count m must be a positive integer, got {self.m!r}")
        if not (self.spacing > 0):
            raise ValueError(f"element spacing must be positive, got {self.spacing!r}")

    @property
    def phase_factors(self) -> np.ndarray:
        """-2*pi*spacing*k for k = 0..m-1; multiply by sin(theta) for phases."""
        return -2.0 * np.pi * self.spacing * np.arange(self.m)


@dataclass(frozen=True)
class SteeringSet:
    """Steering matrix A, columnwise angle derivatives, and the angles used."""

    A: np.ndarray
    D_cols: np.ndarray
    thetas: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.A.shape[1]


def steering_vector(theta: float, geom: ArrayGeometry) -> np.ndarray:
    """Steering vector a(theta) of the array, shape (m,), complex.

    Each element has unit modulus; a(0) is the all-ones vector.
    """
    theta = check_angle(theta)
    return np.exp(1j * geom.phase_factors * np.sin(theta))


def steering_derivative(theta: float, geom: ArrayGeometry) -> np.ndarray:
    """Elementwise angle derivative da/dtheta at `theta`, shape (m,).

    Element k equals -1j * 2*pi*spacing*k * cos(theta) * a_k(theta).
    """
    theta = check_angle(theta)
    phase = geom.phase_factors
    return 1j * phase * np.cos(theta) * np.exp(1j * phase * np.sin(theta))


def steering_grid(thetas, geom: ArrayGeometry) -> np.ndarray:
    """Steering matrix over an angle grid, shape (m, len(thetas)).

    Unlike `steering_matrix` this performs no coincidence check, so it is
    suitable for dense search grids that may pass near existing estimates.
    """
    thetas = np.asarray(thetas, dtype=float)
    return np.exp(1j * np.outer(geom.phase_factors, np.sin(thetas)))


def steering_matrix(thetas, geom: ArrayGeometry) -> SteeringSet:
    """Assemble A(theta) and its columnwise derivatives for d source angles.

    Raises
    ------
    DegenerateAngles
        If two angles coincide to within 1e-12 rad (rank-deficient A).
    """
    thetas = check_angles(thetas)
    srt = np.sort(thetas)
    if thetas.size > 1 and np.min(np.diff(srt)) < COINCIDENT_TOL:
        raise DegenerateAngles(
            f"angles coincide to within {COINCIDENT_TOL} rad: {np.rad2deg(thetas)} deg"
        )
    A = steering_grid(thetas, geom)
    D = np.column_stack([steering_derivative(t, geom) for t in thetas])
    return SteeringSet(A=A, D_cols=D, thetas=thetas)
