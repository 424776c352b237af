"""Asymptotic Cramer-Rao bounds on the DOA estimates.

For the model with d sources, covariance R = A P A* + Q and a whitening
root Z = Q^(-1/2) (Hermitian), the bound on the angle errors is

    C = inv(2N * Re{ D* (Gamma.T kron Z Pperp_ZA Z) D } + Lambda),

where D stacks the per-angle steering derivatives, Pperp_ZA is the
orthogonal complement projector of the whitened steering span,

    Gamma = P A* Z Es inv(Ls + alpha I) Es* Z A P

with (Es, Ls) the d dominant eigenpairs of Z R Z, and Lambda adds the
prior curvature kappa_i for angles treated as random.  With Lambda = 0
and alpha = 0 the expression reduces to the standard stochastic CRB for
exactly known noise covariance; finite alpha = N/M accounts for Q being
learned from M noise-only snapshots, and Lambda for the von Mises priors.

All angles are evaluated at the prior means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import ArrayGeometry, steering_matrix
from .exceptions import NotPositiveDefinite, RankDeficientSteering
from .linalg import hermitian_sqrt_inv
from .validation import check_angles, check_hermitian_pd

_INFO_RANK_TOL = 1e-12
_STEER_RANK_TOL = 1e-12


@dataclass(frozen=True)
class BoundConfig:
    """Which angles count as random, their concentrations, and sample sizes.

    alpha = N / M is the ratio of data to noise-only snapshots; alpha = 0
    recovers the exactly-known-noise bound.
    """

    treat_random: tuple[bool, ...]
    kappas: tuple[float, ...]
    N: int
    alpha: float

    def __post_init__(self):
        if len(self.treat_random) != len(self.kappas):
            raise ValueError(
                f"treat_random has {len(self.treat_random)} entries but "
                f"kappas has {len(self.kappas)}"
            )
        for flag, kap in zip(self.treat_random, self.kappas):
            if not (kap >= 0.0):
                raise ValueError(f"kappa must be >= 0, got {kap!r}")
            if flag and kap == 0.0:
                raise ValueError("an angle treated as random needs kappa > 0")
        if self.N < 1:
            raise ValueError("need N >= 1 data snapshots")
        if not (self.alpha >= 0.0):
            raise ValueError(f"alpha must be >= 0, got {self.alpha!r}")

    @property
    def prior_curvature(self) -> np.ndarray:
        """Diagonal of Lambda: kappa_i where random, else 0."""
        return np.array([k if r else 0.0 for r, k in zip(self.treat_random, self.kappas)])


@dataclass(frozen=True)
class BoundResult:
    """Bound covariance (radians^2) and its per-angle RMS in degrees."""

    C_theta: np.ndarray
    rms_deg: np.ndarray


def derivative_stack(thetas, geom: ArrayGeometry) -> np.ndarray:
    """Stack [vec(dA/dtheta_1), ..., vec(dA/dtheta_d)] as an (m*d, d) matrix.

    dA/dtheta_i has the derivative steering vector in column i and zeros
    elsewhere, so vec() places it in the i-th m-row block.
    """
    ss = steering_matrix(thetas, geom)
    m, d = ss.A.shape
    D = np.zeros((m * d, d), dtype=np.complex128)
    for i in range(d):
        D[i * m:(i + 1) * m, i] = ss.D_cols[:, i]
    return D


def acrb(thetas, P, Q, config: BoundConfig, geom: ArrayGeometry) -> BoundResult:
    """Bound on the DOA error covariance at the given (prior-mean) angles.

    Raises RankDeficientSteering when the whitened steering matrix loses
    rank at the evaluation point, and NotPositiveDefinite when the
    resulting information matrix is numerically singular.
    """
    thetas = check_angles(thetas, "thetas")
    d = thetas.size
    if len(config.treat_random) != d:
        raise ValueError(f"{d} angles but config covers {len(config.treat_random)}")
    if d > geom.m - 1:
        raise ValueError(f"need d <= m-1 sources, got d={d}, m={geom.m}")
    P = check_hermitian_pd(np.asarray(P, dtype=np.complex128), "P")
    Q = check_hermitian_pd(np.asarray(Q, dtype=np.complex128), "Q")

    A = steering_matrix(thetas, geom).A
    Z = hermitian_sqrt_inv(Q)
    ZA = Z @ A
    gram = ZA.conj().T @ ZA
    w = np.linalg.eigvalsh(gram)
    if w[0] <= _STEER_RANK_TOL * max(w[-1], np.finfo(float).tiny):
        raise RankDeficientSteering("whitened steering matrix is rank deficient")
    proj = ZA @ np.linalg.solve(gram, ZA.conj().T)
    perp = np.eye(geom.m, dtype=np.complex128) - proj

    R = A @ P @ A.conj().T + Q
    ZRZ = Z @ R @ Z
    evals, evecs = np.linalg.eigh(ZRZ)  # ascending
    Es = evecs[:, ::-1][:, :d]
    Ls = evals[::-1][:d]
    ZAP = Z @ A @ P
    Gamma = ZAP.conj().T @ (Es / (Ls + config.alpha)) @ Es.conj().T @ ZAP

    W = Z @ perp @ Z
    D = derivative_stack(thetas, geom)
    info = 2.0 * config.N * np.real(D.conj().T @ np.kron(Gamma.T, W) @ D)
    info = info + np.diag(config.prior_curvature)
    info = (info + info.T) / 2.0

    w_info = np.linalg.eigvalsh(info)
    if w_info[0] <= _INFO_RANK_TOL * max(abs(w_info[-1]), np.finfo(float).tiny):
        raise NotPositiveDefinite(
            f"information matrix is numerically singular (eig range "
            f"[{w_info[0]:.3e}, {w_info[-1]:.3e}])"
        )
    C = np.linalg.inv(info)
    C = (C + C.T) / 2.0
    return BoundResult(C_theta=C, rms_deg=np.rad2deg(np.sqrt(np.diag(C))))


def crb(thetas, P, Q, config: BoundConfig, geom: ArrayGeometry) -> BoundResult:
    """Same bound with every prior dropped (all angles deterministic)."""
    flat = BoundConfig(
        treat_random=(False,) * len(config.treat_random),
        kappas=config.kappas,
        N=config.N,
        alpha=config.alpha,
    )
    return acrb(thetas, P, Q, flat, geom)
