"""Shared scenario builders for the test suite."""

import numpy as np

from doamap import ArrayGeometry, PriorSpec, Scenario
from doamap.scenario import scale_for_snr_db, sigma2_tilde_for_inr_db


def reference_scenario(snr_db: float = 5.0, inr_db: float = 5.0,
                       M: int = 100, N: int = 100) -> Scenario:
    """The 10-sensor, 3-source benchmark scenario used throughout.

    One source carries a tight von Mises prior at -35 deg, two are fixed at
    15 and 20 deg; correlated sources (rho = 0.9), exponentially correlated
    background noise (a = 0.5), and three interferers at -40, -10, 40 deg.
    """
    m, d = 10, 3
    return Scenario(
        geom=ArrayGeometry(m),
        priors=(
            PriorSpec(mu=np.deg2rad(-35.0), kappa=1e5),
            PriorSpec(mu=0.0, kappa=0.0),
            PriorSpec(mu=0.0, kappa=0.0),
        ),
        true_thetas_fixed=(np.deg2rad(15.0), np.deg2rad(20.0)),
        rho=0.9,
        noise_a=0.5,
        sigma2=1.0,
        interferer_thetas=tuple(np.deg2rad([-40.0, -10.0, 40.0])),
        sigma2_tilde=sigma2_tilde_for_inr_db(inr_db, m, 1.0, 3),
        signal_scale=scale_for_snr_db(snr_db, m, 1.0, d),
        M=M,
        N=N,
    )


def small_scenario(m: int = 4, theta_deg: float = 10.0, sigma2: float = 1.0,
                   M: int = 60, N: int = 60) -> Scenario:
    """Single fixed source in white-ish noise; cheap to simulate."""
    return Scenario(
        geom=ArrayGeometry(m),
        priors=(PriorSpec(mu=0.0, kappa=0.0),),
        true_thetas_fixed=(np.deg2rad(theta_deg),),
        rho=0.0,
        noise_a=0.3,
        sigma2=sigma2,
        signal_scale=4.0,
        M=M,
        N=N,
    )


def random_snapshots(rng: np.random.Generator, m: int, M: int, N: int):
    """Unstructured circular complex Gaussian noise blocks."""
    Yb = (rng.standard_normal((m, M)) + 1j * rng.standard_normal((m, M))) / np.sqrt(2)
    Y = (rng.standard_normal((m, N)) + 1j * rng.standard_normal((m, N))) / np.sqrt(2)
    return Yb, Y
