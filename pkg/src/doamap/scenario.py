"""Generative scenario: source covariance, structured noise field, priors.

The data model is

    y(t) = n(t)              for the M noise-only snapshots,
    y(t) = A(theta) s(t) + n(t)   for the N data snapshots,

with n(t) ~ CN(0, Q) circularly symmetric and s(t) ~ CN(0, P).  The noise
covariance combines an exponentially correlated background with a set of
point interferers,

    Q = Q' + At @ Pt @ At*,   Q'_ij = sigma2 * a^|i-j|,   Pt = sigma2_tilde * I.

Each DOA carries a von Mises prior M(mu_i, kappa_i); kappa_i = 0 marks a
noninformative prior, in which case the angle is held fixed per scenario
rather than redrawn.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .array_model import ArrayGeometry, steering_grid
from .exceptions import NotPositiveDefinite
from .linalg import hermitian_sqrt
from .validation import check_angles

_KNOWN_CONFIG_KEYS = {
    "m", "spacing", "priors", "true_thetas_fixed_deg", "rho", "noise_a",
    "sigma2", "interferer_thetas_deg", "sigma2_tilde", "inr_db",
    "signal_scale", "snr_db", "M", "N",
}


@dataclass(frozen=True)
class PriorSpec:
    """von Mises prior M(mu, kappa) on one DOA; kappa = 0 is noninformative."""

    mu: float  # mean direction, radians
    kappa: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ValueError(f"prior mean must be finite, got {self.mu!r}")
        if not (self.kappa >= 0.0):
            raise ValueError(f"concentration kappa must be >= 0, got {self.kappa!r}")


@dataclass(frozen=True)
class Dataset:
    """One draw of the generative model."""

    Y_bar: np.ndarray          # m x M noise-only snapshots
    Y: np.ndarray              # m x N signal-plus-noise snapshots
    S_true: np.ndarray         # d x N source waveforms
    thetas_realized: np.ndarray  # d realized angles, radians


def signal_covariance(rho: complex, d: int) -> np.ndarray:
    """Source covariance P = I_d + rho*T + conj(rho)*T* with T strictly lower ones.

    Raises NotPositiveDefinite when the construction is indefinite (possible
    for some complex rho and d).
    """
    if not (abs(rho) < 1.0):
        raise ValueError(f"|rho| must be < 1, got {abs(rho)!r}")
    T = np.tril(np.ones((d, d)), k=-1)
    P = np.eye(d) + rho * T + np.conj(rho) * T.T
    w = np.linalg.eigvalsh(P)
    if w[0] <= 0.0:
        raise NotPositiveDefinite(
            f"source covariance indefinite for rho={rho!r}, d={d} "
            f"(min eigenvalue {w[0]:.3e})"
        )
    return P


@dataclass(frozen=True)
class Scenario:
    """Full generative model of one experiment configuration.

    `priors` has one entry per source; sources with kappa = 0 take their
    angle from `true_thetas_fixed` (in source order), the rest are redrawn
    from their prior on every dataset draw.
    """

    geom: ArrayGeometry
    priors: tuple[PriorSpec, ...]
    true_thetas_fixed: tuple[float, ...] = ()
    rho: complex = 0.0
    noise_a: float = 0.0
    sigma2: float = 1.0
    interferer_thetas: tuple[float, ...] = ()
    sigma2_tilde: float = 0.0
    signal_scale: float = 1.0
    M: int = 100
    N: int = 100

    def __post_init__(self):
        if len(self.priors) < 1:
            raise ValueError("scenario needs at least one source prior")
        n_fixed = sum(1 for p in self.priors if p.kappa == 0.0)
        if len(self.true_thetas_fixed) != n_fixed:
            raise ValueError(
                f"{n_fixed} sources have kappa=0 but {len(self.true_thetas_fixed)} "
                "fixed angles were given"
            )
        if not (abs(self.rho) < 1.0):
            raise ValueError("|rho| must be < 1")
        if not (0.0 <= self.noise_a < 1.0):
            raise ValueError("noise correlation a must lie in [0, 1)")
        if not (self.sigma2 > 0.0):
            raise ValueError("sigma2 must be positive")
        if not (self.sigma2_tilde >= 0.0):
            raise ValueError("sigma2_tilde must be nonnegative")
        if not (self.signal_scale > 0.0):
            raise ValueError("signal_scale must be positive")
        if self.M < self.geom.m:
            raise ValueError(f"need M >= m noise-only snapshots, got M={self.M}, m={self.geom.m}")
        if self.N < 1:
            raise ValueError("need at least one data snapshot")
        if self.true_thetas_fixed:
            check_angles(self.true_thetas_fixed, "true_thetas_fixed")
        if self.interferer_thetas:
            check_angles(self.interferer_thetas, "interferer_thetas")
        # both covariances must be constructible; raises NotPositiveDefinite
        signal_covariance(self.rho, self.d)
        w = np.linalg.eigvalsh(noise_covariance(self))
        if w[0] <= 0.0:
            raise NotPositiveDefinite(f"noise covariance indefinite (min eig {w[0]:.3e})")

    @property
    def d(self) -> int:
        return len(self.priors)

    @property
    def kappas(self) -> np.ndarray:
        return np.array([p.kappa for p in self.priors])

    @property
    def signal_cov(self) -> np.ndarray:
        """Effective source covariance signal_scale * (I + rho*T + rho* T*)."""
        return self.signal_scale * signal_covariance(self.rho, self.d)

    @property
    def mean_thetas(self) -> np.ndarray:
        """Per-source expected angle: the prior mean, or the fixed true angle."""
        out = np.empty(self.d)
        fixed = iter(self.true_thetas_fixed)
        for i, p in enumerate(self.priors):
            out[i] = p.mu if p.kappa > 0.0 else next(fixed)
        return out


def noise_covariance(scn: Scenario) -> np.ndarray:
    """Noise-plus-interference covariance Q = Q' + sigma2_tilde * At @ At*."""
    m = scn.geom.m
    qprime_row = scn.sigma2 * scn.noise_a ** np.arange(m)
    Q = toeplitz(qprime_row).astype(np.complex128)
    if scn.sigma2_tilde > 0.0 and len(scn.interferer_thetas) > 0:
        At = steering_grid(scn.interferer_thetas, scn.geom)
        Q = Q + scn.sigma2_tilde * (At @ At.conj().T)
    return Q


def background_noise_cov(scn: Scenario) -> np.ndarray:
    """The interferer-free part Q' with entries sigma2 * a^|i-j|."""
    return toeplitz(scn.sigma2 * scn.noise_a ** np.arange(scn.geom.m))


def sample_von_mises(prior: PriorSpec, rng: np.random.Generator, size=None):
    """Draw from M(mu, kappa); kappa = 0 gives the uniform circular law.

    Returns a float for size=None, else an ndarray.  Values lie in [-pi, pi].
    """
    draw = rng.vonmises(prior.mu, prior.kappa, size=size)
    return float(draw) if size is None else draw


def _std_complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    # circularly symmetric, unit variance: real/imag parts each variance 1/2
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def generate_dataset(scn: Scenario, rng: np.random.Generator) -> Dataset:
    """Draw one snapshot dataset from the scenario.

    Draw order is fixed (angles, then S, then noise-only noise, then data
    noise), so a given (scenario, seed) pair always yields the same dataset.
    Prior draws falling outside the array's field of view are clipped to
    [-pi/2, pi/2]; for the concentrated priors of interest this has
    negligible probability mass.
    """
    thetas = np.empty(scn.d)
    fixed = iter(scn.true_thetas_fixed)
    for i, p in enumerate(scn.priors):
        if p.kappa > 0.0:
            thetas[i] = np.clip(sample_von_mises(p, rng), -np.pi / 2, np.pi / 2)
        else:
            thetas[i] = next(fixed)

    A = steering_grid(thetas, scn.geom)
    L_sig = hermitian_sqrt(scn.signal_cov)
    L_noise = hermitian_sqrt(noise_covariance(scn))

    S = L_sig @ _std_complex_normal(rng, (scn.d, scn.N))
    Y_bar = L_noise @ _std_complex_normal(rng, (scn.geom.m, scn.M))
    Y = A @ S + L_noise @ _std_complex_normal(rng, (scn.geom.m, scn.N))
    return Dataset(Y_bar=Y_bar, Y=Y, S_true=S, thetas_realized=thetas)


def snr_inr(scn: Scenario) -> tuple[float, float]:
    """Linear SNR = tr{P}/tr{Q'} and INR = tr{Pt}/tr{Q'} for the scenario."""
    tr_qprime = scn.geom.m * scn.sigma2
    snr = float(np.trace(scn.signal_cov).real) / tr_qprime
    inr = scn.sigma2_tilde * len(scn.interferer_thetas) / tr_qprime
    return snr, inr


def scale_for_snr_db(snr_db: float, m: int, sigma2: float, d: int) -> float:
    """Signal scale making tr{P}/tr{Q'} hit the requested SNR, Q' held fixed."""
    return 10.0 ** (snr_db / 10.0) * (m * sigma2) / d


def sigma2_tilde_for_inr_db(inr_db: float, m: int, sigma2: float, d_tilde: int) -> float:
    """Interferer power making tr{Pt}/tr{Q'} hit the requested INR."""
    if d_tilde < 1:
        raise ValueError("cannot set an INR without interferers")
    return 10.0 ** (inr_db / 10.0) * (m * sigma2) / d_tilde


def scenario_from_config(cfg: dict) -> Scenario:
    """Build a Scenario from a JSON-style dict.

    Angles are given in degrees (keys ending in `_deg`), powers either
    linearly (`sigma2`, `sigma2_tilde`, `signal_scale`) or in dB via the
    `snr_db` / `inr_db` keys.
    """
    unknown = set(cfg) - _KNOWN_CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
    try:
        m = int(cfg["m"])
        prior_cfgs = cfg["priors"]
        M = int(cfg["M"])
        N = int(cfg["N"])
    except KeyError as exc:
        raise ValueError(f"scenario config missing required field {exc}") from None

    geom = ArrayGeometry(m=m, spacing=float(cfg.get("spacing", 0.5)))
    priors = tuple(
        PriorSpec(mu=np.deg2rad(float(p["mu_deg"])), kappa=float(p.get("kappa", 0.0)))
        for p in prior_cfgs
    )
    if "true_thetas_fixed_deg" in cfg:
        fixed = tuple(np.deg2rad(float(t)) for t in cfg["true_thetas_fixed_deg"])
    else:
        fixed = tuple(p.mu for p in priors if p.kappa == 0.0)

    rho = cfg.get("rho", 0.0)
    if isinstance(rho, (list, tuple)):
        rho = complex(rho[0], rho[1])
    else:
        rho = complex(rho)

    interferers = tuple(np.deg2rad(float(t)) for t in cfg.get("interferer_thetas_deg", ()))
    sigma2 = float(cfg.get("sigma2", 1.0))

    if "sigma2_tilde" in cfg and "inr_db" in cfg:
        raise ValueError("give either sigma2_tilde or inr_db, not both")
    if "inr_db" in cfg:
        sigma2_tilde = sigma2_tilde_for_inr_db(float(cfg["inr_db"]), m, sigma2, len(interferers))
    else:
        sigma2_tilde = float(cfg.get("sigma2_tilde", 0.0))

    if "signal_scale" in cfg and "snr_db" in cfg:
        raise ValueError("give either signal_scale or snr_db, not both")
    if "snr_db" in cfg:
        signal_scale = scale_for_snr_db(float(cfg["snr_db"]), m, sigma2, len(priors))
    else:
        signal_scale = float(cfg.get("signal_scale", 1.0))

    return Scenario(
        geom=geom,
        priors=priors,
        true_thetas_fixed=fixed,
        rho=rho,
        noise_a=float(cfg.get("noise_a", 0.0)),
        sigma2=sigma2,
        interferer_thetas=interferers,
        sigma2_tilde=sigma2_tilde,
        signal_scale=signal_scale,
        M=M,
        N=N,
    )
