"""Concentrated MAP cost and the coordinate-wise grid search that minimizes it.

With noise-only and data sample covariances

    Q0 = Y_bar @ Y_bar* / M,   R0 = Y @ Y* / N,   alpha = N / M,

the DOA estimate minimizes

    V(theta) = ln det(I_m + alpha * inv(Q0) @ P_perp(theta) @ R0) + phi(theta),

where P_perp is the complement of the oblique projector onto the steering
span (oblique in the inv(Q0) inner product) and

    phi(theta) = -sum_i kappa_i * cos(theta_i - mu_i) / gamma,
    gamma = M + N + m + 1

folds in the von Mises priors.  The minimizer runs cyclic 1-D grid searches:
holding all angles but one fixed, the determinant factors so that only a
rank-one update of the projector varies with the free angle, which makes a
dense scan cheap.  The grid is then recentred and halved L times.

Free functions do the math; `MapDoaEstimator` wraps them in a
scikit-learn style fit() API.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning

from .array_model import ArrayGeometry, steering_grid, steering_vector
from .exceptions import (
    NumericalBlowup,
    RankDeficientSteering,
    SingularNoiseCovariance,
)
from .scenario import PriorSpec
from .validation import check_snapshot_matrix

# relative eigenvalue cutoffs; below these the linear systems are meaningless
_Q0_RANK_TOL = 1e-12
_STEER_RANK_TOL = 1e-12
# sentinel floors for the 1-D search: candidates driving the log argument
# (or the a*Ga normalizer, relative to m) below these are marked +inf
_ARG_FLOOR = 1e-30
_DEN_FLOOR = 1e-30
# keep a candidate at least one grid step from the other angles, with just
# enough slack that an angle's own previous estimate stays admissible
_COLLISION_SLACK = 1.0 - 1e-9


@dataclass(frozen=True)
class SampleStats:
    """Sufficient statistics of one dataset, with a cached Cholesky of Q0."""

    Q0: np.ndarray
    R0: np.ndarray
    M: int
    N: int
    _q0_cho: tuple = field(repr=False)

    @property
    def m(self) -> int:
        return self.Q0.shape[0]

    @property
    def alpha(self) -> float:
        return self.N / self.M

    @property
    def gamma(self) -> int:
        return self.M + self.N + self.m + 1

    def q0_solve(self, B: np.ndarray) -> np.ndarray:
        """inv(Q0) @ B via the cached factorization."""
        return sla.cho_solve(self._q0_cho, B)


def sample_stats(Y_bar, Y) -> SampleStats:
    """Form Q0 = Y_bar Y_bar*/M and R0 = Y Y*/N and factorize Q0.

    Y may have zero columns (no data snapshots yet); R0 is then zero.
    Raises SingularNoiseCovariance when Q0 is numerically rank deficient,
    which is guaranteed for M < m.
    """
    Y_bar = check_snapshot_matrix(Y_bar, "Y_bar", min_cols=1)
    Y = check_snapshot_matrix(Y, "Y", min_cols=0)
    if Y.shape[0] != Y_bar.shape[0]:
        raise ValueError(
            f"sensor counts differ: Y_bar has {Y_bar.shape[0]} rows, Y has {Y.shape[0]}"
        )
    m, M = Y_bar.shape
    N = Y.shape[1]
    Q0 = Y_bar @ Y_bar.conj().T / M
    R0 = Y @ Y.conj().T / N if N > 0 else np.zeros((m, m), dtype=np.complex128)
    w = np.linalg.eigvalsh(Q0)
    if w[0] <= _Q0_RANK_TOL * w[-1]:
        raise SingularNoiseCovariance(
            f"Q0 is numerically singular (eig range [{w[0]:.3e}, {w[-1]:.3e}]); "
            f"need M >= m independent noise-only snapshots, got M={M}, m={m}"
        )
    try:
        cho = sla.cho_factor(Q0, lower=False)
    except sla.LinAlgError as exc:  # pragma: no cover - screened by eig test
        raise SingularNoiseCovariance(f"Cholesky of Q0 failed: {exc}") from exc
    return SampleStats(Q0=Q0, R0=R0, M=M, N=N, _q0_cho=cho)


def _oblique(A: np.ndarray, q0_solve) -> np.ndarray:
    """A @ inv(A* inv(Q0) A) @ A* inv(Q0) given a solver for inv(Q0) @ (.)."""
    B = q0_solve(A)
    gram = A.conj().T @ B
    w = np.linalg.eigvalsh(gram)
    if w[0] <= _STEER_RANK_TOL * max(w[-1], np.finfo(float).tiny):
        raise RankDeficientSteering(
            f"weighted steering Gram matrix is numerically singular "
            f"(eig range [{w[0]:.3e}, {w[-1]:.3e}]); angles too close?"
        )
    return A @ np.linalg.solve(gram, B.conj().T)


def oblique_projector(A, Q0) -> np.ndarray:
    """Oblique projector onto span(A), orthogonal in the inv(Q0) inner product.

    Satisfies P @ P = P, P @ A = A, and inv(Q0) @ P Hermitian.  An empty A
    (zero columns) yields the zero projector.
    """
    Q0 = np.asarray(Q0, dtype=np.complex128)
    m = Q0.shape[0]
    A = np.asarray(A, dtype=np.complex128).reshape(m, -1)
    if A.shape[1] == 0:
        return np.zeros((m, m), dtype=np.complex128)
    cho = sla.cho_factor(Q0, lower=False)
    return _oblique(A, lambda B: sla.cho_solve(cho, B))


def prior_penalty(theta: float, prior: PriorSpec, gamma: float) -> float:
    """Per-angle penalty -kappa * cos(theta - mu) / gamma."""
    return -prior.kappa * np.cos(theta - prior.mu) / gamma


def prior_penalty_total(thetas, priors, gamma: float) -> float:
    return float(sum(prior_penalty(t, p, gamma) for t, p in zip(thetas, priors)))


def concentrated_cost(thetas, stats: SampleStats, priors,
                      geom: ArrayGeometry | None = None) -> float:
    """Full concentrated MAP cost at a candidate angle tuple.

    ln det(I + alpha inv(Q0) P_perp R0) + phi(thetas).  Coincident angles
    surface as RankDeficientSteering from the projector build.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if geom is None:
        geom = ArrayGeometry(stats.m)
    if len(priors) != thetas.size:
        raise ValueError(f"{thetas.size} angles but {len(priors)} priors")
    A = steering_grid(thetas, geom)
    proj = _oblique(A, stats.q0_solve)
    eye = np.eye(stats.m, dtype=np.complex128)
    T = eye + stats.alpha * (stats.q0_solve(eye - proj) @ stats.R0)
    sign, logabs = np.linalg.slogdet(T)
    if not np.isfinite(logabs):
        raise NumericalBlowup("log-determinant of the whitened residual matrix diverged")
    return float(logabs) + prior_penalty_total(thetas, priors, stats.gamma)


@dataclass(frozen=True)
class AngleWorkspace:
    """Quantities fixed during one 1-D search over a single angle.

    With A_i the steering matrix of the *other* angles,

        G_i = inv(Q0) @ P_perp_{A_i},
        Psi_i = G_i @ R0 @ inv(I + alpha G_i R0) @ G_i,
        logdet_base = ln det(I + alpha G_i R0),

    so the cost along the free angle is
    logdet_base + ln(1 - alpha * (a* Psi_i a) / (a* G_i a)) + phi_i(theta).
    """

    G_i: np.ndarray
    Psi_i: np.ndarray
    logdet_base: float
    alpha: float


def per_angle_quantities(A_others: np.ndarray, stats: SampleStats) -> AngleWorkspace:
    """Precompute the workspace for scanning one angle given the others.

    A_others may have zero columns (first build-up search), in which case
    the complement projector is the identity and G_i = inv(Q0).
    """
    m = stats.m
    eye = np.eye(m, dtype=np.complex128)
    A_others = np.asarray(A_others, dtype=np.complex128).reshape(m, -1)
    if A_others.shape[1] == 0:
        G = stats.q0_solve(eye)
    else:
        G = stats.q0_solve(eye - _oblique(A_others, stats.q0_solve))
    GR = G @ stats.R0
    T = eye + stats.alpha * GR
    try:
        lu = sla.lu_factor(T)
    except sla.LinAlgError as exc:
        raise NumericalBlowup(f"I + alpha*G@R0 could not be factorized: {exc}") from exc
    sign, logabs = np.linalg.slogdet(T)
    if not np.isfinite(logabs):
        raise NumericalBlowup("ln det(I + alpha*G@R0) diverged")
    Psi = GR @ sla.lu_solve(lu, G)
    return AngleWorkspace(G_i=G, Psi_i=Psi, logdet_base=float(logabs), alpha=stats.alpha)


def per_angle_cost(theta: float, ws: AngleWorkspace, prior_i: PriorSpec, gamma: float,
                   geom: ArrayGeometry) -> float:
    """Cost of one candidate angle, up to the additive logdet_base term.

    Returns +inf where the candidate collapses the quadratic forms (steering
    vector numerically inside the span of the other angles).
    """
    a = steering_vector(theta, geom)
    den = np.real(a.conj() @ ws.G_i @ a)
    if den <= _DEN_FLOOR * geom.m:
        return np.inf
    arg = 1.0 - ws.alpha * np.real(a.conj() @ ws.Psi_i @ a) / den
    if arg <= _ARG_FLOOR:
        return np.inf
    return float(np.log(arg)) + prior_penalty(theta, prior_i, gamma)


def _grid_costs(A_grid: np.ndarray, grid: np.ndarray, ws: AngleWorkspace,
                prior: PriorSpec, gamma: float) -> np.ndarray:
    """Vectorized per_angle_cost over all columns of a steering grid."""
    m = A_grid.shape[0]
    den = np.einsum("ij,ij->j", A_grid.conj(), ws.G_i @ A_grid).real
    num = np.einsum("ij,ij->j", A_grid.conj(), ws.Psi_i @ A_grid).real
    bad = den <= _DEN_FLOOR * m
    den = np.where(bad, 1.0, den)
    arg = 1.0 - ws.alpha * num / den
    bad |= arg <= _ARG_FLOOR
    arg = np.where(bad, 1.0, arg)
    cost = np.log(arg) - prior.kappa * np.cos(grid - prior.mu) / gamma
    cost[bad] = np.inf
    return cost


@dataclass(frozen=True)
class MapConfig:
    """Search controls: grid density, refinement depth, sweep cap, geometry.

    `theta_domain` is an inclusive angle interval in degrees; level ell uses
    a grid of `g` points spanning width/2^(ell-1), so the final resolution is
    width / (2^(L-1) * g) degrees.
    """

    g: int = 500
    L: int = 10
    max_sweeps_per_level: int = 50
    spacing: float = 0.5
    theta_domain: tuple[float, float] = (-90.0, 90.0)

    def __post_init__(self):
        if self.g < 2:
            raise ValueError("need at least 2 grid points per level")
        if self.L < 1:
            raise ValueError("need at least one grid level")
        if self.max_sweeps_per_level < 1:
            raise ValueError("sweep cap must be >= 1")
        lo, hi = self.theta_domain
        if not (-90.0 <= lo < hi <= 90.0):
            raise ValueError(f"invalid angle domain {self.theta_domain!r}")

    @property
    def final_resolution_deg(self) -> float:
        lo, hi = self.theta_domain
        return (hi - lo) / (2 ** (self.L - 1) * self.g)


@dataclass(frozen=True)
class MapResult:
    """Estimates plus the diagnostics of the search that produced them."""

    theta_hat: np.ndarray        # d angles, radians, in prior order
    S_hat: np.ndarray            # d x N recovered waveforms
    Q_hat: np.ndarray            # m x m posterior-mean noise covariance
    cost_trace: np.ndarray       # concentrated cost after every 1-D search
    theta_history: np.ndarray    # (n_sweeps, d) estimate after each full sweep
    sweeps_per_level: tuple[int, ...]
    converged: bool

    @property
    def d(self) -> int:
        return self.theta_hat.size


def _refined_grid(center: float, delta: float, g: int, lo: float, hi: float) -> np.ndarray:
    """g points spaced delta, containing `center` exactly, inside [lo, hi]."""
    c = g // 2
    max_below = int(np.floor((center - lo) / delta))
    min_below = (g - 1) - int(np.floor((hi - center) / delta))
    c = min(max(c, min_below, 0), max_below, g - 1)
    return center + delta * (np.arange(g) - c)


def map_estimate(Y_bar, Y, priors, config: MapConfig | None = None) -> MapResult:
    """Run the full MAP search: build-up sweep, cyclic refinement, recovery.

    Angles are searched in order of decreasing prior concentration.  The
    first sweep introduces sources one at a time against the projector of
    those already placed; later sweeps rescan each angle with all others
    held at their current estimates.  A level ends when no angle moves by
    more than one grid step; the grid then halves in width around the
    current estimate.  Hitting the sweep cap marks the result as
    non-converged (ConvergenceWarning) but still proceeds.

    Within a level past the build-up sweep, each cost_trace entry is chained
    from its predecessor by the improvement measured on the search grid
    (both candidates scored in the same workspace), which makes the trace
    non-increasing by construction in float arithmetic; the chain is
    re-anchored to a fresh full-cost evaluation at every level start, so the
    entries track the concentrated cost to numerical roundoff throughout.
    """
    if config is None:
        config = MapConfig()
    stats = sample_stats(Y_bar, Y)
    if stats.N < 1:
        raise ValueError("MAP estimation needs at least one data snapshot")
    priors = tuple(priors)
    d = len(priors)
    if d < 1:
        raise ValueError("need at least one source prior")
    geom = ArrayGeometry(stats.m, config.spacing)
    gamma = stats.gamma

    order = np.argsort(-np.array([p.kappa for p in priors]), kind="stable")
    lo, hi = np.deg2rad(config.theta_domain[0]), np.deg2rad(config.theta_domain[1])
    width = hi - lo

    theta = np.full(d, np.nan)
    idx = np.zeros(d, dtype=int)
    built = np.zeros(d, dtype=bool)
    cost_trace: list[float] = []
    theta_history: list[np.ndarray] = []
    sweeps_per_level: list[int] = []
    converged = True
    current_cost = np.nan

    for level in range(config.L):
        delta = width / (2 ** level * config.g)
        if level == 0:
            base = lo + delta * (np.arange(config.g) + 0.5)
            grids = [base] * d
            A_grids = [steering_grid(base, geom)] * d
        else:
            grids, A_grids = [], []
            for i in range(d):
                gi = _refined_grid(theta[i], delta, config.g, lo, hi)
                grids.append(gi)
                A_grids.append(steering_grid(gi, geom))
                idx[i] = int(np.argmin(np.abs(gi - theta[i])))
                theta[i] = gi[idx[i]]
            current_cost = concentrated_cost(theta, stats, priors, geom)

        level_converged = False
        sweeps = 0
        while sweeps < config.max_sweeps_per_level:
            sweeps += 1
            building = not built.all()
            prev_idx = idx.copy()
            for i in order:
                others = [j for j in range(d) if j != i and built[j]]
                A_others = (
                    steering_grid(theta[others], geom)
                    if others else np.zeros((stats.m, 0), dtype=np.complex128)
                )
                ws = per_angle_quantities(A_others, stats)
                cost = _grid_costs(A_grids[i], grids[i], ws, priors[i], gamma)
                for j in others:
                    cost[np.abs(grids[i] - theta[j]) < delta * _COLLISION_SLACK] = np.inf
                k = int(np.argmin(cost))
                if not np.isfinite(cost[k]):
                    raise NumericalBlowup(
                        "every candidate on the search grid was inadmissible"
                    )
                k_old = idx[i]
                idx[i] = k
                theta[i] = grids[i][k]
                built[i] = True
                if building or not np.isfinite(cost[k_old]):
                    live = [j for j in range(d) if built[j]]
                    current_cost = concentrated_cost(
                        theta[live], stats, [priors[j] for j in live], geom
                    )
                else:
                    # same-workspace delta; nonpositive because the previous
                    # position (still admissible by the guard slack) was a
                    # candidate in this search
                    current_cost = current_cost + (cost[k] - cost[k_old])
                cost_trace.append(current_cost)
            theta_history.append(theta.copy())
            if not building and np.abs(idx - prev_idx).max() < 2:
                level_converged = True
                break
        sweeps_per_level.append(sweeps)
        if not level_converged:
            converged = False
            warnings.warn(
                f"grid level {level + 1}: sweep cap {config.max_sweeps_per_level} "
                "reached before the estimate settled",
                ConvergenceWarning,
            )

    Y_arr = check_snapshot_matrix(Y, "Y")
    S_hat = recover_signal(theta, stats, Y_arr, geom)
    Q_hat = recover_noise_cov(theta, S_hat, stats, Y_arr, geom)
    return MapResult(
        theta_hat=theta,
        S_hat=S_hat,
        Q_hat=Q_hat,
        cost_trace=np.array(cost_trace),
        theta_history=np.array(theta_history),
        sweeps_per_level=tuple(sweeps_per_level),
        converged=converged,
    )


def recover_signal(theta_hat, stats: SampleStats, Y,
                   geom: ArrayGeometry | None = None) -> np.ndarray:
    """Waveform estimate S = inv(A* inv(Q0) A) A* inv(Q0) Y at fixed angles."""
    theta_hat = np.atleast_1d(np.asarray(theta_hat, dtype=float))
    if geom is None:
        geom = ArrayGeometry(stats.m)
    A = steering_grid(theta_hat, geom)
    B = stats.q0_solve(A)
    gram = A.conj().T @ B
    w = np.linalg.eigvalsh(gram)
    if w[0] <= _STEER_RANK_TOL * max(w[-1], np.finfo(float).tiny):
        raise RankDeficientSteering("steering matrix at theta_hat is rank deficient")
    return np.linalg.solve(gram, B.conj().T @ Y)


def recover_noise_cov(theta_hat, S_hat, stats: SampleStats, Y,
                      geom: ArrayGeometry | None = None) -> np.ndarray:
    """Posterior-mean noise covariance (M*Q0 + residual scatter) / gamma."""
    theta_hat = np.atleast_1d(np.asarray(theta_hat, dtype=float))
    if geom is None:
        geom = ArrayGeometry(stats.m)
    A = steering_grid(theta_hat, geom)
    resid = Y - A @ S_hat
    return (stats.M * stats.Q0 + resid @ resid.conj().T) / stats.gamma


def cost_trace_segments(result: MapResult) -> list[np.ndarray]:
    """Split the cost trace into per-level segments of d entries per sweep."""
    d = result.d
    segments = []
    start = 0
    for sweeps in result.sweeps_per_level:
        stop = start + d * sweeps
        segments.append(result.cost_trace[start:stop])
        start = stop
    return segments


def monotonicity_violations(result: MapResult, atol: float = 0.0) -> int:
    """Count within-level cost increases beyond atol.

    Entries produced while the estimate was still being built up (the first
    d-1 searches of level 1) score costs of growing subsets and are not
    comparable, so the first level is checked from its d-th entry on.
    """
    count = 0
    for lvl, seg in enumerate(cost_trace_segments(result)):
        comparable = seg[result.d - 1:] if lvl == 0 else seg
        if comparable.size > 1:
            count += int(np.sum(np.diff(comparable) > atol))
    return count


class MapDoaEstimator(BaseEstimator):
    """DOA estimation in unknown colored noise, scikit-learn style.

    The estimator needs two sample blocks: the snapshots passed to fit()
    as X hold signal plus noise, and the `noise_only` keyword holds the
    noise-only block used to learn the noise covariance.  Both are
    (n_snapshots, n_sensors) arrays, one snapshot per row.

    Parameters
    ----------
    mu_deg : array-like of float
        Prior mean direction per source, degrees.
    kappa : array-like of float
        von Mises concentration per source; 0 means noninformative.
    grid_points : int, default=500
        Grid density g per refinement level.
    levels : int, default=10
        Number of grid halvings L.
    max_sweeps_per_level : int, default=50
        Cyclic sweep cap per level before moving on.
    spacing : float, default=0.5
        Sensor spacing in wavelengths.

    Attributes
    ----------
    thetas_ : ndarray of shape (d,)
        Estimated angles in radians, in prior order.
    thetas_deg_ : ndarray of shape (d,)
        Same angles in degrees.
    signals_ : ndarray of shape (d, n_snapshots)
        Recovered source waveforms.
    noise_covariance_ : ndarray of shape (n_sensors, n_sensors)
        Posterior-mean noise covariance.
    cost_trace_ : ndarray
        Concentrated cost after every 1-D search.
    converged_ : bool
        False when any grid level hit the sweep cap.
    result_ : MapResult
        The full result object.

    Examples
    --------
    >>> est = MapDoaEstimator(mu_deg=[-35.0], kappa=[1e5])
    >>> est.fit(X, noise_only=X_noise).thetas_deg_   # doctest: +SKIP
    array([-34.97...])
    """

    def __init__(self, mu_deg=(), kappa=(), grid_points=500, levels=10,
                 max_sweeps_per_level=50, spacing=0.5):
        self.mu_deg = mu_deg
        self.kappa = kappa
        self.grid_points = grid_points
        self.levels = levels
        self.max_sweeps_per_level = max_sweeps_per_level
        self.spacing = spacing

    def fit(self, X, y=None, *, noise_only=None):
        """Estimate angles, waveforms and noise covariance from snapshots.

        Parameters
        ----------
        X : array-like of shape (n_snapshots, n_sensors)
            Signal-plus-noise snapshots.
        y : Ignored
            Present for scikit-learn API compatibility.
        noise_only : array-like of shape (n_noise_snapshots, n_sensors)
            Noise-only snapshots; required.
        """
        if noise_only is None:
            raise ValueError("noise_only snapshots are required to learn the noise covariance")
        mu = np.atleast_1d(np.asarray(self.mu_deg, dtype=float))
        kap = np.atleast_1d(np.asarray(self.kappa, dtype=float))
        if mu.size != kap.size:
            raise ValueError(f"mu_deg has {mu.size} entries but kappa has {kap.size}")
        if mu.size == 0:
            raise ValueError("at least one source prior is required")
        priors = tuple(PriorSpec(mu=np.deg2rad(m_), kappa=k_) for m_, k_ in zip(mu, kap))
        config = MapConfig(
            g=int(self.grid_points),
            L=int(self.levels),
            max_sweeps_per_level=int(self.max_sweeps_per_level),
            spacing=float(self.spacing),
        )
        Y = np.asarray(X).T
        Y_bar = np.asarray(noise_only).T
        result = map_estimate(Y_bar, Y, priors, config)
        self.result_ = result
        self.thetas_ = result.theta_hat
        self.thetas_deg_ = np.rad2deg(result.theta_hat)
        self.signals_ = result.S_hat
        self.noise_covariance_ = result.Q_hat
        self.cost_trace_ = result.cost_trace
        self.converged_ = result.converged
        self.n_features_in_ = Y.shape[0]
        return self
