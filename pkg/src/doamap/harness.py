"""Seeded Monte Carlo sweeps: RMSE curves with CRB/ACRB reference columns.

An experiment fixes a scenario template and varies one parameter (noise-only
sample count M, SNR in dB, or INR in dB) over a list of values.  Every run r
at sweep index s owns the private stream default_rng([master_seed, s, r]),
so results are reproducible and runs could execute in any order; per-angle
squared errors are nevertheless reduced in fixed run order to keep the
output bytes stable.

Estimates are matched to the realized angles by the permutation minimizing
the total absolute error, and the RMSE of the randomized angles is taken
against their per-run draws, not the prior means.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, replace

import numpy as np
from sklearn.exceptions import ConvergenceWarning

from .bounds import BoundConfig, acrb, crb
from .estimator import MapConfig, map_estimate, monotonicity_violations
from .exceptions import EmptySample
from .scenario import (
    Scenario,
    generate_dataset,
    noise_covariance,
    scale_for_snr_db,
    scenario_from_config,
    sigma2_tilde_for_inr_db,
)

SWEEP_PARAMS = ("M", "snr_db", "inr_db")
_MAX_MATCH_SOURCES = 5
_FAIL_RATE_FLAG = 0.05


@dataclass(frozen=True)
class ExperimentSpec:
    """A scenario template plus one swept parameter and run controls.

    `bounds` fixes which angles the reference bound treats as random; its
    N and alpha fields are recomputed per sweep value, so the template
    values only matter as placeholders.  In an M sweep, N tracks M at the
    scenario's alpha = N/M ratio; in SNR/INR sweeps M and N stay fixed.
    """

    scenario: Scenario
    sweep_param: str
    sweep_values: tuple[float, ...]
    runs: int = 500
    master_seed: int = 0
    estimator: MapConfig = MapConfig()
    bounds: BoundConfig | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.sweep_param not in SWEEP_PARAMS:
            raise ValueError(
                f"sweep_param must be one of {SWEEP_PARAMS}, got {self.sweep_param!r}"
            )
        if len(self.sweep_values) < 1:
            raise ValueError("need at least one sweep value")
        if any(b >= a for a, b in zip(self.sweep_values[1:], self.sweep_values)):
            raise ValueError("sweep values must be strictly increasing")
        if self.runs < 1:
            raise ValueError("need at least one run")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a nonnegative integer")
        if self.bounds is not None and len(self.bounds.treat_random) != self.scenario.d:
            raise ValueError(
                f"bounds cover {len(self.bounds.treat_random)} angles but the "
                f"scenario has {self.scenario.d}"
            )


@dataclass(frozen=True)
class RmseTable:
    """One row per sweep value: RMSE, bound references, failure count.

    All angle columns are degrees; bound columns hold the square roots of
    the bound diagonals.  `monotonicity_violations` totals within-level
    cost increases over every run that produced the table (zero for a
    healthy search).
    """

    sweep_param: str
    sweep_values: np.ndarray          # (n,)
    rmse_deg: np.ndarray              # (n, d)
    crb_deg: np.ndarray               # (n, d)
    acrb_deg: np.ndarray              # (n, d)
    fail_counts: np.ndarray           # (n,) int
    runs: int
    monotonicity_violations: int

    @property
    def d(self) -> int:
        return self.rmse_deg.shape[1]

    def to_csv(self) -> str:
        cols = (
            ["sweep_value"]
            + [f"rmse_theta{i + 1}_deg" for i in range(self.d)]
            + [f"crb_theta{i + 1}_deg" for i in range(self.d)]
            + [f"acrb_theta{i + 1}_deg" for i in range(self.d)]
            + ["fail_count"]
        )
        lines = [",".join(cols)]
        for r in range(self.sweep_values.size):
            row = [_fmt(self.sweep_values[r])]
            row += [_fmt(v) for v in self.rmse_deg[r]]
            row += [_fmt(v) for v in self.crb_deg[r]]
            row += [_fmt(v) for v in self.acrb_deg[r]]
            row.append(str(int(self.fail_counts[r])))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(value: float) -> str:
    """9 significant digits, compact."""
    return "%.9g" % value


def match_angles(theta_hat, theta_true) -> np.ndarray:
    """Permutation p minimizing sum_i |theta_hat[p[i]] - theta_true[i]|.

    Exhaustive over d! orderings; d is capped at 5 to keep that sane.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta_true = np.asarray(theta_true, dtype=float)
    if theta_hat.shape != theta_true.shape:
        raise ValueError(
            f"angle counts differ: {theta_hat.shape} vs {theta_true.shape}"
        )
    d = theta_hat.size
    if d > _MAX_MATCH_SOURCES:
        raise ValueError(f"exhaustive matching is capped at {_MAX_MATCH_SOURCES} sources")
    best = None
    best_cost = np.inf
    for perm in itertools.permutations(range(d)):
        cost = float(np.abs(theta_hat[list(perm)] - theta_true).sum())
        if cost < best_cost:
            best_cost = cost
            best = perm
    return np.array(best, dtype=int)


def rmse(errors) -> float:
    """Root mean square of angle errors (radians in), reported in degrees."""
    arr = np.asarray(errors, dtype=float).ravel()
    if arr.size == 0:
        raise EmptySample("RMSE of an empty error sample is undefined")
    return float(np.degrees(np.sqrt(np.mean(arr ** 2))))


def scenario_for_value(scn: Scenario, sweep_param: str, value: float) -> Scenario:
    """Specialize the template scenario to one sweep value."""
    if sweep_param == "M":
        M = int(round(value))
        if M != value:
            raise ValueError(f"M sweep values must be integers, got {value!r}")
        N = int(round(scn.N / scn.M * M))
        return replace(scn, M=M, N=max(N, 1))
    if sweep_param == "snr_db":
        scale = scale_for_snr_db(float(value), scn.geom.m, scn.sigma2, scn.d)
        return replace(scn, signal_scale=scale)
    if sweep_param == "inr_db":
        s2t = sigma2_tilde_for_inr_db(
            float(value), scn.geom.m, scn.sigma2, len(scn.interferer_thetas)
        )
        return replace(scn, sigma2_tilde=s2t)
    raise ValueError(f"unknown sweep parameter {sweep_param!r}")


def bound_config_for(scn: Scenario, template: BoundConfig | None = None) -> BoundConfig:
    """Bound setup consistent with a scenario's priors and sample counts."""
    treat = (
        template.treat_random
        if template is not None
        else tuple(p.kappa > 0.0 for p in scn.priors)
    )
    return BoundConfig(
        treat_random=treat,
        kappas=tuple(p.kappa for p in scn.priors),
        N=scn.N,
        alpha=scn.N / scn.M,
    )


def _run_one(scn: Scenario, config: MapConfig, rng: np.random.Generator):
    """One Monte Carlo draw: dataset, estimate, matched errors (radians)."""
    ds = generate_dataset(scn, rng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        res = map_estimate(ds.Y_bar, ds.Y, scn.priors, config)
    perm = match_angles(res.theta_hat, ds.thetas_realized)
    err = res.theta_hat[perm] - ds.thetas_realized
    return res, err


def run_experiment(spec: ExperimentSpec) -> RmseTable:
    """Execute the full sweep and aggregate per-angle RMSE plus bounds."""
    d = spec.scenario.d
    n = len(spec.sweep_values)
    rmse_deg = np.zeros((n, d))
    crb_deg = np.zeros((n, d))
    acrb_deg = np.zeros((n, d))
    fail_counts = np.zeros(n, dtype=int)
    violations = 0

    for s, value in enumerate(spec.sweep_values):
        scn = scenario_for_value(spec.scenario, spec.sweep_param, value)
        config = replace(spec.estimator, spacing=scn.geom.spacing)
        bcfg = bound_config_for(scn, spec.bounds)
        means = scn.mean_thetas
        P = scn.signal_cov
        Q = noise_covariance(scn)
        acrb_deg[s] = acrb(means, P, Q, bcfg, scn.geom).rms_deg
        crb_deg[s] = crb(means, P, Q, bcfg, scn.geom).rms_deg

        sq_sum = np.zeros(d)
        for r in range(spec.runs):
            rng = np.random.default_rng([spec.master_seed, s, r])
            res, err = _run_one(scn, config, rng)
            if not res.converged:
                fail_counts[s] += 1
            violations += monotonicity_violations(res)
            sq_sum += err ** 2
        rmse_deg[s] = np.degrees(np.sqrt(sq_sum / spec.runs))
        if fail_counts[s] / spec.runs >= _FAIL_RATE_FLAG:
            warnings.warn(
                f"sweep value {value}: {fail_counts[s]}/{spec.runs} runs hit the "
                "sweep cap",
                UserWarning,
            )

    return RmseTable(
        sweep_param=spec.sweep_param,
        sweep_values=np.asarray(spec.sweep_values, dtype=float),
        rmse_deg=rmse_deg,
        crb_deg=crb_deg,
        acrb_deg=acrb_deg,
        fail_counts=fail_counts,
        runs=spec.runs,
        monotonicity_violations=violations,
    )


def convergence_trace(spec: ExperimentSpec) -> np.ndarray:
    """Per-sweep absolute angle errors (degrees) of the first run.

    Reuses the stream of run (sweep 0, run 0), so the trace describes a run
    that also contributes to the experiment's first table row.  Row k holds
    |estimate - realized angle| after full sweep k, one column per source.
    """
    scn = scenario_for_value(spec.scenario, spec.sweep_param, spec.sweep_values[0])
    config = replace(spec.estimator, spacing=scn.geom.spacing)
    rng = np.random.default_rng([spec.master_seed, 0, 0])
    ds = generate_dataset(scn, rng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        res = map_estimate(ds.Y_bar, ds.Y, scn.priors, config)
    perm = match_angles(res.theta_hat, ds.thetas_realized)
    return np.degrees(np.abs(res.theta_history[:, perm] - ds.thetas_realized))


def trace_to_csv(trace: np.ndarray) -> str:
    """CSV with 1-based iteration index and per-angle absolute errors."""
    trace = np.atleast_2d(np.asarray(trace, dtype=float))
    d = trace.shape[1]
    lines = [",".join(["iteration"] + [f"abs_err_theta{i + 1}_deg" for i in range(d)])]
    for k, row in enumerate(trace, start=1):
        lines.append(",".join([str(k)] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def experiment_from_config(cfg: dict) -> ExperimentSpec:
    """Build an ExperimentSpec from a JSON-style dict.

    Layout::

        {
          "scenario": { ... },
          "sweep": {"parameter": "M", "values": [25, 100, 400]},
          "runs": 200,
          "master_seed": 1,
          "estimator": {"g": 500, "L": 10},
          "bounds": {"treat_random": [true, false, false]},
          "output_path": "results.csv"
        }

    `estimator` and `bounds` are optional; `bounds.treat_random` defaults
    to flagging every source with kappa > 0.
    """
    known = {"scenario", "sweep", "runs", "master_seed", "estimator", "bounds",
             "output_path"}
    unknown = set(cfg) - known
    if unknown:
        raise ValueError(f"unknown experiment fields: {sorted(unknown)}")
    try:
        scenario = scenario_from_config(cfg["scenario"])
        sweep = cfg["sweep"]
        param = sweep["parameter"]
        values = tuple(float(v) for v in sweep["values"])
    except KeyError as exc:
        raise ValueError(f"experiment config missing required field {exc}") from None

    est_cfg = cfg.get("estimator", {})
    estimator = MapConfig(
        g=int(est_cfg.get("g", 500)),
        L=int(est_cfg.get("L", 10)),
        max_sweeps_per_level=int(est_cfg.get("max_sweeps_per_level", 50)),
        spacing=scenario.geom.spacing,
    )
    bounds = None
    if "bounds" in cfg and "treat_random" in cfg["bounds"]:
        bounds = BoundConfig(
            treat_random=tuple(bool(b) for b in cfg["bounds"]["treat_random"]),
            kappas=tuple(p.kappa for p in scenario.priors),
            N=scenario.N,
            alpha=scenario.N / scenario.M,
        )
    return ExperimentSpec(
        scenario=scenario,
        sweep_param=str(param),
        sweep_values=values,
        runs=int(cfg.get("runs", 500)),
        master_seed=int(cfg.get("master_seed", 0)),
        estimator=estimator,
        bounds=bounds,
        output_path=cfg.get("output_path"),
    )
