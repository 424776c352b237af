"""Command line front end: `simulate`, `estimate`, and `crb` subcommands.

All angles cross this boundary in degrees; internals run in radians.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .bounds import BoundConfig, acrb, crb
from .estimator import MapConfig, map_estimate
from .exceptions import DoaMapError
from .harness import (
    bound_config_for,
    convergence_trace,
    experiment_from_config,
    run_experiment,
    trace_to_csv,
)
from .io import load_priors, load_snapshots, save_complex_matrix
from .scenario import noise_covariance, scenario_from_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doamap",
        description="DOA, waveform and noise-covariance estimation from "
                    "array snapshots with noise-only samples.",
    )
    parser.add_argument("--seed", type=int, default=None, metavar="U64",
                        help="override the experiment master seed")
    parser.add_argument("--runs", type=int, default=None, metavar="N",
                        help="override the Monte Carlo run count")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo sweep experiment")
    sim.add_argument("--config", required=True, help="experiment JSON document")
    sim.add_argument("--out", default=None, help="results CSV path")
    sim.add_argument("--trace-out", default=None,
                     help="also write the first run's convergence trace CSV")

    est = sub.add_parser("estimate", help="one-shot estimation from a snapshot CSV")
    est.add_argument("--data", required=True, help="snapshot CSV (sensor,t,re,im)")
    est.add_argument("--priors", required=True, help="priors JSON")
    est.add_argument("--grid", type=int, default=500, help="grid points per level")
    est.add_argument("--levels", type=int, default=10, help="refinement levels")
    est.add_argument("--signals-out", default=None,
                     help="write the recovered waveforms as CSV")
    est.add_argument("--noise-cov-out", default=None,
                     help="write the noise covariance estimate as CSV")

    bnd = sub.add_parser("crb", help="print the bound table for a scenario")
    bnd.add_argument("--config", required=True,
                     help="scenario JSON (optionally {scenario:..., bounds:...})")
    return parser


def _cmd_simulate(args) -> int:
    with open(args.config) as fh:
        spec = experiment_from_config(json.load(fh))
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.runs is not None:
        spec = replace(spec, runs=args.runs)
    out = args.out or spec.output_path
    if out is None:
        raise ValueError("no output path: pass --out or set output_path in the config")
    table = run_experiment(spec)
    table.write_csv(out)
    if args.trace_out:
        with open(args.trace_out, "w", newline="") as fh:
            fh.write(trace_to_csv(convergence_trace(spec)))
    print(f"wrote {out}", file=sys.stderr)
    return 0


def _cmd_estimate(args) -> int:
    Y_bar, Y = load_snapshots(args.data)
    priors, spacing = load_priors(args.priors)
    config = MapConfig(g=args.grid, L=args.levels,
                       spacing=spacing if spacing is not None else 0.5)
    result = map_estimate(Y_bar, Y, priors, config)
    d = result.d
    print(",".join(f"theta{i + 1}_deg" for i in range(d)))
    print(",".join("%.9g" % v for v in np.degrees(result.theta_hat)))
    if args.signals_out:
        save_complex_matrix(args.signals_out, result.S_hat, "source", "t", col_start=1)
    if args.noise_cov_out:
        save_complex_matrix(args.noise_cov_out, result.Q_hat, "row", "col")
    return 0


def _cmd_crb(args) -> int:
    with open(args.config) as fh:
        doc = json.load(fh)
    scn_cfg = doc.get("scenario", doc) if isinstance(doc, dict) else doc
    scn = scenario_from_config(scn_cfg)
    template = None
    if isinstance(doc, dict) and "bounds" in doc and "treat_random" in doc["bounds"]:
        template = BoundConfig(
            treat_random=tuple(bool(b) for b in doc["bounds"]["treat_random"]),
            kappas=tuple(p.kappa for p in scn.priors),
            N=scn.N,
            alpha=scn.N / scn.M,
        )
    bcfg = bound_config_for(scn, template)
    P = scn.signal_cov
    Q = noise_covariance(scn)
    means = scn.mean_thetas
    crb_res = crb(means, P, Q, bcfg, scn.geom)
    acrb_res = acrb(means, P, Q, bcfg, scn.geom)
    print("angle,sqrt_crb_deg,sqrt_acrb_deg")
    for i in range(scn.d):
        print("%d,%.9g,%.9g" % (i + 1, crb_res.rms_deg[i], acrb_res.rms_deg[i]))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "estimate": _cmd_estimate,
        "crb": _cmd_crb,
    }[args.command]
    try:
        return handler(args)
    except (DoaMapError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
