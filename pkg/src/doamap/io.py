"""File formats of the external interfaces: snapshot CSV, priors JSON.

Snapshot CSV layout: header `sensor,t,re,im`, one row per (sensor, time)
cell.  Noise-only snapshots carry t in {-M+1, ..., 0} and data snapshots
t in {1, ..., N}; sensors are numbered 0..m-1.  Every (sensor, t) pair must
appear exactly once.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .scenario import PriorSpec

SNAPSHOT_HEADER = ["sensor", "t", "re", "im"]


def save_snapshots(path, Y_bar: np.ndarray, Y: np.ndarray) -> None:
    """Write the noise-only block and the data block as one snapshot CSV."""
    Y_bar = np.asarray(Y_bar)
    Y = np.asarray(Y)
    if Y_bar.ndim != 2 or Y.ndim != 2 or Y_bar.shape[0] != Y.shape[0]:
        raise ValueError(
            f"blocks must share the sensor dimension, got {Y_bar.shape} and {Y.shape}"
        )
    m, M = Y_bar.shape
    N = Y.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SNAPSHOT_HEADER)
        for col in range(M):
            t = col - M + 1
            for sensor in range(m):
                v = Y_bar[sensor, col]
                writer.writerow([sensor, t, _fmt(v.real), _fmt(v.imag)])
        for col in range(N):
            for sensor in range(m):
                v = Y[sensor, col]
                writer.writerow([sensor, col + 1, _fmt(v.real), _fmt(v.imag)])


def load_snapshots(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a snapshot CSV back into (Y_bar, Y) complex matrices."""
    cells: dict[tuple[int, int], complex] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SNAPSHOT_HEADER:
            raise ValueError(
                f"expected snapshot header {','.join(SNAPSHOT_HEADER)!r}, "
                f"got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"line {lineno}: expected 4 fields, got {len(row)}")
            sensor, t = int(row[0]), int(row[1])
            key = (sensor, t)
            if key in cells:
                raise ValueError(f"line {lineno}: duplicate entry for sensor={sensor}, t={t}")
            cells[key] = complex(float(row[2]), float(row[3]))
    if not cells:
        raise ValueError("snapshot file holds no data rows")
    sensors = sorted({s for s, _ in cells})
    times = sorted({t for _, t in cells})
    m = sensors[-1] + 1
    if sensors != list(range(m)):
        raise ValueError(f"sensor indices must cover 0..{m - 1}, got {sensors}")
    M = 1 - times[0] if times[0] <= 0 else 0
    N = times[-1] if times[-1] >= 1 else 0
    if M < 1:
        raise ValueError("no noise-only snapshots (need rows with t <= 0)")
    expected = list(range(-M + 1, N + 1))
    if times != expected:
        missing = sorted(set(expected) - set(times))
        raise ValueError(f"missing snapshot times {missing[:10]}")
    Y_bar = np.zeros((m, M), dtype=np.complex128)
    Y = np.zeros((m, N), dtype=np.complex128)
    for (sensor, t), v in cells.items():
        if t <= 0:
            Y_bar[sensor, t + M - 1] = v
        else:
            Y[sensor, t - 1] = v
    if len(cells) != m * (M + N):
        raise ValueError(
            f"expected {m * (M + N)} cells for m={m}, M={M}, N={N}, got {len(cells)}"
        )
    return Y_bar, Y


def load_priors(path) -> tuple[tuple[PriorSpec, ...], float | None]:
    """Read a priors JSON document.

    Accepts either a bare list of {"mu_deg": ..., "kappa": ...} objects or
    an object {"priors": [...], "spacing": ...}; returns the priors (radians
    internally) and the optional sensor spacing.
    """
    with open(path) as fh:
        doc = json.load(fh)
    spacing = None
    if isinstance(doc, dict):
        if "priors" not in doc:
            raise ValueError('priors JSON object needs a "priors" list')
        spacing = doc.get("spacing")
        entries = doc["priors"]
    else:
        entries = doc
    if not isinstance(entries, list) or not entries:
        raise ValueError("priors JSON must hold a non-empty list of priors")
    priors = tuple(
        PriorSpec(mu=np.deg2rad(float(e["mu_deg"])), kappa=float(e.get("kappa", 0.0)))
        for e in entries
    )
    return priors, (float(spacing) if spacing is not None else None)


def save_complex_matrix(path, X: np.ndarray, row_field: str, col_field: str,
                        col_start: int = 0) -> None:
    """Write a complex matrix as rows of (row, col, re, im)."""
    X = np.asarray(X)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([row_field, col_field, "re", "im"])
        for i in range(X.shape[0]):
            for j in range(X.shape[1]):
                v = X[i, j]
                writer.writerow([i, j + col_start, _fmt(v.real), _fmt(v.imag)])


def _fmt(value: float) -> str:
    """Full round-trip precision for raw data files."""
    return "%.17g" % value
