"""Row-oriented datasets behind the CLI commands and the five figures.

Every builder returns a list of dicts whose keys follow ``schemas.json``.
Sweeps run over a thread pool capped by ``BOPSHOX_THREADS``; rows are
always assembled in input order so output is deterministic.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from . import analysis, bo, exact, phasespace
from .errors import SchemaMismatch, ValidationError
from .params import StateIndex, SystemParams

FIG3_DELTAS = np.round(np.arange(0, 200) * 0.005, 12)  # 0 .. 0.995
SWEEP_DELTAS = np.round(np.arange(0, 100) * 0.01, 12)  # 0 .. 0.99


def load_schemas() -> dict:
    text = resources.files(__package__).joinpath("schemas.json").read_text()
    return json.loads(text)


SCHEMAS = load_schemas()


def validate_rows(name: str, rows: list[dict]) -> None:
    """Check rows against the checked-in descriptor before anything is written."""
    try:
        columns = SCHEMAS[name]["columns"]
    except KeyError:
        raise SchemaMismatch(f"no schema named {name!r}") from None
    for i, row in enumerate(rows):
        if list(row) != columns:
            raise SchemaMismatch(f"{name} row {i}: columns {list(row)} != {columns}")
        for key, value in row.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SchemaMismatch(f"{name} row {i}: {key}={value!r} is not a number")
            if not math.isfinite(value):
                raise SchemaMismatch(f"{name} row {i}: {key}={value!r} is not finite")


def thread_cap() -> int:
    raw = os.environ.get("BOPSHOX_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"BOPSHOX_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"BOPSHOX_THREADS must be a positive integer, got {raw!r}")
    return value


def _pmap(func, items):
    items = list(items)
    workers = min(thread_cap(), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def parse_sweep(text: str) -> np.ndarray:
    """``start:stop:step`` with stop included when it lands on the grid."""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise ValidationError(f"sweep must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise ValidationError(f"bad sweep {text!r}: need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = np.round(start + step * np.arange(count), 12)
    if np.any(np.abs(values) >= 1.0):
        raise ValidationError(f"sweep {text!r} leaves the coupling range |delta| < 1")
    return values


def _states(nmax, lmax):
    return [StateIndex(n, l) for n in range(nmax + 1) for l in range(lmax + 1)]


def exact_rows(p: SystemParams, nmax=5):
    return [{"n": s.n, "l": s.l, "E": exact.exact_energy(p, s)} for s in _states(nmax, nmax)]


def bo_rows(p: SystemParams, nmax=5):
    w1, w2 = bo.omega1_tilde(p), bo.omega2_tilde(p)
    return [{"n": s.n, "l": s.l, "E_bo": bo.bo_energy(p, s), "omega1_tilde": w1,
             "omega2_tilde": w2, "beta_nn": bo.beta_diag(s.n, p)}
            for s in _states(nmax, nmax)]


def shoot_rows(p: SystemParams, states, tol=1e-10):
    def one(s):
        E, traj = phasespace.shoot_eigenvalue(s.n, s.l, p, tol=tol, return_trajectory=True)
        closed = bo.bo_energy(p, s)
        return {"n": s.n, "l": s.l, "E_shoot": E, "E_closed": closed,
                "rel_err": (E - closed) / closed, "nodes": traj.node_count}
    return _pmap(one, states)


def error_rows(p: SystemParams, nmax=10):
    rows = []
    for s in _states(nmax, nmax):
        E, Et = exact.exact_energy(p, s), bo.bo_energy(p, s)
        rows.append({"n": s.n, "l": s.l, "E": E, "E_bo": Et, "eps_bo": (Et - E) / E})
    return rows


def overlap_rows(p: SystemParams, states, K=80, check=True):
    def one(s):
        r = analysis.overlap_sigma(p, s, K=K, check=check)
        return {"n": s.n, "l": s.l, "sigma": r.sigma, "sigma_err": r.error_estimate}
    return _pmap(one, states)


def _flat(prefix, A):
    return {f"{prefix}{i + 1}{j + 1}": float(A[i, j]) for i in range(2) for j in range(2)}


def qu_rows(p: SystemParams, deltas=None):
    deltas = [p.delta] if deltas is None else deltas
    rows = []
    for d in deltas:
        q = p.replace(delta=float(d))
        f = analysis.qu_decompose(q)
        row = {"delta": float(d)}
        row.update(_flat("Q", f.Q))
        row.update(_flat("U", f.U))
        row.update(_flat("Ut", f.U_tilde))
        row.update(_flat("Gt", bo.g_tilde(q)))
        row["deviation"] = f.deviation
        rows.append(row)
    return rows


def figure1_rows(grid=400):
    """Sign map of ``eps_omega`` and the region polynomial on the open unit square."""
    axis = (np.arange(grid) + 0.5) / grid
    D, W = np.meshgrid(axis, axis, indexing="ij")
    B = analysis.region_B(D, W)
    e = analysis.eps_omega(D, W)
    rows = []
    for d, w, b, ew in zip(D.ravel(), W.ravel(), B.ravel(), e.ravel()):
        rows.append({"delta": float(d), "Omega_bar": float(w), "B": float(b),
                     "sign": int(np.sign(b)), "eps_omega": float(ew),
                     "sign_eps_omega": int(np.sign(ew))})
    return rows


def figure2_rows(p: SystemParams, top=10.0, points=41):
    """Relative error on a refined real-valued (n, l) lattice."""
    axis = np.linspace(0.0, top, points)
    rows = []
    for n in axis:
        eps = analysis.relative_error(p.delta, p.Omega_bar, n, axis)
        for l, e in zip(axis, eps):
            rows.append({"n": float(n), "l": float(l), "eps_bo": float(e)})
    return rows


def figure3_rows(p: SystemParams, deltas=FIG3_DELTAS, nmax=5, K=80):
    states = _states(nmax, nmax)

    def one(d):
        q = p.replace(delta=float(d))
        out = []
        for s in states:
            r = analysis.overlap_sigma(q, s, K=K, check=False)
            out.append({"delta": float(d), "n": s.n, "l": s.l,
                        "sigma": r.sigma, "sigma_err": r.error_estimate})
        return out

    return [row for chunk in _pmap(one, deltas) for row in chunk]


def figure4_rows(p: SystemParams, deltas=SWEEP_DELTAS):
    rows = []
    for d in deltas:
        q = p.replace(delta=float(d))
        row = {"delta": float(d)}
        row.update(_flat("G", exact.g_matrix(q)))
        row.update(_flat("Gt", bo.g_tilde(q)))
        rows.append(row)
    return rows


def figure5_rows(p: SystemParams, deltas=SWEEP_DELTAS):
    rows = []
    for d in deltas:
        q = p.replace(delta=float(d))
        row = {"delta": float(d)}
        row.update(_flat("Gt", bo.g_tilde(q)))
        row.update(_flat("Ut", analysis.qu_decompose(q).U_tilde))
        rows.append(row)
    return rows
