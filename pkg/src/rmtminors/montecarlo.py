"""Replication harness for the centered extreme statistics.

Every (cell, replication) pair draws from its own stream, derived as
seed -> cell index -> replication index, so the report does not depend on
how replications are scheduled across workers.  Aggregates use
``math.fsum`` in cell/replication order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from ._backend import BACKEND
from .asymptotics import (KAPPA, optimize_mdp_bound, optimize_moderate_bound,
                          predict_extreme, wigner_lambda1_tail_bound)
from .ensembles import EnsembleSpec, sample
from .errors import CapacityError, DomainError, InputError
from .minors import ENUMERATION_LIMIT, STRATEGIES, max_minor_lambda1, min_minor_lambdam
from .rng import GENERATOR, RngStream, derive_stream
from .special import chi2_cdf, norm_cdf

__all__ = [
    "ExperimentConfig", "CellReport", "ExperimentReport", "run_extreme_experiment",
    "truncated_exp_moment", "integral_identity_check", "convergence_diagnostics",
    "trend_table", "closed_form_cdf_m1", "ks_distance", "summarize",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """One ensemble, one block size m, a grid of (n, p) cells.

    For Wigner cells ``n`` is ignored and may be None.
    """

    ensemble: str
    m: int
    grid: Tuple[Tuple[Optional[int], int], ...]
    reps: int
    seed: int = 0
    strategy: str = "branch_and_bound"
    eta: float = 2.0
    alpha_list: Tuple[float, ...] = (0.5, 1.0)
    delta_list: Tuple[float, ...] = (0.5, 1.0, 3.0)
    t_list: Tuple[float, ...] = (1.0, 2.0, 3.0)
    kappa: float = KAPPA

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(
            (None if n is None else int(n), int(p)) for n, p in self.grid))
        for name in ("alpha_list", "delta_list", "t_list"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if self.ensemble not in ("wishart", "wigner"):
            raise InputError(f"unknown ensemble {self.ensemble!r}")
        if self.strategy not in STRATEGIES:
            raise InputError(f"unknown strategy {self.strategy!r}")
        if int(self.m) != self.m or self.m < 1:
            raise InputError("m must be a positive integer")
        if int(self.reps) != self.reps or self.reps < 1:
            raise InputError("reps must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        if not self.grid:
            raise InputError("grid must contain at least one (n, p) cell")
        if any(a <= 0 for a in self.alpha_list) or any(d <= 0 for d in self.delta_list):
            raise InputError("alpha and delta values must be positive")
        if any(t <= 0 for t in self.t_list):
            raise InputError("tail offsets t must be positive")
        if not self.kappa > 0:
            raise InputError("kappa must be positive")
        for n, p in self.grid:
            if p < 2:
                raise InputError(f"cell (n={n}, p={p}): need p >= 2")
            if self.m > p:
                raise InputError(f"cell (n={n}, p={p}): need m <= p")
            if self.ensemble == "wishart" and (n is None or n < 1):
                raise InputError(f"cell (n={n}, p={p}): wishart cells need n >= 1")
            EnsembleSpec(self.ensemble, p=p, n=n, eta=self.eta)

    def spec(self, cell: int) -> EnsembleSpec:
        n, p = self.grid[cell]
        return EnsembleSpec(self.ensemble, p=p, n=n, eta=self.eta)

    def to_dict(self) -> dict:
        return {
            "ensemble": self.ensemble, "m": int(self.m),
            "grid": [[n, p] for n, p in self.grid], "reps": int(self.reps),
            "seed": int(self.seed), "strategy": self.strategy, "eta": float(self.eta),
            "alpha_list": list(self.alpha_list), "delta_list": list(self.delta_list),
            "t_list": list(self.t_list), "kappa": float(self.kappa),
        }


@dataclass
class CellReport:
    ensemble: str
    n: Optional[int]
    p: int
    m: int
    eta: float
    reps: int
    samples: Dict[str, np.ndarray]      # side -> raw statistic (T or V) per replication
    z: Dict[str, np.ndarray]            # side -> centered statistic
    ratio: Dict[str, np.ndarray]        # side -> statistic over its predicted scale
    stats: Dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "m": self.m, "reps": self.reps, "sides": self.stats}


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    cells: List[CellReport]
    wall_time: Optional[float] = None

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "config": self.config.to_dict(),
            "generator": GENERATOR,
            "backend": BACKEND,
            "version": __version__,
            "cells": [c.to_dict() for c in self.cells],
        }
        if include_timing and self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(_clean(self.to_dict(include_timing)), indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        # metric keys such as "alpha=0.5,delta=1.0" contain commas; let csv quote them
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cell", "n", "p", "m", "side", "metric", "value"])
        for i, c in enumerate(self.cells):
            for side, tree in c.stats.items():
                for key, val in _flatten(tree):
                    n = "" if c.n is None else str(c.n)
                    w.writerow([i, n, c.p, c.m, side, key, _csv_value(val)])
        return buf.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _flatten(tree, prefix=""):
    for k, v in tree.items():
        key = f"{prefix}.{k}" if prefix else k
        if isinstance(v, dict):
            yield from _flatten(v, key)
        else:
            yield key, v


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# -- diagnostics ---------------------------------------------------------------

def _as_samples(samples) -> np.ndarray:
    z = np.asarray(samples, dtype=np.float64).ravel()
    if z.size == 0:
        raise InputError("empty sample")
    return z


def truncated_exp_moment(samples, alpha: float, delta: float) -> float:
    """(1/N) sum exp(alpha |z|) 1{|z| >= delta}."""
    if not (alpha > 0 and delta > 0):
        raise InputError("alpha and delta must be positive")
    a = np.abs(_as_samples(samples))
    return math.fsum(np.exp(alpha * a[a >= delta])) / a.size


def integral_identity_check(samples, alpha: float, delta: float) -> float:
    """|LHS - RHS| of E[e^{aZ} 1{Z>=d}] = e^{ad} P(Z>=d) + a int_d^inf e^{at} P(Z>t) dt.

    Both sides use the empirical law of ``samples``; P(Z > t) is a step
    function, so the integral is summed exactly over the gaps between
    consecutive order statistics above ``delta``.
    """
    if not (alpha > 0 and delta > 0):
        raise InputError("alpha and delta must be positive")
    z = _as_samples(samples)
    if np.any(z < 0):
        raise InputError("samples must be nonnegative")
    N = z.size
    lhs = math.fsum(np.exp(alpha * z[z >= delta])) / N
    s = np.sort(z)
    above = s[s > delta]
    knots = np.concatenate(([delta], above))
    # on (knots[j], knots[j+1]) exactly len(above) - j samples exceed t
    counts = above.size - np.arange(above.size)
    ek = np.exp(alpha * knots)
    integral = math.fsum(counts * (ek[1:] - ek[:-1])) / N
    rhs = math.exp(alpha * delta) * np.count_nonzero(z >= delta) / N + integral
    return abs(lhs - rhs)


def summarize(x) -> dict:
    x = _as_samples(x)
    mean = math.fsum(x) / x.size
    med = float(np.median(x))
    return {
        "mean": mean,
        "median": med,
        "variance": math.fsum((x - mean) ** 2) / x.size,
        "min": float(x.min()),
        "max": float(x.max()),
        "mad": float(np.median(np.abs(x - med))),
    }


def closed_form_cdf_m1(ensemble: str, x: float, p: int, n: Optional[int] = None) -> float:
    """CDF of the max of p i.i.d. diagonal entries: the m = 1 extreme statistic."""
    if int(p) != p or p < 1:
        raise InputError("p must be a positive integer")
    if ensemble == "wigner":
        return norm_cdf(x / math.sqrt(2.0)) ** p
    if ensemble == "wishart":
        if n is None or int(n) != n or n < 1:
            raise InputError("wishart needs a positive integer n")
        if x < 0:
            raise DomainError("wishart CDF needs x >= 0")
        return chi2_cdf(x, n) ** p
    raise InputError(f"unknown ensemble {ensemble!r}")


def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov sup distance between the empirical CDF and ``cdf``."""
    x = np.sort(_as_samples(samples))
    N = x.size
    F = np.array([cdf(v) for v in x])
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - F), np.max(F - (i - 1) / N)))


def _moments(absz, alphas, deltas):
    N = absz.size
    out = {}
    for a in alphas:
        out[f"alpha={a!r}"] = {
            "exp": math.fsum(np.exp(a * absz)) / N,
            "power": math.fsum(absz ** a) / N,
        }
    trunc = {}
    ident = []
    for a in alphas:
        for d in deltas:
            trunc[f"alpha={a!r},delta={d!r}"] = truncated_exp_moment(absz, a, d)
            ident.append(integral_identity_check(absz, a, d))
    tail = {f"delta={d!r}": np.count_nonzero(absz >= d) / N for d in deltas}
    return out, trunc, tail, max(ident)


def _tail_rows(cfg: ExperimentConfig, n, p, side, z):
    """Exceedance frequency of the standardized statistic beyond location + t, against a union bound."""
    m = cfg.m
    rows = {}
    for t in cfg.t_list:
        hits = np.count_nonzero(z >= t) if side == "max" else np.count_nonzero(z <= -t)
        bound = None
        try:
            if cfg.ensemble == "wigner":
                x = abs(predict_extreme("wigner", side, m, p, eta=cfg.eta)) + t
                if cfg.eta == 2.0:
                    lb = m * math.log(p) + wigner_lambda1_tail_bound(x, m, cfg.kappa)
                else:
                    lb = m * math.log(p) + math.log(optimize_mdp_bound(x, m, cfg.eta)[2])
            else:
                y = (2.0 * math.sqrt(m * math.log(p)) + t) / math.sqrt(n)
                opt = optimize_moderate_bound(y, n, m, cfg.kappa,
                                              "upper" if side == "max" else "lower")
                lb = None if opt is None else m * math.log(p) + opt[2]
            if lb is not None:
                bound = 1.0 if lb >= 0 else math.exp(lb)
        except DomainError:
            bound = None
        freq = hits / z.size
        rows[f"t={t!r}"] = {
            "count": int(hits), "frequency": freq, "bound": bound,
            "within_bound": None if bound is None else bool(freq <= bound),
        }
    return rows


def _side_stats(cfg, cell: CellReport, side):
    z = cell.z[side]
    absz = np.abs(z)
    moments, trunc, tail, ident = _moments(absz, cfg.alpha_list, cfg.delta_list)
    return {
        "statistic": summarize(cell.samples[side]),
        "z": summarize(z),
        "ratio": summarize(cell.ratio[side]),
        "moments": moments,
        "truncated_exp_moment": trunc,
        "tail_prob": tail,
        "integral_identity_residual": ident,
        "tails": _tail_rows(cfg, cell.n, cell.p, side, z),
    }


# -- the experiment ------------------------------------------------------------

def _check_capacity(cfg: ExperimentConfig):
    if cfg.strategy != "enumerate":
        return
    for n, p in cfg.grid:
        if math.comb(p, cfg.m) > ENUMERATION_LIMIT:
            raise CapacityError(
                f"cell (n={n}, p={p}, m={cfg.m}): C(p, m) = {math.comb(p, cfg.m)} exceeds the "
                f"enumeration limit; use strategy 'branch_and_bound'")


def _one_rep(cfg: ExperimentConfig, cell: int, rep: int):
    root = RngStream(int(cfg.seed), 0)
    stream = derive_stream(derive_stream(root, cell), rep)
    A = sample(cfg.spec(cell), stream)
    hi = max_minor_lambda1(A, cfg.m, cfg.strategy).value
    lo = min_minor_lambdam(A, cfg.m, cfg.strategy).value
    return hi, lo


def _center(cfg, n, p, raw_hi, raw_lo):
    m = cfg.m
    if cfg.ensemble == "wishart":
        rn = math.sqrt(n)
        scale = 2.0 * math.sqrt(m * math.log(p))
        s_hi = (raw_hi - n) / rn
        s_lo = (raw_lo - n) / rn
        return s_hi - scale, s_lo + scale, s_hi / scale, s_lo / -scale
    loc = predict_extreme("wigner", "max", m, p, eta=cfg.eta)
    return raw_hi - loc, raw_lo + loc, raw_hi / loc, raw_lo / -loc


def run_extreme_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """Sample every cell ``reps`` times and aggregate the max and min statistics."""
    if int(workers) != workers or workers < 1:
        raise InputError("workers must be a positive integer")
    _check_capacity(config)
    start = time.perf_counter()
    jobs = [(c, r) for c in range(len(config.grid)) for r in range(config.reps)]
    if workers == 1:
        results = [_one_rep(config, c, r) for c, r in jobs]
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            results = list(pool.map(lambda job: _one_rep(config, *job), jobs))
    cells = []
    for c, (n, p) in enumerate(config.grid):
        block = results[c * config.reps:(c + 1) * config.reps]
        hi = np.array([b[0] for b in block])
        lo = np.array([b[1] for b in block])
        z_hi, z_lo, r_hi, r_lo = _center(config, n, p, hi, lo)
        cell = CellReport(config.ensemble, n, p, config.m, config.eta, config.reps,
                          {"max": hi, "min": lo}, {"max": z_hi, "min": z_lo},
                          {"max": r_hi, "min": r_lo})
        cell.stats = {side: _side_stats(config, cell, side) for side in ("max", "min")}
        cells.append(cell)
    return ExperimentReport(config, cells, time.perf_counter() - start)


# -- convergence trends --------------------------------------------------------

_LIMITS = {"exp_moment": 1.0, "power_moment": 0.0, "variance": 0.0, "tail_prob": 0.0,
           "median_abs_z": 0.0}


def trend_table(p_values: Sequence[float], z_samples: Sequence, alpha: float,
                delta: float) -> dict:
    """Convergence diagnostics per p with advisory trend flags.

    A flag is ``monotone`` when the distance to the limit never grows from
    one p to the next, and ``endpoint`` when the last p is strictly closer
    than the first.
    """
    if len(p_values) != len(z_samples):
        raise InputError("need one sample vector per p")
    if len(p_values) < 2:
        raise InputError("need at least two cells")
    if not (alpha > 0 and delta > 0):
        raise InputError("alpha and delta must be positive")
    order = np.argsort(np.asarray(p_values, dtype=float), kind="stable")
    rows = []
    for i in order:
        a = np.abs(_as_samples(z_samples[i]))
        z = _as_samples(z_samples[i])
        mean = math.fsum(z) / z.size
        rows.append({
            "p": p_values[i],
            "exp_moment": math.fsum(np.exp(alpha * a)) / a.size,
            "power_moment": math.fsum(a ** alpha) / a.size,
            "variance": math.fsum((z - mean) ** 2) / z.size,
            "tail_prob": np.count_nonzero(a >= delta) / a.size,
            "median_abs_z": float(np.median(a)),
        })
    flags = {}
    for key, lim in _LIMITS.items():
        dist = [abs(r[key] - lim) for r in rows]
        flags[key] = {
            "monotone": all(b <= a for a, b in zip(dist, dist[1:])),
            "endpoint": dist[-1] < dist[0],
        }
    return {"alpha": alpha, "delta": delta, "rows": rows, "flags": flags}


def convergence_diagnostics(cells: Sequence[CellReport], alpha: float, delta: float = 1.0,
                            side: str = "max") -> dict:
    if len(cells) < 2:
        raise InputError("need at least two cells varying p")
    first = cells[0]
    for c in cells[1:]:
        if (c.ensemble, c.m, c.n, c.eta) != (first.ensemble, first.m, first.n, first.eta):
            raise InputError("cells must share ensemble, m, n and eta")
    if side not in ("max", "min"):
        raise InputError("side must be 'max' or 'min'")
    return trend_table([c.p for c in cells], [c.z[side] for c in cells], alpha, delta)
