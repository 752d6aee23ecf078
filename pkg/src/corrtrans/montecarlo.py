"""Seeded parallel Monte Carlo grid runs for rejection-rate calibration.

Each grid cell (alpha, rho, n) is simulated by K workers; worker k of cell c
uses a Philox substream keyed by an avalanche mix of (master_seed, c, k), so
results are bit-identical regardless of scheduling or process count.  All
transforms requested for a cell are evaluated on the same samples, as one
would do on a shared simulation budget.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import models as _models
from .pearson import Transform
from .specfun import normal_quantile

__all__ = [
    "ExperimentGrid",
    "CellResult",
    "mix64",
    "substream",
    "run_cell",
    "aggregate",
    "predicted_relative_error",
    "run_grid",
]

THREADS_ENV = "CORRTRANS_THREADS"
_CHUNK_PAIRS = 1 << 22  # fixed chunking policy keeps draws deterministic


def mix64(*parts: int) -> int:
    """Avalanche-mix a sequence of integers into one 64-bit seed."""
    h = 0x9E3779B97F4A7C15
    for part in parts:
        h ^= part & 0xFFFFFFFFFFFFFFFF
        # splitmix64 finalizer
        h = (h + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        h = ((h ^ (h >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        h = ((h ^ (h >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        h ^= h >> 31
    return h


def substream(master_seed: int, cell_index: int, worker_index: int
              ) -> np.random.Generator:
    """Counter-based generator for one (cell, worker) pair."""
    key = mix64(master_seed, cell_index, worker_index)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ExperimentGrid:
    """Full simulation request; table-scale runs used the defaults noted."""

    model: str                       # "bvn" or "squarev"
    alphas: tuple[float, ...]        # table scale: (0.01, 0.05)
    rhos: tuple[float, ...]          # table scale: (0, 0.1, 0.5, 0.9)
    ns: tuple[int, ...]              # table scale: (10, 100, 1000, 10000)
    N: int                           # samples per cell per worker; 10**6
    K: int = 12                      # workers per cell
    master_seed: int = 0
    transforms: tuple[str, ...] = ("identity", "fisher", "optimal")

    def __post_init__(self) -> None:
        if self.N < 1 or self.K < 1:
            raise ValueError("N and K must be >= 1")
        if any(not 0.0 < a < 0.5 for a in self.alphas):
            raise ValueError("all alphas must lie in (0, 0.5)")
        if any(n < 2 for n in self.ns):
            raise ValueError("all sample sizes must be >= 2")
        _models.get_model(self.model)
        for kind in self.transforms:
            if kind not in ("identity", "fisher", "optimal"):
                raise ValueError(f"unknown transform kind {kind!r}")

    def cells(self) -> list[tuple[float, float, int]]:
        return list(product(self.alphas, self.rhos, self.ns))


@dataclass(frozen=True)
class CellResult:
    """Aggregated rejection-rate estimates for one (transform, cell)."""

    alpha_hats: tuple[float, ...]    # one per worker
    eps_mean: float                  # mean of alpha_hat/alpha - 1
    eps_sd: float                    # sample sd over workers (nan if K = 1)
    eps_se: float                    # eps_sd / sqrt(K)


def _rejection_threshold(t: Transform, rho: float, sigma: float, n: int,
                         alpha: float) -> float:
    """Critical value r* such that tau > z_alpha iff R > r*.

    psi is strictly increasing, so the tau test inverts to a one-sided test
    on R itself; returns +inf when no attainable R rejects.
    """
    z_alpha = normal_quantile(1.0 - alpha)
    cut = t.psi(rho) + z_alpha * t.dpsi(rho) * sigma / math.sqrt(n)
    psi_top = t.psi(1.0)
    if cut >= psi_top:
        return math.inf
    lo, hi = -1.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if t.psi(mid) > cut:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _batch_r(model_name: str, rho: float, rows: int, n: int,
             rng: np.random.Generator) -> np.ndarray:
    """Pearson R for `rows` independent samples of size n; shape (rows,)."""
    if model_name == "bvn":
        y = rng.standard_normal((rows, n))
        y1 = rng.standard_normal((rows, n))
        z = rho * y + math.sqrt(1.0 - rho * rho) * y1
        sy = y.sum(axis=1)
        sz = z.sum(axis=1)
        syy = np.einsum("ij,ij->i", y, y)
        szz = np.einsum("ij,ij->i", z, z)
        syz = np.einsum("ij,ij->i", y, z)
    else:
        u = rng.random((rows, n))
        c0 = (1.0 + rho) / 4.0
        c2 = (3.0 - rho) / 4.0
        y = np.where(u < 0.5, 1.0, -1.0)
        z = np.where((u < c0) | ((u >= 0.5) & (u < c2)), 1.0, -1.0)
        sy = y.sum(axis=1)
        sz = z.sum(axis=1)
        syy = np.full(rows, float(n))
        szz = syy
        syz = np.einsum("ij,ij->i", y, z)
    my = sy / n
    mz = sz / n
    vy = syy / n - my * my
    vz = szz / n - mz * mz
    cov = syz / n - my * mz
    denom2 = np.maximum(vy, 0.0) * np.maximum(vz, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(denom2 > 0.0, cov / np.sqrt(denom2), 0.0)
    return np.clip(r, -1.0, 1.0)


def _cell_counts(model_name: str, thresholds: list[float], rho: float,
                 n: int, N: int, rng: np.random.Generator) -> list[int]:
    """Rejection counts for each threshold over N samples of size n."""
    rows_per_chunk = max(1, _CHUNK_PAIRS // n)
    counts = [0] * len(thresholds)
    done = 0
    while done < N:
        rows = min(rows_per_chunk, N - done)
        r = _batch_r(model_name, rho, rows, n, rng)
        for i, cut in enumerate(thresholds):
            if math.isfinite(cut):
                counts[i] += int(np.count_nonzero(r > cut))
        done += rows
    return counts


def run_cell(model: _models.DependenceModel, transform: Transform,
             alpha: float, rho: float, n: int, N: int,
             rng: np.random.Generator) -> float:
    """Rejection rate of tau > z_alpha over N samples of size n."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    sigma = model.sigma(rho)
    cut = _rejection_threshold(transform, rho, sigma, n, alpha)
    counts = _cell_counts(model.name, [cut], rho, n, N, rng)
    return counts[0] / N


def aggregate(alpha_hats: tuple[float, ...], alpha: float) -> CellResult:
    """Per-worker relative errors, their mean, sample sd, and standard error."""
    if len(alpha_hats) == 0:
        raise ValueError("need at least one worker estimate")
    eps = [a / alpha - 1.0 for a in alpha_hats]
    k = len(eps)
    mean = math.fsum(eps) / k
    if k == 1:
        return CellResult(tuple(alpha_hats), mean, math.nan, math.nan)
    var = math.fsum((e - mean) ** 2 for e in eps) / (k - 1)
    sd = math.sqrt(var)
    return CellResult(tuple(alpha_hats), mean, sd, sd / math.sqrt(k))


def predicted_relative_error(model: _models.DependenceModel, kind: str,
                             alpha: float, rho: float, n: int) -> float:
    """Second-order prediction -Delta(z_alpha)/(alpha sqrt(n)) of eps."""
    z_alpha = normal_quantile(1.0 - alpha)
    d = _models.delta_closed(model, kind, z_alpha, rho, z_ref=z_alpha)
    return -d / (alpha * math.sqrt(n))


def _worker_task(args: tuple) -> tuple[int, int, list[int]]:
    (model_name, cell_index, worker_index, master_seed,
     alpha, rho, n, N, transforms) = args
    model = _models.get_model(model_name)
    z_alpha = normal_quantile(1.0 - alpha)
    sigma = model.sigma(rho)
    cuts = []
    for kind in transforms:
        t = _models.transform_for(model, kind, z_alpha)
        cuts.append(_rejection_threshold(t, rho, sigma, n, alpha))
    rng = substream(master_seed, cell_index, worker_index)
    counts = _cell_counts(model_name, cuts, rho, n, N, rng)
    return cell_index, worker_index, counts


def worker_pool_width() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_grid(grid: ExperimentGrid
             ) -> dict[tuple[str, float, float, int], CellResult]:
    """Run every (cell, worker) substream; returns results keyed by
    (transform, alpha, rho, n).  Output is independent of scheduling."""
    cells = grid.cells()
    tasks = [
        (grid.model, ci, k, grid.master_seed, alpha, rho, n, grid.N,
         grid.transforms)
        for ci, (alpha, rho, n) in enumerate(cells)
        for k in range(grid.K)
    ]
    width = worker_pool_width()
    counts: dict[tuple[int, int], list[int]] = {}
    if width == 1 or len(tasks) == 1:
        for task in tasks:
            ci, k, c = _worker_task(task)
            counts[(ci, k)] = c
    else:
        with ProcessPoolExecutor(max_workers=width) as pool:
            for ci, k, c in pool.map(_worker_task, tasks, chunksize=1):
                counts[(ci, k)] = c
    results: dict[tuple[str, float, float, int], CellResult] = {}
    for ci, (alpha, rho, n) in enumerate(cells):
        for ti, kind in enumerate(grid.transforms):
            hats = tuple(counts[(ci, k)][ti] / grid.N for k in range(grid.K))
            results[(kind, alpha, rho, n)] = aggregate(hats, alpha)
    return results
