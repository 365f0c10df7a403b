"""Brute-force reference solvers for tiny horizons.

These deliberately share nothing with the allocators they check beyond the
model's dynamics: the relaxed oracle enumerates prefix sums of the power vector
on a grid, the full oracle walks a tree of per-slot power choices recomputing
the state-dependent caps along every branch, and the window water-filler
bisects on the water level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OracleRefusal
from .model import ScenarioConfig, Schedule, simulate, snr_inverse_rate, snr_rate
from .pa import WaterfillResult, WeightedSlots

__all__ = [
    "GridSpec",
    "grid_optimal_relaxed",
    "grid_optimal_full",
    "bisection_waterfill",
    "grid_loss_bound",
]


@dataclass(frozen=True)
class GridSpec:
    resolution: float = 1e-2
    max_N: int = 3

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        if not 1 <= self.max_N <= 4:
            raise ValueError("max_N must lie in 1..4")

    def check(self, cfg: ScenarioConfig):
        if cfg.N > self.max_N:
            raise OracleRefusal(f"horizon N={cfg.N} exceeds oracle limit {self.max_N}")


def grid_loss_bound(cfg: ScenarioConfig, grid: GridSpec) -> float:
    """Worst-case objective loss from snapping each slot's power to the grid.

    Every optimum is within one grid step per slot of an enumerated point, and
    each slot's weighted rate has slope at most ``beta_n alpha_n / ln(base)``.
    """
    beta = (cfg.N - np.arange(cfg.N)) / cfg.N
    return float(grid.resolution * np.sum(beta * cfg.snr) / math.log(cfg.log_base))


def _expand(lo: np.ndarray, hi: np.ndarray, res: float) -> tuple[np.ndarray, np.ndarray]:
    """Children of every frontier node: ``lo``, grid multiples in (lo, hi), ``hi``.

    Returns (parent index, value) arrays.
    """
    first = np.floor(lo / res) + 1
    last = np.ceil(hi / res) - 1
    inner = np.maximum(last - first + 1, 0).astype(np.int64)
    same = hi <= lo
    counts = np.where(same, 1, inner + 2)
    parent = np.repeat(np.arange(len(lo)), counts)
    starts = np.cumsum(counts) - counts
    pos = np.arange(parent.size) - starts[parent]
    c = counts[parent]
    vals = np.where(
        pos == 0,
        lo[parent],
        np.where(pos == c - 1, hi[parent], (first[parent] + pos - 1) * res),
    )
    return parent, np.clip(vals, lo[parent], hi[parent])


def _pick(paths: np.ndarray, score: np.ndarray) -> int:
    """Index of the best (lowest) score, ties broken by the smallest path."""
    keys = [paths[:, j] for j in range(paths.shape[1] - 1, -1, -1)] + [score]
    return int(np.lexsort(keys)[0])


def grid_optimal_relaxed(cfg: ScenarioConfig, grid: GridSpec = GridSpec()) -> tuple[Schedule, float]:
    """Best weighted throughput under cumulative energy budgets only.

    The last prefix sum is pinned to the full budget, since the objective
    increases in every slot's power. Returns the schedule (whose objective is
    the corresponding average-buffer lower bound) and the weighted utility.
    """
    grid.check(cfg)
    res = grid.resolution / cfg.tau
    cum = (cfg.Ea0 + np.concatenate([[0.0], np.cumsum(cfg.Ea[:-1])])) / cfg.tau
    alpha = cfg.snr
    beta = (cfg.N - np.arange(cfg.N)) / cfg.N

    prefix = np.zeros(1)
    paths = np.zeros((1, 0))
    for n in range(cfg.N):
        lo = prefix
        if n == cfg.N - 1:
            parent, s = np.arange(len(lo)), np.full(len(lo), cum[n])
        else:
            parent, s = _expand(lo, np.full(len(lo), cum[n]), res)
        paths = np.column_stack([paths[parent], s - lo[parent]])
        prefix = s
    paths = np.maximum(paths, 0.0)
    util = (np.log1p(paths * alpha) * beta).sum(axis=1) / math.log(cfg.log_base)
    best = _pick(paths, -util)
    P = paths[best]
    sched = simulate(cfg, P, label="oracle-relaxed")
    return sched, float(util[best])


def grid_optimal_full(cfg: ScenarioConfig, grid: GridSpec = GridSpec()) -> tuple[Schedule, float]:
    """Minimal average buffer length under the per-slot merged caps.

    Each branch carries its own battery and queue, so the queue-dependent cap is
    re-evaluated along the branch. In the last slot only the cap itself is
    tried: nothing follows it, so more rate is never worse.
    """
    grid.check(cfg)
    res = grid.resolution
    alpha = cfg.snr
    if not cfg.has_isr:
        isr = np.full(cfg.N, math.inf)
    else:
        g21 = np.asarray(cfg.g21)
        with np.errstate(divide="ignore"):
            isr = np.where(g21 > 0, cfg.rho * cfg.P0 * np.asarray(cfg.g11) / g21, math.inf)

    E = np.array([cfg.Ea0])
    Q = np.array([cfg.Q0])
    qsum = np.array([cfg.Q0])
    paths = np.zeros((1, 0))
    for n in range(cfg.N):
        qcap = snr_inverse_rate(np.maximum(Q, 0.0), alpha[n], cfg.log_base)
        cap = np.minimum(np.minimum(np.maximum(E, 0.0) / cfg.tau, isr[n]), qcap)
        if n == cfg.N - 1:
            parent, p = np.arange(len(cap)), cap
        else:
            parent, p = _expand(np.zeros(len(cap)), cap, res)
        r = snr_rate(p, alpha[n], cfg.log_base)
        E = E[parent] - p * cfg.tau + cfg.Ea[n]
        Q = Q[parent] - r + cfg.Da[n]
        qsum = qsum[parent] + Q
        paths = np.column_stack([paths[parent], p])
    score = qsum / cfg.N
    best = _pick(paths, score)
    sched = simulate(cfg, paths[best], label="oracle-full")
    return sched, float(sched.objective)


def bisection_waterfill(slots: WeightedSlots, budget: float, tol: float = 1e-10) -> WaterfillResult:
    """Window water-filling by bisection on the common level."""
    if budget < 0:
        raise DomainError(f"budget must be non-negative, got {budget!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    beta = np.asarray(slots.beta, dtype=float)
    gamma = np.asarray(slots.gamma, dtype=float)

    def spend(level):
        return np.maximum(beta * (level - gamma), 0.0)

    lo = float(gamma.min())
    hi = lo + budget / float(beta.min())
    level = lo
    for _ in range(500):
        level = 0.5 * (lo + hi)
        gap = spend(level).sum() - budget
        if abs(gap) <= tol or hi - lo <= 4 * np.spacing(hi):
            break
        if gap > 0:
            hi = level
        else:
            lo = level
    if budget == 0:
        level = float(gamma.min())
    P = spend(level)
    powered = np.flatnonzero(P > 0)
    q_star = int(powered[np.argmax(gamma[powered])]) if powered.size else int(np.argmin(gamma))
    return WaterfillResult(P, q_star, float(level))
