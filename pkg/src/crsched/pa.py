"""Offline power re-allocation under cumulative energy budgets.

Maximizes ``sum_n beta_n * log(alpha_n P[n] + 1)`` subject to
``P >= 0`` and ``sum_{n<=l} P[n] tau <= Ea0 + sum_{n<l} Ea[n]`` for every
prefix ``l``. Slots are added one at a time; each newly arrived energy quantum
is water-filled over a trailing window ``[r..k]`` that grows backwards until the
window's water level is no lower than the level of the last powered slot
before it. Energy therefore only ever moves forward in time.

The weighted water level of a slot is ``P[n]/beta_n + gamma_n`` with
``gamma_n = 1/(alpha_n beta_n)``; on the powered support of a window it is
common to all slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import ScenarioConfig, Schedule, simulate

__all__ = [
    "WeightedSlots",
    "WaterfillResult",
    "PAStages",
    "compute_weights",
    "waterfill_window",
    "power_reallocation",
    "pa_allocate",
    "pa_objective",
    "water_levels",
]


@dataclass(frozen=True)
class WeightedSlots:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __len__(self):
        return len(self.alpha)

    def window(self, r: int, k: int) -> "WeightedSlots":
        """Slots ``r..k`` inclusive (0-based)."""
        s = slice(r, k + 1)
        return WeightedSlots(self.alpha[s], self.beta[s], self.gamma[s])


@dataclass(frozen=True)
class WaterfillResult:
    """Allocation of a budget over one window.

    ``q_star`` is the window position (time order) of the powered slot with the
    largest base level; ``level`` is the common water level of the support.
    """

    P: np.ndarray
    q_star: int
    level: float


@dataclass(frozen=True)
class PAStages:
    stages: list[np.ndarray]
    window_starts: list[int]

    @property
    def final(self) -> np.ndarray:
        return self.stages[-1]


def _weights(alpha) -> WeightedSlots:
    alpha = np.asarray(alpha, dtype=float)
    N = len(alpha)
    beta = (N - np.arange(N)) / N
    return WeightedSlots(alpha, beta, 1.0 / (alpha * beta))


def compute_weights(cfg: ScenarioConfig) -> WeightedSlots:
    return _weights(cfg.snr)


def _fill(beta: list[float], gamma: list[float], budget: float) -> tuple[list[float], int, float]:
    """Segment walk over the window sorted by base level.

    Raises the level from the lowest ``gamma`` upward, absorbing one slot per
    segment, until the budget runs out or the window is exhausted.
    """
    m = len(gamma)
    order = sorted(range(m), key=gamma.__getitem__)
    g = [gamma[i] for i in order]
    delta = 0.0
    p_m = p_star = budget
    q = 0
    while True:
        delta += beta[order[q]]
        nxt = g[q + 1] if q + 1 < m else math.inf
        p_star -= (nxt - g[q]) * delta
        q += 1
        if p_star > 0 and q < m:
            p_m = p_star
            continue
        break
    qs = q - 1
    level = g[qs] + p_m / delta
    P = [0.0] * m
    for j in range(qs + 1):
        i = order[j]
        P[i] = (level - gamma[i]) * beta[i]
    return P, order[qs], level


def waterfill_window(slots: WeightedSlots, budget: float) -> WaterfillResult:
    """Spend exactly ``budget`` over ``slots`` to maximize the weighted log sum."""
    if budget < 0:
        raise DomainError(f"budget must be non-negative, got {budget!r}")
    if len(slots) == 0:
        raise ValueError("empty window")
    P, q_star, level = _fill(list(slots.beta), list(slots.gamma), float(budget))
    return WaterfillResult(np.array(P), q_star, level)


def power_reallocation(alpha, Ea0: float, Ea, tau: float = 1.0) -> PAStages:
    """Run the staged re-allocation and keep every intermediate allocation.

    ``stages[k]`` is the optimal allocation over the first ``k+1`` slots;
    ``window_starts[k]`` the first slot of the window that absorbed the arrival
    (0 for the first stage).
    """
    w = _weights(alpha)
    beta, gamma = w.beta.tolist(), w.gamma.tolist()
    N = len(beta)
    alloc = [Ea0 / tau]
    stages = [np.array(alloc)]
    starts = [0]
    for k in range(1, N):
        prev = alloc
        arrival = Ea[k - 1] / tau
        for r in range(k, -1, -1):
            budget = sum(prev[r:k]) + arrival
            P, qs, level = _fill(beta[r : k + 1], gamma[r : k + 1], budget)
            q_e = next((q for q in range(r - 1, -1, -1) if prev[q] > 0), None)
            # nothing powered before r: pulling earlier slots in cannot help
            if q_e is None or level >= prev[q_e] / beta[q_e] + gamma[q_e]:
                break
        alloc = prev[:r] + P
        stages.append(np.array(alloc))
        starts.append(r)
    return PAStages(stages, starts)


def pa_allocate(cfg: ScenarioConfig) -> Schedule:
    """Offline re-allocation for ``cfg``.

    Rates are not clamped to the queue, so the queue trajectory can go negative
    and the objective is a lower bound on the achievable average buffer. The
    clamped roll-out is attached as ``meta["clamped"]`` for diagnostics.
    """
    st = power_reallocation(cfg.snr, cfg.Ea0, cfg.Ea, cfg.tau)
    sched = simulate(cfg, st.final, label="pa")
    sched.meta["stages"] = st.stages
    sched.meta["window_starts"] = st.window_starts
    sched.meta["clamped"] = simulate(cfg, st.final, label="pa-clamped", clamp=True)
    return sched


def pa_objective(cfg: ScenarioConfig, schedule: Schedule) -> float:
    """Average buffer length of the unclamped roll-out (the lower bound)."""
    return simulate(cfg, schedule.P).objective


def water_levels(slots: WeightedSlots, P) -> np.ndarray:
    """Per-slot ``P/beta + gamma``."""
    return np.asarray(P, dtype=float) / slots.beta + slots.gamma
