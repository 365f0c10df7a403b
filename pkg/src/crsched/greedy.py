"""Online greedy allocation: spend up to the tightest cap in every slot."""

from __future__ import annotations

import numpy as np

from .model import (
    ConstraintProfile,
    ScenarioConfig,
    Schedule,
    SlotCaps,
    isr_cap,
    merged_caps,
    objective,
    snr_rate,
    step,
)

__all__ = ["greedy_allocate", "greedy_allocate_relaxed", "lemma2_condition", "isr_rate"]


def _run(cfg: ScenarioConfig, relaxed: bool, label: str) -> tuple[Schedule, ConstraintProfile]:
    state = cfg.initial_state
    P = np.zeros(cfg.N)
    R = np.zeros(cfg.N)
    Q = np.empty(cfg.N + 1)
    E = np.empty(cfg.N + 1)
    caps: list[SlotCaps] = []
    alpha = cfg.snr
    for n in range(cfg.N):
        Q[n], E[n] = state.Q, state.E
        c = merged_caps(state, n, cfg, relaxed=relaxed)
        caps.append(c)
        P[n] = c.merged
        R[n] = snr_rate(P[n], float(alpha[n]), cfg.log_base)
        state = step(state, P[n], cfg.Ea[n], cfg.Da[n], cfg, n)
    Q[cfg.N], E[cfg.N] = state.Q, state.E
    return Schedule(P, R, Q, E, objective(Q), label), ConstraintProfile(tuple(caps))


def greedy_allocate(cfg: ScenarioConfig) -> tuple[Schedule, ConstraintProfile]:
    """Transmit at the merged cap (energy, ISR, queue) of the realized state."""
    return _run(cfg, relaxed=False, label="greedy")


def greedy_allocate_relaxed(cfg: ScenarioConfig) -> tuple[Schedule, ConstraintProfile]:
    """Greedy without the ISR cap, for when the primary's data is unavailable."""
    return _run(cfg, relaxed=True, label="greedy-relaxed")


def isr_rate(cfg: ScenarioConfig, n: int) -> float:
    """Rate achieved when transmitting exactly at the ISR cap of slot ``n``."""
    return snr_rate(isr_cap(cfg, n), float(cfg.snr[n]), cfg.log_base)


def lemma2_condition(cfg: ScenarioConfig, profile: ConstraintProfile) -> tuple[list[bool], bool]:
    """Per-slot test that stored energy never binds along a greedy trajectory.

    Slot ``n`` passes when ``E[n]/tau >= min(isr cap, rate cap)``, i.e. when
    the battery could reach the rate ``min(Q[n], isr_rate(n))``. If every slot
    passes, greedy is optimal for the full problem.
    """
    per_slot = []
    for n, c in enumerate(profile):
        isr = c.isr if c.isr is not None else isr_cap(cfg, n)
        per_slot.append(bool(c.energy >= min(isr, c.rate)))
    return per_slot, all(per_slot)
