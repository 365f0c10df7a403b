"""Upper/lower bound assembly and the special-case optimality certificates."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .greedy import greedy_allocate, greedy_allocate_relaxed, lemma2_condition
from .model import ConstraintProfile, ScenarioConfig, Schedule, SlotState, merged_caps
from .pa import pa_allocate

__all__ = ["BoundReport", "Lemma3Branch", "assemble_bounds", "lemma3_classify", "energy_binding"]


class Lemma3Branch(str, enum.Enum):
    GREEDY_OPT = "GREEDY_OPT"
    PA_OPT = "PA_OPT"
    NEITHER = "NEITHER"


@dataclass
class BoundReport:
    upper: float
    lower: float
    gap: float
    lemma2_holds: bool
    eq19_holds: bool
    eq19_holds_greedy: bool
    lemma3_case: Lemma3Branch
    per_slot: ConstraintProfile
    greedy: Schedule
    pa: Schedule

    @property
    def upper_exact(self) -> bool:
        return self.lemma2_holds

    @property
    def lower_exact(self) -> bool:
        return self.eq19_holds


def _profile_along(cfg: ScenarioConfig, sched: Schedule, relaxed: bool) -> ConstraintProfile:
    return ConstraintProfile(
        tuple(
            merged_caps(SlotState(sched.Etraj[n], sched.Qtraj[n]), n, cfg, relaxed=relaxed)
            for n in range(cfg.N)
        )
    )


def energy_binding(profile: ConstraintProfile, relaxed: bool = False) -> list[bool]:
    """Slots where stored energy is no larger than every other cap."""
    out = []
    for c in profile:
        others = c.rate if relaxed or c.isr is None else min(c.isr, c.rate)
        out.append(bool(c.energy <= others))
    return out


def lemma3_classify(cfg: ScenarioConfig, profile: ConstraintProfile | None = None) -> Lemma3Branch:
    """Which allocator is optimal for the ISR-free problem, judged on the
    relaxed greedy trajectory."""
    if profile is None:
        _, profile = greedy_allocate_relaxed(cfg)
    if all(c.energy >= c.rate for c in profile):
        return Lemma3Branch.GREEDY_OPT
    if all(c.energy < c.rate for c in profile):
        return Lemma3Branch.PA_OPT
    return Lemma3Branch.NEITHER


def assemble_bounds(cfg: ScenarioConfig) -> BoundReport:
    """Run greedy (upper bound) and PA (lower bound) and certify where possible.

    The no-binding-energy condition is checked along the greedy trajectory;
    the always-binding-energy condition along PA's own trajectory, where it
    also implies the PA schedule is feasible for the full problem. Without the
    primary's private data the relaxed greedy is used and the lemma 2
    certificate is unavailable (reported False).
    """
    relaxed = not cfg.has_isr
    if relaxed:
        g_sched, g_prof = greedy_allocate_relaxed(cfg)
        lemma2 = False
    else:
        g_sched, g_prof = greedy_allocate(cfg)
        lemma2 = lemma2_condition(cfg, g_prof)[1]
    p_sched = pa_allocate(cfg)
    pa_prof = _profile_along(cfg, p_sched, relaxed)
    _, rel_prof = greedy_allocate_relaxed(cfg)
    return BoundReport(
        upper=g_sched.objective,
        lower=p_sched.objective,
        gap=g_sched.objective - p_sched.objective,
        lemma2_holds=lemma2,
        eq19_holds=all(energy_binding(pa_prof, relaxed)),
        eq19_holds_greedy=all(energy_binding(g_prof, relaxed)),
        lemma3_case=lemma3_classify(cfg, rel_prof),
        per_slot=g_prof,
        greedy=g_sched,
        pa=p_sched,
    )
