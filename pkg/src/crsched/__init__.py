"""Delay-aware power scheduling for an energy-harvesting underlay secondary link.

Greedy (online, upper bound) and staged re-allocation (offline, lower bound)
allocators, brute-force oracles and the canned experiments.
"""

from .bounds import BoundReport, Lemma3Branch, assemble_bounds, lemma3_classify
from .errors import (
    ConfigError,
    DomainError,
    InfeasibleEnergyError,
    InfeasibleError,
    InfeasibleRateError,
    LengthMismatchError,
    MissingFieldError,
    NegativeValueError,
    OracleRefusal,
)
from .greedy import greedy_allocate, greedy_allocate_relaxed, lemma2_condition
from .model import (
    ConstraintProfile,
    ScenarioConfig,
    Schedule,
    SlotCaps,
    SlotState,
    inverse_rate,
    merged_caps,
    objective,
    rate,
    simulate,
    step,
)
from .oracle import GridSpec, bisection_waterfill, grid_optimal_full, grid_optimal_relaxed
from .pa import WaterfillResult, WeightedSlots, compute_weights, pa_allocate, pa_objective, waterfill_window

__version__ = "0.1.0"
