"""Slot-level system model for an energy-harvesting underlay secondary link.

Holds the scenario data, the battery/queue dynamics, the rate law and the
per-slot power caps (energy, interference-to-signal ratio, queue emptying).

Indexing: slots are 0-based in code. ``Ea[n]`` and ``Da[n]`` arrive at the end
of slot ``n``; ``Ea0`` and ``Q0`` are the battery and queue at the start of the
first slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    InfeasibleEnergyError,
    InfeasibleRateError,
    LengthMismatchError,
    MissingFieldError,
    NegativeValueError,
)

__all__ = [
    "ScenarioConfig",
    "SlotState",
    "SlotCaps",
    "ConstraintProfile",
    "Schedule",
    "rate",
    "inverse_rate",
    "snr_rate",
    "snr_inverse_rate",
    "step",
    "merged_caps",
    "isr_cap",
    "objective",
    "simulate",
    "weighted_utility",
]

# Feasibility slack for float round-off when a cap is met with equality.
FEAS_TOL = 1e-9

TRACE_FIELDS = ("g11", "g12", "g21", "g22", "Ea", "Da", "alpha")
SCALAR_FIELDS = ("tau", "P0", "N0", "rho", "Ea0", "Q0")


def _as_trace(values) -> tuple[float, ...] | None:
    if values is None:
        return None
    return tuple(float(v) for v in np.ravel(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class ScenarioConfig:
    """A full problem instance.

    Either the link gains ``g12``/``g22`` together with ``P0`` and ``N0`` or an
    explicit per-watt SNR trace ``alpha`` must be given. ``rho``, ``g11`` and
    ``g21`` (the primary user's private data) may be omitted when ``relaxed`` is
    set; the interference cap is then never evaluated.
    """

    N: int
    Ea0: float
    Ea: Sequence[float]
    Da: Sequence[float]
    Q0: float = 0.0
    tau: float = 1.0
    P0: float | None = None
    N0: float | None = None
    rho: float | None = None
    g11: Sequence[float] | None = None
    g12: Sequence[float] | None = None
    g21: Sequence[float] | None = None
    g22: Sequence[float] | None = None
    alpha: Sequence[float] | None = None
    log_base: float = math.e
    relaxed: bool = False
    name: str = "scenario"

    def __post_init__(self):
        for f in TRACE_FIELDS:
            object.__setattr__(self, f, _as_trace(getattr(self, f)))
        for f in SCALAR_FIELDS:
            v = getattr(self, f)
            if v is not None:
                object.__setattr__(self, f, float(v))
        self._validate()

    def _validate(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ConfigError("N", f"horizon must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if not self.tau > 0:
            raise ConfigError("tau", "slot length must be positive")
        if not (self.log_base > 0 and self.log_base != 1):
            raise ConfigError("log_base", "must be positive and != 1")

        for f in ("Ea", "Da"):
            if getattr(self, f) is None:
                raise MissingFieldError(f)
        if self.alpha is None:
            for f in ("g12", "g22", "P0", "N0"):
                if getattr(self, f) is None:
                    raise MissingFieldError(f, "required unless alpha is given")
        if not self.relaxed:
            for f in ("rho", "P0", "g11", "g21"):
                if getattr(self, f) is None:
                    raise MissingFieldError(f, "required unless relaxed is true")

        for f in TRACE_FIELDS:
            tr = getattr(self, f)
            if tr is None:
                continue
            if len(tr) != self.N:
                raise LengthMismatchError(f, f"expected {self.N}, got {len(tr)}")
            if any(math.isnan(v) for v in tr):
                raise ConfigError(f, "NaN entry")
            if min(tr) < 0:
                raise NegativeValueError(f)
        for f in SCALAR_FIELDS:
            v = getattr(self, f)
            if v is not None and (math.isnan(v) or v < 0):
                raise NegativeValueError(f)

        if self.alpha is not None:
            if min(self.alpha) <= 0:
                raise ConfigError("alpha", "entries must be strictly positive")
        else:
            if min(self.g22) <= 0:
                raise ConfigError("g22", "entries must be strictly positive")
            if self.P0 * min(self.g12) + self.N0 <= 0:
                raise ConfigError("N0", "interference-plus-noise power must be positive")
        if self.g11 is not None and min(self.g11) <= 0:
            raise ConfigError("g11", "entries must be strictly positive")

    @property
    def has_isr(self) -> bool:
        """Whether the interference cap can be (and may be) evaluated."""
        return not self.relaxed and None not in (self.rho, self.P0, self.g11, self.g21)

    @property
    def snr(self) -> np.ndarray:
        """Per-watt effective SNR of each slot (``g22 / (P0 g12 + N0)``)."""
        if self.alpha is not None:
            return np.array(self.alpha)
        g12 = np.array(self.g12)
        return np.array(self.g22) / (self.P0 * g12 + self.N0)

    @property
    def initial_state(self) -> "SlotState":
        return SlotState(self.Ea0, self.Q0)


@dataclass(frozen=True)
class SlotState:
    E: float
    Q: float


@dataclass(frozen=True)
class SlotCaps:
    """Power caps of one slot, evaluated at a realized state."""

    energy: float
    isr: float | None
    rate: float
    merged: float
    active: str
    relaxed: float
    relaxed_active: str


@dataclass(frozen=True)
class ConstraintProfile:
    slots: tuple[SlotCaps, ...]

    def __len__(self):
        return len(self.slots)

    def __getitem__(self, n):
        return self.slots[n]

    def __iter__(self):
        return iter(self.slots)

    @property
    def active(self) -> list[str]:
        return [s.active for s in self.slots]

    @property
    def relaxed_active(self) -> list[str]:
        return [s.relaxed_active for s in self.slots]


@dataclass
class Schedule:
    """A power vector with its rates, queue and battery trajectories.

    ``Qtraj`` and ``Etraj`` have N+1 entries, the state at the start of every
    slot plus the state after the last one.
    """

    P: np.ndarray
    R: np.ndarray
    Qtraj: np.ndarray
    Etraj: np.ndarray
    objective: float
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.P)


def snr_rate(P, alpha, log_base: float = math.e):
    """``log_base(alpha * P + 1)``; accepts scalars or arrays."""
    if np.any(np.asarray(P) < 0):
        raise DomainError(f"transmit power must be non-negative, got {P!r}")
    if np.ndim(P) == 0 and np.ndim(alpha) == 0:
        return math.log1p(alpha * P) / math.log(log_base)
    return np.log1p(np.multiply(alpha, P)) / math.log(log_base)


def snr_inverse_rate(R, alpha, log_base: float = math.e):
    """Power that carries rate ``R``; +inf when it overflows a double."""
    if np.any(np.asarray(R) < 0):
        raise DomainError(f"rate must be non-negative, got {R!r}")
    if np.ndim(R) == 0 and np.ndim(alpha) == 0:
        try:
            return math.expm1(R * math.log(log_base)) / alpha
        except OverflowError:
            return math.inf
    with np.errstate(over="ignore"):
        return np.expm1(np.multiply(R, math.log(log_base))) / alpha


def rate(P, g22, g12, P0, N0, log_base: float = math.e):
    """Data carried in one slot at transmit power ``P``."""
    if np.any(np.asarray(g22) <= 0):
        raise DomainError("g22 must be positive")
    return snr_rate(P, g22 / (P0 * g12 + N0), log_base)


def inverse_rate(R, g22, g12, P0, N0, log_base: float = math.e):
    if np.any(np.asarray(g22) <= 0):
        raise DomainError("g22 must be positive")
    return snr_inverse_rate(R, g22 / (P0 * g12 + N0), log_base)


def isr_cap(cfg: ScenarioConfig, n: int) -> float:
    """Largest power keeping the primary receiver's ISR at or below ``rho``."""
    if not cfg.has_isr:
        raise ConfigError("rho", "interference cap needs rho, P0, g11 and g21 and relaxed=false")
    if cfg.g21[n] == 0:
        return math.inf
    return cfg.rho * cfg.P0 * cfg.g11[n] / cfg.g21[n]


def _argmin(named: list[tuple[str, float]]) -> tuple[str, float]:
    # first entry wins ties: energy > isr > rate
    best = named[0]
    for item in named[1:]:
        if item[1] < best[1]:
            best = item
    return best


def merged_caps(state: SlotState, n: int, cfg: ScenarioConfig, relaxed: bool = False) -> SlotCaps:
    """Evaluate the three power caps of slot ``n`` at ``state``.

    With ``relaxed`` the interference cap is not computed (it is recorded as
    ``None``) and ``merged`` equals the relaxed cap.
    """
    energy = max(state.E, 0.0) / cfg.tau
    rate_cap = snr_inverse_rate(max(state.Q, 0.0), float(cfg.snr[n]), cfg.log_base)
    rel_active, rel = _argmin([("energy", energy), ("rate", rate_cap)])
    if relaxed:
        return SlotCaps(energy, None, rate_cap, rel, rel_active, rel, rel_active)
    isr = isr_cap(cfg, n)
    active, merged = _argmin([("energy", energy), ("isr", isr), ("rate", rate_cap)])
    return SlotCaps(energy, isr, rate_cap, merged, active, rel, rel_active)


def step(
    state: SlotState,
    P: float,
    Ea_n: float,
    Da_n: float,
    cfg: ScenarioConfig,
    n: int,
    strict: bool = False,
) -> SlotState:
    """Advance battery and queue by one slot at transmit power ``P``."""
    spend = P * cfg.tau
    if spend > state.E + FEAS_TOL * max(1.0, state.E):
        raise InfeasibleEnergyError(f"slot {n}: P*tau={spend!r} exceeds stored energy {state.E!r}")
    r = snr_rate(P, float(cfg.snr[n]), cfg.log_base)
    if strict and r > state.Q + FEAS_TOL * max(1.0, state.Q):
        raise InfeasibleRateError(f"slot {n}: rate {r!r} exceeds queue {state.Q!r}")
    return SlotState(state.E - spend + Ea_n, state.Q - r + Da_n)


def objective(Qtraj) -> float:
    """Average buffer length over the horizon: sum of all N+1 entries over N."""
    Qtraj = np.asarray(Qtraj, dtype=float)
    return float(Qtraj.sum() / (len(Qtraj) - 1))


def simulate(cfg: ScenarioConfig, P, label: str = "", clamp: bool = False) -> Schedule:
    """Roll a power vector forward through the dynamics.

    No caps are enforced. With ``clamp`` each rate is cut to the queue content.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (cfg.N,):
        raise ValueError(f"power vector must have length {cfg.N}")
    R = np.asarray(snr_rate(P, cfg.snr, cfg.log_base), dtype=float)
    Q = np.empty(cfg.N + 1)
    E = np.empty(cfg.N + 1)
    Q[0], E[0] = cfg.Q0, cfg.Ea0
    for n in range(cfg.N):
        if clamp:
            R[n] = min(R[n], max(Q[n], 0.0))
        Q[n + 1] = Q[n] - R[n] + cfg.Da[n]
        E[n + 1] = E[n] - P[n] * cfg.tau + cfg.Ea[n]
    return Schedule(P, R, Q, E, objective(Q), label)


def weighted_utility(cfg: ScenarioConfig, P) -> float:
    """``sum_n (N+1-n)/N * rate(P[n])``: the throughput part of the objective."""
    beta = (cfg.N - np.arange(cfg.N)) / cfg.N
    return float(np.dot(beta, snr_rate(np.asarray(P, dtype=float), cfg.snr, cfg.log_base)))
