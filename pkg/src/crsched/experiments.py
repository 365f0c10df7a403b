"""Canned scenarios and sweep drivers for the worked examples and figures.

All figure scenarios share N=3, tau=1, rho=0.1 and the primary-side ratio
``P0 g11 / g21 = [100, 420, 200]``. SNR traces are given directly as
``alpha``.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .greedy import greedy_allocate, greedy_allocate_relaxed
from .model import ScenarioConfig, Schedule
from .pa import pa_allocate, power_reallocation

__all__ = [
    "ALGORITHMS",
    "SweepSpec",
    "SweepPoint",
    "example_config",
    "fig3_config",
    "fig4_config",
    "fig5_config",
    "run_example",
    "run_sweep",
    "run_fig3",
    "run_fig4",
    "run_fig5",
    "FIG3_DEFAULT",
    "FIG4_DEFAULT",
    "FIG5_DEFAULT",
]

ALGORITHMS = ("greedy", "greedy-relaxed", "pa")

ISR_RATIO = (100.0, 420.0, 200.0)
RHO = 0.1

EXAMPLE_ALPHA = {
    1: (1 / 12, 1 / 7, 1 / 2),
    2: (1 / 10, 1 / 5, 1 / 6),
}

FIG3_DEFAULT = tuple(np.round(np.arange(1, 11) * 0.1, 10))
FIG4_DEFAULT = tuple(float(v) for v in range(4, 37, 2))
FIG5_DEFAULT = tuple(float(v) for v in range(1, 11))


def _figure_config(name, alpha, Ea0, Ea, Q0, Da) -> ScenarioConfig:
    return ScenarioConfig(
        N=3,
        tau=1.0,
        Ea0=Ea0,
        Ea=Ea,
        Da=Da,
        Q0=Q0,
        alpha=alpha,
        rho=RHO,
        P0=1.0,
        g11=ISR_RATIO,
        g21=(1.0, 1.0, 1.0),
        name=name,
    )


def example_config(example_id: int) -> ScenarioConfig:
    """Three-slot worked examples: Ea0=1, Ea=[1,2,1]; no queue or ISR data."""
    if example_id not in EXAMPLE_ALPHA:
        raise ValueError(f"unknown example id {example_id!r}; choose 1 or 2")
    return ScenarioConfig(
        N=3,
        Ea0=1.0,
        Ea=(1.0, 2.0, 1.0),
        Da=(0.0, 0.0, 0.0),
        Q0=0.0,
        alpha=EXAMPLE_ALPHA[example_id],
        relaxed=True,
        name=f"example{example_id}",
    )


def fig3_config(alpha3: float) -> ScenarioConfig:
    return _figure_config(
        f"fig3:alpha3={alpha3:.6f}", (1 / 80, 1 / 30, alpha3), 12.0, (20.0, 25.0, 18.0), 1.0, (1.0, 1.0, 3.0)
    )


def fig4_config(mean_energy: float) -> ScenarioConfig:
    e = mean_energy
    return _figure_config(
        f"fig4:mean_energy={e:.6f}", (1 / 15, 1 / 16, 0.8), e / 4, (e / 4, e / 2, 0.0), 2.0, (1.0, 2.0, 5.0)
    )


def fig5_config(mean_data: float) -> ScenarioConfig:
    d = mean_data
    return _figure_config(
        f"fig5:mean_data={d:.6f}", (1 / 15, 1 / 3, 0.5), 8.0, (12.0, 10.0, 1.0), 0.0, (0.3 * d, 0.2 * d, 0.5 * d)
    )


def run_example(example_id: int) -> list[np.ndarray]:
    """Stage-by-stage allocations Alloc(1), Alloc(2), Alloc(3)."""
    cfg = example_config(example_id)
    return power_reallocation(cfg.snr, cfg.Ea0, cfg.Ea, cfg.tau).stages


# -- sweeps -------------------------------------------------------------------

_INDEXED = re.compile(r"^(alpha|Ea|Da|g11|g12|g21|g22)\[(\d+)\]$")


def _scaled(values, target, what):
    total = sum(values)
    if total <= 0:
        raise ValueError(f"cannot rescale {what}: base total is zero")
    return target / total


def apply_parameter(base: ScenarioConfig, parameter: str, value: float) -> ScenarioConfig:
    """Return ``base`` with one parameter replaced.

    ``parameter`` is a scalar field name, an indexed trace entry such as
    ``alpha[3]`` (1-based slot), ``mean_energy`` (rescales Ea0 and Ea so their
    sum equals ``value``) or ``mean_data`` (rescales Da likewise).
    """
    if parameter == "mean_energy":
        s = _scaled([base.Ea0, *base.Ea], value, "energy")
        return dataclasses.replace(base, Ea0=base.Ea0 * s, Ea=[e * s for e in base.Ea])
    if parameter == "mean_data":
        s = _scaled(base.Da, value, "data")
        return dataclasses.replace(base, Da=[d * s for d in base.Da])
    m = _INDEXED.match(parameter)
    if m:
        name, idx = m.group(1), int(m.group(2))
        trace = getattr(base, name)
        if trace is None or not 1 <= idx <= len(trace):
            raise ValueError(f"parameter {parameter!r} does not resolve against the base config")
        trace = list(trace)
        trace[idx - 1] = value
        return dataclasses.replace(base, **{name: trace})
    if parameter in ("tau", "P0", "N0", "rho", "Ea0", "Q0"):
        return dataclasses.replace(base, **{parameter: value})
    raise ValueError(f"unknown sweep parameter {parameter!r}")


@dataclass
class SweepSpec:
    base: ScenarioConfig
    parameter: str
    values: Sequence[float]
    algorithms: Sequence[str] = ("greedy", "pa")
    label: str = ""

    def __post_init__(self):
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ValueError(f"unknown algorithms: {sorted(bad)}")
        # resolves or raises
        apply_parameter(self.base, self.parameter, self.values[0] if self.values else 1.0)


@dataclass
class SweepPoint:
    value: float
    config: ScenarioConfig
    schedules: dict[str, Schedule] = field(default_factory=dict)

    def objective(self, algorithm: str) -> float:
        return self.schedules[algorithm].objective

    def allocation(self, algorithm: str) -> np.ndarray:
        return self.schedules[algorithm].P


def _run_algorithm(cfg: ScenarioConfig, algorithm: str) -> Schedule:
    if algorithm == "greedy":
        sched, prof = greedy_allocate(cfg)
    elif algorithm == "greedy-relaxed":
        sched, prof = greedy_allocate_relaxed(cfg)
    else:
        return pa_allocate(cfg)
    sched.meta["profile"] = prof
    return sched


def run_sweep(spec: SweepSpec, namer=None) -> list[SweepPoint]:
    """Evaluate every sweep point; results follow the order of ``spec.values``."""
    out = []
    for v in spec.values:
        cfg = apply_parameter(spec.base, spec.parameter, float(v))
        if namer is not None:
            cfg = dataclasses.replace(cfg, name=namer(v))
        pt = SweepPoint(float(v), cfg)
        for algo in spec.algorithms:
            pt.schedules[algo] = _run_algorithm(cfg, algo)
        out.append(pt)
    return out


def run_fig3(alpha3_values=FIG3_DEFAULT, algorithms=("greedy", "pa")) -> list[SweepPoint]:
    spec = SweepSpec(fig3_config(0.5), "alpha[3]", list(alpha3_values), algorithms)
    return run_sweep(spec, namer=lambda v: fig3_config(v).name)


def run_fig4(mean_energy_values=FIG4_DEFAULT, algorithms=("greedy", "pa")) -> list[SweepPoint]:
    spec = SweepSpec(fig4_config(1.0), "mean_energy", list(mean_energy_values), algorithms)
    return run_sweep(spec, namer=lambda v: fig4_config(v).name)


def run_fig5(mean_data_values=FIG5_DEFAULT, algorithms=("greedy", "pa")) -> list[SweepPoint]:
    spec = SweepSpec(fig5_config(1.0), "mean_data", list(mean_data_values), algorithms)
    return run_sweep(spec, namer=lambda v: fig5_config(v).name)
