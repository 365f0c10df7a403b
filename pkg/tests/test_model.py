import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crsched.errors import (
    ConfigError,
    DomainError,
    InfeasibleEnergyError,
    InfeasibleRateError,
    LengthMismatchError,
    MissingFieldError,
    NegativeValueError,
)
from crsched.experiments import fig3_config, fig4_config
from crsched.greedy import greedy_allocate
from crsched.model import (
    ScenarioConfig,
    SlotState,
    inverse_rate,
    merged_caps,
    objective,
    rate,
    simulate,
    snr_inverse_rate,
    snr_rate,
    step,
)

from conftest import random_config


def unit_cfg(**kw):
    base = dict(N=1, Ea0=1.0, Ea=[0.0], Da=[0.0], Q0=5.0, alpha=[1.0], relaxed=True)
    base.update(kw)
    return ScenarioConfig(**base)


# -- rate law ------------------------------------------------------------------


def test_rate_zero_power():
    assert rate(0.0, 0.7, 0.3, 2.0, 0.1) == 0.0


def test_rate_example_value():
    # alpha = g22 / (P0 g12 + N0) = 1 / (1 * 1 + 1) = 1/2
    r = rate(2.1667, 1.0, 1.0, 1.0, 1.0)
    assert r == pytest.approx(math.log(2.08335), abs=1e-15)
    assert round(r, 4) == 0.7340


def test_rate_base_two():
    assert rate(3.0, 1.0, 0.0, 1.0, 1.0, log_base=2) == pytest.approx(2.0)


@pytest.mark.parametrize("r", [0.1, 1.0, 5.0])
def test_rate_inverse_roundtrip_points(r):
    p = inverse_rate(r, 0.8, 0.2, 1.5, 0.4)
    assert rate(p, 0.8, 0.2, 1.5, 0.4) == pytest.approx(r, abs=1e-12)


@given(st.floats(0.0, 20.0), st.floats(1e-3, 1e3))
@settings(max_examples=300, deadline=None)
def test_rate_inverse_roundtrip_property(r, alpha):
    assert abs(snr_rate(snr_inverse_rate(r, alpha), alpha) - r) < 1e-12


def test_inverse_rate_zero():
    assert inverse_rate(0.0, 1.0, 1.0, 1.0, 1.0) == 0.0


def test_inverse_rate_is_queue_cap():
    cfg = fig3_config(0.9)
    c = merged_caps(SlotState(100.0, 2.5), 2, cfg)
    assert c.rate == pytest.approx((math.exp(2.5) - 1) / 0.9, rel=1e-15)


def test_domain_errors():
    with pytest.raises(DomainError):
        rate(-1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        inverse_rate(-0.5, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        snr_rate(np.array([1.0, -1e-3]), 1.0)


def test_rate_monotone_and_concave():
    alpha = 0.37
    h = 1e-3
    prev = -1.0
    for p in (0.5, 2.0, 7.0):
        f0, f1, f2 = (snr_rate(p + d, alpha) for d in (-h, 0.0, h))
        assert f0 < f1 < f2
        assert f2 - 2 * f1 + f0 < 0
        assert f1 > prev
        prev = f1


# -- dynamics ------------------------------------------------------------------


def test_step_idle():
    cfg = unit_cfg()
    assert step(SlotState(1.0, 1.0), 0.0, 2.0, 3.0, cfg, 0) == SlotState(3.0, 4.0)


def test_step_transmit():
    cfg = unit_cfg(tau=0.5)
    s = step(SlotState(1.0, 5.0), 1 / 0.5, 0.25, 0.0, cfg, 0)
    assert s.E == pytest.approx(0.25)
    assert s.Q == pytest.approx(5 - math.log(3.0))


def test_step_energy_error():
    with pytest.raises(InfeasibleEnergyError):
        step(SlotState(1.0, 5.0), 1.01, 0.0, 0.0, unit_cfg(), 0)


def test_step_rate_error_only_when_strict():
    cfg = unit_cfg()
    s = step(SlotState(10.0, 0.1), 5.0, 0.0, 0.0, cfg, 0)
    assert s.Q < 0
    with pytest.raises(InfeasibleRateError):
        step(SlotState(10.0, 0.1), 5.0, 0.0, 0.0, cfg, 0, strict=True)


def test_step_matches_greedy_trajectory():
    cfg = fig3_config(0.3)
    sched, _ = greedy_allocate(cfg)
    state = cfg.initial_state
    for n in range(cfg.N):
        assert state.E == sched.Etraj[n] and state.Q == sched.Qtraj[n]
        state = step(state, sched.P[n], cfg.Ea[n], cfg.Da[n], cfg, n)
    assert (state.E, state.Q) == (sched.Etraj[-1], sched.Qtraj[-1])


# -- caps ----------------------------------------------------------------------


def test_zero_energy_zero_cap():
    c = merged_caps(SlotState(0.0, 3.0), 1, fig3_config(0.5))
    assert c.merged == 0.0 and c.active == "energy"


def test_fig3_slot3_rate_cap_active():
    cfg = fig3_config(0.9)
    _, prof = greedy_allocate(cfg)
    assert prof[2].active == "rate"


def test_fig4_energy_cap_active_everywhere():
    for e in (9.0, 16.0, 30.0):
        _, prof = greedy_allocate(fig4_config(e))
        assert prof.active == ["energy"] * 3


def test_isr_cap_infinite_when_no_cross_gain():
    cfg = dataclasses.replace(fig3_config(0.5), g21=[0.0, 1.0, 1.0])
    c = merged_caps(SlotState(5.0, 1.0), 0, cfg)
    assert c.isr == math.inf and c.merged < math.inf


def test_tie_break_priority():
    # energy 1, isr 1, rate 1 -> energy wins; isr == rate < energy -> isr wins
    q = math.log(2.0)
    cfg = ScenarioConfig(N=1, Ea0=1.0, Ea=[0], Da=[0], Q0=q, alpha=[1.0], rho=1.0, P0=1.0, g11=[1.0], g21=[1.0])
    c = merged_caps(SlotState(1.0, q), 0, cfg)
    assert c.active == "energy"
    c = merged_caps(SlotState(3.0, q), 0, cfg)
    assert c.active == "isr"


def test_caps_invariants(rng):
    for _ in range(200):
        cfg = random_config(rng)
        state = SlotState(rng.uniform(0, 5), rng.uniform(0, 5))
        n = int(rng.integers(cfg.N))
        c = merged_caps(state, n, cfg)
        trio = {"energy": c.energy, "isr": c.isr, "rate": c.rate}
        assert c.merged == min(c.energy, c.isr, c.rate)
        assert trio[c.active] == c.merged
        assert c.relaxed >= c.merged
        assert c.relaxed == min(c.energy, c.rate)


# -- objective / simulate --------------------------------------------------------


def test_objective_trivial():
    assert objective([0.0, 0.0, 0.0]) == 0.0
    assert objective([2.0, 3.0]) == 5.0


def test_simulate_consistency(rng):
    for _ in range(50):
        cfg = random_config(rng)
        P = rng.uniform(0, 2, cfg.N)
        s = simulate(cfg, P)
        np.testing.assert_array_equal(s.R, snr_rate(P, cfg.snr))
        Q = [cfg.Q0]
        E = [cfg.Ea0]
        for n in range(cfg.N):
            Q.append(Q[-1] - s.R[n] + cfg.Da[n])
            E.append(E[-1] - P[n] * cfg.tau + cfg.Ea[n])
        np.testing.assert_array_equal(s.Qtraj, Q)
        np.testing.assert_array_equal(s.Etraj, E)
        np.testing.assert_allclose(np.diff(s.Etraj), np.asarray(cfg.Ea) - P * cfg.tau, rtol=0, atol=1e-12)


# -- config validation -----------------------------------------------------------


def test_config_missing_field():
    with pytest.raises(MissingFieldError) as exc:
        ScenarioConfig(N=1, Ea0=1, Ea=[1], Da=[1], alpha=[1.0])
    assert exc.value.field == "rho"


def test_config_length_mismatch():
    with pytest.raises(LengthMismatchError) as exc:
        unit_cfg(Ea=[1.0, 2.0])
    assert exc.value.field == "Ea"


def test_config_negative():
    with pytest.raises(NegativeValueError):
        unit_cfg(Q0=-1)


@pytest.mark.parametrize("kw", [dict(N=0), dict(tau=0.0), dict(alpha=[0.0]), dict(log_base=1.0)])
def test_config_invalid(kw):
    with pytest.raises(ConfigError):
        unit_cfg(**kw)


def test_config_relaxed_without_isr_data():
    cfg = unit_cfg()
    assert not cfg.has_isr
    with pytest.raises(ConfigError):
        merged_caps(cfg.initial_state, 0, cfg)
    assert merged_caps(cfg.initial_state, 0, cfg, relaxed=True).isr is None


def test_snr_from_gains():
    cfg = ScenarioConfig(
        N=2, Ea0=1, Ea=[0, 0], Da=[0, 0], P0=2.0, N0=0.5, g12=[0.25, 1.0], g22=[1.0, 5.0], relaxed=True
    )
    np.testing.assert_allclose(cfg.snr, [1.0, 2.0])
