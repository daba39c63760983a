"""Reliability formulas: aging, self-heating, endurance, disturb, SOFR."""

import math

import numpy as np
import pytest

from astrocore.reliability import (
    BtiParams,
    DisturbParams,
    EnduranceParams,
    FailureRates,
    cycles_to_hours,
    failure_rate,
    mttf_bti,
    mttf_disturb,
    mttf_endurance,
    overall_mttf,
    p_failures,
    sample_fault_count,
    self_heating_temp,
    sofr,
)


# ---------------------------------------------------------------------------
# Aging (BTI)


def test_bti_two_year_anchor():
    # Defaults are calibrated so the nominal operating point lives 2 years.
    assert mttf_bti(BtiParams()) == pytest.approx(17532.0, rel=1e-12)


def test_bti_reduces_to_a_const():
    # V = 1 kills the power term; a vanishing activation energy kills the
    # exponential, leaving the material constant.
    p = BtiParams(a_const=123.5, e_a=1e-12, voltage=1.0)
    assert mttf_bti(p) == pytest.approx(123.5, rel=1e-9)


def test_bti_voltage_power_law():
    lo = mttf_bti(BtiParams(gamma_v=2.0, voltage=1.0))
    hi = mttf_bti(BtiParams(gamma_v=2.0, voltage=2.0))
    assert hi == pytest.approx(lo / 4.0, rel=1e-12)


def test_bti_validation():
    with pytest.raises(ValueError):
        BtiParams(voltage=0.0)
    with pytest.raises(ValueError):
        BtiParams(temperature=-1.0)


def test_failure_rate_identity():
    for volts in (0.7, 0.9, 1.0, 1.2):
        for temp in (300.0, 325.0, 350.0):
            m = mttf_bti(BtiParams(voltage=volts, temperature=temp))
            assert failure_rate(m) * m == pytest.approx(1.0, rel=1e-12)
    assert failure_rate(1.0) == 1.0
    assert failure_rate(17532.0) == pytest.approx(5.7038e-5, rel=1e-4)
    with pytest.raises(ValueError):
        failure_rate(0.0)


# ---------------------------------------------------------------------------
# Self-heating and endurance


def test_self_heating_starts_at_ambient():
    assert self_heating_temp(EnduranceParams(time_t=0.0)) == 300.0


def test_self_heating_saturates_at_steady_rise():
    p = EnduranceParams(time_t=1.0)
    rise = 6.1e-5 ** 2 * 10_000.0 * (1.2e-5) ** 2 / (1.0 * 1.2e-15)
    assert self_heating_temp(p) == pytest.approx(300.0 + rise, rel=1e-12)
    assert rise == pytest.approx(4.4652, rel=1e-12)


def test_self_heating_monotone_in_current():
    currents = np.linspace(1e-5, 2e-4, 12)
    temps = [self_heating_temp(EnduranceParams(i_cell=float(i), time_t=1.0))
             for i in currents]
    assert all(b > a for a, b in zip(temps, temps[1:]))


def test_self_heating_literal_variant():
    p = EnduranceParams(time_t=1.0, tsh_literal=True)
    rise = 6.1e-5 ** 2 * 10_000.0 * (1.2e-5) ** 2 / (1.0 * 1.2e-15)
    # additive form: rise - saturation + ambient, saturation ~ 1 here
    assert self_heating_temp(p) == pytest.approx(rise - 1.0 + 300.0, rel=1e-9)


def test_endurance_at_reference_temperature():
    p = EnduranceParams(time_t=0.0)   # T_SH = ambient = 300 K
    assert mttf_endurance(p) == pytest.approx(math.exp(1000.0 / 300.0),
                                              rel=1e-12)
    assert mttf_endurance(p) == pytest.approx(28.0316248945, rel=1e-9)


def test_endurance_unit_scale():
    p = EnduranceParams(gamma_fit=1e-300, time_t=0.0)
    assert mttf_endurance(p) == pytest.approx(1.0, rel=1e-9)


def test_endurance_decreasing_in_temperature():
    temps = np.linspace(290.0, 400.0, 10)
    vals = [mttf_endurance(EnduranceParams(t_amb=float(t), time_t=0.0))
            for t in temps]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_endurance_validation():
    with pytest.raises(ValueError):
        EnduranceParams(i_cell=0.0)
    with pytest.raises(ValueError):
        EnduranceParams(time_t=-1.0)


def test_cycles_to_hours():
    assert cycles_to_hours(1e5, 1.0) == pytest.approx(1e5 / 3600.0)
    assert cycles_to_hours(1e5, 1000.0) == pytest.approx(1e5 / 3.6e6)
    assert cycles_to_hours(0.0, 10.0) == 0.0
    with pytest.raises(ValueError):
        cycles_to_hours(1e5, 0.0)
    with pytest.raises(ValueError):
        cycles_to_hours(-1.0, 1.0)


# ---------------------------------------------------------------------------
# Read disturbance


def test_disturb_zero_voltage():
    assert mttf_disturb(DisturbParams(0.0)) == pytest.approx(10.0 ** 6.7,
                                                             rel=1e-12)
    assert mttf_disturb(DisturbParams(0.0)) == pytest.approx(5011872.336272722,
                                                             rel=1e-12)


def test_disturb_unity_crossing():
    v_unity = 6.7 / 14.7
    assert mttf_disturb(DisturbParams(v_unity)) == pytest.approx(1.0, rel=1e-12)


def test_disturb_reference_point():
    assert mttf_disturb(DisturbParams(0.3)) == pytest.approx(
        194.98445997580455, rel=1e-12)


def test_disturb_validation():
    with pytest.raises(ValueError):
        DisturbParams(-0.1)


# ---------------------------------------------------------------------------
# Aggregation (SOFR) and failure counts


def test_sofr_additivity_and_permutation():
    assert sofr(FailureRates(1.0, 2.0, 3.0)) == 6.0
    rng = np.random.default_rng(4)
    for _ in range(20):
        a, b, c = rng.uniform(0.0, 1.0, 3)
        total = sofr(FailureRates(a, b, c))
        assert total == pytest.approx(sofr(FailureRates(c, a, b)), rel=1e-12)


def test_sofr_zero_rates_infinite_mttf():
    assert sofr(FailureRates()) == 0.0
    assert overall_mttf(FailureRates()) == math.inf


def test_sofr_mttf_below_min_individual():
    rng = np.random.default_rng(11)
    for _ in range(50):
        lams = rng.uniform(1e-7, 1e-2, 3)
        rates = FailureRates(*map(float, lams))
        assert overall_mttf(rates) <= min(1.0 / l for l in lams) + 1e-12


def test_failure_rates_validation():
    with pytest.raises(ValueError):
        FailureRates(-1.0, 0.0, 0.0)


def test_p_failures_zero_count_is_exponential():
    for lt in (0.1, 1.0, 3.7):
        assert p_failures(lt, 1.0, 0) == pytest.approx(math.exp(-lt),
                                                       rel=1e-12)


def test_p_failures_reference_point():
    assert p_failures(1.0, 1.0, 1) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_p_failures_matches_factorial_form():
    for lt in (0.5, 2.0, 9.0):
        for n in range(21):
            direct = lt ** n / math.factorial(n) * math.exp(-lt)
            assert p_failures(lt, 1.0, n) == pytest.approx(direct, abs=1e-12)


def test_p_failures_normalizes():
    for lt in (0.1, 1.0, 5.0, 10.0):
        total = sum(p_failures(lt, 1.0, n) for n in range(101))
        assert abs(total - 1.0) <= 1e-9


def test_p_failures_large_n_no_overflow():
    p = p_failures(10.0, 1.0, 500)
    assert 0.0 <= p < 1e-300 or p == 0.0


def test_p_failures_validation():
    with pytest.raises(ValueError):
        p_failures(-1.0, 1.0, 0)
    with pytest.raises(ValueError):
        p_failures(1.0, 1.0, -1)
    assert p_failures(0.0, 5.0, 0) == 1.0
    assert p_failures(0.0, 5.0, 3) == 0.0


def test_sample_fault_count_deterministic_and_zero():
    assert sample_fault_count(0.0, 100.0, seed=3) == 0
    a = sample_fault_count(4.0, 1.0, seed=42)
    assert a == sample_fault_count(4.0, 1.0, seed=42)


def test_sample_fault_count_mean():
    counts = [sample_fault_count(4.0, 1.0, seed=s) for s in range(100_000)]
    assert abs(np.mean(counts) - 4.0) <= 0.04
