"""Closed-form lifetime models for logic and memory failure mechanisms.

Three mechanisms are modeled — transistor aging (bias temperature
instability), NVM cell endurance limited by self-heating, and NVM read
disturbance — each as a mean-time-to-failure in hours. Independent
mechanisms combine by summing failure rates; failure counts over an
interval then follow a Poisson law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .presets import BOLTZMANN_EV_PER_K, FAULT_CONSTANTS

__all__ = [
    "BtiParams",
    "EnduranceParams",
    "DisturbParams",
    "FailureRates",
    "mttf_bti",
    "failure_rate",
    "self_heating_temp",
    "mttf_endurance",
    "mttf_disturb",
    "sofr",
    "overall_mttf",
    "p_failures",
    "sample_fault_count",
    "cycles_to_hours",
]

_FC = FAULT_CONSTANTS


@dataclass(frozen=True)
class BtiParams:
    """Transistor-aging MTTF constants: A / V^gamma * exp(E_a / (K*T)).

    A, gamma and E_a are calibrated (A solves MTTF = 2 nominal years at
    V = 1 V, T = 300 K), not vendor data.
    """

    a_const: float = _FC.bti_a          # hours * V^gamma_v
    gamma_v: float = _FC.bti_gamma
    e_a: float = _FC.bti_ea_ev          # eV
    k_boltz: float = BOLTZMANN_EV_PER_K
    temperature: float = 300.0          # K
    voltage: float = 1.0                # V

    def __post_init__(self) -> None:
        for name in ("a_const", "gamma_v", "e_a", "k_boltz", "temperature",
                     "voltage"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class EnduranceParams:
    """NVM self-heating and endurance constants.

    ``k_factor`` is an opaque positive factor (the source material is
    ambiguous about its physical units). ``tsh_literal`` switches the
    self-heating expression from the physically consistent product form to
    the literal additive form for comparison.
    """

    gamma_fit: float = _FC.endurance_scale_k    # K
    i_cell: float = _FC.sh_current_a            # A
    r_cell: float = _FC.sh_resistance_ohm       # ohm
    thickness_l: float = _FC.sh_length_cm       # cm
    volume_v: float = _FC.sh_volume_cm3         # cm^3
    heat_capacity_c: float = _FC.sh_heat_capacity
    k_factor: float = _FC.sh_k_factor
    t_amb: float = 300.0                        # K
    time_t: float = 1.0                         # s
    tsh_literal: bool = False

    def __post_init__(self) -> None:
        for name in ("gamma_fit", "i_cell", "r_cell", "thickness_l",
                     "volume_v", "heat_capacity_c", "k_factor", "t_amb"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.time_t < 0:
            raise ValueError("time_t must be nonnegative")


@dataclass(frozen=True)
class DisturbParams:
    """Read-disturbance model input: the applied read voltage."""

    voltage: float = 0.3    # V

    def __post_init__(self) -> None:
        if self.voltage < 0:
            raise ValueError("voltage must be nonnegative")


@dataclass(frozen=True)
class FailureRates:
    """Per-mechanism failure rates in 1/hour."""

    lambda_aging: float = 0.0
    lambda_endurance: float = 0.0
    lambda_disturb: float = 0.0

    def __post_init__(self) -> None:
        for name in ("lambda_aging", "lambda_endurance", "lambda_disturb"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def mttf_bti(p: BtiParams) -> float:
    """Aging MTTF in hours: A / V^gamma * exp(E_a / (K*T))."""
    return p.a_const / p.voltage ** p.gamma_v * math.exp(
        p.e_a / (p.k_boltz * p.temperature))


def failure_rate(mttf: float) -> float:
    """Rate in 1/hour for an exponential mechanism with the given MTTF."""
    if mttf <= 0:
        raise ValueError("mttf must be positive")
    return 1.0 / mttf


def self_heating_temp(p: EnduranceParams) -> float:
    """Cell temperature in kelvin after ``time_t`` seconds of current flow.

    Product form: steady-state rise I^2*R*l^2/(k*V) times the saturation
    factor 1 - exp(-k*t/(l^2*C)), plus ambient. The additive
    (``tsh_literal``) variant subtracts the saturation factor instead of
    multiplying it; note the additive form keeps a constant offset at t = 0,
    so only the product form returns exactly ambient there.
    """
    rise = (p.i_cell ** 2 * p.r_cell * p.thickness_l ** 2
            / (p.k_factor * p.volume_v))
    saturation = -math.expm1(-p.k_factor * p.time_t
                             / (p.thickness_l ** 2 * p.heat_capacity_c))
    if p.tsh_literal:
        return rise - saturation + p.t_amb
    return rise * saturation + p.t_amb


def mttf_endurance(p: EnduranceParams) -> float:
    """Endurance MTTF in hours: exp(gamma_fit / T_SH)."""
    t_sh = self_heating_temp(p)
    if t_sh <= 0:
        raise ValueError("self-heating temperature must be positive")
    return math.exp(p.gamma_fit / t_sh)


def mttf_disturb(p: DisturbParams) -> float:
    """Read-disturb MTTF in hours: 10^(slope*V + intercept)."""
    return 10.0 ** (_FC.disturb_slope * p.voltage + _FC.disturb_intercept)


def sofr(rates: FailureRates) -> float:
    """Overall failure rate: the sum of the independent mechanism rates."""
    return rates.lambda_aging + rates.lambda_endurance + rates.lambda_disturb


def overall_mttf(rates: FailureRates) -> float:
    """1 / overall rate; infinity when every mechanism rate is zero."""
    lam = sofr(rates)
    return math.inf if lam == 0.0 else 1.0 / lam


def p_failures(lambda_overall: float, interval_t: float, n: int) -> float:
    """Probability of exactly n failures in the interval (Poisson pmf).

    Evaluated in log space so large n neither overflows the factorial nor
    underflows the power term.
    """
    if lambda_overall < 0 or interval_t < 0:
        raise ValueError("rate and interval must be nonnegative")
    if n < 0:
        raise ValueError("n must be nonnegative")
    lt = lambda_overall * interval_t
    if lt == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(lt) - lt - math.lgamma(n + 1))


def sample_fault_count(lambda_overall: float, interval_t: float,
                       seed: int = 0) -> int:
    """One Poisson-distributed failure count for the interval, seeded."""
    lt = lambda_overall * interval_t
    if lt < 0:
        raise ValueError("rate-interval product must be nonnegative")
    return int(np.random.default_rng(seed).poisson(lt))


def cycles_to_hours(cycles: float, access_hz: float) -> float:
    """Convert an endurance cycle budget to hours at a fixed access rate."""
    if access_hz <= 0:
        raise ValueError("access_hz must be positive")
    if cycles < 0:
        raise ValueError("cycles must be nonnegative")
    return cycles / access_hz / 3600.0
