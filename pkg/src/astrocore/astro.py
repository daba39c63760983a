"""Astrocyte self-repair dynamics.

Forward-Euler model of one astrocyte watching a set of synapses. Presynaptic
spikes release 2-AG which (a) directly depresses transmission (DSE) and (b)
drives an IP3/calcium store that releases glutamate quanta on threshold
crossings, potentiating transmission (eSP). At the calibrated operating point
the two branches cancel and the release probability sits at its baseline; when
part of the input disappears the slow eSP branch outweighs the fast DSE branch
and the release probability climbs until the site's output recovers.

State units: concentrations in uM, time in seconds, rates in Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "AstroParams",
    "AstroState",
    "AstroTrace",
    "ReadoutParams",
    "SourceCut",
    "initial_state",
    "self_repair_run",
    "steady_state",
    "step",
    "simulate",
    "time_scaled",
]


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


@dataclass(frozen=True)
class AstroParams:
    """Astrocyte model constants.

    ``k_plc=None`` picks the calcium gain automatically so that the eSP and
    DSE branches cancel for a sustained Poisson input at
    ``calibration_rate_hz``; the balance is then rate-independent up to the
    small calcium leak term.
    """

    tau_ag: float = 10.0            # 2-AG decay constant, s
    r_ag: float = 0.8               # 2-AG production rate, uM/s of spike drive
    tau_glu: float = 0.1            # glutamate decay constant, s
    r_glu: float = 10.0             # glutamate release rate, uM/s during a pulse
    ca_threshold: float = 0.3       # calcium release threshold, uM
    tau_ca: float = 2.0             # calcium leak constant, s
    tau_esp: float = 40.0           # eSP decay constant, s
    m_esp: float = 55_000.0         # eSP weight on glutamate, %/uM
    k_ag: float = -4000.0           # DSE weight on 2-AG, %/uM
    pr0: float = 0.5                # baseline release probability
    dt: float = 1e-3                # integration step, s
    k_plc: float | None = None      # calcium production gain, 1/s (None: calibrate)
    input_gain: float = 0.25        # dimensionless scale on the per-spike impulse
    release_pulse_s: float = 1e-3   # effective width of one glutamate release pulse
    dse_sign: float = 1.0           # +1: DSE depresses; -1: sign-flipped variant
    calibration_rate_hz: float = 60.0
    k_plc_auto: bool = field(init=False, default=False)

    def __post_init__(self) -> None:
        for name in ("tau_ag", "tau_glu", "tau_ca", "tau_esp", "dt",
                     "ca_threshold", "input_gain", "release_pulse_s",
                     "calibration_rate_hz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("r_ag", "r_glu", "m_esp"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not 0.0 < self.pr0 <= 1.0:
            raise ValueError("pr0 must be in (0, 1]")
        if self.dse_sign not in (1.0, -1.0, 1, -1):
            raise ValueError("dse_sign must be +1 or -1")
        # Decay factors (1 - dt/tau) must stay well away from sign flips.
        if self.dt >= 0.5 * min(self.tau_glu, self.tau_ca):
            raise ValueError("dt too coarse for the fastest time constant")
        if self.k_plc is None:
            object.__setattr__(self, "k_plc", self._calibrated_k_plc())
            object.__setattr__(self, "k_plc_auto", True)
        elif self.k_plc < 0:
            raise ValueError("k_plc must be nonnegative")

    @property
    def impulse_per_spike(self) -> float:
        """2-AG added by one presynaptic spike, uM."""
        return self.r_ag * self.dt * self.input_gain

    @property
    def glu_release_jump(self) -> float:
        """Glutamate added by one calcium release event, uM."""
        return self.r_glu * self.release_pulse_s

    def _calibrated_k_plc(self) -> float:
        ag_ref = self.calibration_rate_hz * self.impulse_per_spike * self.tau_ag
        branch = self.m_esp * self.glu_release_jump * self.tau_glu
        if branch == 0.0:
            return 0.0
        # Release rate that makes eSP cancel DSE at the reference input,
        # then invert the hover-leak-corrected rate law for the gain.
        f_star = abs(self.k_ag) * ag_ref / branch
        thr = self.ca_threshold
        return (f_star * thr + thr / (2.0 * self.tau_ca)) / ag_ref


class AstroState(NamedTuple):
    """Instantaneous astrocyte state."""

    ag: float       # 2-AG concentration, uM
    ca: float       # calcium store level, uM
    glu: float      # gliotransmitter glutamate, uM
    esp: float      # slow potentiation term, %
    dse: float      # fast depression term, %
    pr: float       # release probability applied to the watched synapses


def initial_state(params: AstroParams) -> AstroState:
    """Quiescent state: empty pools, baseline release probability."""
    return AstroState(0.0, 0.0, 0.0, 0.0, 0.0, params.pr0)


def _release_rate(params: AstroParams, ag: float) -> float:
    """Sustained calcium threshold-crossing rate at a fixed 2-AG level, 1/s."""
    thr = params.ca_threshold
    if params.k_plc * ag * params.tau_ca <= thr:
        return 0.0
    return (params.k_plc * ag - thr / (2.0 * params.tau_ca)) / thr


def steady_state(params: AstroParams, rate_hz: float) -> AstroState:
    """Analytic operating point for a sustained input of ``rate_hz`` spikes/s.

    ``rate_hz`` counts spikes per second of the params' own time axis (mind
    this when the params were rescaled with :func:`time_scaled`).
    """
    ag = rate_hz * params.impulse_per_spike * params.tau_ag
    f = _release_rate(params, ag)
    glu = params.glu_release_jump * f * params.tau_glu
    esp = params.m_esp * glu
    dse = params.dse_sign * params.k_ag * ag
    pr = _clamp01(params.pr0 * (1.0 + (dse + esp) / 100.0))
    ca = 0.5 * params.ca_threshold if f > 0 else params.k_plc * ag * params.tau_ca
    return AstroState(ag, ca, glu, esp, dse, pr)


def step(state: AstroState, params: AstroParams, spikes: float = 0.0) -> AstroState:
    """Advance one Euler step.

    ``spikes`` is the presynaptic event mass seen this step (a count, possibly
    rescaled by a drive normalization). Returns the new state; the caller
    thins transmission with the *pre-step* ``state.pr``.
    """
    p = params
    ag = state.ag * (1.0 - p.dt / p.tau_ag) + p.impulse_per_spike * spikes
    ca = state.ca + p.dt * (p.k_plc * state.ag - state.ca / p.tau_ca)
    jump = 0.0
    if ca >= p.ca_threshold:
        # Release consumes one threshold quantum; the residual carries over so
        # the long-run release rate is independent of the step size.
        ca -= p.ca_threshold
        jump = p.glu_release_jump
    glu = state.glu * (1.0 - p.dt / p.tau_glu) + jump
    esp = state.esp * (1.0 - p.dt / p.tau_esp) + p.dt * (p.m_esp / p.tau_esp) * state.glu
    dse = p.dse_sign * p.k_ag * ag
    pr = _clamp01(p.pr0 * (1.0 + (dse + esp) / 100.0))
    return AstroState(ag, ca, glu, esp, dse, pr)


def time_scaled(params: AstroParams, factor: float) -> AstroParams:
    """Params for an astrocyte whose clock runs ``factor`` times faster.

    One caller step then advances the internal dynamics by ``factor * dt``
    model seconds. Auto-calibrated gains are re-solved at the rescaled
    reference rate so the operating point is preserved exactly.
    """
    if factor <= 0:
        raise ValueError("factor must be positive")
    return replace(
        params,
        dt=params.dt * factor,
        k_plc=None if params.k_plc_auto else params.k_plc,
        calibration_rate_hz=params.calibration_rate_hz / factor,
    )


@dataclass(frozen=True)
class SourceCut:
    """Input fault: source ``source`` falls silent at ``time_s``."""

    time_s: float
    source: int


@dataclass
class AstroTrace:
    """Windowed samples from :func:`simulate`."""

    time_s: np.ndarray
    ag: np.ndarray
    ca: np.ndarray
    glu: np.ndarray
    esp: np.ndarray
    dse: np.ndarray
    pr: np.ndarray
    in_rate_hz: np.ndarray      # aggregate presynaptic rate per window
    out_rate_hz: np.ndarray     # aggregate transmitted rate per window

    COLUMNS = ("time_s", "ag", "ca", "glu", "esp", "dse", "pr",
               "in_rate_hz", "out_rate_hz")

    def to_csv(self, path) -> None:
        data = np.column_stack([getattr(self, c) for c in self.COLUMNS])
        np.savetxt(path, data, fmt="%.9g", delimiter=",",
                   header=",".join(self.COLUMNS), comments="")

    def mean_out_rate(self, t_start: float = 0.0, t_end: float = math.inf) -> float:
        m = (self.time_s > t_start) & (self.time_s <= t_end)
        if not m.any():
            raise ValueError("no samples in the requested window")
        return float(self.out_rate_hz[m].mean())


def simulate(
    params: AstroParams,
    input_rates_hz: Sequence[float],
    duration_s: float,
    *,
    faults: Sequence[SourceCut] = (),
    seed: int = 0,
    sample_every: int = 100,
    initial: AstroState | None = None,
) -> AstroTrace:
    """Run one astrocyte over independent Poisson sources with Bernoulli thinning.

    Each source feeds one watched synapse; a source spike is transmitted with
    the current release probability. ``faults`` silence sources permanently
    from their onset time. Samples (state plus window rates) are recorded
    every ``sample_every`` steps.
    """
    p = params
    rates = np.asarray(input_rates_hz, dtype=float)
    if rates.ndim != 1 or rates.size == 0:
        raise ValueError("input_rates_hz must be a non-empty 1-D sequence")
    if (rates < 0).any():
        raise ValueError("input rates must be nonnegative")
    n_steps = int(round(duration_s / p.dt))
    if n_steps <= 0:
        raise ValueError("duration too short for one step")
    if sample_every <= 0:
        raise ValueError("sample_every must be positive")

    rng = np.random.default_rng(seed)
    spikes = rng.random((n_steps, rates.size)) < rates * p.dt
    thin_u = rng.random((n_steps, rates.size))
    for f in faults:
        if not 0 <= f.source < rates.size:
            raise ValueError(f"fault names unknown source {f.source}")
        spikes[int(round(f.time_s / p.dt)):, f.source] = False

    state = initial if initial is not None else initial_state(p)
    rows: list[tuple[float, ...]] = []
    window_in = 0
    window_out = 0
    window_s = sample_every * p.dt
    for t in range(n_steps):
        ev = spikes[t]
        n_ev = int(ev.sum())
        if n_ev:
            window_in += n_ev
            window_out += int((thin_u[t][ev] < state.pr).sum())
        state = step(state, p, spikes=float(n_ev))
        if (t + 1) % sample_every == 0:
            rows.append(((t + 1) * p.dt, state.ag, state.ca, state.glu,
                         state.esp, state.dse, state.pr,
                         window_in / window_s, window_out / window_s))
            window_in = 0
            window_out = 0

    cols = np.asarray(rows, dtype=float).T
    return AstroTrace(*cols)


@dataclass(frozen=True)
class ReadoutParams:
    """Leaky integrator downstream of the watched synapses.

    Transmitted spikes add ``weight`` to a potential that leaks with
    ``tau_m`` and fires (subtract-reset) at ``threshold``. Sustained drive
    keeps the readout firing only above the rate cliff
    ``threshold / (weight * tau_m)`` transmitted spikes per second. The
    defaults put that cliff at 22 Hz: a 60 Hz site at baseline release
    probability 0.5 transmits ~30 Hz and fires steadily, but after losing
    half its input it transmits ~15 Hz and falls silent unless the release
    probability climbs.
    """

    tau_m: float = 1.0       # membrane time constant, s
    threshold: float = 1.1   # firing threshold on the integrated potential
    weight: float = 0.05     # potential added per transmitted spike

    def __post_init__(self) -> None:
        for name in ("tau_m", "threshold", "weight"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def cliff_rate_hz(self) -> float:
        """Transmitted rate below which sustained drive stays sub-threshold."""
        return self.threshold / (self.weight * self.tau_m)


def self_repair_run(
    params: AstroParams,
    readout: ReadoutParams = ReadoutParams(),
    *,
    n_sources: int = 2,
    source_rate_hz: float = 30.0,
    duration_s: float = 100.0,
    fault_time_s: float | None = 50.0,
    repair: bool = True,
    seed: int = 0,
    sample_every: int = 100,
) -> AstroTrace:
    """Closed-loop site: Poisson sources -> gated synapses -> leaky readout.

    Source 0 falls silent at ``fault_time_s`` (None for a healthy run).
    With ``repair`` the transmission probability follows the astrocyte
    state; without it the probability stays frozen at ``pr0``, modeling the
    same site with the feedback disabled. Runs sharing a seed see identical
    source spikes and thinning draws regardless of the fault or ``repair``
    setting, so rate differences are attributable to the feedback alone.

    The run starts at the healthy operating point, so early windows measure
    the baseline. In the returned trace ``out_rate_hz`` is the *readout*
    firing rate (not the transmitted rate, as in :func:`simulate`) and
    ``in_rate_hz`` is the aggregate presynaptic rate.
    """
    p = params
    if n_sources < 1:
        raise ValueError("need at least one source")
    if source_rate_hz < 0:
        raise ValueError("source rate must be nonnegative")
    n_steps = int(round(duration_s / p.dt))
    if n_steps <= 0:
        raise ValueError("duration too short for one step")
    if sample_every <= 0:
        raise ValueError("sample_every must be positive")

    rng = np.random.default_rng(seed)
    spikes = rng.random((n_steps, n_sources)) < source_rate_hz * p.dt
    thin_u = rng.random((n_steps, n_sources))
    if fault_time_s is not None:
        if not 0 <= fault_time_s <= duration_s:
            raise ValueError("fault time outside the run")
        spikes[int(round(fault_time_s / p.dt)):, 0] = False

    state = steady_state(p, n_sources * source_rate_hz)
    v = 0.0
    v_decay = 1.0 - p.dt / readout.tau_m
    rows: list[tuple[float, ...]] = []
    window_in = 0
    window_out = 0
    window_s = sample_every * p.dt
    for t in range(n_steps):
        ev = spikes[t]
        n_ev = int(ev.sum())
        pr = state.pr if repair else p.pr0
        if n_ev:
            window_in += n_ev
            v += readout.weight * int((thin_u[t][ev] < pr).sum())
        if v >= readout.threshold:
            window_out += 1
            v -= readout.threshold
        v *= v_decay
        state = step(state, p, spikes=float(n_ev))
        if (t + 1) % sample_every == 0:
            # The pr column records the probability actually applied, so a
            # frozen run reports a flat pr0 line.
            rows.append(((t + 1) * p.dt, state.ag, state.ca, state.glu,
                         state.esp, state.dse,
                         state.pr if repair else p.pr0,
                         window_in / window_s, window_out / window_s))
            window_in = 0
            window_out = 0

    cols = np.asarray(rows, dtype=float).T
    return AstroTrace(*cols)
