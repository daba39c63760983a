"""42-bit fixed-point arithmetic and piecewise-linear function tables.

Models the digital astrocyte datapath: a Q20.20 two's-complement word with a
guard bit (2 sign bits, 20 integer bits, 20 fraction bits), saturating ops
with a sticky overflow flag, and PWL tables whose chained intercepts make the
approximation continuous by construction in raw integer space.

The slow pools decay by only parts-per-million per step, far below one Q20
fraction ulp, so the astro datapath keeps decay as a *scaled complement*:
one shared table of g(u) = 2^10 * (1 - e^(-u / 2^10)) supplies each pool's
per-step decrement gain with ten extra bits of effective resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .astro import AstroParams, AstroState

__all__ = [
    "FixedFormat",
    "Q20",
    "Fixed",
    "encode",
    "fx_add",
    "fx_sub",
    "fx_neg",
    "fx_mul",
    "fx_shift_right",
    "PWLTable",
    "build_pwl",
    "FixedAstroParams",
    "FixedAstroState",
    "encode_state",
    "decode_state",
    "fixed_astro_step",
]


@dataclass(frozen=True)
class FixedFormat:
    """Two's-complement fixed-point word layout."""

    sign_bits: int = 2      # sign plus one guard bit
    int_bits: int = 20
    frac_bits: int = 20

    def __post_init__(self) -> None:
        if self.sign_bits < 1 or self.int_bits < 0 or self.frac_bits < 0:
            raise ValueError("invalid fixed-point layout")

    @property
    def total_bits(self) -> int:
        return self.sign_bits + self.int_bits + self.frac_bits

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def max_raw(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def min_raw(self) -> int:
        return -(1 << (self.total_bits - 1))


Q20 = FixedFormat()


@dataclass(frozen=True)
class Fixed:
    """One fixed-point value; ``saturated`` is sticky across operations."""

    raw: int
    fmt: FixedFormat = Q20
    saturated: bool = False

    @property
    def value(self) -> float:
        return self.raw / self.fmt.scale

    def __repr__(self) -> str:  # keep hex raw visible when debugging
        sat = ", saturated" if self.saturated else ""
        return f"Fixed({self.value!r}{sat})"


def _saturate(raw: int, fmt: FixedFormat, sticky: bool) -> Fixed:
    if raw > fmt.max_raw:
        return Fixed(fmt.max_raw, fmt, True)
    if raw < fmt.min_raw:
        return Fixed(fmt.min_raw, fmt, True)
    return Fixed(raw, fmt, sticky)


def _round_half_even_div(num: int, den: int) -> int:
    """num / den rounded to nearest, ties to even (den a positive power of 2)."""
    q, r = divmod(num, den)     # Python floor division: r in [0, den)
    twice = 2 * r
    if twice > den or (twice == den and (q & 1)):
        q += 1
    return q


def encode(x: float, fmt: FixedFormat = Q20) -> Fixed:
    """Quantize a real number; round half to even, saturate out of range."""
    if math.isnan(x):
        raise ValueError("cannot encode NaN")
    if math.isinf(x):
        return Fixed(fmt.max_raw if x > 0 else fmt.min_raw, fmt, True)
    scaled = x * fmt.scale
    raw = int(math.floor(scaled))
    frac = scaled - raw
    if frac > 0.5 or (frac == 0.5 and (raw & 1)):
        raw += 1
    return _saturate(raw, fmt, False)


def _check_fmt(a: Fixed, b: Fixed) -> FixedFormat:
    if a.fmt != b.fmt:
        raise ValueError("mixed fixed-point formats")
    return a.fmt


def fx_add(a: Fixed, b: Fixed) -> Fixed:
    fmt = _check_fmt(a, b)
    return _saturate(a.raw + b.raw, fmt, a.saturated or b.saturated)


def fx_sub(a: Fixed, b: Fixed) -> Fixed:
    fmt = _check_fmt(a, b)
    return _saturate(a.raw - b.raw, fmt, a.saturated or b.saturated)


def fx_neg(a: Fixed) -> Fixed:
    return _saturate(-a.raw, a.fmt, a.saturated)


def fx_mul(a: Fixed, b: Fixed) -> Fixed:
    """Full double-width product, then round half even back to the format."""
    fmt = _check_fmt(a, b)
    raw = _round_half_even_div(a.raw * b.raw, fmt.scale)
    return _saturate(raw, fmt, a.saturated or b.saturated)


def fx_shift_right(a: Fixed, bits: int) -> Fixed:
    """Divide by 2**bits with round-half-even (an exact-width barrel shift)."""
    if bits < 0:
        raise ValueError("bits must be nonnegative")
    raw = _round_half_even_div(a.raw, 1 << bits) if bits else a.raw
    return _saturate(raw, a.fmt, a.saturated)


# ---------------------------------------------------------------------------
# Piecewise-linear tables


def _adaptive_breakpoints(f: Callable[[float], float], lo: float, hi: float,
                          segments: int) -> np.ndarray:
    """Place knots at equal quantiles of integrated sqrt-curvature.

    Chord error on a segment grows as width^2 * |f''|, so equalizing the
    integral of |f''|^(1/2) equalizes per-segment error.
    """
    xs = np.linspace(lo, hi, 4097)
    ys = np.array([f(x) for x in xs])
    d2 = np.gradient(np.gradient(ys, xs), xs)
    w = np.sqrt(np.abs(d2))
    w = w + 1e-12 * (w.max() if w.max() > 0 else 1.0) + 1e-300
    cum = np.concatenate([[0.0], np.cumsum((w[1:] + w[:-1]) * np.diff(xs) / 2.0)])
    targets = np.linspace(0.0, cum[-1], segments + 1)
    knots = np.interp(targets, cum, xs)
    knots[0], knots[-1] = lo, hi
    # Guard against degenerate (zero-width) segments on flat regions.
    for i in range(1, segments + 1):
        if knots[i] <= knots[i - 1]:
            knots[i] = knots[i - 1] + (hi - lo) * 1e-9
    return knots


@dataclass(frozen=True)
class PWLTable:
    """Segmented linear approximation evaluated entirely in fixed point."""

    breakpoints: np.ndarray         # float knots, length segments + 1
    x_fx: tuple[Fixed, ...]         # encoded knots
    slopes: tuple[Fixed, ...]
    intercepts: tuple[Fixed, ...]   # chained: exact continuity in raw ints
    fmt: FixedFormat

    @property
    def segments(self) -> int:
        return len(self.slopes)

    def _segment_of(self, raw: int) -> int:
        lo, hi = 0, self.segments - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if raw >= self.x_fx[mid].raw:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def eval_fixed(self, x: Fixed) -> Fixed:
        if x.fmt != self.fmt:
            raise ValueError("mixed fixed-point formats")
        raw = min(max(x.raw, self.x_fx[0].raw), self.x_fx[-1].raw)
        i = self._segment_of(raw)
        dx = Fixed(raw - self.x_fx[i].raw, self.fmt, x.saturated)
        return fx_add(self.intercepts[i], fx_mul(self.slopes[i], dx))

    def eval(self, x: float) -> float:
        return self.eval_fixed(encode(x, self.fmt)).value

    def max_error(self, f: Callable[[float], float], n: int = 8192) -> float:
        xs = np.linspace(self.breakpoints[0], self.breakpoints[-1], n)
        return max(abs(self.eval(float(x)) - f(float(x))) for x in xs)


def build_pwl(
    f: Callable[[float], float],
    domain: tuple[float, float] = (0.0, 10.0),
    segments: int = 16,
    placement: str | Sequence[float] = "adaptive",
    fmt: FixedFormat = Q20,
) -> PWLTable:
    """Fit a continuous PWL table to ``f``.

    ``placement`` is "adaptive" (curvature-equalized, the default), "uniform",
    or an explicit knot sequence. Slopes are quantized to the fixed format and
    intercepts are chained through fixed arithmetic, so adjacent segments meet
    exactly in raw integer space.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise ValueError("empty domain")
    if segments < 1:
        raise ValueError("need at least one segment")
    if isinstance(placement, str):
        if placement == "uniform":
            knots = np.linspace(lo, hi, segments + 1)
        elif placement == "adaptive":
            knots = _adaptive_breakpoints(f, lo, hi, segments)
        else:
            raise ValueError(f"unknown placement {placement!r}")
    else:
        knots = np.asarray(placement, dtype=float)
        if knots.ndim != 1 or len(knots) != segments + 1:
            raise ValueError("knot sequence must have segments + 1 entries")
        if (np.diff(knots) <= 0).any():
            raise ValueError("knots must be strictly increasing")
        if knots[0] != lo or knots[-1] != hi:
            raise ValueError("knots must span the domain")

    x_fx = tuple(encode(float(x), fmt) for x in knots)
    slopes = []
    intercepts = [encode(f(float(knots[0])), fmt)]
    for i in range(segments):
        x0, x1 = float(knots[i]), float(knots[i + 1])
        slopes.append(encode((f(x1) - f(x0)) / (x1 - x0), fmt))
        dx = Fixed(x_fx[i + 1].raw - x_fx[i].raw, fmt)
        intercepts.append(fx_add(intercepts[i], fx_mul(slopes[i], dx)))
    return PWLTable(knots, x_fx, tuple(slopes), tuple(intercepts[:-1]), fmt)


# ---------------------------------------------------------------------------
# Fixed-point astrocyte datapath

_COMPLEMENT_SHIFT = 10  # table carries decay decrements scaled by 2^10


class FixedAstroState(NamedTuple):
    ag: Fixed
    ca: Fixed
    glu: Fixed
    esp: Fixed
    dse: Fixed
    pr: Fixed
    # Decay residue registers: dropped decrement fractions carried to the next
    # step so slow pools decay without per-step rounding bias.
    r_ag: int = 0
    r_ca: int = 0
    r_glu: int = 0
    r_esp: int = 0


@dataclass(frozen=True)
class FixedAstroParams:
    """Quantized constants plus the shared decay table for one astrocyte."""

    fmt: FixedFormat
    table: PWLTable
    g_ag: Fixed             # scaled per-step decrement gains, one per pool
    g_ca: Fixed
    g_glu: Fixed
    g_esp: Fixed
    impulse: Fixed
    k_plc_dt: Fixed
    threshold: Fixed
    glu_jump: Fixed
    m_esp_dt: Fixed
    k_ag_abs: Fixed
    dse_sign: int
    pr0: Fixed
    inv100: Fixed
    one: Fixed
    zero: Fixed

    @classmethod
    def from_params(cls, params: AstroParams, segments: int = 16,
                    fmt: FixedFormat = Q20) -> "FixedAstroParams":
        p = params
        scale = float(1 << _COMPLEMENT_SHIFT)

        def g(u: float) -> float:
            return scale * -math.expm1(-u / scale)

        # Table addresses calibrated so the table reproduces the reference
        # model's Euler decrements exactly at infinite precision; what remains
        # is the table's own interpolation and quantization error.
        rates = [p.dt / p.tau_ag, p.dt / p.tau_ca, p.dt / p.tau_glu,
                 p.dt / p.tau_esp]
        addrs = [-scale * math.log1p(-q) for q in rates]
        table = build_pwl(g, (0.0, max(addrs) * 1.05), segments, "adaptive", fmt)
        gains = [table.eval_fixed(encode(u, fmt)) for u in addrs]
        return cls(
            fmt=fmt,
            table=table,
            g_ag=gains[0], g_ca=gains[1], g_glu=gains[2], g_esp=gains[3],
            impulse=encode(p.impulse_per_spike, fmt),
            k_plc_dt=encode(p.k_plc * p.dt, fmt),
            threshold=encode(p.ca_threshold, fmt),
            glu_jump=encode(p.glu_release_jump, fmt),
            m_esp_dt=encode(p.m_esp * p.dt / p.tau_esp, fmt),
            k_ag_abs=encode(abs(p.k_ag), fmt),
            dse_sign=int(math.copysign(1.0, p.dse_sign * p.k_ag)),
            pr0=encode(p.pr0, fmt),
            inv100=encode(0.01, fmt),
            one=encode(1.0, fmt),
            zero=Fixed(0, fmt),
        )


def encode_state(state: AstroState, fmt: FixedFormat = Q20) -> FixedAstroState:
    return FixedAstroState(*(encode(v, fmt) for v in state))


def decode_state(state: FixedAstroState) -> AstroState:
    return AstroState(*(v.value for v in state[:6]))


# Decrement products carry frac_bits + frac_bits + shift extra bits; the low
# 30 stay behind in the residue register.
_RESIDUE_BITS = 20 + _COMPLEMENT_SHIFT
_RESIDUE_MASK = (1 << _RESIDUE_BITS) - 1


def _decay(x: Fixed, gain: Fixed, residue: int) -> tuple[Fixed, int]:
    """x minus its scaled-complement decrement, exact in the long run.

    The decrement x*g*2^-10 is far below one ulp per step for the slow pools,
    so the dropped fraction accumulates in ``residue`` and carries into later
    steps instead of rounding away (plateau-free decay).
    """
    acc = residue + x.raw * gain.raw
    dec = acc >> _RESIDUE_BITS
    return _saturate(x.raw - dec, x.fmt, x.saturated), acc & _RESIDUE_MASK


def fixed_astro_step(state: FixedAstroState, fp: FixedAstroParams,
                     spikes: float = 0.0) -> FixedAstroState:
    """One astrocyte Euler step in the quantized datapath.

    Mirrors the float model step for step: same ordering, same pre-update
    couplings, same subtract-threshold calcium release.
    """
    ag, r_ag = _decay(state.ag, fp.g_ag, state.r_ag)
    if spikes:
        ag = fx_add(ag, fx_mul(fp.impulse, encode(spikes, fp.fmt)))
    ca, r_ca = _decay(state.ca, fp.g_ca, state.r_ca)
    ca = fx_add(ca, fx_mul(fp.k_plc_dt, state.ag))
    jump = fp.zero
    if ca.raw >= fp.threshold.raw:
        ca = fx_sub(ca, fp.threshold)
        jump = fp.glu_jump
    glu, r_glu = _decay(state.glu, fp.g_glu, state.r_glu)
    glu = fx_add(glu, jump)
    esp, r_esp = _decay(state.esp, fp.g_esp, state.r_esp)
    esp = fx_add(esp, fx_mul(fp.m_esp_dt, state.glu))
    dse = fx_mul(fp.k_ag_abs, ag)
    if fp.dse_sign < 0:
        dse = fx_neg(dse)
    pr = fx_mul(fp.pr0, fx_add(fp.one, fx_mul(fx_add(dse, esp), fp.inv100)))
    if pr.raw < 0:
        pr = Fixed(0, fp.fmt, pr.saturated)
    elif pr.raw > fp.one.raw:
        pr = Fixed(fp.one.raw, fp.fmt, pr.saturated)
    return FixedAstroState(ag, ca, glu, esp, dse, pr, r_ag, r_ca, r_glu, r_esp)
