"""Desk-scale spiking inference engine with fault injection and astro repair.

Feed-forward LIF networks with 2-bit quantized weights and stochastic
synapses: every synapse transmits a presynaptic spike with probability pr0
unless an attached astrocyte overrides its group's release probability.
Inputs are rate-coded Poisson trains; the predicted class is the argmax of
output spike counts (ties to the lowest neuron id).

Inference is batched: all samples of an evaluation run step together as
(batch, neurons) arrays, which is what keeps fault sweeps and the insertion
algorithm at desk scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .astro import AstroParams, AstroState, steady_state, time_scaled

__all__ = [
    "LifParams",
    "ModelGraph",
    "Dataset",
    "FaultSpec",
    "FaultRecord",
    "FAULT_KINDS",
    "AstroGroup",
    "AstroAllocation",
    "AstroContext",
    "EvalHarness",
    "RunResult",
    "build_toy_model",
    "inject_faults",
    "attach_astrocytes",
    "run_batch",
    "infer",
    "accuracy",
]

WEIGHT_LEVELS = (-2, -1, 0, 1)
FAULT_KINDS = ("weight_bit_flip", "neuron_stuck_off", "synapse_stuck_zero")


@dataclass(frozen=True)
class LifParams:
    """Leaky integrate-and-fire neuron constants."""

    v_threshold: float = 1.0
    leak_tau: float = 0.05      # membrane time constant, s
    v_reset: float = 0.0
    refractory: float = 0.0     # s

    def __post_init__(self) -> None:
        if self.v_threshold <= self.v_reset:
            raise ValueError("v_threshold must exceed v_reset")
        if self.leak_tau <= 0:
            raise ValueError("leak_tau must be positive")
        if self.refractory < 0:
            raise ValueError("refractory must be nonnegative")


@dataclass(frozen=True)
class FaultRecord:
    """One applied fault, traceable to a specific parameter."""

    kind: str
    edge_id: int
    layer: int          # source layer of the edge
    pre: int            # local index in the source layer
    post: int           # local index in the target layer
    old_code: int
    new_code: int


@dataclass
class ModelGraph:
    """Layered feed-forward spiking network with 2-bit weight codes.

    ``codes[l]`` holds the (layer_sizes[l], layer_sizes[l+1]) weight codes in
    {-2,-1,0,1}; the effective weight is code * scales[l]. Treated as
    immutable after construction; fault injection returns a modified copy.
    """

    layer_sizes: tuple[int, ...]
    codes: tuple[np.ndarray, ...]
    scales: tuple[float, ...]
    lif: LifParams = LifParams()
    dt: float = 1e-3
    pr0: float = 0.5
    max_rate_hz: float = 300.0
    disabled: frozenset[int] = frozenset()      # absolute neuron ids
    baseline_accuracy: float | None = None
    faults_applied: tuple[FaultRecord, ...] = ()

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError("need >= 2 layers, all non-empty")
        self.layer_sizes = sizes
        if len(self.codes) != len(sizes) - 1 or len(self.scales) != len(sizes) - 1:
            raise ValueError("need one code block and scale per layer pair")
        checked = []
        for l, block in enumerate(self.codes):
            arr = np.asarray(block, dtype=np.int8)
            if arr.shape != (sizes[l], sizes[l + 1]):
                raise ValueError(f"code block {l} has wrong shape")
            if not np.isin(arr, WEIGHT_LEVELS).all():
                raise ValueError("weight codes must be in {-2,-1,0,1}")
            checked.append(arr)
        self.codes = tuple(checked)
        self.scales = tuple(float(s) for s in self.scales)
        if not 0.0 < self.pr0 <= 1.0:
            raise ValueError("pr0 must be in (0, 1]")
        if self.dt <= 0 or self.max_rate_hz <= 0:
            raise ValueError("dt and max_rate_hz must be positive")

    # -- geometry ----------------------------------------------------------
    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes)

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    @property
    def n_neurons(self) -> int:
        return sum(self.layer_sizes)

    @property
    def parameter_count(self) -> int:
        return sum(b.size for b in self.codes)

    def layer_offset(self, layer: int) -> int:
        return sum(self.layer_sizes[:layer])

    def edge_block_offset(self, layer: int) -> int:
        return sum(self.layer_sizes[m] * self.layer_sizes[m + 1]
                   for m in range(layer))

    def locate_neuron(self, neuron_id: int) -> tuple[int, int]:
        """Split an absolute neuron id into (layer, local index)."""
        if not 0 <= neuron_id < self.n_neurons:
            raise ValueError(f"neuron id {neuron_id} out of range")
        for layer, size in enumerate(self.layer_sizes):
            offset = self.layer_offset(layer)
            if neuron_id < offset + size:
                return layer, neuron_id - offset
        raise AssertionError("unreachable")

    def locate_edge(self, edge_id: int) -> tuple[int, int, int]:
        """Global edge id -> (source layer, pre local, post local)."""
        if not 0 <= edge_id < self.parameter_count:
            raise ValueError("edge id out of range")
        off = 0
        for l in range(self.n_layers - 1):
            block = self.layer_sizes[l] * self.layer_sizes[l + 1]
            if edge_id < off + block:
                local = edge_id - off
                return l, local // self.layer_sizes[l + 1], local % self.layer_sizes[l + 1]
            off += block
        raise AssertionError("unreachable")

    def layer_edge_ids(self, layer: int) -> np.ndarray:
        """Global ids of all edges whose source is ``layer``."""
        if not 0 <= layer < self.n_layers - 1:
            raise ValueError("not a source layer")
        off = self.edge_block_offset(layer)
        return np.arange(off, off + self.codes[layer].size)

    def clone(self, **overrides) -> "ModelGraph":
        base = dict(
            layer_sizes=self.layer_sizes,
            codes=tuple(b.copy() for b in self.codes),
            scales=self.scales,
            lif=self.lif,
            dt=self.dt,
            pr0=self.pr0,
            max_rate_hz=self.max_rate_hz,
            disabled=self.disabled,
            baseline_accuracy=self.baseline_accuracy,
            faults_applied=self.faults_applied,
        )
        base.update(overrides)
        return ModelGraph(**base)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> str:
        doc = {
            "layer_sizes": list(self.layer_sizes),
            "codes": [b.tolist() for b in self.codes],
            "scales": list(self.scales),
            "lif": {"v_threshold": self.lif.v_threshold,
                    "leak_tau": self.lif.leak_tau,
                    "v_reset": self.lif.v_reset,
                    "refractory": self.lif.refractory},
            "dt": self.dt,
            "pr0": self.pr0,
            "max_rate_hz": self.max_rate_hz,
            "disabled": sorted(self.disabled),
            "baseline_accuracy": self.baseline_accuracy,
            "faults": [vars(f) for f in self.faults_applied],
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ModelGraph":
        doc = json.loads(text)
        return cls(
            layer_sizes=tuple(doc["layer_sizes"]),
            codes=tuple(np.asarray(b, dtype=np.int8) for b in doc["codes"]),
            scales=tuple(doc["scales"]),
            lif=LifParams(**doc["lif"]),
            dt=doc["dt"],
            pr0=doc["pr0"],
            max_rate_hz=doc["max_rate_hz"],
            disabled=frozenset(doc["disabled"]),
            baseline_accuracy=doc["baseline_accuracy"],
            faults_applied=tuple(FaultRecord(**f) for f in doc["faults"]),
        )


@dataclass
class Dataset:
    """Rate-coded labeled samples with a train/eval split."""

    train_rates: np.ndarray     # (n_train, n_inputs), Hz
    train_labels: np.ndarray
    eval_rates: np.ndarray
    eval_labels: np.ndarray
    n_classes: int

    def __post_init__(self) -> None:
        for rates in (self.train_rates, self.eval_rates):
            if (np.asarray(rates) < 0).any():
                raise ValueError("rates must be nonnegative")
        for labels in (self.train_labels, self.eval_labels):
            arr = np.asarray(labels)
            if arr.size and (arr.min() < 0 or arr.max() >= self.n_classes):
                raise ValueError("labels out of range")

    def to_json(self) -> str:
        doc = {
            "train_rates": self.train_rates.tolist(),
            "train_labels": self.train_labels.tolist(),
            "eval_rates": self.eval_rates.tolist(),
            "eval_labels": self.eval_labels.tolist(),
            "n_classes": self.n_classes,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        doc = json.loads(text)
        return cls(
            train_rates=np.asarray(doc["train_rates"], dtype=float),
            train_labels=np.asarray(doc["train_labels"], dtype=int),
            eval_rates=np.asarray(doc["eval_rates"], dtype=float),
            eval_labels=np.asarray(doc["eval_labels"], dtype=int),
            n_classes=doc["n_classes"],
        )


@dataclass(frozen=True)
class FaultSpec:
    """Which fraction of parameters to corrupt, how, and with what seed."""

    error_rate: float
    kinds: tuple[str, ...] = FAULT_KINDS
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError("error_rate must be in [0, 1]")
        if not self.kinds:
            raise ValueError("need at least one fault kind")
        for k in self.kinds:
            if k not in FAULT_KINDS:
                raise ValueError(f"unknown fault kind {k!r}")


def _flip_code_bit(code: int, bit: int) -> int:
    u = (code & 0b11) ^ (1 << bit)
    return u - 4 if u >= 2 else u


def apply_fault(model: ModelGraph, kind: str, edge_id: int,
                bit: int = 0) -> ModelGraph:
    """Apply one targeted fault to one parameter slot; returns a new model."""
    if kind not in FAULT_KINDS:
        raise ValueError(f"unknown fault kind {kind!r}")
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    layer, pre, post = model.locate_edge(edge_id)
    codes = tuple(b.copy() for b in model.codes)
    disabled = set(model.disabled)
    old = int(codes[layer][pre, post])
    new = old
    if kind == "weight_bit_flip":
        new = _flip_code_bit(old, bit)
        codes[layer][pre, post] = new
    elif kind == "synapse_stuck_zero":
        new = 0
        codes[layer][pre, post] = 0
    else:
        disabled.add(model.layer_offset(layer) + pre)
    record = FaultRecord(kind, edge_id, layer, pre, post, old, new)
    return model.clone(codes=codes, disabled=frozenset(disabled),
                       faults_applied=model.faults_applied + (record,))


def inject_faults(model: ModelGraph, spec: FaultSpec) -> ModelGraph:
    """Corrupt floor(error_rate * parameters) distinct edges, seeded.

    The fault set is a prefix of one seeded permutation, so the sets are
    nested across error rates for a fixed seed (higher rate = strict
    superset), which makes degradation trends well-posed. The input model is
    not modified.
    """
    p_count = model.parameter_count
    n_faults = math.floor(spec.error_rate * p_count)
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(p_count)
    kind_draw = rng.integers(0, len(spec.kinds), size=p_count)
    bit_draw = rng.integers(0, 2, size=p_count)

    codes = tuple(b.copy() for b in model.codes)
    disabled = set(model.disabled)
    records = list(model.faults_applied)
    for t in range(n_faults):
        edge = int(perm[t])
        kind = spec.kinds[kind_draw[t]]
        layer, pre, post = model.locate_edge(edge)
        old = int(codes[layer][pre, post])
        new = old
        if kind == "weight_bit_flip":
            new = _flip_code_bit(old, int(bit_draw[t]))
            codes[layer][pre, post] = new
        elif kind == "synapse_stuck_zero":
            new = 0
            codes[layer][pre, post] = 0
        elif kind == "neuron_stuck_off":
            disabled.add(model.layer_offset(layer) + pre)
        records.append(FaultRecord(kind, edge, layer, pre, post, old, new))
    return model.clone(codes=codes, disabled=frozenset(disabled),
                       faults_applied=tuple(records))


# ---------------------------------------------------------------------------
# Astrocyte coupling


@dataclass(frozen=True)
class AstroGroup:
    """Neurons (local indices in one source layer) watched by one astrocyte.

    The astrocyte monitors the members' own spikes and modulates transmission
    on their outgoing synapses.
    """

    layer: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("group must have members")
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate members in group")


@dataclass(frozen=True)
class AstroAllocation:
    groups: tuple[AstroGroup, ...] = ()

    def __post_init__(self) -> None:
        by_layer: dict[int, set[int]] = {}
        for g in self.groups:
            seen = by_layer.setdefault(g.layer, set())
            if seen & set(g.members):
                raise ValueError(f"overlapping groups in layer {g.layer}")
            seen |= set(g.members)

    @property
    def n_astrocytes(self) -> int:
        return len(self.groups)

    def layer_groups(self, layer: int) -> tuple[AstroGroup, ...]:
        return tuple(g for g in self.groups if g.layer == layer)


class _VecAstro:
    """Batched astrocyte states, stepping all batch trajectories in lockstep.

    Mirrors the scalar astro step exactly (same ordering and couplings) so a
    batch of one reproduces the scalar trajectory bit-for-bit in float64.
    """

    __slots__ = ("p", "ag", "ca", "glu", "esp", "pr")

    def __init__(self, params: AstroParams, warm: AstroState, batch: int):
        self.p = params
        self.ag = np.full(batch, warm.ag)
        self.ca = np.full(batch, warm.ca)
        self.glu = np.full(batch, warm.glu)
        self.esp = np.full(batch, warm.esp)
        self.pr = np.full(batch, warm.pr)

    def step(self, spikes: np.ndarray) -> None:
        p = self.p
        ag = self.ag * (1.0 - p.dt / p.tau_ag) + p.impulse_per_spike * spikes
        ca = self.ca + p.dt * (p.k_plc * self.ag - self.ca / p.tau_ca)
        released = ca >= p.ca_threshold
        ca = np.where(released, ca - p.ca_threshold, ca)
        glu = self.glu * (1.0 - p.dt / p.tau_glu) + np.where(
            released, p.glu_release_jump, 0.0)
        esp = self.esp * (1.0 - p.dt / p.tau_esp) + p.dt * (p.m_esp / p.tau_esp) * self.glu
        dse = p.dse_sign * p.k_ag * ag
        self.ag, self.ca, self.glu, self.esp = ag, ca, glu, esp
        self.pr = np.clip(p.pr0 * (1.0 + (dse + esp) / 100.0), 0.0, 1.0)


@dataclass(frozen=True)
class AstroContext:
    """A model plus attached astrocytes, ready for repaired inference."""

    model: ModelGraph
    allocation: AstroAllocation
    params: AstroParams             # caller-facing constants (dt = model dt)
    scaled: AstroParams             # time-compressed instance actually stepped
    time_scale: float
    drive_scales: tuple[float, ...]  # per group: reference rate / healthy rate
    warm: AstroState
    healthy_rates: tuple[float, ...]


def _measure_group_rates(model: ModelGraph, allocation: AstroAllocation,
                         inputs: np.ndarray, duration_s: float,
                         seed: int) -> tuple[float, ...]:
    res = run_batch(model, inputs, duration_s, seed, record_rates=True)
    rates = []
    for g in allocation.groups:
        spikes = res.layer_spike_counts[g.layer][:, list(g.members)].sum()
        rates.append(spikes / (inputs.shape[0] * duration_s))
    return tuple(rates)


def attach_astrocytes(
    model: ModelGraph,
    allocation: AstroAllocation,
    astro_params: AstroParams | None = None,
    *,
    time_scale: float = 25.0,
    calibration_rates: Sequence[float] | None = None,
    calibration_inputs: np.ndarray | None = None,
    calibration_duration_s: float = 0.3,
    calibration_seed: int = 1234,
) -> AstroContext:
    """Couple one astrocyte per allocation group to the model.

    Each astrocyte watches its group's aggregate spike train, normalized by
    the group's healthy rate so every astrocyte sits at the calibrated
    reference operating point; its release probability then replaces pr0 on
    the group's outgoing synapses. ``time_scale`` compresses the astro time
    axis so repair unfolds within one rate-coded inference window.

    Healthy rates come from ``calibration_rates`` when given, otherwise they
    are measured on ``calibration_inputs`` with a fixed seed.
    """
    params = astro_params if astro_params is not None else AstroParams()
    if abs(params.dt - model.dt) > 1e-12:
        raise ValueError("astro params dt must match the model dt")
    for g in allocation.groups:
        if not 0 <= g.layer < model.n_layers - 1:
            raise ValueError(f"group layer {g.layer} is not a source layer")
        if any(not 0 <= m < model.layer_sizes[g.layer] for m in g.members):
            raise ValueError("group member outside its layer")

    n_groups = len(allocation.groups)
    if calibration_rates is not None:
        healthy = tuple(float(r) for r in calibration_rates)
        if len(healthy) != n_groups:
            raise ValueError("need one calibration rate per group")
    elif n_groups == 0:
        healthy = ()
    else:
        if calibration_inputs is None:
            raise ValueError("need calibration_inputs or calibration_rates")
        healthy = _measure_group_rates(model, allocation,
                                       np.asarray(calibration_inputs, float),
                                       calibration_duration_s, calibration_seed)

    scaled = time_scaled(params, time_scale)
    warm = steady_state(scaled, params.calibration_rate_hz / time_scale)
    drive = tuple(params.calibration_rate_hz / max(r, 1.0) for r in healthy)
    return AstroContext(model, allocation, params, scaled, time_scale,
                        drive, warm, healthy)


# ---------------------------------------------------------------------------
# Inference


@dataclass
class RunResult:
    counts: np.ndarray                              # (batch, outputs)
    layer_spike_counts: list[np.ndarray] | None     # per layer, (batch, size)
    group_tx: np.ndarray | None                     # (batch, groups)

    @property
    def predictions(self) -> np.ndarray:
        return self.counts.argmax(axis=1)           # argmax: lowest id wins ties


def run_batch(
    model: ModelGraph,
    rates: np.ndarray,
    duration_s: float = 0.5,
    seed: int = 0,
    ctx: AstroContext | None = None,
    *,
    record_rates: bool = False,
    track_allocation: AstroAllocation | None = None,
) -> RunResult:
    """Step a batch of rate-coded samples through the network.

    With ``ctx``, astrocyte release probabilities modulate their groups'
    synapses; an empty allocation consumes no extra randomness, so results
    are stream-identical to the plain run. ``track_allocation`` counts
    transmitted events through group synapses without attaching dynamics.
    """
    rates = np.atleast_2d(np.asarray(rates, dtype=float))
    if rates.shape[1] != model.n_inputs:
        raise ValueError("sample size does not match the input layer")
    if (rates < 0).any():
        raise ValueError("rates must be nonnegative")
    n_steps = int(round(duration_s / model.dt))
    if n_steps <= 0:
        raise ValueError("duration too short for one step")

    batch = rates.shape[0]
    sizes = model.layer_sizes
    rng = np.random.default_rng(seed)
    p_in = np.clip(rates * model.dt, 0.0, 1.0)
    weff = [model.codes[l] * model.scales[l] for l in range(model.n_layers - 1)]

    disabled_by_layer = []
    for l, size in enumerate(sizes):
        off = model.layer_offset(l)
        mask = np.zeros(size, dtype=bool)
        for n in model.disabled:
            if off <= n < off + size:
                mask[n - off] = True
        disabled_by_layer.append(mask)

    lif = model.lif
    decay = 1.0 - model.dt / lif.leak_tau
    refr_steps = int(round(lif.refractory / model.dt))
    v = [np.full((batch, sizes[l]), lif.v_reset) for l in range(1, model.n_layers)]
    refr = [np.zeros((batch, sizes[l]), dtype=int) for l in range(1, model.n_layers)]

    groups: tuple[AstroGroup, ...] = ()
    astros: list[_VecAstro] = []
    drive_scales: tuple[float, ...] = ()
    if ctx is not None:
        if ctx.model is not model and ctx.model.layer_sizes != model.layer_sizes:
            raise ValueError("context was attached to an incompatible model")
        groups = ctx.allocation.groups
        drive_scales = ctx.drive_scales
        astros = [_VecAstro(ctx.scaled, ctx.warm, batch) for _ in groups]
    tracked = groups if track_allocation is None else track_allocation.groups
    group_tx = np.zeros((batch, len(tracked))) if tracked else None

    member_idx = [np.asarray(g.members, dtype=int) for g in groups]
    tracked_idx = [np.asarray(g.members, dtype=int) for g in tracked]

    counts = np.zeros((batch, model.n_outputs), dtype=int)
    layer_totals = ([np.zeros((batch, s), dtype=int) for s in sizes]
                    if record_rates else None)

    for _ in range(n_steps):
        spk = rng.random((batch, sizes[0])) < p_in
        if disabled_by_layer[0].any():
            spk &= ~disabled_by_layer[0]
        spikes_by_layer = [spk]
        for l in range(model.n_layers - 1):
            u = rng.random((batch, sizes[l], sizes[l + 1]))
            pr_rows = np.full((batch, sizes[l]), model.pr0)
            for gi, g in enumerate(groups):
                if g.layer == l:
                    pr_rows[:, member_idx[gi]] = astros[gi].pr[:, None]
            transmitted = spk[:, :, None] & (u < pr_rows[:, :, None])
            if group_tx is not None:
                for gi, g in enumerate(tracked):
                    if g.layer == l:
                        group_tx[:, gi] += transmitted[:, tracked_idx[gi], :].sum(axis=(1, 2))
            drive = np.einsum("bij,ij->bj", transmitted, weff[l])
            vl = v[l] * decay + drive
            if refr_steps:
                in_refr = refr[l] > 0
                vl[in_refr] = lif.v_reset
                refr[l][in_refr] -= 1
            spk = vl >= lif.v_threshold
            vl[spk] = lif.v_reset
            if refr_steps:
                refr[l][spk] = refr_steps
            if disabled_by_layer[l + 1].any():
                spk &= ~disabled_by_layer[l + 1]
            v[l] = vl
            spikes_by_layer.append(spk)
        counts += spikes_by_layer[-1]
        if record_rates:
            for l in range(model.n_layers):
                layer_totals[l] += spikes_by_layer[l]
        for gi, g in enumerate(groups):
            c = spikes_by_layer[g.layer][:, member_idx[gi]].sum(axis=1)
            astros[gi].step(c * drive_scales[gi])

    return RunResult(counts, layer_totals, group_tx)


def infer(model: ModelGraph, sample: Sequence[float], duration_s: float = 0.5,
          seed: int = 0, ctx: AstroContext | None = None) -> int:
    """Predict one sample's class from output spike counts."""
    res = run_batch(model, np.asarray(sample, dtype=float)[None, :],
                    duration_s, seed, ctx)
    return int(res.predictions[0])


def accuracy(
    target: ModelGraph | AstroContext,
    dataset: Dataset,
    duration_s: float = 0.5,
    seed: int = 0,
    n_seeds: int = 1,
    samples: int | None = None,
) -> float:
    """Fraction of eval samples classified correctly, averaged over seeds."""
    if isinstance(target, AstroContext):
        model, ctx = target.model, target
    else:
        model, ctx = target, None
    rates = dataset.eval_rates
    labels = dataset.eval_labels
    if samples is not None:
        rates, labels = rates[:samples], labels[:samples]
    if len(rates) == 0:
        raise ValueError("empty evaluation set")
    total = 0.0
    for k in range(n_seeds):
        res = run_batch(model, rates, duration_s, seed + k, ctx)
        total += float((res.predictions == labels).mean())
    return total / n_seeds


@dataclass(frozen=True)
class EvalHarness:
    """Fixed evaluation settings shared by synthesis and fault sweeps."""

    dataset: Dataset
    duration_s: float = 0.3
    samples: int = 16
    n_seeds: int = 1

    def evaluate(self, target: ModelGraph | AstroContext, seed: int = 0) -> float:
        return accuracy(target, self.dataset, self.duration_s, seed,
                        self.n_seeds, self.samples)


# ---------------------------------------------------------------------------
# Toy model generator


def _rate_forward(codes: Sequence[np.ndarray], scales: Sequence[float],
                  p_spike: np.ndarray, pr0: float) -> list[np.ndarray]:
    """Deterministic rate abstraction of the spiking forward pass.

    Activations are expected spikes per step; a LIF neuron with sustained
    drive mu per step fires about max(mu, 0)/threshold times per step.
    """
    acts = [p_spike]
    for w, s in zip(codes, scales):
        drive = pr0 * (acts[-1] @ (w * s))
        acts.append(np.maximum(drive, 0.0))
    return acts


def _quantize_columns(w: np.ndarray, scale: float) -> np.ndarray:
    return np.clip(np.rint(w / scale), -2, 1).astype(np.int8)


def build_toy_model(
    layer_sizes: Sequence[int],
    n_classes: int,
    seed: int = 0,
    *,
    n_train: int = 256,
    n_eval: int = 64,
    max_rate_hz: float = 300.0,
    blob_spread: float = 0.12,
    feature_hi: float = 0.8,
    feature_lo: float = 0.2,
    duration_s: float = 0.5,
    hidden_drive: float = 0.3,
    output_drive: float = 0.25,
    pr0: float = 0.5,
    lif: LifParams | None = None,
    baseline_seeds: int = 3,
) -> tuple[ModelGraph, Dataset]:
    """Generate a labeled blob dataset and a trained, quantized toy network.

    Hidden layers are random balanced +/-1 projections; the output layer is
    trained by the delta rule on the rate abstraction, then quantized to the
    2-bit levels with a grid-searched scale. Per-layer scales are
    renormalized so hidden and output neurons run at healthy spiking rates.
    The recorded ``baseline_accuracy`` is the spiking accuracy on the eval
    split averaged over ``baseline_seeds`` inference seeds.
    """
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2:
        raise ValueError("need at least two layers")
    if n_classes < 2:
        raise ValueError("need at least two classes")
    if sizes[-1] != n_classes:
        raise ValueError("output layer size must equal the class count")

    rng = np.random.default_rng(seed)
    n_in = sizes[0]

    # Class blobs: each class raises its own subset of input features.
    means = np.full((n_classes, n_in), feature_lo)
    for c in range(n_classes):
        means[c, np.arange(n_in) % n_classes == c] = feature_hi

    def draw(n: int) -> tuple[np.ndarray, np.ndarray]:
        labels = np.arange(n) % n_classes
        labels = rng.permutation(labels)
        x = np.clip(means[labels] + rng.normal(0.0, blob_spread, (n, n_in)),
                    0.0, 1.0)
        return x * max_rate_hz, labels

    train_rates, train_labels = draw(n_train)
    eval_rates, eval_labels = draw(n_eval)
    dataset = Dataset(train_rates, train_labels, eval_rates, eval_labels,
                      n_classes)

    dt = 1e-3
    lif = lif if lif is not None else LifParams()
    p_train = train_rates * dt

    # Hidden layers. The first hidden layer pools the redundant feature
    # copies with signs that are consistent per feature (cycling through all
    # sign patterns), so losing copies attenuates a unit's drive instead of
    # tilting the representation. Deeper hidden layers, if any, are random
    # balanced +/-1 projections.
    codes: list[np.ndarray] = []
    scales: list[float] = []
    for l in range(len(sizes) - 2):
        if l == 0:
            # One-vs-rest feature discriminators, cycled so each class's
            # evidence is carried by several interchangeable units with
            # near-equal healthy rates (no single dominant readout path).
            block = np.empty((sizes[0], sizes[1]), dtype=np.int8)
            for h in range(sizes[1]):
                fav = h % n_classes
                for i in range(sizes[0]):
                    block[i, h] = 1 if i % n_classes == fav else -1
        else:
            block = rng.choice(np.array([-1, 1], dtype=np.int8),
                               size=(sizes[l], sizes[l + 1]))
        acts = _rate_forward(codes + [block], scales + [1.0], p_train, pr0)
        raw = acts[-1]
        typical = np.mean(raw[raw > 0]) if (raw > 0).any() else 1.0
        scales.append(hidden_drive * lif.v_threshold / typical)
        codes.append(block)

    # Output layer: delta rule on the rate abstraction, then 2-bit quantize.
    acts = _rate_forward(codes, scales, p_train, pr0)
    h = acts[-1]
    targets = np.eye(n_classes)[train_labels]
    norm = float((h * h).sum(axis=1).mean()) or 1.0
    w_out = np.zeros((sizes[-2], n_classes))
    lr = 0.5 / norm
    for _ in range(300):
        pred = h @ w_out
        w_out += lr * (h.T @ (targets - pred)) / len(h)

    spread = float(np.quantile(np.abs(w_out), 0.9)) or 1.0
    best_codes, best_acc = None, -1.0
    for s in np.linspace(spread / 2.0, spread * 1.5, 7):
        q = _quantize_columns(w_out, float(s))
        pred = (h @ q).argmax(axis=1)
        acc = float((pred == train_labels).mean())
        if acc > best_acc:
            best_codes, best_acc = q, acc
    out_codes = best_codes

    drive = pr0 * np.abs(h @ out_codes)
    typical = float(np.mean(drive[drive > 0])) if (drive > 0).any() else 1.0
    scales.append(output_drive * lif.v_threshold / typical)
    codes.append(out_codes)

    model = ModelGraph(
        layer_sizes=sizes,
        codes=tuple(codes),
        scales=tuple(scales),
        lif=lif,
        dt=dt,
        pr0=pr0,
        max_rate_hz=max_rate_hz,
    )
    total = 0.0
    for k in range(baseline_seeds):
        res = run_batch(model, eval_rates, duration_s, seed=9000 + k)
        total += float((res.predictions == eval_labels).mean())
    model.baseline_accuracy = total / baseline_seeds
    return model, dataset
