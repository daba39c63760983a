"""Greedy astrocyte insertion driven by worst-case fault accuracy.

For every cluster layer of a mapped model, the synthesizer measures the
minimum accuracy over a batch of random single-parameter faults (``a_min``).
While ``a_min`` falls short of the target threshold, it adds one astrocyte to
that layer and redistributes the layer's neurons into equal-size groups, up
to a per-layer budget; layers that still miss the threshold at the budget are
reported as saturated rather than failing the run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .astro import AstroParams
from .netmap import Cluster, CoreSpec, Mapping
from .snn import (
    FAULT_KINDS,
    AstroAllocation,
    AstroGroup,
    EvalHarness,
    ModelGraph,
    apply_fault,
    attach_astrocytes,
)

__all__ = [
    "SynthesisConfig",
    "EvaluationEngine",
    "SynthesisLogRecord",
    "AstroEnabledModel",
    "evaluate_min_accuracy",
    "insert_astrocytes",
    "disable_unused",
]


@dataclass(frozen=True)
class SynthesisConfig:
    """Knobs for the insertion loop.

    ``n_r`` is the number of random single-parameter faults evaluated per
    layer (full studies use 10,000; the desk-scale default keeps runs
    interactive). ``a_th`` is the accuracy threshold; ``None`` means "use the
    model's healthy accuracy". ``max_astro_per_layer`` bounds insertions per
    cluster layer.
    """

    n_r: int = 200
    a_th: float | None = None
    max_astro_per_layer: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_r < 1:
            raise ValueError("n_r must be at least 1")
        if self.a_th is not None and not 0.0 <= self.a_th <= 1.0:
            raise ValueError("a_th must lie in [0, 1]")
        if self.max_astro_per_layer < 0:
            raise ValueError("max_astro_per_layer must be nonnegative")

    @classmethod
    def platform(cls, core: CoreSpec, **kwargs) -> "SynthesisConfig":
        """Hardware-bound preset: share the core's astrocytes across layers."""
        share = core.max_astrocytes // len(core.layer_sizes)
        return cls(max_astro_per_layer=share, **kwargs)

    @classmethod
    def codesign(cls, core: CoreSpec, **kwargs) -> "SynthesisConfig":
        """Co-design preset: the astrocyte budget grows with layer size."""
        return cls(max_astro_per_layer=max(core.layer_sizes), **kwargs)


@dataclass(eq=False)
class EvaluationEngine:
    """Binds a model to an accuracy harness plus astrocyte calibration.

    Healthy per-group spike rates are always measured on the *unfaulted*
    model (cached per allocation), so astrocytes attached to a faulted clone
    see the fault as a departure from health instead of recalibrating to it.
    """

    model: ModelGraph
    harness: EvalHarness
    time_scale: float = 25.0
    astro_params: AstroParams | None = None
    calibration_samples: int = 32
    calibration_duration_s: float = 0.3
    calibration_seed: int = 1234
    _rate_cache: dict = field(default_factory=dict, repr=False)

    def baseline(self, seed: int) -> float:
        return self.harness.evaluate(self.model, seed)

    def healthy_rates(self, allocation: AstroAllocation) -> tuple[float, ...]:
        if allocation not in self._rate_cache:
            inputs = self.harness.dataset.train_rates[:self.calibration_samples]
            ctx = attach_astrocytes(
                self.model, allocation, self.astro_params,
                time_scale=self.time_scale,
                calibration_inputs=inputs,
                calibration_duration_s=self.calibration_duration_s,
                calibration_seed=self.calibration_seed)
            self._rate_cache[allocation] = ctx.healthy_rates
        return self._rate_cache[allocation]

    def evaluate(self, model: ModelGraph, allocation: AstroAllocation,
                 seed: int) -> float:
        """Accuracy of ``model`` with the allocation's astrocytes attached."""
        if not allocation.groups:
            return self.harness.evaluate(model, seed)
        ctx = attach_astrocytes(
            model, allocation, self.astro_params,
            time_scale=self.time_scale,
            calibration_rates=self.healthy_rates(allocation))
        return self.harness.evaluate(ctx, seed)


def _source_members(model: ModelGraph,
                    band: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Map a cluster layer to (model source layer, sorted local indices).

    Neurons in the model's last layer carry no outgoing parameters and are
    skipped. Returns (-1, ()) when the layer has no parameter-bearing
    neurons. Layers mixing several source layers are rejected: one astrocyte
    modulates synapses of a single source layer.
    """
    by_layer: dict[int, list[int]] = {}
    for neuron in band:
        layer, local = model.locate_neuron(neuron)
        if layer < model.n_layers - 1:
            by_layer.setdefault(layer, []).append(local)
    if not by_layer:
        return -1, ()
    if len(by_layer) > 1:
        raise ValueError(
            "cluster layer spans several model layers; remap the model so "
            "each cluster layer draws from one source layer")
    layer, locals_ = next(iter(by_layer.items()))
    return layer, tuple(sorted(locals_))


def _layer_parameter_ids(model: ModelGraph, layer: int,
                         locals_: tuple[int, ...]) -> np.ndarray:
    """Parameter slot ids on the outgoing synapses of the given neurons."""
    fan_out = model.layer_sizes[layer + 1]
    base = model.edge_block_offset(layer)
    ids = [base + local * fan_out + j for local in locals_
           for j in range(fan_out)]
    return np.asarray(ids, dtype=np.int64)


def _equal_groups(layer: int, locals_: tuple[int, ...],
                  count: int) -> tuple[AstroGroup, ...]:
    """Split neurons into ``count`` contiguous groups, sizes differing <= 1."""
    chunks = np.array_split(np.asarray(locals_, dtype=np.int64), count)
    return tuple(AstroGroup(layer, tuple(int(m) for m in chunk))
                 for chunk in chunks)


def evaluate_min_accuracy(
    allocation: AstroAllocation,
    cluster: Cluster,
    layer: int,
    n_r: int,
    engine: EvaluationEngine,
    seed: int,
) -> float:
    """Minimum accuracy over ``n_r`` random single-parameter faults.

    Faults target the outgoing parameters of the cluster layer's neurons,
    one at a time; each faulted clone is evaluated with the allocation's
    astrocytes attached. A layer without parameters cannot be perturbed and
    scores the unfaulted accuracy. The same ``seed`` always draws the same
    fault sequence, so evaluations with different allocations are paired.
    """
    band = cluster.layers[layer]
    if not band:
        raise ValueError("cluster layer has no neurons")
    model = engine.model
    src_layer, locals_ = _source_members(model, band)
    if src_layer < 0:
        return engine.evaluate(model, allocation, seed)
    param_ids = _layer_parameter_ids(model, src_layer, locals_)

    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(param_ids), size=n_r)
    kinds = rng.integers(0, len(FAULT_KINDS), size=n_r)
    bits = rng.integers(0, 2, size=n_r)

    a_min = 1.0
    memo: dict[tuple[int, int, int], float] = {}
    for t in range(n_r):
        key = (int(picks[t]), int(kinds[t]), int(bits[t]))
        if key not in memo:
            faulted = apply_fault(model, FAULT_KINDS[key[1]],
                                  int(param_ids[key[0]]), key[2])
            memo[key] = engine.evaluate(faulted, allocation, seed)
        a_min = min(a_min, memo[key])
        if a_min == 0.0:
            break
    return a_min


@dataclass(frozen=True)
class SynthesisLogRecord:
    """One ``a_min`` evaluation: iteration 0 is the pre-insertion state."""

    cluster: int
    layer: int
    iteration: int
    a_min: float
    astro_count: int


@dataclass(frozen=True)
class AstroEnabledModel:
    """A mapping plus the astrocyte allocation the synthesizer settled on.

    The underlying model graph is untouched (same neurons and edges);
    astrocytes only overlay groups. ``saturated`` lists (cluster, layer)
    pairs that still missed the threshold at the astrocyte budget.
    """

    mapping: Mapping
    cluster_allocations: tuple[AstroAllocation, ...]
    a_th: float
    log: tuple[SynthesisLogRecord, ...]
    saturated: tuple[tuple[int, int], ...]

    @property
    def allocation(self) -> AstroAllocation:
        """All groups merged into one model-wide allocation."""
        groups = [g for alloc in self.cluster_allocations for g in alloc.groups]
        groups.sort(key=lambda g: (g.layer, g.members))
        return AstroAllocation(tuple(groups))

    @property
    def astro_counts(self) -> tuple[int, ...]:
        """Astrocytes used per cluster."""
        return tuple(a.n_astrocytes for a in self.cluster_allocations)

    def to_json(self) -> str:
        doc = {
            "mapping": json.loads(self.mapping.to_json()),
            "a_th": self.a_th,
            "cluster_allocations": [
                [{"layer": g.layer, "members": list(g.members)}
                 for g in alloc.groups]
                for alloc in self.cluster_allocations
            ],
            "log": [
                {"cluster": r.cluster, "layer": r.layer,
                 "iteration": r.iteration, "a_min": r.a_min,
                 "astro_count": r.astro_count}
                for r in self.log
            ],
            "saturated": [list(pair) for pair in self.saturated],
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AstroEnabledModel":
        doc = json.loads(text)
        allocs = tuple(
            AstroAllocation(tuple(AstroGroup(g["layer"], tuple(g["members"]))
                                  for g in groups))
            for groups in doc["cluster_allocations"])
        log = tuple(SynthesisLogRecord(r["cluster"], r["layer"],
                                       r["iteration"], r["a_min"],
                                       r["astro_count"])
                    for r in doc["log"])
        return cls(Mapping.from_json(json.dumps(doc["mapping"])), allocs,
                   doc["a_th"], log,
                   tuple((p[0], p[1]) for p in doc["saturated"]))

    def log_csv(self) -> str:
        lines = ["cluster,layer,iteration,a_min,astro_count"]
        lines += [f"{r.cluster},{r.layer},{r.iteration},{r.a_min:.6f},"
                  f"{r.astro_count}" for r in self.log]
        return "\n".join(lines) + "\n"


def _layer_seed(base: int, cluster: int, layer: int) -> int:
    return base + 7919 * cluster + 101 * layer


def insert_astrocytes(
    mapping: Mapping,
    config: SynthesisConfig,
    engine: EvaluationEngine,
    core: CoreSpec,
) -> AstroEnabledModel:
    """Add astrocytes layer by layer until ``a_min`` clears the threshold.

    Every cluster layer is visited once. Its worst-case single-fault
    accuracy is measured with the astrocytes allocated so far; while it
    falls below the threshold, one astrocyte is added and the layer's
    neurons are regrouped equally, up to ``min(max_astro_per_layer,
    neurons in the layer)``. The fault draw is re-used across iterations of
    a layer, so successive ``a_min`` values are paired measurements.
    """
    model = engine.model
    a_th = config.a_th
    if a_th is None:
        a_th = engine.baseline(config.seed)

    per_cluster: list[list[AstroGroup]] = [[] for _ in mapping.clusters]
    log: list[SynthesisLogRecord] = []
    saturated: list[tuple[int, int]] = []

    def combined() -> AstroAllocation:
        groups = [g for groups in per_cluster for g in groups]
        groups.sort(key=lambda g: (g.layer, g.members))
        return AstroAllocation(tuple(groups))

    for ci, cluster in enumerate(mapping.clusters):
        for li in range(len(cluster.layers)):
            if not cluster.layers[li]:
                continue
            src_layer, locals_ = _source_members(model, cluster.layers[li])
            seed = _layer_seed(config.seed, ci, li)
            count = 0
            budget = (0 if src_layer < 0 else
                      min(config.max_astro_per_layer, len(locals_)))
            for iteration in range(budget + 1):
                a_min = evaluate_min_accuracy(combined(), cluster, li,
                                              config.n_r, engine, seed)
                log.append(SynthesisLogRecord(ci, li, iteration, a_min, count))
                if a_min >= a_th:
                    break
                if count >= budget:
                    if src_layer >= 0:
                        saturated.append((ci, li))
                    break
                count += 1
                per_cluster[ci] = [g for g in per_cluster[ci]
                                   if g.layer != src_layer or
                                   not set(g.members) <= set(locals_)]
                per_cluster[ci].extend(_equal_groups(src_layer, locals_,
                                                     count))

    return AstroEnabledModel(
        mapping,
        tuple(AstroAllocation(tuple(groups)) for groups in per_cluster),
        float(a_th), tuple(log), tuple(saturated))


def disable_unused(allocation: AstroAllocation, core: CoreSpec) -> int:
    """Astrocytes to power off on a core: budget minus those in use."""
    used = allocation.n_astrocytes
    if used > core.max_astrocytes:
        raise ValueError(
            f"allocation uses {used} astrocytes but the core only has "
            f"{core.max_astrocytes}")
    return core.max_astrocytes - used
