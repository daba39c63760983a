"""Area and power estimates for the three fault-tolerance techniques.

Compared designs, all built from the same mapped cluster count:

- ``replication``: every cluster is duplicated wholesale (factor 2).
- ``redundant``: clusters are mapped onto oversized crossbars that keep
  spare rows/columns (factor 1.25; crossbar cores only).
- ``proposed``: clusters run unduplicated and fault tolerance comes from
  astrocyte tiles, which are charged separately per astrocyte in use.

Areas are abstract units: a weighted sum of the post-synthesis FPGA
resource counts of one core (block RAM and DSP slices are weighted by their
approximate silicon footprint relative to a logic cell; the weights are
configurable calibration constants, not measurements). Power is a static
per-core floor plus a per-active-synapse activation term, anchored so one
fully active core reproduces its profiled wattage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .netmap import CoreSpec, Mapping, cluster_count_estimate
from .presets import BENCHMARKS, CORE_GEOMETRIES, RESOURCE_PROFILES
from .snn import AstroAllocation
from .synthesis import disable_unused

__all__ = [
    "TECHNIQUES",
    "AreaWeights",
    "AreaModel",
    "PowerModel",
    "design_area",
    "design_power",
    "power_savings_disable",
    "normalize",
    "AreaRow",
    "PowerRow",
    "area_report",
    "power_report",
]

TECHNIQUES = ("replication", "redundant", "proposed")

# Core kinds with resource/power profiles (the astrocyte tile is separate).
_CORE_KINDS = ("ubrain", "crossbar")


@dataclass(frozen=True)
class AreaWeights:
    """Relative silicon footprint per FPGA resource (logic cell = 1)."""

    bram: float = 300.0
    dsp: float = 60.0
    ff: float = 1.0
    slice: float = 1.0
    lut: float = 1.0

    def __post_init__(self) -> None:
        if any(w < 0 for w in (self.bram, self.dsp, self.ff, self.slice,
                               self.lut)):
            raise ValueError("area weights must be nonnegative")


def _weighted_area(profile_name: str, weights: AreaWeights) -> float:
    p = RESOURCE_PROFILES[profile_name]
    return (p.bram * weights.bram + p.dsp * weights.dsp + p.ff * weights.ff
            + p.slice * weights.slice + p.lut * weights.lut)


@dataclass(frozen=True)
class AreaModel:
    """Area factors for the three techniques."""

    weights: AreaWeights = AreaWeights()
    replication_factor: float = 2.0
    redundant_factor: float = 1.25

    def __post_init__(self) -> None:
        if self.replication_factor < 1 or self.redundant_factor < 1:
            raise ValueError("technique factors must be at least 1")

    def core_area_unit(self, kind: str) -> float:
        if kind not in _CORE_KINDS:
            raise ValueError(f"no resource profile for core kind {kind!r}")
        return _weighted_area(kind, self.weights)

    def astro_area_unit(self) -> float:
        return _weighted_area("astrocyte", self.weights)


def design_area(clusters: int, technique: str, core: CoreSpec,
                model: AreaModel = AreaModel(), astro_used: int = 0) -> float:
    """Total design area in abstract units for ``clusters`` mapped cores.

    ``astro_used`` counts astrocyte tiles actually allocated (proposed
    technique only); the benchmark reports default it to zero, charging
    astrocytes explicitly when an allocation is known.
    """
    if clusters < 0:
        raise ValueError("clusters must be nonnegative")
    if astro_used < 0:
        raise ValueError("astro_used must be nonnegative")
    core_area = model.core_area_unit(core.kind)
    if technique == "replication":
        return clusters * model.replication_factor * core_area
    if technique == "redundant":
        if core.kind != "crossbar":
            raise ValueError("redundant mapping needs spare crossbar "
                             "rows/columns; it only applies to crossbar cores")
        return clusters * model.redundant_factor * core_area
    if technique == "proposed":
        return clusters * core_area + astro_used * model.astro_area_unit()
    raise ValueError(f"unknown technique {technique!r}")


@dataclass(frozen=True)
class PowerModel:
    """Static-plus-activation power: watts = static + alpha * active synapses.

    The static floor per core is derived from the profiled core power minus
    the activation term at full synapse activity, so a fully active core
    reproduces its profiled wattage exactly.
    """

    alpha_w: float = 5e-5                    # watts per active synapse
    astro_share_w: float = RESOURCE_PROFILES["astrocyte"].power_w

    def __post_init__(self) -> None:
        if self.alpha_w < 0 or self.astro_share_w < 0:
            raise ValueError("power coefficients must be nonnegative")
        for kind in _CORE_KINDS:
            if self.core_static_w(kind) < 0:
                raise ValueError(f"alpha_w leaves negative static power "
                                 f"for {kind!r}")

    def core_full_w(self, kind: str) -> float:
        if kind not in _CORE_KINDS:
            raise ValueError(f"no power profile for core kind {kind!r}")
        return RESOURCE_PROFILES[kind].power_w

    def core_static_w(self, kind: str) -> float:
        capacity = CORE_GEOMETRIES[kind].synapse_capacity
        return self.core_full_w(kind) - self.alpha_w * capacity


def _technique_factor(technique: str, kind: str,
                      replication_factor: float = 2.0,
                      redundant_factor: float = 1.25) -> float:
    if technique == "replication":
        return replication_factor
    if technique == "redundant":
        if kind != "crossbar":
            raise ValueError("redundant mapping only applies to crossbar "
                             "cores")
        return redundant_factor
    if technique == "proposed":
        return 1.0
    raise ValueError(f"unknown technique {technique!r}")


def design_power(mapping: Mapping, technique: str,
                 power: PowerModel = PowerModel(),
                 activity: float | Sequence[float] = 1.0,
                 astro_alloc: AstroAllocation | None = None) -> float:
    """Watts for a mapped design: per-core static plus synapse activation.

    ``activity`` is the fraction of each cluster's synapses active per
    timestep (scalar or one value per cluster). Replication doubles every
    per-core term; redundant mapping scales them by the spare-capacity
    factor; the proposed design adds one power share per enabled astrocyte.
    """
    n = mapping.n_clusters
    if isinstance(activity, (int, float)):
        acts = [float(activity)] * n
    else:
        acts = [float(a) for a in activity]
        if len(acts) != n:
            raise ValueError("need one activity fraction per cluster")
    if any(not 0.0 <= a <= 1.0 for a in acts):
        raise ValueError("activity fractions must lie in [0, 1]")

    kind = mapping.core_kind
    factor = _technique_factor(technique, kind)
    static = power.core_static_w(kind)
    watts = sum(factor * (static + power.alpha_w * a * c.synapse_count)
                for a, c in zip(acts, mapping.clusters))
    if technique == "proposed" and astro_alloc is not None:
        watts += astro_alloc.n_astrocytes * power.astro_share_w
    return watts


def power_savings_disable(astro_alloc: AstroAllocation, core: CoreSpec,
                          power: PowerModel = PowerModel()
                          ) -> tuple[float, float]:
    """Watts saved by switching off unused astrocytes on one core.

    Returns ``(savings_w, fraction)`` where the fraction is relative to the
    all-enabled core: profiled core power plus every astrocyte powered.
    """
    disabled = disable_unused(astro_alloc, core)
    savings = disabled * power.astro_share_w
    baseline = (power.core_full_w(core.kind)
                + core.max_astrocytes * power.astro_share_w)
    return savings, savings / baseline


def normalize(values: Sequence[float], baseline: float) -> list[float]:
    """Divide every value by a positive baseline."""
    if baseline <= 0:
        raise ValueError("baseline must be positive")
    return [v / baseline for v in values]


# ---------------------------------------------------------------------------
# Benchmark report tables


@dataclass(frozen=True)
class AreaRow:
    model: str
    technique: str
    core: str
    clusters: int
    area: float
    normalized: float


@dataclass(frozen=True)
class PowerRow:
    model: str
    technique: str
    core: str
    clusters: int
    watts: float


def _core_specs() -> dict[str, CoreSpec]:
    return {"ubrain": CoreSpec.ubrain(), "crossbar": CoreSpec.crossbar()}


def _techniques_for(kind: str) -> tuple[str, ...]:
    return TECHNIQUES if kind == "crossbar" else ("replication", "proposed")


def area_report(model: AreaModel = AreaModel()) -> list[AreaRow]:
    """Area of every benchmark under each applicable technique.

    Normalized to the smallest replication design (the first benchmark on
    the three-layer core), matching the usual presentation of the table.
    """
    cores = _core_specs()
    baseline = design_area(
        cluster_count_estimate(BENCHMARKS[0].params, cores["ubrain"]),
        "replication", cores["ubrain"], model)
    rows = []
    for bench in BENCHMARKS:
        for kind, core in cores.items():
            clusters = cluster_count_estimate(bench.params, core)
            for technique in _techniques_for(kind):
                area = design_area(clusters, technique, core, model)
                rows.append(AreaRow(bench.name, technique, kind, clusters,
                                    area, area / baseline))
    return rows


def power_report(power: PowerModel = PowerModel(),
                 activity: float = 1.0) -> list[PowerRow]:
    """Power of every benchmark; astrocytes fully populated per core."""
    if not 0.0 <= activity <= 1.0:
        raise ValueError("activity must lie in [0, 1]")
    cores = _core_specs()
    rows = []
    for bench in BENCHMARKS:
        for kind, core in cores.items():
            clusters = cluster_count_estimate(bench.params, core)
            static = power.core_static_w(kind)
            for technique in _techniques_for(kind):
                factor = _technique_factor(technique, kind)
                watts = factor * (clusters * static
                                  + power.alpha_w * activity * bench.params)
                if technique == "proposed":
                    watts += (clusters * core.max_astrocytes
                              * power.astro_share_w)
                rows.append(PowerRow(bench.name, technique, kind, clusters,
                                     watts))
    return rows
