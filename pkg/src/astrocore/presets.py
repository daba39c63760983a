"""Bundled parameter tables: benchmark models, FPGA resource rows, fault constants.

Values are the defaults every simulator module and the CLI fall back to when a
config does not override them.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class BenchmarkModel:
    """A feed-forward benchmark network described only by its synapse budget."""

    name: str
    params: int                 # trainable parameters == mapped synapses
    layers: int = 0             # conv+fc layer count, 0 if unspecified


# Parameter counts for the stock image-classification benchmarks used in the
# cluster-count and area studies.
BENCHMARKS: tuple[BenchmarkModel, ...] = (
    BenchmarkModel("lenet", 505_942, 5),
    BenchmarkModel("alexnet", 41_241_906, 8),
    BenchmarkModel("vgg16", 32_850_250, 16),
    BenchmarkModel("resnet", 575_298, 20),
    BenchmarkModel("densenet", 7_047_754, 100),
    BenchmarkModel("mobilenet", 2_280_586, 28),
    BenchmarkModel("xception", 20_881_970, 36),
)


def benchmark(name: str) -> BenchmarkModel:
    for b in BENCHMARKS:
        if b.name == name:
            return b
    raise KeyError(f"unknown benchmark model {name!r}")


@dataclass(frozen=True)
class ResourceProfile:
    """Post-synthesis FPGA resource row for one building block."""

    name: str
    bram: int
    dsp: int
    ff: int
    lut: int
    slice: int
    power_w: float


# Zynq UltraScale+ style utilization rows for one neuromorphic core of each
# kind and for one digital astrocyte tile.
UBRAIN_CORE = ResourceProfile("ubrain", bram=48, dsp=0, ff=129, lut=117,
                              slice=114, power_w=4.64)
CROSSBAR_CORE = ResourceProfile("crossbar", bram=32, dsp=0, ff=86, lut=78,
                                slice=76, power_w=4.53)
ASTROCYTE_TILE = ResourceProfile("astrocyte", bram=4, dsp=4, ff=2368, lut=670,
                                 slice=1345, power_w=0.538)

RESOURCE_PROFILES: dict[str, ResourceProfile] = {
    p.name: p for p in (UBRAIN_CORE, CROSSBAR_CORE, ASTROCYTE_TILE)
}


@dataclass(frozen=True)
class FaultConstants:
    """Technology constants for the wear-out and disturbance failure models."""

    # Bias temperature instability: MTTF = A / V^gamma * exp(Ea / (K*T)).
    bti_gamma: float = 2.0
    bti_ea_ev: float = 0.1
    # Calibrated so MTTF(V=1.0, T=300 K) is two nominal years (17532 h).
    bti_a: float = 366.35776438848376

    # Self-heating: T = (I^2*R*l^2 / (k*V)) * (1 - exp(-k*t/(l^2*C))) + T_amb.
    sh_current_a: float = 6.1e-5
    sh_resistance_ohm: float = 10_000.0
    sh_length_cm: float = 1.2e-5
    sh_volume_cm3: float = 1.2e-15
    sh_heat_capacity: float = 1.63e-18
    sh_k_factor: float = 1.0

    # Endurance: MTTF_hours = exp(1000 / T) with T in kelvin.
    endurance_scale_k: float = 1000.0

    # Read disturbance: MTTF_hours = 10 ** (-14.7*V + 6.7).
    disturb_slope: float = -14.7
    disturb_intercept: float = 6.7


FAULT_CONSTANTS = FaultConstants()

# Boltzmann constant in eV/K, used by the BTI model.
BOLTZMANN_EV_PER_K = 8.617333262e-5

# Nominal hours in a calendar year (365.25 days).
HOURS_PER_YEAR = 8766.0


@dataclass(frozen=True)
class CoreGeometry:
    """Capacity description of one neuromorphic core kind."""

    kind: str
    neuron_capacity: int
    synapse_capacity: int
    layer_sizes: tuple[int, ...]    # per-band neuron caps, farthest-from-output first
    input_ports: int
    max_astrocytes: int


# 256x64x16 three-layer digital core: synapse budget 256*64 + 64*16 = 17408.
UBRAIN_GEOMETRY = CoreGeometry("ubrain", neuron_capacity=336,
                               synapse_capacity=17_408,
                               layer_sizes=(256, 64, 16),
                               input_ports=256, max_astrocytes=6)

# 128x128 crossbar core: synapse budget 128*128 = 16384.
CROSSBAR_GEOMETRY = CoreGeometry("crossbar", neuron_capacity=256,
                                 synapse_capacity=16_384,
                                 layer_sizes=(128, 128),
                                 input_ports=128, max_astrocytes=4)

CORE_GEOMETRIES: dict[str, CoreGeometry] = {
    g.kind: g for g in (UBRAIN_GEOMETRY, CROSSBAR_GEOMETRY)
}


@dataclass(frozen=True)
class ReferenceClusterCounts:
    """Published mapped-cluster counts used as regression anchors."""

    model: str
    ubrain: int
    crossbar: int


REFERENCE_CLUSTERS: tuple[ReferenceClusterCounts, ...] = (
    ReferenceClusterCounts("lenet", 30, 31),
    ReferenceClusterCounts("alexnet", 2370, 2518),
    ReferenceClusterCounts("vgg16", 1888, 2006),
    ReferenceClusterCounts("resnet", 34, 36),
    ReferenceClusterCounts("densenet", 405, 431),
    ReferenceClusterCounts("mobilenet", 132, 140),
    ReferenceClusterCounts("xception", 1200, 1275),
)
