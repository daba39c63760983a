"""astrocore: fault-tolerant neuromorphic design toolkit.

Simulates astrocyte-mediated self-repair of spiking networks, maps models onto
fixed-capacity neuromorphic cores, sizes the repair hardware, and prices the
result in area, power and reliability.

The command-line interface lives in :mod:`astrocore.cli`; figure rendering in
:mod:`astrocore.report`.  Neither is imported here so that library use never
pulls in matplotlib.
"""

from .astro import (
    AstroParams,
    AstroState,
    AstroTrace,
    ReadoutParams,
    SourceCut,
    initial_state,
    self_repair_run,
    simulate,
    steady_state,
    step,
    time_scaled,
)
from .config import ConfigError, default_config, load_config, merge_config
from .costmodel import (
    AreaModel,
    AreaRow,
    AreaWeights,
    PowerModel,
    PowerRow,
    TECHNIQUES,
    area_report,
    design_area,
    design_power,
    normalize,
    power_report,
    power_savings_disable,
)
from .fixedpoint import (
    Fixed,
    FixedAstroParams,
    FixedAstroState,
    FixedFormat,
    PWLTable,
    Q20,
    build_pwl,
    decode_state,
    encode,
    encode_state,
    fixed_astro_step,
)
from .netmap import (
    Cluster,
    CoreSpec,
    Mapping,
    NetGraph,
    cluster_count_estimate,
    distance_labels,
    graph_view,
    partition,
    validate,
)
from .presets import (
    BENCHMARKS,
    FAULT_CONSTANTS,
    REFERENCE_CLUSTERS,
    RESOURCE_PROFILES,
)
from .reliability import (
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
from .snn import (
    AstroAllocation,
    AstroContext,
    AstroGroup,
    Dataset,
    EvalHarness,
    FAULT_KINDS,
    FaultRecord,
    FaultSpec,
    LifParams,
    ModelGraph,
    RunResult,
    accuracy,
    attach_astrocytes,
    build_toy_model,
    infer,
    inject_faults,
    run_batch,
)
from .synthesis import (
    AstroEnabledModel,
    EvaluationEngine,
    SynthesisConfig,
    SynthesisLogRecord,
    disable_unused,
    evaluate_min_accuracy,
    insert_astrocytes,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # astro
    "AstroParams", "AstroState", "AstroTrace", "ReadoutParams", "SourceCut",
    "initial_state", "self_repair_run", "simulate", "steady_state", "step",
    "time_scaled",
    # config
    "ConfigError", "default_config", "load_config", "merge_config",
    # costmodel
    "AreaModel", "AreaRow", "AreaWeights", "PowerModel", "PowerRow",
    "TECHNIQUES", "area_report", "design_area", "design_power", "normalize",
    "power_report", "power_savings_disable",
    # fixedpoint
    "Fixed", "FixedAstroParams", "FixedAstroState", "FixedFormat", "PWLTable",
    "Q20", "build_pwl", "decode_state", "encode", "encode_state",
    "fixed_astro_step",
    # netmap
    "Cluster", "CoreSpec", "Mapping", "NetGraph", "cluster_count_estimate",
    "distance_labels", "graph_view", "partition", "validate",
    # presets
    "BENCHMARKS", "FAULT_CONSTANTS", "REFERENCE_CLUSTERS",
    "RESOURCE_PROFILES",
    # reliability
    "BtiParams", "DisturbParams", "EnduranceParams", "FailureRates",
    "cycles_to_hours", "failure_rate", "mttf_bti", "mttf_disturb",
    "mttf_endurance", "overall_mttf", "p_failures", "sample_fault_count",
    "self_heating_temp", "sofr",
    # snn
    "AstroAllocation", "AstroContext", "AstroGroup", "Dataset", "EvalHarness",
    "FAULT_KINDS", "FaultRecord", "FaultSpec", "LifParams", "ModelGraph",
    "RunResult", "accuracy", "attach_astrocytes", "build_toy_model", "infer",
    "inject_faults", "run_batch",
    # synthesis
    "AstroEnabledModel", "EvaluationEngine", "SynthesisConfig",
    "SynthesisLogRecord", "disable_unused", "evaluate_min_accuracy",
    "insert_astrocytes",
]
