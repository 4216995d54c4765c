"""slowfast: a simulation lab for a multistable slow-fast oscillator.

A planar oscillator pair rides on a slowly drifting excitability
variable. The package integrates the forced system deterministically,
catalogs its attractors, checks region-of-attraction membership, bounds
the recovery rate after perturbations (which degrades near the critical
excitability: critical slowing down), detects that degradation online by
active pulse probing, and closes the loop with event-triggered feedback.
"""

from .analysis import (
    EnvelopeReport,
    RecoveryBound,
    RecoveryTime,
    RegionMembership,
    analysis_report,
    check_envelope,
    count_regions,
    estimate_sigma,
    mu_bound,
    radial_bound,
    recovery_time,
    region_membership,
)
from .control import ControlPolicy, control_input, on_event
from .detect import (
    DetectionRecord,
    DetectionState,
    ProbeSamples,
    ProbeSchedule,
    detector_step,
    estimate_from_probe,
    probe_forcing,
    write_detections_jsonl,
)
from .errors import (
    BoundaryCase,
    DegenerateRadius,
    NonFiniteState,
    PreconditionError,
    RegimeError,
    ScenarioValidationError,
    ScheduleConflict,
    SlowFastError,
)
from .integrator import (
    ForcingProgram,
    Impulse,
    IntegratorConfig,
    NoiseSpec,
    Pulse,
    SimulationResult,
    Trajectory,
    forcing_at,
    realize_noise,
    simulate,
    step,
)
from .model import (
    AttractorCatalog,
    AttractorSet,
    CycleInfo,
    ModelParams,
    SystemState,
    attractor_catalog,
    f_value,
    radius_offset,
    vector_field,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    BasinReport,
    RunSummary,
    ScenarioSpec,
    SweepTable,
    basin_mc,
    bifurcation_sweep,
    list_scenarios,
    load_scenario,
    run_basin,
    run_scenario,
    sample_strata,
)

__version__ = "0.1.0"

__all__ = [
    "AttractorCatalog",
    "AttractorSet",
    "BUILTIN_SCENARIOS",
    "BasinReport",
    "BoundaryCase",
    "ControlPolicy",
    "CycleInfo",
    "DegenerateRadius",
    "DetectionRecord",
    "DetectionState",
    "EnvelopeReport",
    "ForcingProgram",
    "Impulse",
    "IntegratorConfig",
    "ModelParams",
    "NoiseSpec",
    "NonFiniteState",
    "PreconditionError",
    "ProbeSamples",
    "ProbeSchedule",
    "Pulse",
    "RecoveryBound",
    "RecoveryTime",
    "RegimeError",
    "RegionMembership",
    "RunSummary",
    "ScenarioSpec",
    "ScenarioValidationError",
    "ScheduleConflict",
    "SimulationResult",
    "SlowFastError",
    "SweepTable",
    "SystemState",
    "Trajectory",
    "analysis_report",
    "attractor_catalog",
    "basin_mc",
    "bifurcation_sweep",
    "check_envelope",
    "control_input",
    "count_regions",
    "detector_step",
    "estimate_from_probe",
    "estimate_sigma",
    "f_value",
    "forcing_at",
    "list_scenarios",
    "load_scenario",
    "mu_bound",
    "on_event",
    "probe_forcing",
    "radial_bound",
    "radius_offset",
    "realize_noise",
    "recovery_time",
    "region_membership",
    "run_basin",
    "run_scenario",
    "sample_strata",
    "simulate",
    "step",
    "vector_field",
    "write_detections_jsonl",
]
