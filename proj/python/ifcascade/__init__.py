"""Simulator and M1 path toolkit for the singular mean-field
integrate-and-fire model: exact spike cascades, the delayed equation, and
Skorohod M1 convergence diagnostics."""

from ._core import (
    CadlagPath,
    CascadeEvent,
    CascadeResult,
    ConfigError,
    DelayedConfig,
    DelayedOutput,
    DriftSpec,
    FiringRateResult,
    InitialLaw,
    Interp,
    JumpEvent,
    ParametricRepresentation,
    SimConfig,
    SimOutput,
    SpikeState,
    VerifyReport,
    build_parametric,
    cascade_size_inf,
    counting_map,
    detect_jumps,
    detect_run_jumps,
    drift_eval,
    firing_rate,
    graph_contains,
    m1_distance,
    oscillation_v,
    oscillation_w,
    physical_criterion_check,
    physical_jump_size,
    read_path_csv,
    resolve_cascade,
    run_delayed,
    run_delayed_with_input,
    run_particle_system,
    sample_initial,
    verify_physical_jump,
    write_path_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
