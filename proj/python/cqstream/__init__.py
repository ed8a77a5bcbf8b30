"""Consistent-quality rate adaptation for HTTP adaptive streaming.

Thin re-export of the native module: segment ladders and quality metrics,
the dynamic-programming window planner with its exhaustive oracle, the
sliding-window online adapter, the PANDA/CQ probing controller, and the
deterministic fluid-link simulator.
"""

from cqstream._core import (  # noqa: F401
    BandwidthTrace,
    BufferGrid,
    ClientSession,
    ConfigError,
    ControllerConfig,
    ControllerKind,
    InfeasibleError,
    InstanceTooLarge,
    IoError,
    Level,
    Objective,
    OnlineConfig,
    OnlineDecision,
    PlanRequest,
    PlanResult,
    ProbeState,
    QualityConvention,
    SegmentLadder,
    SessionController,
    SimOptions,
    SimReport,
    StallEvent,
    StepDecision,
    StepRecord,
    SummaryMetrics,
    SynthProfile,
    TracePoint,
    ValidationError,
    brute_force_plan,
    buffer_step,
    compute_metrics,
    default_config,
    ewma_update,
    gen_synthetic_ladder,
    horizon_for,
    load_manifest,
    load_trace,
    mse_to_psnr,
    online_step,
    parse_controller_config,
    parse_trace_inline,
    plan,
    probe_update,
    run_known_bandwidth,
    run_shared,
    run_single,
    select_cq,
    select_rate_based,
    step_utility,
    synthetic_mse,
    target_interval,
    u_alpha,
    validate_objective_for,
    write_manifest,
    write_report_csv,
    write_summary_csv,
)

__version__ = "0.1.0"
