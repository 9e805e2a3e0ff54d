"""First passage percolation geodesics from oriented percolation paths."""

from ._fppgeo import (
    ESCAPES,
    Excess,
    Field,
    FppgeoError,
    LevelTables,
    Window,
    bi_infinite_geodesic,
    enumerate_passage_times,
    estimate_alpha,
    fit_tail,
    gamma_k,
    geodesic,
    is_oriented_geodesic,
    joint_trace,
    passage_time,
    passage_times,
    q_path,
    run_experiment,
    sample_field,
    sandwich_geodesic,
    theta_curve,
)

__all__ = [
    "ESCAPES",
    "Excess",
    "Field",
    "FppgeoError",
    "LevelTables",
    "Window",
    "bi_infinite_geodesic",
    "enumerate_passage_times",
    "estimate_alpha",
    "fit_tail",
    "gamma_k",
    "geodesic",
    "is_oriented_geodesic",
    "joint_trace",
    "passage_time",
    "passage_times",
    "q_path",
    "run_experiment",
    "sample_field",
    "sandwich_geodesic",
    "theta_curve",
]
