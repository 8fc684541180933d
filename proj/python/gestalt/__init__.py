"""Gestalt motion models: cyclic-motion VAEs with online binding and
perspective inference. Thin wrapper around the C++ core."""

from ._gestalt import (
    BindingState,
    ConfigError,
    DisturbanceSpec,
    FeatureSequence,
    GestaltModel,
    Hyper,
    InferenceRun,
    MetricRow,
    ModelConfig,
    PendulumParams,
    TrainingCurves,
    VaeConfig,
    WalkerParams,
    apply_disturbance,
    fbe,
    generate_walker,
    infer_binding,
    infer_joint,
    infer_perspective,
    load_csv,
    load_model,
    preset_json,
    preset_names,
    run_experiment_json,
    run_report,
    save_csv,
    save_metrics_csv,
    save_model,
    sequence_hash,
    simulate_pendulum,
    train,
)

__all__ = [
    "BindingState",
    "ConfigError",
    "DisturbanceSpec",
    "FeatureSequence",
    "GestaltModel",
    "Hyper",
    "InferenceRun",
    "MetricRow",
    "ModelConfig",
    "PendulumParams",
    "TrainingCurves",
    "VaeConfig",
    "WalkerParams",
    "apply_disturbance",
    "fbe",
    "generate_walker",
    "infer_binding",
    "infer_joint",
    "infer_perspective",
    "load_csv",
    "load_model",
    "preset_json",
    "preset_names",
    "run_experiment_json",
    "run_report",
    "save_csv",
    "save_metrics_csv",
    "save_model",
    "sequence_hash",
    "simulate_pendulum",
    "train",
]
