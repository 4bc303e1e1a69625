"""Comparison of two hyperplane parametrizations for 3-layer autoencoders.

The traditional form updates each node's bias-plus-weights row directly; the
alternative pulls the row's overall scale out and trains (scale, offset,
orientation) instead.  Both describe the same hyperplanes, map exactly onto
each other, and start runs from identical initializations, so every observed
difference comes from the update geometry alone.
"""

from .analysis import (
    AveragedCurve,
    SpeedupCurve,
    average_runs,
    epoch_speedup,
    epochs_to_reach,
    monotone_envelope,
    moving_average,
    run_variance,
)
from .data import Dataset, architecture_for, make_autoencoder_dataset
from .experiment import (
    ETA_TABLE,
    ExperimentPlan,
    ResultsBundle,
    default_plan,
    run_experiment,
    small_s_study,
    write_bundle,
)
from .grad import Deltas, finite_diff_grad, grad_w, grad_z, gradient_check
from .mathcore import activation, activation_deriv, make_rng, random_unit_vector
from .model import (
    Architecture,
    DegenerateHyperplaneError,
    ForwardTrace,
    WParams,
    ZLayer,
    ZParams,
    dump_params_csv,
    forward_w,
    forward_z,
    training_error,
    w_to_z,
    z_to_w,
)
from .train import (
    DivergenceError,
    RunRecord,
    TrainConfig,
    grid_search_eta,
    init_params,
    train_run,
)

__all__ = [
    "Architecture",
    "AveragedCurve",
    "Dataset",
    "DegenerateHyperplaneError",
    "Deltas",
    "DivergenceError",
    "ETA_TABLE",
    "ExperimentPlan",
    "ForwardTrace",
    "ResultsBundle",
    "RunRecord",
    "SpeedupCurve",
    "TrainConfig",
    "WParams",
    "ZLayer",
    "ZParams",
    "activation",
    "activation_deriv",
    "architecture_for",
    "average_runs",
    "default_plan",
    "dump_params_csv",
    "epoch_speedup",
    "epochs_to_reach",
    "finite_diff_grad",
    "forward_w",
    "forward_z",
    "grad_w",
    "grad_z",
    "gradient_check",
    "grid_search_eta",
    "init_params",
    "make_autoencoder_dataset",
    "make_rng",
    "monotone_envelope",
    "moving_average",
    "random_unit_vector",
    "run_experiment",
    "run_variance",
    "small_s_study",
    "train_run",
    "training_error",
    "w_to_z",
    "write_bundle",
    "z_to_w",
]
