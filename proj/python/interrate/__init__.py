"""Temporal interaction profiles between entities of exposure sequences."""

from ._core import (
    BACKGROUND_FLOOR,
    EmpiricalPredictor,
    FitResult,
    IcirPredictor,
    InterrateError,
    KernelPredictor,
    KernelSpec,
    NaivePredictor,
    ObservationSet,
    Predictor,
    assemble_observations,
    bcf1,
    feature_map,
    fit,
    fit_icir,
    fit_kernel_predictor,
    fit_naive,
    generate,
    hazard,
    js_divergence,
    load_beta,
    load_sequences,
    mse_beta,
    neg_log_likelihood,
    plan_folds,
    profile_csv,
    random_beta,
    rss,
    run_experiment,
    save_sequences,
)

__all__ = [name for name in dir() if not name.startswith("_")]
