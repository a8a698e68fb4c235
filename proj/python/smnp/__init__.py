"""Symmetric and base-category multinomial probit samplers."""

from ._core import (
    Dataset,
    DimensionError,
    DomainError,
    Draws,
    NumericalError,
    ParseError,
    fit_mnp,
    fit_smnp,
    main,
    postprocess_identify,
    predict_probs,
    price_curve,
    psi_curve,
    read_dataset,
    read_draws,
    run_study,
    set_quiet,
    simulate_dataset,
    trace,
    write_dataset,
    write_draws,
)

__all__ = [
    "Dataset",
    "DimensionError",
    "DomainError",
    "Draws",
    "NumericalError",
    "ParseError",
    "fit_mnp",
    "fit_smnp",
    "main",
    "postprocess_identify",
    "predict_probs",
    "price_curve",
    "psi_curve",
    "read_dataset",
    "read_draws",
    "run_study",
    "set_quiet",
    "simulate_dataset",
    "trace",
    "write_dataset",
    "write_draws",
]
