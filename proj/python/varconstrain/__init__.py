"""Constrained variational problems solved with neural networks."""

from ._core import (
    NumericError,
    Problem,
    UsageError,
    evaluate,
    gauss_legendre,
    init_params,
    learning_rate,
    make_problem,
    param_count,
    penalty_mu,
    preset,
    report,
    resume,
    run,
    verify,
)

__all__ = [
    "NumericError",
    "Problem",
    "UsageError",
    "evaluate",
    "gauss_legendre",
    "init_params",
    "learning_rate",
    "make_problem",
    "param_count",
    "penalty_mu",
    "preset",
    "report",
    "resume",
    "run",
    "verify",
]
