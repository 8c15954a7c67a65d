"""Sum-of-squares bounds on time averages and stationary expectations."""

from ._core import (
    OracleError,
    Problem,
    ProblemFileError,
    absorbing_check,
    bound,
    bound_kinds,
    certify,
    fokker_planck,
    load_problem,
    simulate,
    van_der_pol,
)

__all__ = [
    "OracleError",
    "Problem",
    "ProblemFileError",
    "absorbing_check",
    "bound",
    "bound_kinds",
    "certify",
    "fokker_planck",
    "load_problem",
    "simulate",
    "van_der_pol",
]
