"""Exponential tail bounds for normed random sums, with Monte Carlo verification.

The heavy lifting lives in the compiled extension; this package just re-exports it.
"""

from ._core import (
    CumulantModel,
    DomainError,
    EmpiricalTail,
    IndexLaw,
    NumericalError,
    OrliczTailSpec,
    StoppedSumExponents,
    SumExponents,
    SummandLaw,
    TailFunction,
    TwoPointTail,
    __version__,
    clopper_pearson,
    closed_form_geometric_bound,
    closed_form_poisson_bound,
    default_p_grid,
    dominant_index,
    exact_two_point_tail,
    normal_upper_tail,
    orlicz_norm_estimate,
    random_sum_bound,
    rate_function,
    simulate_tail,
    stopped_sum_exponents,
    sum_cumulant,
    sum_exponents,
    truncation_bound,
    uniform_sum_bound,
)

__all__ = [
    "CumulantModel",
    "DomainError",
    "EmpiricalTail",
    "IndexLaw",
    "NumericalError",
    "OrliczTailSpec",
    "StoppedSumExponents",
    "SumExponents",
    "SummandLaw",
    "TailFunction",
    "TwoPointTail",
    "__version__",
    "clopper_pearson",
    "closed_form_geometric_bound",
    "closed_form_poisson_bound",
    "default_p_grid",
    "dominant_index",
    "exact_two_point_tail",
    "normal_upper_tail",
    "orlicz_norm_estimate",
    "random_sum_bound",
    "rate_function",
    "simulate_tail",
    "stopped_sum_exponents",
    "sum_cumulant",
    "sum_exponents",
    "truncation_bound",
    "uniform_sum_bound",
]
