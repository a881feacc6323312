"""Fundamental solutions on a single edge."""

from .engine import (
    EndpointData,
    SolutionTrace,
    integrate_fundamental,
    integrate_with_derivative,
    lambda_derivative,
    solution_trace,
    zero_potential_endpoints,
)

__all__ = [
    "EndpointData",
    "SolutionTrace",
    "integrate_fundamental",
    "integrate_with_derivative",
    "lambda_derivative",
    "solution_trace",
    "zero_potential_endpoints",
]
