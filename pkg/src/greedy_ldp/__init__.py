"""Large deviations of the greedy independent set algorithm on G(n, c/n).

Closed-form rate function and optimal trajectories, cross-checked against an
exact finite-n Markov chain, Monte Carlo samplers and a discrete
Euler-Lagrange solver.
"""

from greedy_ldp.errors import ConvergenceError, DomainError, ResourceLimitError
from greedy_ldp.ratefn import (
    ModelParams,
    RateSolution,
    b_of_a,
    critical_fraction,
    rate,
    rate_derivative_in_a,
    rate_integrand,
    s_of_a,
    solve_a,
)
from greedy_ldp.trajectory import (
    TrajectoryGrid,
    action,
    cost,
    cost_via_legendre,
    mean_trajectory,
    one_plus_slope,
    optimal_trajectory,
    poisson_cgf,
    poisson_legendre,
    trajectory_grid,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "ModelParams",
    "RateSolution",
    "ResourceLimitError",
    "TrajectoryGrid",
    "action",
    "b_of_a",
    "cost",
    "cost_via_legendre",
    "critical_fraction",
    "mean_trajectory",
    "one_plus_slope",
    "optimal_trajectory",
    "poisson_cgf",
    "poisson_legendre",
    "rate",
    "rate_derivative_in_a",
    "rate_integrand",
    "s_of_a",
    "solve_a",
    "trajectory_grid",
]
