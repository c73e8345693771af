"""Typical and optimal deviating trajectories of ``|A_{xn}| / n``, and their cost.

All public functions accept scalar or array ``x`` and return the same shape.
The deviation parameter ``a`` is obtained from :func:`greedy_ldp.ratefn.solve_a`
once per ``(c, s)`` and cached.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import special

from greedy_ldp.errors import DomainError
from greedy_ldp.ratefn import DEFAULT_TOL, critical_fraction, solve_a

__all__ = [
    "PoissonCostPoint",
    "TrajectoryGrid",
    "action",
    "cost",
    "cost_first_form",
    "cost_via_legendre",
    "deviation_parameter",
    "el_ode_residual",
    "mean_trajectory",
    "ode_residual",
    "one_plus_slope",
    "optimal_trajectory",
    "poisson_cgf",
    "poisson_legendre",
    "poisson_point",
    "trajectory_grid",
]

NEAR_CRITICAL = 1e-6  # |a - 1| below this evaluates the a -> 1 limits
X_SLACK = 1e-12
DEFAULT_GRID_SIZE = 1001


@functools.lru_cache(maxsize=256)
def deviation_parameter(c: float, s: float, tol: float = DEFAULT_TOL) -> float:
    """``a_s`` for ``(c, s)``; cached since every trajectory query needs it."""
    return solve_a(c, s, tol).a


def _as_x(x, upper, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -X_SLACK) or np.any(arr > upper + X_SLACK):
        raise DomainError(f"{name} must lie in [0, {upper}]")
    return np.clip(arr, 0.0, upper)


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _shifted_exp(c, a, x):
    """Return ``(a - 1) e^{cx}`` and ``log(1 + (a - 1) e^{cx})``."""
    k = (a - 1.0) * np.exp(c * x)
    return k, np.log1p(k)


def mean_trajectory(c: float, x):
    """Typical trajectory ``(1 + 1/c) e^{-cx} - 1/c`` on ``[0, s_c]``."""
    x = _as_x(x, critical_fraction(c))
    return _out(_mean(c, x))


def _mean(c, x):
    return (1.0 + 1.0 / c) * np.exp(-c * x) - 1.0 / c


def _mean_one_plus_slope(c, x):
    return 1.0 - (c + 1.0) * np.exp(-c * x)


def _yhat(c, a, x):
    k, log_b = _shifted_exp(c, a, x)
    bracket = 1.0 / a - (log_b - np.log(a)) / (c * (a - 1.0))
    y = (1.0 + k) * np.exp(-c * x) * bracket
    return np.where(x == 0.0, 1.0, y)


def _one_plus_slope(c, a, x):
    k, log_b = _shifted_exp(c, a, x)
    return (log_b - np.log(a) - c * (a - 1.0) / a) / k


def _cost(c, a, x):
    k, log_b = _shifted_exp(c, a, x)
    first = log_b - np.log(a) - c * (a - 1.0) / a
    second = 1.0 - log_b / k
    return first * second


def optimal_trajectory(c: float, s: float, x):
    """Least-cost trajectory from 1 at ``x = 0`` to 0 at ``x = s``."""
    a = deviation_parameter(c, s)
    x = _as_x(x, s)
    if abs(a - 1.0) < NEAR_CRITICAL:
        return _out(np.where(x == 0.0, 1.0, _mean(c, x)))
    return _out(_yhat(c, a, x))


def one_plus_slope(c: float, s: float, x):
    """``1 + y'`` along the optimal trajectory; equals ``-c/a`` at ``x = 0``."""
    a = deviation_parameter(c, s)
    x = _as_x(x, s)
    if abs(a - 1.0) < NEAR_CRITICAL:
        return _out(_mean_one_plus_slope(c, x))
    return _out(_one_plus_slope(c, a, x))


def cost(c: float, s: float, x):
    """Cost density ``l_s(x)`` (product closed form); zero at ``x = s``."""
    a = deviation_parameter(c, s)
    x = _as_x(x, s)
    if abs(a - 1.0) < NEAR_CRITICAL:
        return _out(np.zeros_like(x))
    return _out(np.where(x == s, 0.0, _cost(c, a, x)))


def cost_first_form(c: float, s: float, x):
    """Cost density written as ``-(1+y')[1 + cy/(1+y') + log(-cy/(1+y'))]``.

    Evaluated from the trajectory and its slope rather than the product form,
    so the two serve as a cross-check. The endpoint ``x = s`` is set to 0.
    """
    x = _as_x(x, s)
    y = np.asarray(optimal_trajectory(c, s, x))
    d = np.asarray(one_plus_slope(c, s, x))
    interior = x < s
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = c * y / d
        val = -d * (1.0 + ratio + np.log(-ratio))
    return _out(np.where(interior, val, 0.0))


def poisson_cgf(lam, theta):
    """Cumulant generating function ``lam (e^theta - 1)`` of Poisson(lam)."""
    return _out(np.asarray(lam, dtype=float) * np.expm1(np.asarray(theta, dtype=float)))


def poisson_legendre(lam, xi):
    """Legendre-Fenchel transform ``sup_theta [theta xi - lam (e^theta - 1)]``.

    Closed form ``xi log(xi/lam) - xi + lam``; ``+inf`` where ``xi`` is not
    attainable (``xi < 0``, or ``lam = 0 < xi``). Never raises for those.
    """
    lam = np.asarray(lam, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.any(lam < 0):
        raise DomainError("Poisson rate must be nonnegative")
    lam_b, xi_b = np.broadcast_arrays(lam, xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = special.xlogy(xi_b, xi_b) - special.xlogy(xi_b, lam_b) - xi_b + lam_b
    val = np.where(xi_b == 0.0, lam_b, val)
    val = np.where((xi_b < 0) | ((lam_b == 0) & (xi_b > 0)), np.inf, val)
    return _out(val)


@dataclass(frozen=True)
class PoissonCostPoint:
    """Poisson rate ``lam = c y`` and required removal count ``xi = -(1 + y')``."""

    lam: float
    xi: float


def _clip_rounding(v, scale=1e-12):
    # endpoint values that should be 0 can come out as -1e-17
    return np.where((v < 0) & (v > -scale), 0.0, v)


def poisson_point(c: float, s: float, x: float) -> PoissonCostPoint:
    if x == s:
        return PoissonCostPoint(lam=0.0, xi=0.0)
    lam = _clip_rounding(c * np.asarray(optimal_trajectory(c, s, x)))
    xi = _clip_rounding(-np.asarray(one_plus_slope(c, s, x)))
    return PoissonCostPoint(lam=float(lam), xi=float(xi))


def cost_via_legendre(c: float, s: float, x):
    """Cost density as ``-Gamma*_lam(xi)`` at ``lam = c y``, ``xi = -(1 + y')``."""
    x = _as_x(x, s)
    lam = _clip_rounding(c * np.asarray(optimal_trajectory(c, s, x)))
    xi = _clip_rounding(-np.asarray(one_plus_slope(c, s, x)))
    return _out(np.where(x == s, 0.0, -np.asarray(poisson_legendre(lam, xi))))


def action(c: float, s: float) -> float:
    """``int_0^s l_s(x) dx`` from the antiderivative

    ``F(x) = -y(x) log B(x) + (1/c) int_1^{B(x)} log u/(1-u) du``,
    ``B(x) = 1 + (a-1) e^{cx}``, evaluated at the two endpoints.
    """
    a = deviation_parameter(c, s)
    if abs(a - 1.0) < NEAR_CRITICAL:
        return 0.0

    def antiderivative(x, y):
        _, log_b = _shifted_exp(c, a, x)
        return float(-y * log_b + special.spence(np.exp(log_b)) / c)

    y_end = float(_yhat(c, a, np.float64(s)))
    return antiderivative(s, y_end) - antiderivative(0.0, 1.0)


def el_ode_residual(c: float, s: float, x):
    """Residual of ``(1+y')/y + c = d/dx log(-c y/(1+y'))`` on the optimal path.

    The right side uses ``-c y/(1+y') = 1 + (a-1) e^{cx}``, giving
    ``c (a-1) e^{cx} / (1 + (a-1) e^{cx})``. Interior points only.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x >= s):
        raise DomainError("ODE residual is defined on the open interval (0, s)")
    a = deviation_parameter(c, s)
    y = np.asarray(optimal_trajectory(c, s, x))
    d = np.asarray(one_plus_slope(c, s, x))
    if abs(a - 1.0) < NEAR_CRITICAL:
        k = np.zeros_like(x)
    else:
        k = (a - 1.0) * np.exp(c * x)
    return _out(d / y + c - c * k / (1.0 + k))


def ode_residual(c: float, y, dy, d2y):
    """Same Euler-Lagrange residual for an arbitrary trajectory.

    Expanding the log-derivative reduces it to ``1/y + c + y'' / (1 + y')``.
    """
    y, dy, d2y = (np.asarray(v, dtype=float) for v in (y, dy, d2y))
    return _out(1.0 / y + c + d2y / (1.0 + dy))


@dataclass(frozen=True)
class TrajectoryGrid:
    """Optimal trajectory sampled on a uniform mesh of ``[0, s]``."""

    c: float
    s: float
    a: float
    xs: np.ndarray
    ys: np.ndarray
    slopes: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        for arr in (self.xs, self.ys, self.slopes, self.costs):
            arr.setflags(write=False)


def trajectory_grid(c: float, s: float, grid_size: int = DEFAULT_GRID_SIZE) -> TrajectoryGrid:
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    xs = np.linspace(0.0, s, grid_size)
    return TrajectoryGrid(
        c=float(c),
        s=float(s),
        a=deviation_parameter(c, s),
        xs=xs,
        ys=np.asarray(optimal_trajectory(c, s, xs)),
        slopes=np.asarray(one_plus_slope(c, s, xs)) - 1.0,
        costs=np.asarray(cost(c, s, xs)),
    )
