"""Discrete Euler-Lagrange boundary value problem for the greedy action.

Maximise ``sum_i f(y_i, w_i) dx`` over uniform-mesh paths ``y_0 = 1, ..., y_m = 0``
with slopes ``w_i = (y_{i+1} - y_i) / dx`` and

    f(u, w) = -(1 + w) [1 + c u/(1 + w) + log(-c u/(1 + w))].

Stationarity in each interior ``y_{i+1}`` gives the forward recurrence

    f_u(y_{i+1}, w_{i+1}) = [f_w(y_{i+1}, w_{i+1}) - f_w(y_i, w_i)] / dx,

which is marched from a trial initial slope; the slope is then shot on until
``y_m = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from greedy_ldp.errors import ConvergenceError, DomainError
from greedy_ldp.trajectory import deviation_parameter

__all__ = [
    "DiscreteELSolution",
    "InfeasibleNode",
    "el_residuals",
    "lagrangian_f",
    "march",
    "partials_fu_fw",
    "solve_bvp",
    "step_solve",
]

INNER_TOL = 1e-10
OUTER_TOL = 1e-8
MIN_GAP = 1e-12  # smallest admissible -(1 + w)
NEWTON_POLISH = 3


class InfeasibleNode(ConvergenceError):
    """The recurrence has no admissible slope at some node (``y <= 0`` or no root)."""

    def __init__(self, message, node):
        super().__init__(message)
        self.node = node


def _check(c, u, w):
    if not (u > 0 and 1.0 + w < 0):
        raise DomainError(f"f(u, w) needs u > 0 and 1 + w < 0, got u={u!r}, w={w!r}")


def lagrangian_f(c: float, u: float, w: float) -> float:
    """Per-unit-time log-probability ``f(u, w)`` of slope ``w`` at height ``u``."""
    _check(c, u, w)
    r = -c * u / (1.0 + w)
    return -(1.0 + w) * (1.0 - r + math.log(r))


def partials_fu_fw(c: float, u: float, w: float) -> tuple[float, float]:
    """``(f_u, f_w) = (-(1 + w)/u - c, -log(-c u/(1 + w)))``."""
    _check(c, u, w)
    return -(1.0 + w) / u - c, -math.log(-c * u / (1.0 + w))


def step_solve(
    c: float,
    y_i: float,
    w_i: float,
    y_next: float,
    dx: float,
    tol: float = INNER_TOL,
    debug: bool = False,
) -> float:
    """Solve the recurrence for ``w_next`` given the previous node.

    Writing ``t = -(1 + w_next)``, the residual
    ``G(t) = t/y_next - c - (log t - log(c y_next) - f_w(y_i, w_i)) / dx``
    is convex in ``t`` with its minimum at ``t = y_next/dx`` and ``G(0+) = +inf``.
    The admissible root is the one on ``(0, y_next/dx)``, where ``G`` is
    strictly decreasing; a second root beyond the minimum is spurious.
    With ``debug`` set, monotonicity on the bracket is checked at 1000 points.
    """
    if not y_next > 0:
        raise InfeasibleNode(f"y_next={y_next!r} is not positive", node=None)
    _, fw_prev = partials_fu_fw(c, y_i, w_i)
    shift = math.log(c * y_next) + fw_prev

    def g(t):
        return t / y_next - c - (math.log(t) - shift) / dx

    hi = y_next / dx
    if g(hi) >= 0:
        raise InfeasibleNode("no admissible slope: recurrence residual has no sign change", None)
    lo = 0.5 * hi
    while g(lo) <= 0:
        lo *= 0.5
        if lo < MIN_GAP:
            raise InfeasibleNode("no admissible slope above the minimal gap", None)
    if debug:
        probe = np.array([g(v) for v in np.geomspace(lo, hi, 1000)])
        if not np.all(np.diff(probe) < 0):
            raise AssertionError("recurrence residual is not monotone on the bracket")
    t = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    for _ in range(NEWTON_POLISH):
        step = g(t) / (1.0 / y_next - 1.0 / (t * dx))
        if not (0 < t - step < hi):
            break
        t -= step
    w_next = -1.0 - t
    if abs(g(t)) * dx > tol:
        raise ConvergenceError(f"inner solve residual {g(t):.3g} above tolerance", g(t))
    return w_next


def march(c: float, w0: float, m: int, dx: float, tol: float = INNER_TOL):
    """Run the recurrence from ``y_0 = 1`` with slope ``w0``; return ``(ys, ws)``.

    Raises :class:`InfeasibleNode` (``node`` set) when the path leaves the domain.
    """
    ys = np.empty(m + 1)
    ws = np.empty(m)
    ys[0] = 1.0
    ws[0] = w0
    for i in range(m - 1):
        ys[i + 1] = ys[i] + ws[i] * dx
        try:
            ws[i + 1] = step_solve(c, ys[i], ws[i], ys[i + 1], dx, tol)
        except InfeasibleNode as exc:
            exc.node = i + 1
            raise
    ys[m] = ys[m - 1] + ws[m - 1] * dx
    return ys, ws


def el_residuals(c: float, ys: np.ndarray, ws: np.ndarray, dx: float) -> np.ndarray:
    """Recurrence residual at the interior nodes ``1..m-1``.

    Reported as ``dx f_u(y_j, w_j) - f_w(y_j, w_j) + f_w(y_{j-1}, w_{j-1})``,
    the derivative of the discrete action in ``y_j``.
    """
    out = np.empty(len(ws) - 1)
    for i in range(len(ws) - 1):
        fu, fw_next = partials_fu_fw(c, ys[i + 1], ws[i + 1])
        _, fw = partials_fu_fw(c, ys[i], ws[i])
        out[i] = dx * fu - (fw_next - fw)
    return out


@dataclass(frozen=True)
class DiscreteELSolution:
    c: float
    s: float
    m: int
    xs: np.ndarray
    ys: np.ndarray
    ws: np.ndarray
    action: float
    shooting_residual: float


def solve_bvp(
    c: float,
    s: float,
    m: int,
    tol: float = OUTER_TOL,
    inner_tol: float = INNER_TOL,
    max_iter: int = 200,
) -> DiscreteELSolution:
    """Shoot on the initial slope until the marched path ends at ``y_m = 0``.

    The shooting is warm-started at the continuum initial slope ``-1 - c/a``.
    """
    if not (0 < s < 1):
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    if m < 8:
        raise DomainError("mesh count m must be at least 8")
    dx = s / m
    a = deviation_parameter(c, s)
    t_start = c / a

    def end_height(t0):
        try:
            ys, _ = march(c, -1.0 - t0, m, dx, inner_tol)
        except InfeasibleNode as exc:
            # too steep: ran out of height at node exc.node
            return -(m - exc.node + 1) * dx
        return ys[m]

    # larger t0 (steeper start) lowers the end height
    lo, hi = t_start, t_start
    step = 1e-3 * t_start
    for _ in range(60):
        lo, hi = max(t_start - step, 0.5 * MIN_GAP), t_start + step
        if end_height(lo) > 0 > end_height(hi):
            break
        step *= 2.0
    else:
        raise ConvergenceError("could not bracket the initial slope")

    t0, info = optimize.brentq(
        end_height, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
        maxiter=max_iter, full_output=True, disp=False,
    )
    ys, ws = march(c, -1.0 - t0, m, dx, inner_tol)
    resid = abs(ys[m])
    if resid > tol:
        raise ConvergenceError(
            f"shooting stopped with |y_m| = {resid:.3g} after {info.iterations} iterations", resid
        )
    ys[m] = 0.0
    act = float(sum(lagrangian_f(c, ys[i], ws[i]) for i in range(m)) * dx)
    return DiscreteELSolution(
        c=float(c),
        s=float(s),
        m=m,
        xs=np.linspace(0.0, s, m + 1),
        ys=ys,
        ws=ws,
        action=act,
        shooting_residual=resid,
    )
