"""Closed-form large-deviation rate of the greedy independent set size.

For ``G(n, c/n)`` the probability that greedy stops at ``S_g <= sn`` (below
the typical fraction ``s_c``) or ``S_g >= sn`` (above it) decays like
``exp(n * rate(c, s))`` with

    rate = log(a) + (1/c) * int_a^b log(u) / (1 - u) du,
    b = a * exp(c * (1 - 1/a)),   s = (1/c) * log((b - 1) / (a - 1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy import integrate, optimize, special

from greedy_ldp.errors import ConvergenceError, DomainError

__all__ = [
    "ModelParams",
    "RateSolution",
    "b_of_a",
    "critical_fraction",
    "rate",
    "rate_derivative_in_a",
    "rate_integral",
    "rate_integrand",
    "s_of_a",
    "solve_a",
]

DEFAULT_TOL = 1e-12
QUAD_TOL = 1e-12
CRITICAL_BAND = 1e-9  # |s - s_c| below this is treated as s = s_c
A_SINGULAR_BAND = 1e-8  # |a - 1| below this uses the a -> 1 limit of s_of_a


def _check_c(c: float) -> float:
    c = float(c)
    if not math.isfinite(c) or c <= 0:
        raise DomainError(f"c must be positive and finite, got {c!r}")
    return c


def _check_a(a: float) -> float:
    a = float(a)
    if not math.isfinite(a) or a <= 0:
        raise DomainError(f"a must be positive and finite, got {a!r}")
    return a


def _check_s(s: float) -> float:
    s = float(s)
    if not (0.0 < s < 1.0):
        raise DomainError(f"s must lie in the open interval (0, 1), got {s!r}")
    return s


@dataclass(frozen=True)
class ModelParams:
    """Edge density ``c`` and, for finite-n work, the vertex count ``n``."""

    c: float
    n: Optional[int] = None

    def __post_init__(self):
        _check_c(self.c)
        if self.n is not None:
            if int(self.n) != self.n or self.n < 1:
                raise DomainError(f"n must be a positive integer, got {self.n!r}")
            if not self.n > self.c:
                raise DomainError(f"need n > c so that p = c/n < 1 (n={self.n}, c={self.c})")

    @property
    def p(self) -> Optional[float]:
        return None if self.n is None else self.c / self.n


@dataclass(frozen=True)
class RateSolution:
    """Solution of the rate problem at ``(c, s)``.

    ``rate`` is ``None`` when only the parameter ``a`` has been solved for.
    ``side`` is ``"lower"`` for ``s < s_c`` (event ``S_g <= sn``) and
    ``"upper"`` otherwise.
    """

    c: float
    s: float
    s_c: float
    a: float
    b: float
    side: Literal["lower", "upper"]
    rate: Optional[float] = None


def critical_fraction(c: float) -> float:
    """Typical limiting value of ``S_g / n``, namely ``log(1 + c) / c``."""
    c = _check_c(c)
    return math.log1p(c) / c


def b_of_a(c: float, a: float) -> float:
    """Return ``a * exp(c * (1 - 1/a))``."""
    c, a = _check_c(c), _check_a(a)
    return a * math.exp(c * (1.0 - 1.0 / a))


def s_of_a(c: float, a: float) -> float:
    """Deviation fraction ``s`` associated with the parameter ``a``.

    ``b - 1`` is formed with ``expm1`` so the ratio ``(b - 1)/(a - 1)`` keeps
    full precision close to the removable singularity at ``a = 1``.
    """
    c, a = _check_c(c), _check_a(a)
    if abs(a - 1.0) < A_SINGULAR_BAND:
        return critical_fraction(c)
    b_minus_1 = math.expm1(math.log(a) + c * (a - 1.0) / a)
    return math.log(b_minus_1 / (a - 1.0)) / c


def solve_a(c: float, s: float, tol: float = DEFAULT_TOL) -> RateSolution:
    """Find the unique ``a > 0`` with ``s_of_a(c, a) = s``.

    Returns a :class:`RateSolution` with ``rate`` unset. Within
    ``CRITICAL_BAND`` of ``s_c`` the critical point ``a = b = 1`` is returned.
    """
    c, s = _check_c(c), _check_s(s)
    s_c = critical_fraction(c)
    side = "lower" if s < s_c else "upper"
    if abs(s - s_c) < CRITICAL_BAND:
        return RateSolution(c=c, s=s, s_c=s_c, a=1.0, b=1.0, side=side)

    def g(a):
        return s_of_a(c, a) - s

    if side == "lower":
        lo, hi = 1e-12, 1.0
        while g(lo) > 0:
            lo *= 0.5
            if lo < 1e-300:
                raise ConvergenceError(f"could not bracket a for s={s}")
    else:
        lo, hi = 1.0, 2.0
        while g(hi) < 0:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise ConvergenceError(f"could not bracket a for s={s}")

    a = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    resid = abs(g(a))
    if resid >= tol:
        raise ConvergenceError(f"solve_a residual {resid:.3g} exceeds tol {tol:.3g}", resid)
    return RateSolution(c=c, s=s, s_c=s_c, a=a, b=b_of_a(c, a), side=side)


def rate_integrand(u: float) -> float:
    """``log(u) / (1 - u)``, patched to its limit ``-1`` at ``u = 1``."""
    u = float(u)
    if not u > 0:
        raise DomainError(f"integrand defined for u > 0, got {u!r}")
    d = 1.0 - u
    if abs(d) < 1e-8:
        # log(u)/(1-u) = -1 - d/2 - d^2/3 - ...
        return -1.0 - 0.5 * d - d * d / 3.0
    return math.log(u) / d


def _log_variable_integrand(tau: float) -> float:
    """``rate_integrand(e^tau) * e^tau``, smooth where ``log u`` is not."""
    if abs(tau) < 1e-8:
        return -1.0 - 0.5 * tau
    return -tau * math.exp(tau) / math.expm1(tau)


def rate_integral(a: float, b: float, method: Literal["quad", "dilog"] = "quad") -> float:
    """``int_a^b log(u)/(1 - u) du`` by adaptive quadrature or the dilogarithm.

    ``scipy.special.spence(z)`` equals ``int_1^z log(t)/(1 - t) dt``. The
    quadrature runs in ``tau = log u`` so that a tiny lower-tail ``b`` (the
    integrand has a log singularity at 0) costs nothing.
    """
    a, b = _check_a(a), _check_a(b)
    if method == "dilog":
        return float(special.spence(b) - special.spence(a))
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    if a == b:
        return 0.0
    val, _ = integrate.quad(
        _log_variable_integrand, math.log(a), math.log(b),
        epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200,
    )
    return val


def rate(c: float, s: float, tol: float = DEFAULT_TOL) -> RateSolution:
    """Exponential decay rate of ``P(S_g <= sn)`` or ``P(S_g >= sn)``.

    Examples
    --------
    >>> sol = rate(1.0, critical_fraction(1.0))
    >>> sol.a, sol.rate
    (1.0, 0.0)
    """
    sol = solve_a(c, s, tol)
    if sol.a == 1.0:
        value = 0.0
    else:
        value = math.log(sol.a) + rate_integral(sol.a, sol.b) / sol.c
    return RateSolution(
        c=sol.c, s=sol.s, s_c=sol.s_c, a=sol.a, b=sol.b, side=sol.side, rate=min(value, 0.0)
    )


def rate_derivative_in_a(c: float, a: float) -> float:
    """Derivative of ``log a + (1/c) int_a^b log u/(1-u) du`` in ``a``, for ``a > 1``.

    Strictly negative on ``a > 1``, so among upper deviations ``t >= s`` the
    least extreme one ``t = s`` dominates.
    """
    c, a = _check_c(c), _check_a(a)
    if not a > 1.0:
        raise DomainError(f"derivative exposed for a > 1 only, got {a!r}")
    b = b_of_a(c, a)
    b_minus_1 = math.expm1(math.log(a) + c * (a - 1.0) / a)
    first = ((1.0 - c * (a - 1.0) / a) * (b / a) - 1.0) / b_minus_1
    second = math.log(a) / (c * (a - 1.0)) + 1.0 / a
    return first * second
