"""Fast invariant checks run by ``greedy-ldp verify``.

Each check returns ``(ok, detail)``. Sizes are chosen so the whole suite runs
in well under a minute; the pytest suite covers the full-size criteria.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import integrate

from greedy_ldp import discrete_el, oracle, ratefn, simulator, trajectory

Check = Callable[[], tuple[bool, str]]

_CS = (0.5, 1.0, math.e, 5.0)


def _s_values(c):
    s_c = ratefn.critical_fraction(c)
    return (0.3 * s_c, 0.8 * s_c, s_c + 0.3 * (1 - s_c), s_c + 0.8 * (1 - s_c))


def check_critical_fraction():
    v = ratefn.critical_fraction(math.e)
    ok = abs(v - 0.483) <= 1e-3 and abs(ratefn.critical_fraction(1.0) - math.log(2)) < 1e-12
    return ok, f"s_c(e) = {v:.6f}"


def check_parameter_pairs():
    hi, lo = ratefn.s_of_a(math.e, 2.0), ratefn.s_of_a(math.e, 0.5)
    back_hi = ratefn.solve_a(math.e, hi).a
    back_lo = ratefn.solve_a(math.e, lo).a
    ok = (
        abs(hi - 0.704) <= 1e-3
        and abs(lo - 0.243) <= 1e-3
        and abs(back_hi - 2.0) < 1e-6
        and abs(back_lo - 0.5) < 1e-6
    )
    return ok, f"s(a=2) = {hi:.6f}, s(a=1/2) = {lo:.6f}"


def check_action_equals_rate():
    worst = 0.0
    for c in _CS:
        for s in _s_values(c):
            worst = max(worst, abs(trajectory.action(c, s) - ratefn.rate(c, s).rate))
    return worst < 1e-8, f"max |action - rate| = {worst:.2e}"


def check_quadrature_vs_dilog():
    worst = 0.0
    for c in _CS:
        for s in _s_values(c):
            sol = ratefn.solve_a(c, s)
            q = ratefn.rate_integral(sol.a, sol.b, "quad")
            d = ratefn.rate_integral(sol.a, sol.b, "dilog")
            worst = max(worst, abs(q - d))
    return worst < 1e-10, f"max |quad - dilog| = {worst:.2e}"


def check_action_quadrature():
    worst = 0.0
    for c in _CS:
        for s in _s_values(c):
            q, _ = integrate.quad(
                lambda x: trajectory.cost(c, s, x), 0.0, s, epsabs=1e-13, epsrel=1e-13, limit=200
            )
            worst = max(worst, abs(q - trajectory.action(c, s)))
    return worst < 1e-8, f"max |int cost - action| = {worst:.2e}"


def check_legendre_identity():
    worst = 0.0
    for c in _CS:
        for s in _s_values(c):
            x = np.linspace(0.0, s, 1002)[1:-1]
            d = np.abs(trajectory.cost(c, s, x) - trajectory.cost_via_legendre(c, s, x))
            worst = max(worst, float(d.max()))
    return worst < 1e-10, f"max |cost - legendre| = {worst:.2e}"


def check_ode_residual():
    worst = 0.0
    for c in _CS:
        for s in _s_values(c):
            x = np.linspace(0.0, s, 1002)[1:-1]
            worst = max(worst, float(np.abs(trajectory.el_ode_residual(c, s, x)).max()))
    return worst < 1e-9, f"max ODE residual = {worst:.2e}"


def check_discrete_el():
    c, s = math.e, 0.704
    errs = []
    for m in (128, 256, 512):
        sol = discrete_el.solve_bvp(c, s, m)
        errs.append(float(np.abs(sol.ys - trajectory.optimal_trajectory(c, s, sol.xs)).max()))
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    ok = all(0.3 <= r <= 0.7 for r in ratios)
    return ok, "error ratios " + ", ".join(f"{r:.3f}" for r in ratios)


def check_kernel_rows():
    worst = 0.0
    for c in (0.5, 1.0, 2.0):
        k = oracle.log_kernel(50, c)
        rows = np.logaddexp.reduce(k[1:], axis=1)
        worst = max(worst, float(np.abs(rows).max()))
    return worst < 1e-12, f"max |log row sum| = {worst:.2e}"


def check_oracle_vs_brute_force():
    worst = 0.0
    for n in (1, 2, 3, 4):
        for c in (0.5, 1.0, 2.0):
            if n <= c:
                continue
            dp = oracle.sg_pmf(n, c)
            bf = oracle.brute_force_tiny(n, c)
            tv = sum(abs(dp.get(k, 0.0) - bf.get(k, 0.0)) for k in set(dp) | set(bf))
            worst = max(worst, tv)
    return worst < 1e-12, f"max total variation = {worst:.2e}"


def check_conservation():
    worst = 0.0
    for dist in oracle.iter_distribution(60, 1.5):
        worst = max(worst, abs(dist.total_logmass()))
    return worst < 1e-10, f"max |log total mass| = {worst:.2e}"


def check_samplers_vs_exact():
    exact = oracle.brute_force_tiny(4, 1.0)
    samples = 20000
    worst = 0.0
    for name in simulator.PROCESSES:
        sg = np.array([r.sg for r in simulator.run_samples(name, 4, 1.0, samples, 11, workers=1)])
        for k, pk in exact.items():
            sigma = math.sqrt(pk * (1 - pk) / samples)
            z = abs(np.mean(sg == k) - pk) / sigma if sigma > 0 else 0.0
            worst = max(worst, z)
    return worst < 3.0, f"max |z| = {worst:.2f} over chain/graph/graphical"


def check_determinism():
    a = simulator.run_samples("chain", 200, 1.0, 50, 5, workers=1)
    b = simulator.run_samples("chain", 200, 1.0, 50, 5, workers=1)
    return a == b, "repeat run identical" if a == b else "repeat run differs"


CHECKS: dict[str, Check] = {
    "critical_fraction": check_critical_fraction,
    "parameter_pairs": check_parameter_pairs,
    "action_equals_rate": check_action_equals_rate,
    "quadrature_vs_dilog": check_quadrature_vs_dilog,
    "action_quadrature": check_action_quadrature,
    "legendre_identity": check_legendre_identity,
    "ode_residual": check_ode_residual,
    "discrete_el_convergence": check_discrete_el,
    "kernel_normalisation": check_kernel_rows,
    "oracle_vs_brute_force": check_oracle_vs_brute_force,
    "probability_conservation": check_conservation,
    "samplers_vs_exact": check_samplers_vs_exact,
    "determinism": check_determinism,
}


def run_checks(names=None) -> list[tuple[str, bool, str]]:
    """Run the named checks (all by default); exceptions count as failures."""
    out = []
    for name in names or CHECKS:
        try:
            ok, detail = CHECKS[name]()
        except Exception as exc:  # report, do not abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
