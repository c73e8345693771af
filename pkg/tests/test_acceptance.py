"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``ACCEPTANCE <k> PASS|FAIL`` line to the terminal
(pytest capture is bypassed). Run directly with ``python3
tests/test_acceptance.py`` to get just the ten lines.
"""

import contextlib
import io
import math
import os
import sys

import numpy as np
import pytest

from greedy_ldp import cli, discrete_el, oracle, simulator, trajectory
from greedy_ldp.ratefn import critical_fraction, rate, s_of_a, solve_a

E = math.e
CS = [0.5, 1.0, E, 5.0]


def s_values(c):
    s_c = critical_fraction(c)
    return [0.3 * s_c, 0.6 * s_c, 0.9 * s_c, s_c + 0.1 * (1 - s_c), s_c + 0.5 * (1 - s_c), 0.95]


def pairs():
    return [(c, s) for c in CS for s in s_values(c)]


def criterion_1():
    v = critical_fraction(E)
    g = abs(critical_fraction(1.0) - math.log(2))
    return abs(v - 0.483) <= 1e-3 and g < 1e-12, f"s_c(e)={v:.6f}, |s_c(1)-log 2|={g:.1e}"


def criterion_2():
    hi, lo = s_of_a(E, 2.0), s_of_a(E, 0.5)
    inv = max(abs(solve_a(E, hi).a - 2.0), abs(solve_a(E, lo).a - 0.5))
    ok = abs(hi - 0.704) <= 1e-3 and abs(lo - 0.243) <= 1e-3 and inv < 1e-6
    return ok, f"s(e,2)={hi:.6f}, s(e,1/2)={lo:.6f}, inversion error {inv:.1e}"


def criterion_3():
    worst = max(abs(trajectory.action(c, s) - rate(c, s).rate) for c, s in pairs())
    return worst < 1e-8, f"max |action-rate| = {worst:.2e} over {len(pairs())} (c, s)"


def _brute_sup(lam, xi):
    # dense theta grid around the maximiser, then a finer one around the best node
    centre = math.log(xi / lam)
    best = -math.inf
    for width, step in ((10.0, 1e-4), (1e-3, 1e-8)):
        theta = np.arange(centre - width, centre + width, step)
        vals = theta * xi - lam * np.expm1(theta)
        i = int(np.argmax(vals))
        best, centre = max(best, float(vals[i])), float(theta[i])
    return best


def criterion_4():
    worst_id = 0.0
    worst_sup = 0.0
    for c, s in pairs():
        x = np.linspace(0.0, s, 1002)[1:-1]
        d = np.abs(trajectory.cost(c, s, x) - trajectory.cost_via_legendre(c, s, x))
        worst_id = max(worst_id, float(d.max()))
        for frac in (0.2, 0.5, 0.8):
            pt = trajectory.poisson_point(c, s, frac * s)
            gap = abs(trajectory.poisson_legendre(pt.lam, pt.xi) - _brute_sup(pt.lam, pt.xi))
            worst_sup = max(worst_sup, gap)
    ok = worst_id < 1e-10 and worst_sup < 1e-4
    return ok, f"max |cost-legendre| = {worst_id:.2e}, max |closed-brute sup| = {worst_sup:.2e}"


def criterion_5():
    worst_ode = 0.0
    for c, s in pairs() + [(E, 0.704), (E, 0.243)]:
        x = np.linspace(0.0, s, 1002)[1:-1]
        worst_ode = max(worst_ode, float(np.abs(trajectory.el_ode_residual(c, s, x)).max()))
    c, s = E, 0.704
    errs, actions = [], []
    for m in (128, 256, 512, 1024):
        sol = discrete_el.solve_bvp(c, s, m)
        errs.append(float(np.abs(sol.ys - trajectory.optimal_trajectory(c, s, sol.xs)).max()))
        actions.append(sol.action)
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    act_gap = abs(actions[-1] - rate(c, s).rate)
    ok = worst_ode < 1e-9 and all(0.3 <= r <= 0.7 for r in ratios) and act_gap < 1e-3
    detail = (
        f"ODE residual {worst_ode:.1e}; error ratios "
        + ", ".join(f"{r:.3f}" for r in ratios)
        + f"; |action(1024)-rate| = {act_gap:.1e}"
    )
    return ok, detail


def criterion_6():
    worst = 0.0
    for n in (1, 2, 3, 4):
        for c in (0.5, 1.0, 2.0):
            if n <= c:
                continue  # n > c is required so that p = c/n < 1
            dp = oracle.sg_pmf(n, c)
            bf = oracle.brute_force_tiny(n, c)
            worst = max(worst, sum(abs(dp.get(k, 0.0) - bf.get(k, 0.0)) for k in set(dp) | set(bf)))
    return worst < 1e-12, f"max total variation = {worst:.1e}"


def criterion_7():
    ns = (100, 200, 400, 800)
    ok, parts = True, []
    dists = {}
    for c, s, side in ((1.0, 0.9, "ge"), (1.0, 0.45, "le"), (E, 0.70, "ge")):
        target = rate(c, s).rate
        deltas = []
        for n in ns:
            if (n, c) not in dists:
                dists[(n, c)] = oracle.sg_distribution(n, c)
            deltas.append(oracle.tail_logprob(n, c, s, side, dist=dists[(n, c)]) - target)
        mags = np.abs(deltas)
        ok &= bool(np.all(np.diff(mags) < 0) and mags[-1] < 0.03)
        parts.append(f"({c:.3g},{s},{side}) " + " ".join(f"{d:+.4f}" for d in deltas))
    return ok, "; ".join(parts)


def criterion_8():
    ok, parts = True, []
    for i, c in enumerate((1.0, E)):
        res = simulator.run_samples("chain", 100_000, c, 200, 8000 + i)
        gap = abs(simulator.empirical_stats(res).mean - critical_fraction(c))
        ok &= gap < 0.005
        parts.append(f"c={c:.3g}: |mean-s_c| = {gap:.1e}")
    return ok, "; ".join(parts)


def criterion_9():
    procs = ("chain", "graph", "graphical")
    sgs = {p: [r.sg for r in simulator.run_samples(p, 50, 2.0, 100_000, 900 + i)] for i, p in enumerate(procs)}
    pvals = []
    for i, a in enumerate(procs):
        for b in procs[i + 1:]:
            pvals.append(simulator.two_sample_chisquare(sgs[a], sgs[b])[2])
    exact = oracle.brute_force_tiny(4, 2.0)
    samples = 100_000
    worst_z = 0.0
    for i, p in enumerate(procs):
        sg = np.array([r.sg for r in simulator.run_samples(p, 4, 2.0, samples, 950 + i)])
        for k, pk in exact.items():
            worst_z = max(worst_z, abs(np.mean(sg == k) - pk) / math.sqrt(pk * (1 - pk) / samples))
    ok = min(pvals) > 0.001 and worst_z < 3.0
    return ok, "chi-square p = " + ", ".join(f"{v:.3f}" for v in pvals) + f"; n=4 max |z| = {worst_z:.2f}"


def criterion_10(setenv):
    commands = [
        ["simulate", "--process", p, "--n", "200", "--c", "2", "--samples", "400", "--seed", "13"]
        for p in ("chain", "graph", "graphical")
    ] + [
        ["simulate", "--n", "1000", "--c", "1", "--samples", "100", "--seed", "5", "--format", "csv"],
        ["oracle", "--n", "120", "--c", "1", "--pmf", "--format", "csv"],
        ["oracle", "--n", "120", "--c", "1", "--s", "0.9"],
    ]
    identical = 0
    for argv in commands:
        seen = set()
        for threads in ("1", "2", "4"):
            setenv("GREEDY_LDP_THREADS", threads)
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                code = cli.main(argv)
            seen.add((code, buf.getvalue().encode()))
        identical += len(seen) == 1
    return identical == len(commands), f"{identical}/{len(commands)} commands byte-identical across 1/2/4 threads"


def report(k, ok, detail, stream=None):
    line = f"ACCEPTANCE {k:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line, file=stream or sys.stdout)
    return line


@pytest.fixture
def emit_line(capsys):
    def _emit(k, ok, detail):
        with capsys.disabled():
            print()
            report(k, ok, detail)
        assert ok, detail

    return _emit


def test_criterion_01_critical_fraction(emit_line):
    emit_line(1, *criterion_1())


def test_criterion_02_parameter_pairs(emit_line):
    emit_line(2, *criterion_2())


def test_criterion_03_action_equals_rate(emit_line):
    emit_line(3, *criterion_3())


def test_criterion_04_legendre_identity(emit_line):
    emit_line(4, *criterion_4())


def test_criterion_05_ode_and_discrete_el(emit_line):
    emit_line(5, *criterion_5())


def test_criterion_06_oracle_vs_brute_force(emit_line):
    emit_line(6, *criterion_6())


def test_criterion_07_finite_n_rate(emit_line):
    emit_line(7, *criterion_7())


def test_criterion_08_typicality(emit_line):
    emit_line(8, *criterion_8())


def test_criterion_09_process_equivalence(emit_line):
    emit_line(9, *criterion_9())


def test_criterion_10_determinism(emit_line, monkeypatch):
    emit_line(10, *criterion_10(monkeypatch.setenv))


if __name__ == "__main__":
    def _setenv(k, v):
        os.environ[k] = v

    results = [f() for f in (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                             criterion_6, criterion_7, criterion_8, criterion_9)]
    results.append(criterion_10(_setenv))
    for k, (ok, detail) in enumerate(results, start=1):
        report(k, ok, detail)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
