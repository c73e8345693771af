import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import logsumexp

from greedy_ldp import DomainError, ResourceLimitError
from greedy_ldp.oracle import (
    brute_force_tiny,
    iter_distribution,
    log_kernel,
    sg_distribution,
    sg_pmf,
    tail_logprob,
    transition_logpmf,
)


class TestKernel:
    def test_absorbing_from_one(self):
        assert transition_logpmf(10, 1.0, 1, 0) == 0.0

    def test_direct_binomial(self):
        assert transition_logpmf(10, 1.0, 3, 2) == pytest.approx(2 * math.log(0.9), rel=1e-14)
        assert transition_logpmf(10, 1.0, 3, 0) == pytest.approx(2 * math.log(0.1), rel=1e-14)

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 7.0])
    def test_rows_normalised(self, c):
        for y in range(1, 51):
            row = [transition_logpmf(50, c, y, j) for j in range(y)]
            assert abs(logsumexp(row)) < 1e-12

    def test_matrix_matches_scalar(self):
        k = log_kernel(12, 1.7)
        for y in range(1, 13):
            for j in range(13):
                if j < y:
                    assert k[y, j] == pytest.approx(transition_logpmf(12, 1.7, y, j), abs=1e-12)
                else:
                    assert k[y, j] == -np.inf
        assert np.all(k[0] == -np.inf)

    @pytest.mark.parametrize("y_from, y_to", [(0, 0), (3, 3), (11, 2), (3, -1)])
    def test_domain(self, y_from, y_to):
        with pytest.raises(DomainError):
            transition_logpmf(10, 1.0, y_from, y_to)


class TestBruteForce:
    def test_single_vertex(self):
        assert brute_force_tiny(1, 0.5) == {1: 1.0}

    def test_single_edge(self):
        assert brute_force_tiny(2, 1.0, exact=True) == {1: Fraction(1, 2), 2: Fraction(1, 2)}

    def test_three_vertices_by_hand(self):
        # p = 1/3: S_g = 3 only for the empty graph; S_g = 1 needs the first
        # chosen vertex to see both others
        law = brute_force_tiny(3, 1.0, exact=True)
        p = Fraction(1.0 / 3)
        q = 1 - p
        assert law[3] == q**3
        # star centred at the first vertex: that vertex has both edges
        assert law[1] == p**2
        assert sum(law.values()) == 1

    def test_bounds(self):
        with pytest.raises(DomainError):
            brute_force_tiny(6, 1.0)


class TestDistribution:
    def test_tiny_cases(self):
        assert sg_pmf(1, 0.5) == {1: 1.0}
        pmf = sg_pmf(2, 1.0)
        assert pmf[1] == pytest.approx(0.5, abs=1e-15)
        assert pmf[2] == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_matches_brute_force(self, n, c):
        if n <= c:
            pytest.skip("needs n > c")
        dp = sg_pmf(n, c)
        bf = brute_force_tiny(n, c)
        tv = sum(abs(dp.get(k, 0.0) - bf.get(k, 0.0)) for k in set(dp) | set(bf))
        assert tv < 1e-12

    @pytest.mark.parametrize("n, c", [(30, 0.5), (60, 1.5), (120, 4.0)])
    def test_conservation_and_support(self, n, c):
        for dist in iter_distribution(n, c):
            assert abs(dist.total_logmass()) < 1e-10
            assert dist.live_logp[0] == -np.inf
            k = dist.step
            assert np.all(dist.live_logp[n - k + 1 :] == -np.inf)
            assert np.all(dist.absorbed_logp[k + 1 :] == -np.inf)
        assert dist.absorbed_logp[0] == -np.inf
        assert abs(logsumexp(dist.absorbed_logp)) < 1e-9

    def test_resource_cap(self):
        with pytest.raises(ResourceLimitError):
            sg_distribution(50, 1.0, max_n=40)
        assert sg_distribution(50, 1.0, max_n=40, allow_large=True).n == 50

    def test_mean_approaches_critical_fraction(self, exact_distribution):
        dist = exact_distribution(800, 1.0)
        k = np.arange(801)
        mean = float(np.sum(k * dist.pmf())) / 800
        assert abs(mean - math.log(2)) < 0.01


class TestTail:
    def test_certain_events(self, exact_distribution):
        dist = exact_distribution(100, 1.0)
        assert tail_logprob(100, 1.0, 0.01, "ge", dist=dist) == pytest.approx(0.0, abs=1e-12)
        assert tail_logprob(100, 1.0, 0.001, "ge", dist=dist) == pytest.approx(0.0, abs=1e-12)
        assert tail_logprob(100, 1.0, 1.0, "le", dist=dist) == pytest.approx(0.0, abs=1e-12)

    def test_empty_event(self, exact_distribution):
        dist = exact_distribution(100, 1.0)
        assert tail_logprob(100, 1.0, 0.005, "le", dist=dist) == -math.inf

    def test_rounding_of_sn(self, exact_distribution):
        dist = exact_distribution(100, 1.0)
        logp = dist.absorbed_logp
        # 0.9 * 100 is 90.00000000000001 in binary; the event is S_g >= 90
        assert tail_logprob(100, 1.0, 0.9, "ge", dist=dist) == pytest.approx(
            logsumexp(logp[90:]) / 100, abs=1e-15
        )
        assert tail_logprob(100, 1.0, 0.455, "le", dist=dist) == pytest.approx(
            logsumexp(logp[:46]) / 100, abs=1e-15
        )

    def test_pinned_n400(self, exact_distribution):
        # frozen from this oracle; guards against kernel regressions
        value = tail_logprob(400, 1.0, 0.9, "ge", dist=exact_distribution(400, 1.0))
        assert value == pytest.approx(-0.19204082500571346, abs=1e-12)

    def test_side_validation(self, exact_distribution):
        with pytest.raises(DomainError):
            tail_logprob(100, 1.0, 0.9, "up", dist=exact_distribution(100, 1.0))
        with pytest.raises(DomainError):
            tail_logprob(200, 1.0, 0.9, "ge", dist=exact_distribution(100, 1.0))
