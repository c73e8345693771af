"""Exact finite-n law of the greedy independent set size ``S_g``.

Under deferred edge revelation the available-set size is a Markov chain: from
``y`` available vertices one is added to the independent set and each of the
other ``y - 1`` survives independently with probability ``1 - p``, so the next
size is Binomial(y - 1, 1 - p). ``S_g`` is the absorption time at 0. The chain
law is propagated step by step in log space; a brute-force enumeration over
all graphs and vertex orders for ``n <= 5`` validates the kernel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal

import numpy as np
from scipy.special import gammaln, logsumexp

from greedy_ldp.errors import DomainError, ResourceLimitError
from greedy_ldp.ratefn import ModelParams

__all__ = [
    "DEFAULT_MAX_N",
    "StateDistribution",
    "brute_force_tiny",
    "iter_distribution",
    "log_kernel",
    "sg_distribution",
    "sg_pmf",
    "tail_logprob",
    "transition_logpmf",
]

DEFAULT_MAX_N = 2000
BRUTE_FORCE_MAX_N = 5
_ROUND_EPS = 1e-9  # guards floor/ceil of s*n against representation error


def _params(n, c) -> ModelParams:
    return ModelParams(c=float(c), n=int(n))


def transition_logpmf(n: int, c: float, y_from: int, y_to: int) -> float:
    """``log P(Y' = y_to | Y = y_from)`` for the available-set chain."""
    p = _params(n, c).p
    if not (1 <= y_from <= n) or not (0 <= y_to <= y_from - 1):
        raise DomainError(f"invalid transition {y_from} -> {y_to} for n={n}")
    k = y_from - 1
    log_binom = math.lgamma(k + 1) - math.lgamma(y_to + 1) - math.lgamma(k - y_to + 1)
    # log(p) would be multiplied by 0 when y_to == k; keep that term exact
    tail = (k - y_to) * math.log(p) if k > y_to else 0.0
    return log_binom + y_to * math.log1p(-p) + tail


def log_kernel(n: int, c: float) -> np.ndarray:
    """Matrix ``K[y_from, y_to]`` of log transition probabilities, ``-inf`` off support.

    Row 0 is entirely ``-inf``; state 0 is absorbing and handled by the DP.
    """
    p = _params(n, c).p
    y_from = np.arange(n + 1)[:, None]
    y_to = np.arange(n + 1)[None, :]
    k = y_from - 1
    valid = (y_from >= 1) & (y_to <= k)
    kk = np.where(valid, k, 0)
    jj = np.where(valid, y_to, 0)
    out = (
        gammaln(kk + 1)
        - gammaln(jj + 1)
        - gammaln(kk - jj + 1)
        + jj * math.log1p(-p)
        + (kk - jj) * math.log(p)
    )
    return np.where(valid, out, -np.inf)


@dataclass(frozen=True)
class StateDistribution:
    """Law of the chain after ``step`` steps.

    ``live_logp[y]`` is ``log P(Y_step = y, not yet absorbed)``;
    ``absorbed_logp[k]`` is ``log P(S_g = k)`` for ``k <= step`` and ``-inf``
    beyond. Both have length ``n + 1``.
    """

    n: int
    step: int
    live_logp: np.ndarray
    absorbed_logp: np.ndarray

    def total_logmass(self) -> float:
        return float(np.logaddexp(logsumexp(self.live_logp), logsumexp(self.absorbed_logp)))

    def pmf(self) -> np.ndarray:
        """``P(S_g = k)`` for ``k = 0..n`` as plain probabilities."""
        return np.exp(self.absorbed_logp)


def _check_size(n, max_n, allow_large):
    if n > max_n and not allow_large:
        raise ResourceLimitError(
            f"n={n} exceeds the exact-oracle cap {max_n}; pass allow_large to override"
        )


def iter_distribution(
    n: int, c: float, *, max_n: int = DEFAULT_MAX_N, allow_large: bool = False
) -> Iterator[StateDistribution]:
    """Yield the chain law after steps ``0, 1, ..., S_max`` until all mass is absorbed."""
    _params(n, c)
    _check_size(n, max_n, allow_large)
    kernel = log_kernel(n, c)
    live = np.full(n + 1, -np.inf)
    live[n] = 0.0
    absorbed = np.full(n + 1, -np.inf)
    yield StateDistribution(n, 0, live.copy(), absorbed.copy())
    for step in range(1, n + 1):
        # after step-1 steps the live support is contained in 1..n-step+1
        top = n - step + 1
        with np.errstate(divide="ignore", invalid="ignore"):
            new = logsumexp(live[1 : top + 1, None] + kernel[1 : top + 1, :top], axis=0)
        live = np.full(n + 1, -np.inf)
        live[1:top] = new[1:]
        absorbed[step] = new[0]
        yield StateDistribution(n, step, live.copy(), absorbed.copy())
        if not np.isfinite(live).any():
            return


def sg_distribution(
    n: int, c: float, *, max_n: int = DEFAULT_MAX_N, allow_large: bool = False
) -> StateDistribution:
    """Final chain law; ``absorbed_logp`` is the exact log-pmf of ``S_g``.

    Cost is ``O(n^3)``; ``n`` above ``max_n`` raises :class:`ResourceLimitError`
    unless ``allow_large`` is set.
    """
    final = None
    for final in iter_distribution(n, c, max_n=max_n, allow_large=allow_large):
        pass
    return final


def sg_pmf(n: int, c: float, **kwargs) -> dict[int, float]:
    """``{k: P(S_g = k)}`` over the support of ``S_g``."""
    logp = sg_distribution(n, c, **kwargs).absorbed_logp
    return {k: float(np.exp(v)) for k, v in enumerate(logp) if np.isfinite(v)}


def tail_logprob(
    n: int,
    c: float,
    s: float,
    side: Literal["le", "ge"],
    *,
    dist: StateDistribution | None = None,
    **kwargs,
) -> float:
    """``(1/n) log P(S_g <= floor(sn))`` or ``(1/n) log P(S_g >= ceil(sn))``.

    Returns ``-inf`` for an empty event. A precomputed ``dist`` for the same
    ``(n, c)`` may be passed to avoid recomputing the DP.
    """
    if dist is None:
        dist = sg_distribution(n, c, **kwargs)
    elif dist.n != n:
        raise DomainError(f"distribution is for n={dist.n}, not n={n}")
    logp = dist.absorbed_logp
    if side == "le":
        kmax = math.floor(s * n + _ROUND_EPS)
        sel = logp[: max(0, min(kmax, n) + 1)]
    elif side == "ge":
        kmin = max(0, math.ceil(s * n - _ROUND_EPS))
        sel = logp[kmin:] if kmin <= n else logp[:0]
    else:
        raise DomainError(f"side must be 'le' or 'ge', got {side!r}")
    if sel.size == 0 or not np.isfinite(sel).any():
        return -math.inf
    return float(logsumexp(sel)) / n


def _greedy_size(order, neighbours) -> int:
    removed = 0
    size = 0
    for v in order:
        if not removed >> v & 1:
            size += 1
            removed |= neighbours[v] | (1 << v)
    return size


def brute_force_tiny(n: int, c: float, *, exact: bool = False) -> dict[int, float]:
    """Exact law of ``S_g`` by enumerating every graph on ``n <= 5`` vertices.

    Picking a uniform available vertex at each step has the same law as
    scanning a uniform random permutation and taking each vertex not yet
    removed, so each graph contributes the fraction of the ``n!`` orders that
    end at each size. Arithmetic is in exact rationals (``p`` is the exact
    rational value of the double ``c / n``); ``exact=True`` returns them.
    """
    if not 1 <= n <= BRUTE_FORCE_MAX_N:
        raise DomainError(f"brute force enumeration supports 1 <= n <= {BRUTE_FORCE_MAX_N}")
    _params(n, c)
    p = Fraction(c / n)
    q = 1 - p
    pairs = list(itertools.combinations(range(n), 2))
    orders = list(itertools.permutations(range(n)))
    counts: dict[tuple[int, int], int] = {}
    for mask in range(1 << len(pairs)):
        neighbours = [0] * n
        edges = 0
        for bit, (u, v) in enumerate(pairs):
            if mask >> bit & 1:
                neighbours[u] |= 1 << v
                neighbours[v] |= 1 << u
                edges += 1
        for order in orders:
            key = (edges, _greedy_size(order, neighbours))
            counts[key] = counts.get(key, 0) + 1
    total = len(orders)
    law: dict[int, Fraction] = {}
    for (edges, size), count in counts.items():
        weight = p**edges * q ** (len(pairs) - edges) * Fraction(count, total)
        law[size] = law.get(size, Fraction(0)) + weight
    law = dict(sorted(law.items()))
    if exact:
        return law
    return {k: float(v) for k, v in law.items()}
