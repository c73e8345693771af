"""Seeded Monte Carlo of the greedy algorithm in three equivalent forms.

* ``chain`` draws the available-set sizes ``Y <- Binomial(Y - 1, 1 - p)``.
* ``graph`` runs greedy on ``G(n, p)`` revealing edges lazily from each chosen
  vertex to the vertices still available.
* ``graphical`` runs the particle-row picture: each row one unmarked particle
  is marked and every particle moves up to the next row with probability
  ``1 - p``; the size is the index of the first row with no unmarked particle.

Each run owns a Philox stream keyed by its 64-bit seed. Batch seeds are
derived from the master seed and the sample index, so a batch is the same
whatever the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy import stats

from greedy_ldp.errors import DomainError
from greedy_ldp.ratefn import ModelParams

__all__ = [
    "EmpiricalStats",
    "GreedyRunResult",
    "PROCESSES",
    "derive_seed",
    "empirical_stats",
    "make_rng",
    "run_samples",
    "sample_chain",
    "sample_graph",
    "sample_graphical",
    "two_sample_chisquare",
    "worker_count",
]

_MASK64 = (1 << 64) - 1
THREADS_ENV = "GREEDY_LDP_THREADS"


def derive_seed(master: int, index: int) -> int:
    """64-bit seed of sample ``index``: one splitmix64 output of ``master + index * gamma``."""
    z = (int(master) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))


@dataclass(frozen=True)
class GreedyRunResult:
    """One greedy run: independent set size ``sg`` and optionally ``|A_k|`` for ``k = 0..sg``."""

    n: int
    c: float
    sg: int
    seed: int
    available_counts: Optional[np.ndarray] = field(default=None, compare=False)

    def __eq__(self, other):
        if not isinstance(other, GreedyRunResult):
            return NotImplemented
        same = (self.n, self.c, self.sg, self.seed) == (other.n, other.c, other.sg, other.seed)
        if self.available_counts is None or other.available_counts is None:
            return same and self.available_counts is other.available_counts
        return same and np.array_equal(self.available_counts, other.available_counts)

    __hash__ = None


def _p(n, c):
    return ModelParams(c=float(c), n=int(n)).p


def sample_chain(n: int, c: float, seed: int, record_path: bool = False) -> GreedyRunResult:
    """Iterate ``Y <- Binomial(Y - 1, 1 - p)`` from ``Y = n`` down to 0."""
    q = 1.0 - _p(n, c)
    binomial = make_rng(seed).binomial
    y = n
    steps = 0
    path = [n] if record_path else None
    while y > 0:
        y = int(binomial(y - 1, q))
        steps += 1
        if record_path:
            path.append(y)
    counts = np.array(path, dtype=np.int64) if record_path else None
    return GreedyRunResult(n=n, c=float(c), sg=steps, seed=seed, available_counts=counts)


def sample_graph(n: int, c: float, seed: int, record_path: bool = False) -> GreedyRunResult:
    """Greedy on ``G(n, p)`` with edges revealed only from the chosen vertex.

    A pair is inspected at most once: after the inspection one of its two
    endpoints has left the available set.
    """
    p = _p(n, c)
    rng = make_rng(seed)
    available = np.arange(n)
    steps = 0
    path = [n] if record_path else None
    while available.size:
        j = rng.integers(available.size)
        keep = rng.random(available.size) >= p  # no edge to the chosen vertex
        keep[j] = False
        available = available[keep]
        steps += 1
        if record_path:
            path.append(available.size)
    counts = np.array(path, dtype=np.int64) if record_path else None
    return GreedyRunResult(n=n, c=float(c), sg=steps, seed=seed, available_counts=counts)


def sample_graphical(n: int, c: float, seed: int, record_path: bool = False) -> GreedyRunResult:
    """Particle-row process.

    The independent survival coins of a particle are summarised by its
    height ``h`` (it is present in rows ``0..h``, ``P(h >= r) = (1-p)^r``).
    Marking a uniform unmarked particle of the current row is realised by a
    uniform random scan order: the next particle in the order that is still
    present gets marked. Particles passed over are absent from all later
    rows, and the order is independent of the heights.
    """
    p = _p(n, c)
    rng = make_rng(seed)
    height = rng.geometric(p, size=n) - 1
    order = rng.permutation(n)
    scan = height[order].tolist()
    pos = 0
    row = 0
    marked_heights = []
    while True:
        while pos < n and scan[pos] < row:
            pos += 1
        if pos == n:
            break
        marked_heights.append(scan[pos])
        pos += 1
        row += 1
    sg = row
    counts = None
    if record_path:
        rows = np.arange(sg + 1)
        present = np.bincount(np.minimum(height, sg), minlength=sg + 1)
        present = present[::-1].cumsum()[::-1]  # present[r] = #{h >= r}
        # the particle marked at step i (row i-1) sits marked in rows i..h
        diff = np.zeros(sg + 2, dtype=np.int64)
        for i, h in enumerate(marked_heights, start=1):
            if h >= i:
                diff[i] += 1
                diff[min(h, sg) + 1] -= 1
        counts = (present[rows] - diff.cumsum()[: sg + 1]).astype(np.int64)
    return GreedyRunResult(n=n, c=float(c), sg=sg, seed=seed, available_counts=counts)


PROCESSES: dict[str, Callable[..., GreedyRunResult]] = {
    "chain": sample_chain,
    "graph": sample_graph,
    "graphical": sample_graphical,
}


def worker_count(workers: Optional[int] = None) -> int:
    """Explicit ``workers``, else ``$GREEDY_LDP_THREADS``, else the CPU count."""
    if workers is None:
        env = os.environ.get(THREADS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def _run_chunk(process, n, c, seeds, record_path):
    fn = PROCESSES[process]
    return [fn(n, c, s, record_path) for s in seeds]


def run_samples(
    process: Literal["chain", "graph", "graphical"],
    n: int,
    c: float,
    samples: int,
    seed: int,
    *,
    workers: Optional[int] = None,
    record_path: bool = False,
) -> list[GreedyRunResult]:
    """``samples`` independent runs; sample ``i`` uses ``derive_seed(seed, i)``.

    Work is split into contiguous index chunks across processes and joined in
    index order, so the output does not depend on ``workers``.
    """
    if process not in PROCESSES:
        raise DomainError(f"unknown process {process!r}; choose from {sorted(PROCESSES)}")
    if samples < 1:
        raise DomainError("samples must be positive")
    _p(n, c)
    seeds = [derive_seed(seed, i) for i in range(samples)]
    workers = min(worker_count(workers), samples)
    if workers == 1:
        return _run_chunk(process, n, c, seeds, record_path)
    bounds = np.linspace(0, samples, workers + 1).astype(int)
    chunks = [seeds[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(
            _run_chunk,
            [process] * workers,
            [n] * workers,
            [c] * workers,
            chunks,
            [record_path] * workers,
        )
        return [r for part in parts for r in part]


@dataclass(frozen=True)
class EmpiricalStats:
    n: int
    c: float
    count: int
    mean: float
    variance: float
    bin_edges: np.ndarray
    histogram: np.ndarray
    tail_le: dict[float, float]
    tail_ge: dict[float, float]


def empirical_stats(
    results: Sequence[GreedyRunResult],
    bin_edges: Optional[Sequence[float]] = None,
    tail_s: Sequence[float] = (),
) -> EmpiricalStats:
    """Mean and population variance of ``sg/n``, its histogram, and tail frequencies.

    ``tail_le[s]`` is the fraction with ``sg <= floor(sn)``, ``tail_ge[s]`` the
    fraction with ``sg >= ceil(sn)``.
    """
    if not results:
        raise DomainError("empirical_stats needs at least one result")
    n, c = results[0].n, results[0].c
    if any(r.n != n or r.c != c for r in results):
        raise DomainError("results mix different (n, c)")
    sg = np.fromiter((r.sg for r in results), dtype=np.int64, count=len(results))
    frac = sg / n
    edges = np.linspace(0.0, 1.0, 51) if bin_edges is None else np.asarray(bin_edges, float)
    hist, _ = np.histogram(frac, bins=edges)
    le = {float(s): float(np.mean(sg <= math.floor(s * n + 1e-9))) for s in tail_s}
    ge = {float(s): float(np.mean(sg >= math.ceil(s * n - 1e-9))) for s in tail_s}
    return EmpiricalStats(
        n=n,
        c=c,
        count=len(results),
        mean=float(frac.mean()),
        variance=float(frac.var()),
        bin_edges=edges,
        histogram=hist,
        tail_le=le,
        tail_ge=ge,
    )


def two_sample_chisquare(x, y, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Chi-square homogeneity test of two integer samples.

    Adjacent sparse values are pooled from both ends of the support until every
    expected cell count reaches ``min_expected``. Returns
    ``(statistic, dof, p_value)``.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    lo = int(min(x.min(), y.min()))
    hi = int(max(x.max(), y.max()))
    table = np.vstack(
        [np.bincount(x - lo, minlength=hi - lo + 1), np.bincount(y - lo, minlength=hi - lo + 1)]
    ).astype(float)
    share = table.sum(axis=1, keepdims=True) / table.sum()

    cols = []
    acc = np.zeros(2)
    for col in table.T:
        acc = acc + col
        if (acc.sum() * share.ravel()).min() >= min_expected:
            cols.append(acc)
            acc = np.zeros(2)
    if acc.sum() > 0:
        if cols:
            cols[-1] = cols[-1] + acc
        else:
            cols.append(acc)
    pooled = np.array(cols).T
    if pooled.shape[1] < 2:
        return 0.0, 0, 1.0
    res = stats.chi2_contingency(pooled, correction=False)
    return float(res.statistic), int(res.dof), float(res.pvalue)
