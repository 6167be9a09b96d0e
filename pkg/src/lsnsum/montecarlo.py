"""Monte Carlo oracle for the lognormal sum.

Sampling is split into ``n_streams`` independent streams. Stream ``k`` is
seeded from ``(seed, k)`` and always produces the same draws in the same
fixed-size chunks, so the merged, sorted sample depends only on
``(seed, n_streams, n_samples)`` and not on how many threads ran it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import MetricError
from .sln_model import SumModel

CHUNK = 1 << 15
_U53 = 2.0 ** -53


@dataclass(frozen=True)
class SampleSpec:
    n_samples: int
    seed: int = 0
    n_streams: int = 16

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.n_streams < 1:
            raise ValueError("n_streams must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def stream_counts(self) -> list[int]:
        base, extra = divmod(self.n_samples, self.n_streams)
        return [base + (k < extra) for k in range(self.n_streams)]


def stream_generator(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(k,))))


def standard_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Inverse-cdf normals; every sample consumes exactly one uniform per dimension."""
    u = (rng.integers(0, 1 << 53, size=shape, dtype=np.int64) + 0.5) * _U53
    return special.ndtri(u)


def run_streams(spec: SampleSpec, dim: int, transform: Callable[[np.ndarray], np.ndarray],
                threads: int = 1) -> np.ndarray:
    """Draw ``(count, dim)`` standard normals per stream, map each chunk with ``transform``.

    Returns the concatenation over streams in stream order.
    """
    def one(k: int, count: int) -> np.ndarray:
        rng = stream_generator(spec.seed, k)
        parts = []
        for start in range(0, count, CHUNK):
            z = standard_normals(rng, (min(CHUNK, count - start), dim))
            parts.append(transform(z))
        return np.concatenate(parts) if parts else np.empty(0)

    counts = spec.stream_counts()
    if threads <= 1:
        results = [one(k, c) for k, c in enumerate(counts)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(len(counts)), counts))
    return np.concatenate(results)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    sorted_values: np.ndarray

    def __post_init__(self):
        v = np.array(self.sorted_values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("need a non-empty 1-D sample")
        if np.any(np.diff(v) < 0):
            raise ValueError("sorted_values must be ascending")
        v.setflags(write=False)
        object.__setattr__(self, "sorted_values", v)

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalCdf":
        return cls(np.sort(np.asarray(samples, dtype=float)))

    @property
    def n(self) -> int:
        return self.sorted_values.shape[0]

    def __call__(self, x):
        return empirical_cdf_at(self, x)


def sample_sln(model: SumModel, spec: SampleSpec, threads: int = 1) -> EmpiricalCdf:
    """Sample ``sum_i exp(X_i)`` with ``X = mu + L z`` and ``L`` the Cholesky factor."""
    mu = model.mu
    if np.count_nonzero(model.cov - np.diag(np.diag(model.cov))) == 0:
        sigma = model.sigma

        def transform(z):
            return np.exp(mu + z * sigma).sum(axis=1)
    else:
        lt = model.chol.T

        def transform(z):
            return np.exp(mu + z @ lt).sum(axis=1)

    values = run_streams(spec, model.n, transform, threads)
    values.sort()
    return EmpiricalCdf(values)


def empirical_cdf_at(ecdf: EmpiricalCdf, x):
    """Fraction of samples ``<= x``."""
    counts = np.searchsorted(ecdf.sorted_values, x, side="right")
    res = counts / ecdf.n
    return float(res) if np.ndim(res) == 0 else res


def _order_statistic(ecdf: EmpiricalCdf, p):
    # smallest sample value whose empirical cdf reaches p
    k = np.ceil(np.round(np.asarray(p, float) * ecdf.n, 9)).astype(np.int64)
    k = np.clip(k, 1, ecdf.n)
    return ecdf.sorted_values[k - 1]


def empirical_quantile(ecdf: EmpiricalCdf, p):
    """Generalised inverse of the empirical cdf: ``x_(ceil(p n))``.

    Raises
    ------
    ValueError
        If ``p`` lies outside ``[1/n, 1 - 1/n]``.
    """
    pa = np.asarray(p, float)
    lo, hi = 1.0 / ecdf.n, 1.0 - 1.0 / ecdf.n
    if np.any(pa < lo * (1 - 1e-12)) or np.any(pa > hi + 1e-12):
        raise ValueError(f"p must lie in [{lo:.3g}, {hi:.3g}] for n = {ecdf.n}")
    q = _order_statistic(ecdf, pa)
    return float(q) if np.ndim(q) == 0 else q


def analytic_quantile(cdf: Callable[[float], float], p: float, lo: float, hi: float,
                      rel_tol: float = 1e-13) -> float:
    """Smallest ``x`` in ``[lo, hi]`` with ``cdf(x) >= p``, by bisection in ``log x``."""
    if not (lo > 0 and hi > lo):
        raise MetricError("bracket must satisfy 0 < lo < hi")
    if cdf(lo) >= p or cdf(hi) < p:
        raise MetricError(f"analytic cdf does not bracket p = {p} on [{lo:.6g}, {hi:.6g}]")
    a, b = math.log(lo), math.log(hi)
    for _ in range(200):
        if b - a <= rel_tol:
            break
        mid = 0.5 * (a + b)
        if cdf(math.exp(mid)) >= p:
            b = mid
        else:
            a = mid
    return math.exp(b)


def horizontal_deviation_db(analytic_cdf: Callable[[float], float], ecdf: EmpiricalCdf,
                            levels: Sequence[float]) -> list[float]:
    """Signed gap ``10 log10(q_analytic(p) / q_empirical(p))`` in dB at each level."""
    lo = ecdf.sorted_values[0] / 10.0
    hi = ecdf.sorted_values[-1] * 10.0
    out = []
    for p in levels:
        if not 0.0 < p < 1.0:
            raise MetricError(f"level {p} outside (0, 1)")
        q_emp = float(_order_statistic(ecdf, p))
        q_an = analytic_quantile(analytic_cdf, p, lo, hi)
        out.append(10.0 * math.log10(q_an / q_emp))
    return out


def ks_distance(sorted_samples, cdf_values) -> float:
    """Two-sided KS statistic given ascending samples and the model cdf at them."""
    f = np.asarray(cdf_values, float)
    n = f.shape[0]
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
