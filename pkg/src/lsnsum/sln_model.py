"""Sum of correlated lognormals: exact moments and precision-matrix tail analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from .distributions import XI
from .errors import DegenerateModelError, NotPositiveDefiniteError
from .special_fn import std_normal_quantile

ROW_SUM_ZERO_TOL = 1e-10
ASSUMPTION_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SumModel:
    """Lognormal vector ``L = exp(X)`` with ``X ~ N(mu, cov)`` in natural-log units."""

    mu: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mu = _frozen(np.atleast_1d(self.mu))
        cov = _frozen(np.atleast_2d(self.cov))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)
        n = mu.shape[0]
        if mu.ndim != 1 or n < 1:
            raise ValueError("mu must be a non-empty vector")
        if cov.shape != (n, n):
            raise ValueError(f"cov must be {n}x{n}, got {cov.shape}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(cov))):
            raise ValueError("model parameters must be finite")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > 1e-12 * scale:
            raise ValueError("cov must be symmetric")
        if np.any(np.diag(cov) <= 0.0):
            raise NotPositiveDefiniteError("cov diagonal must be positive")
        _ = self.chol

    @classmethod
    def equicorrelated(cls, mu, sigma, rho: float) -> "SumModel":
        """Covariance ``rho sigma_i sigma_j`` off the diagonal, ``sigma_i**2`` on it.

        ``mu`` and ``sigma`` broadcast against each other, so scalars together
        with a length-N vector are fine.
        """
        mu, sigma = np.broadcast_arrays(np.atleast_1d(np.asarray(mu, float)),
                                        np.atleast_1d(np.asarray(sigma, float)))
        n = mu.shape[0]
        lo = -1.0 / (n - 1) if n > 1 else -1.0
        if not (lo < rho < 1.0):
            raise ValueError(f"rho must lie in ({lo:g}, 1) for N={n}, got {rho}")
        corr = np.full((n, n), float(rho))
        np.fill_diagonal(corr, 1.0)
        return cls(mu.copy(), corr * np.outer(sigma, sigma))

    @classmethod
    def from_correlation(cls, mu, sigma, corr) -> "SumModel":
        sigma = np.asarray(sigma, float)
        return cls(np.asarray(mu, float), np.asarray(corr, float) * np.outer(sigma, sigma))

    @classmethod
    def from_db(cls, means_db, sigmas_db, rho=0.0, corr=None) -> "SumModel":
        """Build from decibel means/spreads and either a scalar rho or a correlation matrix."""
        mu = XI * np.atleast_1d(np.asarray(means_db, float))
        sigma = XI * np.atleast_1d(np.asarray(sigmas_db, float))
        if corr is not None:
            return cls.from_correlation(mu, sigma, corr)
        return cls.equicorrelated(mu, sigma, rho)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))

    @cached_property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor of ``cov``."""
        try:
            return np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError("covariance is not positive definite") from exc

    def shifted(self, delta_nat: float) -> "SumModel":
        """Same model with every component multiplied by ``exp(delta_nat)``."""
        return SumModel(self.mu + delta_nat, self.cov)

    def permuted(self, order) -> "SumModel":
        order = np.asarray(order)
        return SumModel(self.mu[order], self.cov[np.ix_(order, order)])


@dataclass(frozen=True)
class SumMoments:
    m: float
    d2: float

    @property
    def cv2(self) -> float:
        return self.d2 / (self.m * self.m)


def component_means(model: SumModel) -> np.ndarray:
    return np.exp(model.mu + 0.5 * np.diag(model.cov))


def sum_moments(model: SumModel) -> SumMoments:
    """Mean and variance of ``sum_i exp(X_i)``.

    ``Cov(L_i, L_j) = m_i m_j (exp(M_ij) - 1)`` with ``m_i`` the component
    means. Sums are exactly rounded so the result does not depend on the
    component order.
    """
    mi = component_means(model)
    m = math.fsum(mi)
    cov_l = np.outer(mi, mi) * np.expm1(model.cov)
    d2 = math.fsum(cov_l.ravel())
    return SumMoments(m, max(d2, 0.0))


@dataclass(frozen=True, eq=False)
class PrecisionAnalysis:
    """Precision-matrix quantities that govern the tails of the sum.

    ``left_slope`` and ``right_slope`` are the limiting slopes of the sum's
    distribution on the lognormal probability scale as x -> -inf and +inf.
    """

    b: np.ndarray
    row_sums: np.ndarray
    reduced_index_set: tuple[int, ...]
    b_tilde: np.ndarray
    b_tilde_row_sums: np.ndarray
    sum_b_tilde: float
    max_diag_b_tilde: float
    left_slope: float
    right_slope: float
    w: np.ndarray
    w_tilde: np.ndarray
    assumption_ok: bool

    @property
    def n_tilde(self) -> int:
        return len(self.reduced_index_set)


def _spd_inverse(cov: np.ndarray) -> np.ndarray:
    try:
        c = linalg.cho_factor(cov, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("covariance is not positive definite") from exc
    inv = linalg.cho_solve(c, np.eye(cov.shape[0]), check_finite=False)
    return 0.5 * (inv + inv.T)


def precision_analysis(model: SumModel) -> PrecisionAnalysis:
    b = _spd_inverse(model.cov)
    row_sums = b.sum(axis=1)
    thresh = ROW_SUM_ZERO_TOL * float(np.max(np.abs(b)))
    idx = np.flatnonzero(np.abs(row_sums) > thresh)
    if idx.size == 0:
        raise DegenerateModelError("all precision row sums vanish")

    if idx.size == model.n:
        b_t = b
    else:
        b_t = _spd_inverse(model.cov[np.ix_(idx, idx)])
    bt_rows = b_t.sum(axis=1)
    total = math.fsum(bt_rows)
    if not total > 0.0:
        raise DegenerateModelError(f"sum of reduced precision row sums is {total:g}")
    max_diag = float(np.max(np.diag(b_t)))

    # simplex minimiser of w' M w on the reduced set: w_i = B~_i / sum_j B~_j
    w = bt_rows / total
    w_tilde = np.zeros(model.n)
    w_tilde[idx] = w

    outside = np.setdiff1d(np.arange(model.n), idx)
    bw = b @ w_tilde
    ok = all(abs(bw[i] - w_tilde @ bw) > ASSUMPTION_TOL for i in outside)

    return PrecisionAnalysis(
        b=_frozen(b),
        row_sums=_frozen(row_sums),
        reduced_index_set=tuple(int(i) for i in idx),
        b_tilde=_frozen(b_t),
        b_tilde_row_sums=_frozen(bt_rows),
        sum_b_tilde=total,
        max_diag_b_tilde=max_diag,
        left_slope=math.sqrt(total),
        right_slope=1.0 / max_diag,
        w=_frozen(w),
        w_tilde=_frozen(w_tilde),
        assumption_ok=bool(ok),
    )


def prob_scale_transform(x_nat, p):
    """Map CDF points ``(x, F(e^x))`` to the lognormal probability scale.

    Returns ``(x, y, n_dropped)`` where ``y = Phi^{-1}(F)``; points with
    ``F`` at 0 or 1 cannot be mapped and are dropped.
    """
    x_nat = np.asarray(x_nat, float)
    p = np.asarray(p, float)
    keep = (p > 0.0) & (p < 1.0)
    y = std_normal_quantile(p[keep]) if np.any(keep) else np.empty(0)
    return x_nat[keep], np.atleast_1d(y), int(np.count_nonzero(~keep))
