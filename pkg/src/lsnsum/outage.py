"""Outage probability in a hexagonal network with lognormal shadowing.

The mobile's serving signal is lognormal, the aggregate interference is a
correlated lognormal sum. The interference is replaced by its LSN fit; in the
natural-log domain the signal-minus-interference difference is then skew
normal and the outage probability is a single skew normal cdf evaluation.
Noise is neglected and transmit powers and the path-loss constant cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .distributions import XI, SkewNormalParams, sn_add_independent_normal, sn_cdf, sn_negate
from .errors import GeometryError
from .lsn_fit import FitResult, fit_lsn
from .montecarlo import SampleSpec, run_streams
from .sln_model import SumModel

MIN_DISTANCE_KM = 1e-9


@dataclass(frozen=True)
class NetworkConfig:
    cell_range_km: float = 1.0
    rings: int = 18
    eta: float = 3.0
    sigma_db: float = 6.0
    rho: float = 0.0

    def __post_init__(self):
        if not self.cell_range_km > 0:
            raise ValueError("cell_range_km must be positive")
        if self.rings < 1:
            raise ValueError("rings must be >= 1")
        if not self.eta > 2:
            raise ValueError("path-loss exponent eta must exceed 2")
        if not self.sigma_db >= 0:
            raise ValueError("sigma_db must be non-negative")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")

    @property
    def rc_km(self) -> float:
        """Half the distance between neighbouring base stations."""
        return 0.5 * math.sqrt(3.0) * self.cell_range_km

    @property
    def n_interferers(self) -> int:
        return 3 * self.rings * (self.rings + 1)


@dataclass(frozen=True)
class MobilePlacement:
    """Mobile at ``distance_km`` from the serving BS; bearing 0 points at a first-ring BS."""

    distance_km: float
    bearing_rad: float = 0.0

    def __post_init__(self):
        if not self.distance_km > 0:
            raise ValueError("distance_km must be positive")

    @classmethod
    def relative(cls, cfg: NetworkConfig, r_over_rc: float, bearing_rad: float = 0.0):
        return cls(r_over_rc * cfg.rc_km, bearing_rad)

    @property
    def position(self) -> np.ndarray:
        return self.distance_km * np.array([math.cos(self.bearing_rad), math.sin(self.bearing_rad)])


@dataclass(frozen=True, eq=False)
class OutageCurve:
    thresholds_db: np.ndarray
    analytic_p: np.ndarray
    mc_p: np.ndarray | None = field(default=None)


def build_hex_network(cfg: NetworkConfig) -> tuple[np.ndarray, np.ndarray]:
    """Base-station positions on the triangular lattice, ring by ring.

    Returns ``(positions, ring)``: row 0 is the serving BS at the origin
    (ring 0), followed by the ``6k`` sites of each ring ``k = 1..rings``.
    """
    d = 2.0 * cfg.rc_km
    u = np.array([d, 0.0])
    v = np.array([0.5 * d, 0.5 * math.sqrt(3.0) * d])
    k = cfg.rings
    a, b = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1), indexing="ij")
    a, b = a.ravel(), b.ravel()
    ring = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.abs(a + b))
    keep = ring <= k
    a, b, ring = a[keep], b[keep], ring[keep]
    order = np.lexsort((np.arctan2(b, a), ring))
    a, b, ring = a[order], b[order], ring[order]
    positions = np.outer(a, u) + np.outer(b, v)
    return positions, ring


def link_distances(cfg: NetworkConfig, mob: MobilePlacement) -> tuple[float, np.ndarray]:
    """Distances (km) from the mobile to the serving BS and to each interferer."""
    positions, _ = build_hex_network(cfg)
    dist = np.hypot(*(positions - mob.position).T)
    if np.any(dist[1:] < MIN_DISTANCE_KM):
        raise GeometryError("mobile coincides with an interfering base station")
    return float(dist[0]), dist[1:]


def interference_model(cfg: NetworkConfig, mob: MobilePlacement) -> SumModel:
    """Aggregate interference as a lognormal sum: ``mu_j = -eta ln r_j``, ``sigma_j = XI sigma_db``."""
    if cfg.sigma_db <= 0:
        raise ValueError("interference model needs sigma_db > 0")
    _, r = link_distances(cfg, mob)
    mu = -cfg.eta * np.log(r)
    return SumModel.equicorrelated(mu, np.full(r.shape, XI * cfg.sigma_db), cfg.rho)


def _deterministic_sinr_db(cfg: NetworkConfig, mob: MobilePlacement) -> float:
    rs, r = link_distances(cfg, mob)
    return 10.0 * math.log10(rs ** -cfg.eta / np.sum(r ** -cfg.eta))


def difference_distribution(cfg: NetworkConfig, mob: MobilePlacement,
                            fit: FitResult | None = None) -> SkewNormalParams:
    """SN law of ``ln(signal) - ln(interference)`` in natural-log units.

    ``-ln I`` is ``SN(-lam, -eps, omega)``; adding the independent normal
    serving-link term keeps it skew normal with shape
    ``-lam / sqrt((1 + lam**2) s**2/omega**2 + 1)``.
    """
    if fit is None:
        fit = fit_lsn(interference_model(cfg, mob))
    rs = mob.distance_km
    m_s = -cfg.eta * math.log(rs)
    return sn_add_independent_normal(sn_negate(fit.params), m_s, XI * cfg.sigma_db)


def outage_probability(cfg: NetworkConfig, mob: MobilePlacement, delta_db):
    """``P(SINR_dB < delta_db)`` from the LSN approximation of the interference."""
    delta = np.asarray(delta_db, dtype=float)
    if cfg.sigma_db == 0:
        res = (delta > _deterministic_sinr_db(cfg, mob)).astype(float)
    else:
        res = np.asarray(sn_cdf(XI * delta, difference_distribution(cfg, mob)))
    return float(res) if res.ndim == 0 else res


def outage_quantile_db(diff: SkewNormalParams, p: float) -> float:
    """Threshold (dB) at which the analytic outage probability equals ``p``."""
    lo = diff.epsilon_nat - 2.0 * diff.omega_nat
    hi = diff.epsilon_nat + 2.0 * diff.omega_nat
    while sn_cdf(lo, diff) > p:
        lo -= 2.0 * diff.omega_nat
    while sn_cdf(hi, diff) < p:
        hi += 2.0 * diff.omega_nat
    x = optimize.brentq(lambda t: sn_cdf(t, diff) - p, lo, hi, xtol=1e-13, rtol=1e-14)
    return x / XI


def sinr_db_samples(cfg: NetworkConfig, mob: MobilePlacement, spec: SampleSpec,
                    threads: int = 1) -> np.ndarray:
    """Sorted Monte Carlo draws of ``10 log10(SINR)``.

    Serving and interfering links get independent shadowing; with ``rho > 0``
    the interferers share a common factor so that every pair has
    correlation ``rho``.
    """
    rs, r = link_distances(cfg, mob)
    s = XI * cfg.sigma_db
    m_s = -cfg.eta * math.log(rs)
    mu = -cfg.eta * np.log(r)
    n_int = r.shape[0]
    common = math.sqrt(cfg.rho)
    own = math.sqrt(1.0 - cfg.rho)

    def transform(z):
        signal = m_s + s * z[:, 0]
        x = z[:, 1:n_int + 1]
        if cfg.rho > 0:
            x = common * z[:, n_int + 1:] + own * x
        interference = np.log(np.exp(mu + s * x).sum(axis=1))
        return (signal - interference) / XI

    dim = n_int + 1 + (1 if cfg.rho > 0 else 0)
    values = run_streams(spec, dim, transform, threads)
    values.sort()
    return values


def outage_probability_mc(cfg: NetworkConfig, mob: MobilePlacement, delta_db, spec: SampleSpec,
                          threads: int = 1):
    """Fraction of simulated SINR draws strictly below ``delta_db``."""
    samples = sinr_db_samples(cfg, mob, spec, threads)
    res = np.searchsorted(samples, np.asarray(delta_db, float), side="left") / samples.shape[0]
    return float(res) if np.ndim(res) == 0 else res


def outage_curve(cfg: NetworkConfig, mob: MobilePlacement, thresholds_db,
                 spec: SampleSpec | None = None, threads: int = 1) -> OutageCurve:
    thresholds = np.asarray(thresholds_db, dtype=float)
    analytic = np.atleast_1d(outage_probability(cfg, mob, thresholds))
    mc = None
    if spec is not None:
        mc = np.atleast_1d(outage_probability_mc(cfg, mob, thresholds, spec, threads))
    return OutageCurve(thresholds, analytic, mc)


def outage_horizontal_gap_db(cfg: NetworkConfig, mob: MobilePlacement, levels,
                             samples: np.ndarray) -> np.ndarray:
    """``delta_analytic(p) - delta_mc(p)`` at each outage level ``p``.

    ``samples`` are sorted SINR draws in dB (see :func:`sinr_db_samples`).
    """
    diff = difference_distribution(cfg, mob)
    n = samples.shape[0]
    gaps = []
    for p in levels:
        k = min(max(int(math.ceil(round(p * n, 9))), 1), n)
        gaps.append(outage_quantile_db(diff, p) - samples[k - 1])
    return np.array(gaps)
