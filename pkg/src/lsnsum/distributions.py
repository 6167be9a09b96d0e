"""Lognormal, skew normal and log skew normal families.

Parameters are stored in natural-log units throughout. Decibel values are
converted at the boundary with ``XI = ln(10)/10`` so that ``x_nat = XI * x_db``.
The log skew normal variable is ``L = exp(X)`` with ``X`` skew normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .special_fn import SQRT_2PI, _as_finite, _out, owen_t

XI = math.log(10.0) / 10.0


def db_to_nat(x_db):
    return XI * np.asarray(x_db, dtype=float) if np.ndim(x_db) else XI * float(x_db)


def nat_to_db(x_nat):
    return np.asarray(x_nat, dtype=float) / XI if np.ndim(x_nat) else float(x_nat) / XI


@dataclass(frozen=True)
class LognormalComponent:
    """One lognormal term ``exp(X)`` with ``X ~ N(mu_nat, sigma_nat**2)``."""

    mu_nat: float
    sigma_nat: float

    def __post_init__(self):
        if not (math.isfinite(self.mu_nat) and math.isfinite(self.sigma_nat)):
            raise ValueError("lognormal parameters must be finite")
        if self.sigma_nat <= 0.0:
            raise ValueError("sigma_nat must be positive")

    @classmethod
    def from_db(cls, mu_db: float, sigma_db: float) -> "LognormalComponent":
        return cls(XI * mu_db, XI * sigma_db)

    @property
    def mu_db(self) -> float:
        return self.mu_nat / XI

    @property
    def sigma_db(self) -> float:
        return self.sigma_nat / XI


@dataclass(frozen=True)
class SkewNormalParams:
    """Skew normal SN(lam, epsilon, omega); exponentiated it is the LSN law.

    ``lam`` is the shape, ``epsilon_nat`` the location and ``omega_nat`` the
    scale, the latter two in natural-log units.
    """

    lam: float
    epsilon_nat: float
    omega_nat: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.lam, self.epsilon_nat, self.omega_nat)):
            raise ValueError("skew normal parameters must be finite")
        if self.omega_nat <= 0.0:
            raise ValueError("omega_nat must be positive")

    @classmethod
    def from_db(cls, lam: float, epsilon_db: float, omega_db: float) -> "SkewNormalParams":
        return cls(lam, XI * epsilon_db, XI * omega_db)

    @property
    def beta(self) -> float:
        return self.lam / math.sqrt(1.0 + self.lam * self.lam)

    @property
    def epsilon_db(self) -> float:
        return self.epsilon_nat / XI

    @property
    def omega_db(self) -> float:
        return self.omega_nat / XI


@dataclass(frozen=True)
class Moments2:
    """Mean and variance of a positive random variable."""

    mean: float
    variance: float

    @property
    def cv2(self) -> float:
        return self.variance / (self.mean * self.mean)


# --- lognormal -----------------------------------------------------------

def lognormal_pdf(l, c: LognormalComponent):
    l = _as_finite(l, "l")
    out = np.zeros(l.shape)
    pos = l > 0
    z = (np.log(l[pos]) - c.mu_nat) / c.sigma_nat
    out[pos] = np.exp(-0.5 * z * z) / (SQRT_2PI * l[pos] * c.sigma_nat)
    return _out(out)


def lognormal_cdf(l, c: LognormalComponent):
    l = _as_finite(l, "l")
    out = np.zeros(l.shape)
    pos = l > 0
    out[pos] = special.ndtr((np.log(l[pos]) - c.mu_nat) / c.sigma_nat)
    return _out(out)


def lognormal_moments(c: LognormalComponent) -> Moments2:
    s2 = c.sigma_nat ** 2
    mean = math.exp(c.mu_nat + 0.5 * s2)
    variance = math.exp(2.0 * c.mu_nat + s2) * math.expm1(s2)
    return Moments2(mean, variance)


# --- skew normal ---------------------------------------------------------

def sn_pdf(x, p: SkewNormalParams):
    """Skew normal density (2/omega) phi(z) Phi(lam z), z = (x - epsilon)/omega."""
    x = _as_finite(x)
    z = (x - p.epsilon_nat) / p.omega_nat
    return _out(2.0 / p.omega_nat * np.exp(-0.5 * z * z) / SQRT_2PI * special.ndtr(p.lam * z))


def sn_cdf(x, p: SkewNormalParams):
    """Skew normal distribution function Phi(z) - 2 T(z, lam)."""
    x = _as_finite(x)
    z = (x - p.epsilon_nat) / p.omega_nat
    val = special.ndtr(z) - 2.0 * np.asarray(owen_t(z, p.lam))
    return _out(np.clip(val, 0.0, 1.0))


def sn_sample(p: SkewNormalParams, size, rng: np.random.Generator):
    """Exact skew normal draws ``epsilon + omega (beta |U0| + sqrt(1-beta^2) U1)``."""
    u0 = rng.standard_normal(size)
    u1 = rng.standard_normal(size)
    b = p.beta
    return p.epsilon_nat + p.omega_nat * (b * np.abs(u0) + math.sqrt(1.0 - b * b) * u1)


def sn_negate(p: SkewNormalParams) -> SkewNormalParams:
    """Parameters of ``-X`` for ``X ~ SN(lam, epsilon, omega)``."""
    return SkewNormalParams(-p.lam, -p.epsilon_nat, p.omega_nat)


def sn_add_independent_normal(p: SkewNormalParams, m: float, s: float) -> SkewNormalParams:
    """Parameters of ``X + W`` with ``W ~ N(m, s**2)`` independent of ``X``.

    The sum stays skew normal: the scale grows to ``sqrt(omega**2 + s**2)`` and
    the shape shrinks to ``lam / sqrt((1 + lam**2) s**2/omega**2 + 1)``.
    """
    if not s >= 0.0:
        raise ValueError("s must be non-negative")
    w2 = p.omega_nat ** 2
    lam = p.lam / math.sqrt((1.0 + p.lam ** 2) * s * s / w2 + 1.0)
    return SkewNormalParams(lam, p.epsilon_nat + m, math.sqrt(w2 + s * s))


# --- log skew normal -----------------------------------------------------

def lsn_pdf(l, p: SkewNormalParams):
    l = _as_finite(l, "l")
    out = np.zeros(l.shape)
    pos = l > 0
    out[pos] = np.asarray(sn_pdf(np.log(l[pos]), p)) / l[pos]
    return _out(out)


def lsn_cdf(l, p: SkewNormalParams):
    l = _as_finite(l, "l")
    out = np.zeros(l.shape)
    pos = l > 0
    out[pos] = sn_cdf(np.log(l[pos]), p)
    return _out(out)


def lsn_moments(p: SkewNormalParams) -> Moments2:
    """Mean and variance of ``exp(X)`` from the MGF ``2 exp(t eps + t^2 w^2/2) Phi(beta w t)``."""
    w2 = p.omega_nat ** 2
    bw = p.beta * p.omega_nat
    phi1 = special.ndtr(bw)
    mean = 2.0 * math.exp(p.epsilon_nat + 0.5 * w2) * phi1
    variance = 2.0 * math.exp(2.0 * p.epsilon_nat + w2) * (
        math.exp(w2) * special.ndtr(2.0 * bw) - 2.0 * phi1 * phi1
    )
    return Moments2(float(mean), float(variance))
