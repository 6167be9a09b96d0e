"""Analytic log skew normal fit to a sum of correlated lognormals.

The fit matches the sum's mean and squared coefficient of variation while
pinning the LSN lower-tail slope ``sqrt(1 + lam**2)/omega`` to the sum's
exact left-tail slope ``sqrt(sum_i B~_i)``. With the slope pinned, the scale
is a function of the shape and only a scalar equation in ``lam`` remains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .distributions import LognormalComponent, SkewNormalParams
from .errors import DegenerateModelError, FitFailureError
from .sln_model import PrecisionAnalysis, SumModel, precision_analysis, sum_moments

LAMBDA_MAX = 1e6
RESIDUAL_TOL = 1e-10
MAX_BISECTIONS = 200
# relative slack below which cv2_sln == cv2_lsn_at(0) is treated as an exact tie
_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FitResult:
    params: SkewNormalParams
    lambda0: float
    iterations: int
    residual: float
    diagnostics: PrecisionAnalysis


def cv2_sln(model: SumModel) -> float:
    return sum_moments(model).cv2


def _log1p_cv2_lsn(lam: float, sum_b_tilde: float) -> float:
    u = lam / math.sqrt(sum_b_tilde)
    w2 = (1.0 + lam * lam) / sum_b_tilde
    return w2 + float(special.log_ndtr(2.0 * u)) - 2.0 * float(special.log_ndtr(u)) - math.log(2.0)


def cv2_lsn_at(lam: float, sum_b_tilde: float) -> float:
    """CV^2 of the LSN whose scale is tied to ``lam`` by the left-slope constraint.

    With ``omega**2 = (1 + lam**2)/s`` and ``beta*omega = lam/sqrt(s)``,
    ``CV^2 = exp(omega**2) Phi(2 lam/sqrt(s)) / (2 Phi(lam/sqrt(s))**2) - 1``.
    """
    if not sum_b_tilde > 0.0:
        raise ValueError("sum_b_tilde must be positive")
    return math.expm1(_log1p_cv2_lsn(lam, sum_b_tilde))


def initial_guess(pa: PrecisionAnalysis) -> float:
    """Shape that would also match the right-tail slope; clamped at zero."""
    arg = pa.max_diag_b_tilde ** 2 * pa.sum_b_tilde - 1.0
    return math.sqrt(max(arg, 0.0))


def _solve(target: float, s: float, lambda0: float) -> tuple[float, int]:
    """Bisection on ``log(1 + cv2_lsn_at(lam)) = log(1 + target)``; returns (lam, steps)."""
    goal = math.log1p(target)

    def g(lam):
        return _log1p_cv2_lsn(lam, s) - goal

    gap = cv2_lsn_at(0.0, s) / target - 1.0
    if gap > _TIE_TOL:
        raise DegenerateModelError(
            f"CV^2 of the sum ({target:.6g}) is below the zero-shape LSN value "
            f"({cv2_lsn_at(0.0, s):.6g}); clamping would give lam_opt = 0"
        )
    if gap >= -_TIE_TOL:
        return 0.0, 0

    lo, hi = 0.0, max(2.0 * lambda0, 1.0)
    while g(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > LAMBDA_MAX:
            raise FitFailureError(f"root not bracketed below lam = {LAMBDA_MAX:g}")

    steps = 0
    while steps < MAX_BISECTIONS:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        steps += 1
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    lam = lo if abs(g(lo)) <= abs(g(hi)) else hi
    return lam, steps


def _relative_residual(lam: float, s: float, target: float) -> float:
    return abs(cv2_lsn_at(lam, s) / target - 1.0)


def solve_lambda(model: SumModel, pa: PrecisionAnalysis | None = None) -> float:
    """Shape ``lam_opt >= 0`` equating the LSN and SLN squared coefficients of variation."""
    pa = precision_analysis(model) if pa is None else pa
    lam, _ = _solve(cv2_sln(model), pa.sum_b_tilde, initial_guess(pa))
    return lam


def fit_lsn(model: SumModel) -> FitResult:
    """Fit ``SN(lam, eps, omega)`` so that ``exp(X)`` approximates the lognormal sum.

    ``omega = sqrt((1 + lam**2)/s)`` and
    ``eps = ln(m) - omega**2/2 - ln(2 Phi(lam/sqrt(s)))`` where ``s`` is the
    reduced precision row-sum total and ``m`` the mean of the sum.
    """
    pa = precision_analysis(model)
    mom = sum_moments(model)
    target = mom.cv2
    s = pa.sum_b_tilde
    lam0 = initial_guess(pa)
    lam, steps = _solve(target, s, lam0)
    residual = _relative_residual(lam, s, target)
    if residual > RESIDUAL_TOL:
        raise FitFailureError(f"shape equation residual {residual:.3g} exceeds {RESIDUAL_TOL:g}")

    omega2 = (1.0 + lam * lam) / s
    eps = math.log(mom.m) - 0.5 * omega2 - math.log(2.0) - float(special.log_ndtr(lam / math.sqrt(s)))
    params = SkewNormalParams(lam, eps, math.sqrt(omega2))
    return FitResult(params, lam0, steps, residual, pa)


def fit_fenton_wilkinson(model: SumModel) -> LognormalComponent:
    """Single lognormal with the sum's exact mean and variance."""
    mom = sum_moments(model)
    s2 = math.log1p(mom.cv2)
    return LognormalComponent(math.log(mom.m) - 0.5 * s2, math.sqrt(s2))
