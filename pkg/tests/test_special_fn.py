import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from lsnsum.special_fn import owen_t, std_normal_cdf, std_normal_pdf, std_normal_quantile

mpmath.mp.dps = 40

finite_h = st.floats(-12, 12, allow_nan=False)
finite_a = st.floats(-50, 50, allow_nan=False)


def owen_t_mp(h, a):
    f = lambda t: mpmath.exp(-h * h * (1 + t * t) / 2) / (1 + t * t)
    return float(mpmath.quad(f, [0, a]) / (2 * mpmath.pi))


def test_pdf_values():
    assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-16)
    # exp(-1/2)/sqrt(2 pi) at 40 digits
    assert std_normal_pdf(1.0) == pytest.approx(0.24197072451914337, abs=1e-16)
    assert std_normal_pdf(-2.5) == std_normal_pdf(2.5)


def test_cdf_values():
    assert std_normal_cdf(0.0) == 0.5
    assert abs(std_normal_cdf(40.0) - 1.0) <= 1e-15
    assert std_normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-16)


@pytest.mark.parametrize("x", [-37.5, -8.0, -3.3, -0.4, 0.0, 1.7, 5.0])
def test_cdf_matches_mpmath(x):
    assert abs(std_normal_cdf(x) - float(mpmath.ncdf(x))) <= 1e-15


def test_quantile_values():
    assert std_normal_quantile(0.5) == 0.0
    assert std_normal_quantile(0.8413447460685429) == pytest.approx(1.0, abs=1e-10)
    assert std_normal_quantile(0.025) == pytest.approx(-std_normal_quantile(0.975), abs=1e-14)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_quantile_domain(p):
    with pytest.raises(ValueError):
        std_normal_quantile(p)


@pytest.mark.parametrize("fn", [std_normal_pdf, std_normal_cdf])
@pytest.mark.parametrize("bad", [float("inf"), -float("inf"), float("nan")])
def test_non_finite_rejected(fn, bad):
    with pytest.raises(ValueError):
        fn(bad)


def test_owen_t_non_finite_rejected():
    with pytest.raises(ValueError):
        owen_t(float("nan"), 1.0)
    with pytest.raises(ValueError):
        owen_t(0.0, float("inf"))


def test_owen_t_values():
    assert owen_t(2.3, 0.0) == 0.0
    assert owen_t(0.0, 1.0) == pytest.approx(0.125, abs=1e-16)
    # T(1,1) = Phi(1)(1 - Phi(1))/2, confirmed by 40-digit quadrature
    assert owen_t(1.0, 1.0) == pytest.approx(0.06674188216570097, abs=1e-16)


@pytest.mark.parametrize("h", [0.0, 0.1, 0.5, 1.0, 2.2, 3.7, 6.0, 9.0])
@pytest.mark.parametrize("a", [0.05, 0.5, 0.999, 1.0, 1.001, 2.0, 7.5, 40.0])
def test_owen_t_against_quadrature(h, a):
    assert abs(owen_t(h, a) - owen_t_mp(h, a)) <= 1e-14


def test_owen_t_vectorised_matches_scalar():
    h = np.linspace(-5, 5, 41)
    a = np.linspace(-3, 3, 41)
    vec = owen_t(h, a)
    assert vec.shape == (41,)
    assert np.array_equal(vec, [owen_t(x, y) for x, y in zip(h, a)])


def test_owen_t_scipy_cross_check():
    h, a = np.meshgrid(np.linspace(-6, 6, 25), np.linspace(-5, 5, 21))
    assert np.max(np.abs(owen_t(h, a) - special.owens_t(h, a))) <= 1e-14


@given(finite_h)
def test_owen_t_unit_a_identity(h):
    p = std_normal_cdf(h)
    assert owen_t(h, 1.0) == pytest.approx(0.5 * p * (1 - p), abs=1e-13)


@given(st.floats(0, 1e3, allow_nan=False))
def test_owen_t_zero_h(a):
    assert owen_t(0.0, a) == pytest.approx(math.atan(a) / (2 * math.pi), abs=1e-14)


@given(finite_h, finite_a)
def test_owen_t_symmetries_and_bound(h, a):
    t = owen_t(h, a)
    assert owen_t(h, -a) == -t
    assert owen_t(-h, a) == t
    assert abs(t) <= 0.25 + 1e-16


@given(st.floats(-8, 8, allow_nan=False))
def test_quantile_inverts_cdf(x):
    # Phi(x) near 1 carries only ~1e-16 absolute information, so the upper
    # half is checked through the reflected lower tail
    sign = -1.0 if x > 0 else 1.0
    assert sign * std_normal_quantile(std_normal_cdf(sign * x)) == pytest.approx(x, abs=1e-10)


@given(st.floats(1e-300, 1 - 1e-16, allow_nan=False))
def test_cdf_inverts_quantile(p):
    assert abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-12


@settings(max_examples=50)
@given(st.lists(st.floats(-30, 30, allow_nan=False), min_size=2, max_size=30, unique=True))
def test_cdf_monotone_and_reflective(xs):
    xs = np.sort(np.array(xs))
    f = std_normal_cdf(xs)
    assert np.all(np.diff(f) >= 0)
    assert np.all(f * std_normal_cdf(-xs) >= 0)
    assert np.allclose(f + std_normal_cdf(-xs), 1.0, atol=1e-15, rtol=0)
