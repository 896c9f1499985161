import numpy as np
import numpy.testing as npt
import pytest
import scipy.integrate
import scipy.stats

from ou_spectral import errors
from ou_spectral.gaussian import (
    ForwardFunction,
    GaussianDensity,
    expectation,
    inner_product,
    stationary_density,
    wick_moment,
)
from ou_spectral.mpoly import MPoly


def test_univariate_even_moments():
    # E[x^{2k}] = (2k-1)!! sigma^{2k}
    s2 = 0.7
    S = np.array([[s2]])
    assert wick_moment((0,), S) == 1.0
    assert wick_moment((2,), S) == pytest.approx(s2)
    assert wick_moment((4,), S) == pytest.approx(3 * s2**2)
    assert wick_moment((6,), S) == pytest.approx(15 * s2**3)
    assert wick_moment((8,), S) == pytest.approx(105 * s2**4)
    assert wick_moment((10,), S) == pytest.approx(945 * s2**5)


def test_odd_moments_vanish():
    S = np.array([[0.3, 0.1], [0.1, 0.5]])
    assert wick_moment((1, 0), S) == 0.0
    assert wick_moment((2, 1), S) == 0.0
    assert wick_moment((3, 2), S) == 0.0


def test_bivariate_moments_by_hand():
    # Hand-expanded pairings for low cross moments
    sxx, sxy, syy = 0.6, 0.2, 0.9
    S = np.array([[sxx, sxy], [sxy, syy]])
    assert wick_moment((1, 1), S) == pytest.approx(sxy)
    assert wick_moment((2, 2), S) == pytest.approx(sxx * syy + 2 * sxy**2)
    assert wick_moment((3, 1), S) == pytest.approx(3 * sxx * sxy)
    assert wick_moment((4, 0), S) == pytest.approx(3 * sxx**2)


def test_moment_against_quadrature():
    # Independent route: numeric integration of x^6 times the density
    s2 = 0.55
    val = wick_moment((6,), np.array([[s2]]))
    num, _ = scipy.integrate.quad(
        lambda x: x**6 * scipy.stats.norm.pdf(x, scale=np.sqrt(s2)), -12, 12
    )
    npt.assert_allclose(val, num, rtol=1e-9)


def test_moment_memoization_stable():
    S = np.array([[0.4, 0.1], [0.1, 0.3]])
    a = wick_moment((4, 2), S)
    b = wick_moment((4, 2), S)
    assert a == b


def test_moment_validation():
    with pytest.raises(errors.NotSPDError):
        wick_moment((2,), np.array([[-1.0]]))
    with pytest.raises(errors.DimensionMismatchError):
        wick_moment((2, 2), np.array([[1.0]]))
    with pytest.raises(ValueError):
        wick_moment((-2,), np.array([[1.0]]))


def test_expectation_with_mean_shift():
    # E[x] = m, E[x^2] = m^2 + s2, E[x^3] = m^3 + 3 m s2
    m, s2 = 0.8, 0.5
    g = GaussianDensity(mean=[m], cov=[[s2]])
    assert expectation(MPoly(1, {(1,): 1.0}), g) == pytest.approx(m)
    assert expectation(MPoly(1, {(2,): 1.0}), g) == pytest.approx(m**2 + s2)
    assert expectation(MPoly(1, {(3,): 1.0}), g) == pytest.approx(m**3 + 3 * m * s2)


def test_expectation_complex_linear():
    g = GaussianDensity(mean=[0.5, -0.25], cov=0.3 * np.eye(2))
    p = MPoly(2, {(1, 0): 1j, (0, 1): 2.0})
    assert expectation(p, g) == pytest.approx(0.5j - 0.5)


def test_expectation_quadrature_cross_check():
    g = GaussianDensity(mean=[0.4], cov=[[0.6]])
    p = MPoly(1, {(4,): 1.0, (3,): -2.0, (1,): 0.5, (0,): 1.0})
    want, _ = scipy.integrate.quad(
        lambda x: (x**4 - 2 * x**3 + 0.5 * x + 1)
        * scipy.stats.norm.pdf(x, loc=0.4, scale=np.sqrt(0.6)),
        -14,
        14,
    )
    npt.assert_allclose(expectation(p, g), want, rtol=1e-9)


def test_density_pdf_matches_scipy():
    g = GaussianDensity(mean=[0.3], cov=[[0.8]])
    for x in (-1.0, 0.0, 0.7):
        npt.assert_allclose(
            g.pdf([x]), scipy.stats.norm.pdf(x, loc=0.3, scale=np.sqrt(0.8))
        )


def test_density_pdf_grid_matches_pointwise():
    rng = np.random.default_rng(3)
    cov = np.array([[0.5, 0.1], [0.1, 0.4]])
    g = GaussianDensity(mean=[0.1, -0.2], cov=cov)
    pts = rng.normal(size=(40, 2))
    grid = g.pdf_grid(pts)
    for k in range(40):
        npt.assert_allclose(grid[k], g.pdf(pts[k]), rtol=1e-12)


def test_density_normalization_numeric():
    g = GaussianDensity(mean=[0.0], cov=[[0.5]])
    xs = np.linspace(-8, 8, 4001).reshape(-1, 1)
    total = np.trapezoid(g.pdf_grid(xs), xs[:, 0])
    npt.assert_allclose(total, 1.0, atol=1e-10)


def test_stationary_density_zero_mean():
    g = stationary_density([[0.5]])
    assert g.mean[0] == 0.0
    assert g.cov[0, 0] == 0.5


def test_density_validation():
    with pytest.raises(errors.NotSPDError):
        GaussianDensity(mean=[0.0], cov=[[-0.5]])
    with pytest.raises(errors.NotSPDError):
        GaussianDensity(mean=[0.0, 0.0], cov=[[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(errors.DimensionMismatchError):
        GaussianDensity(mean=[0.0, 0.0], cov=[[1.0]])
    g = GaussianDensity(mean=[0.0], cov=[[1.0]])
    with pytest.raises(errors.DimensionMismatchError):
        g.pdf([0.0, 0.0])


def test_forward_function_value():
    g = GaussianDensity(mean=[0.0], cov=[[0.5]])
    f = ForwardFunction(MPoly(1, {(2,): 4.0, (0,): -2.0}), g)
    x = 0.6
    assert f.value([x]) == pytest.approx((4 * x**2 - 2) * g.pdf([x]))
    with pytest.raises(errors.DimensionMismatchError):
        ForwardFunction(MPoly(2, {(1, 0): 1.0}), g)


def test_inner_product_conjugates_first_argument():
    g0 = GaussianDensity(mean=[0.0], cov=[[0.5]])
    f = ForwardFunction(MPoly(1, {(2,): 1.0}), g0)
    gp = MPoly(1, {(2,): 1j})
    # <g, f> integrates conj(g) * poly against the base Gaussian
    want = expectation(gp.conj() * f.poly, g0)
    assert inner_product(gp, f) == pytest.approx(want)
    assert inner_product(gp, f).imag == pytest.approx(-0.75)


def test_expectation_type_checks():
    g = GaussianDensity(mean=[0.0], cov=[[1.0]])
    with pytest.raises(TypeError):
        expectation("not a poly", g)
    with pytest.raises(errors.DimensionMismatchError):
        expectation(MPoly(2, {(1, 1): 1.0}), g)
