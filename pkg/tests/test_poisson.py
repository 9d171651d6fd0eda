"""Numerical Poisson transform: quadrature, eigen-equation residuals, equivariance, fits."""
import math

import numpy as np
import pytest

from hypres import poisson
from hypres.hypgeo import base_point, geodesic_flow, random_hyperboloid_point


def _e0(n):
    x = np.zeros(n + 2)
    x[0] = 1.0
    return x


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_grid_volume_and_self_test(n):
    grid = poisson.sphere_grid(n, 12)
    assert abs(grid.weights.sum() - poisson.sphere_volume(n)) < 1e-12
    assert poisson.grid_self_test(grid) < 1e-12


def test_grid_monomials_against_closed_form():
    grid = poisson.sphere_grid(2, 16)
    for exps in [(2, 0, 0), (2, 2, 2), (4, 0, 2), (1, 1, 0), (0, 0, 6)]:
        vals = np.prod(grid.points ** np.array(exps), axis=1)
        assert abs(grid.integrate(vals) - poisson.monomial_integral(2, exps)) < 1e-13
    assert poisson.monomial_integral(2, (2, 0, 0)) == pytest.approx(4 * math.pi / 3)


def test_constant_at_base_point():
    val = poisson.poisson_transform(poisson.constant_field(2), 1.0, _e0(2), poisson.sphere_grid(2, 32))
    assert abs(val.value - 4 * math.pi) < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_poisson_kernel_normalization(n):
    # P^n integrates to the sphere volume at every interior point
    rng = np.random.default_rng(n)
    grid = poisson.sphere_grid(n, 48)
    for _ in range(3):
        x = random_hyperboloid_point(n, rng, 0.5)
        val = poisson.poisson_transform(poisson.constant_field(n), 0.0, x, grid).value
        assert abs(val - poisson.sphere_volume(n)) < 1e-9


def test_odd_harmonic_vanishes_at_base_point():
    val = poisson.poisson_transform(poisson.harmonic("Y10"), 1.0, _e0(2), poisson.sphere_grid(2, 16))
    assert abs(val.value) < 1e-14


def test_grid_doubling_agreement():
    x = geodesic_flow(base_point(2), 0.5).x
    om = poisson.harmonic("Y20")
    a = poisson.poisson_transform(om, 1.0, x, poisson.sphere_grid(2, 24), estimate_error=False).value
    b = poisson.poisson_transform(om, 1.0, x, poisson.sphere_grid(2, 48), estimate_error=False).value
    assert abs(a - b) < 1e-8


def test_residual_scalar():
    pts = poisson.sample_points(2, 5, np.random.default_rng(3))
    rep = poisson.pde_residual(poisson.harmonic("Y10"), 1.0, pts)
    assert rep.max_residual < 1e-6
    assert rep.order >= 1.8


def test_residual_zero_field():
    pts = poisson.sample_points(2, 3, np.random.default_rng(4))
    rep = poisson.pde_residual(poisson.zero_field(2), 1.0, pts)
    assert rep.max_residual == 0.0


def test_residual_complex_lambda():
    pts = poisson.sample_points(2, 3, np.random.default_rng(5))
    rep = poisson.pde_residual(poisson.harmonic("Y21"), 0.5 + 1.0j, pts)
    assert rep.max_residual < 1e-6


@pytest.mark.parametrize("field", [poisson.rotation_field(2), poisson.gradient_field("Y21")])
def test_residual_one_form(field):
    pts = poisson.sample_points(2, 4, np.random.default_rng(6))
    rep = poisson.pde_residual(field, 1.0, pts)
    assert rep.max_residual < 1e-5
    assert max(rep.divergence) < 1e-5
    assert max(rep.trace) < 1e-5


def test_tiny_step_is_caught():
    pts = poisson.sample_points(2, 2, np.random.default_rng(7))
    with pytest.raises(poisson.StepTooSmallError):
        poisson.pde_residual(poisson.harmonic("Y21"), 1.0, pts, fd_step=1e-7)


def test_unsupported_regime():
    with pytest.raises(poisson.UnsupportedRegimeError):
        poisson.poisson_transform(poisson.constant_field(2), -2.5, _e0(2))


def test_point_off_hyperboloid():
    with pytest.raises(poisson.PoissonError):
        poisson.poisson_transform(poisson.constant_field(2), 1.0, np.array([2.0, 0, 0, 0]))


@pytest.mark.parametrize("field", [poisson.harmonic("Y21"), poisson.rotation_field(2)])
def test_equivariance(field):
    rng = np.random.default_rng(8)
    for g, x in zip(poisson.random_boosts(2, 3, rng), poisson.sample_points(2, 3, rng)):
        assert poisson.equivariance_residual(field, 1.0, g, x) < 1e-8


def test_pushforward_matches_boundary_integral():
    rng = np.random.default_rng(9)
    grid = poisson.sphere_grid(2, 32)
    for name in ("Y10", "Y21"):
        om = poisson.harmonic(name)
        for x in poisson.sample_points(2, 3, rng):
            a = poisson.fiber_pushforward(poisson.minus_section(om, 1.0), x, grid)
            b = poisson.poisson_transform(om, 1.0, x, grid, estimate_error=False).value
            assert abs(a - b) < 1e-8


def test_pushforward_of_one_is_volume():
    x = random_hyperboloid_point(3, np.random.default_rng(10))
    assert abs(poisson.fiber_pushforward(lambda x, xi: 1.0, x, n=3) - poisson.sphere_volume(3)) < 1e-12


def test_pushforward_is_linear():
    x = random_hyperboloid_point(2, np.random.default_rng(11))
    u = poisson.minus_section(poisson.harmonic("Y10"), 0.7)
    v = poisson.minus_section(poisson.harmonic("Y22"), 0.7)
    lhs = poisson.fiber_pushforward(lambda x, xi: 2 * u(x, xi) - 3 * v(x, xi), x)
    rhs = 2 * poisson.fiber_pushforward(u, x) - 3 * poisson.fiber_pushforward(v, x)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_two_branch_fit_recovers_synthetic_data():
    lam, n = -0.3, 2
    rhos = np.array(poisson.dyadic_ladder())
    vals = rhos ** (-lam) * (1.5 + 0.2 * rhos ** 2) + rhos ** (n + lam) * (-4.0 + rhos ** 4)
    coef, se, resid = poisson._two_branch_fit(rhos, vals, lam, n, 2)
    assert abs(coef[0] - 1.5) < 1e-8 and abs(coef[3] + 4.0) < 1e-6


def test_fit_zero_field():
    fit = poisson.asymptotic_fit(poisson.ChartBump((0.0, 0.0), 0.3, amp=0.0),
                                 poisson.ChartBump((0.1, 0.0), 0.3), -0.3)
    assert fit.f_minus0 == 0 and fit.f_plus0 == 0


def test_fit_refuses_coincident_branches():
    b = poisson.ChartBump((0.0, 0.0), 0.3)
    with pytest.raises(poisson.IllConditionedFitError):
        poisson.asymptotic_fit(b, b, -1.0)
    with pytest.raises(poisson.IllConditionedFitError):
        poisson.asymptotic_fit(b, b, 0.0)


def test_chart_bump_support():
    b = poisson.ChartBump((0.5, 0.0), 0.2)
    assert b(np.array([[0.5, 0.0]]))[0] == pytest.approx(1.0)
    assert b(np.array([[0.75, 0.0]]))[0] == 0.0
