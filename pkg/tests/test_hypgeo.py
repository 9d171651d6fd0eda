"""Hyperboloid model, geodesic flow, boundary maps and the half-space chart."""
from fractions import Fraction

import numpy as np
import pytest

from hypres.hypgeo import (
    GeometryError, HalfSpacePoint, PointSH, act, base_point, boost, boundary_action,
    boundary_maps, geodesic_flow, halfspace_boundary_point, halfspace_jacobian,
    halfspace_metric_factor, halfspace_poisson, halfspace_tau_coefficients,
    halfspace_to_hyperboloid, hyperboloid_to_halfspace, is_lorentz, light, mink,
    poisson_kernel, random_hyperboloid_point, random_lorentz, random_point_sh,
    random_sphere_point, rational_lorentz, sample_identity_residuals, tau_minus,
    tau_minus_inv, xi_minus,
)


def test_flow_at_base_point():
    n, t = 2, 0.8
    q = geodesic_flow(base_point(n), t)
    e0, e3 = np.eye(4)[0], np.eye(4)[3]
    assert np.allclose(q.x, np.cosh(t) * e0 + np.sinh(t) * e3, atol=1e-15)
    assert np.allclose(q.xi, np.sinh(t) * e0 + np.cosh(t) * e3, atol=1e-15)


def test_flow_zero_is_identity():
    rng = np.random.default_rng(0)
    p = random_point_sh(3, rng)
    q = geodesic_flow(p, 0.0)
    assert np.array_equal(q.x, p.x) and np.array_equal(q.xi, p.xi)


@pytest.mark.parametrize("n", [2, 3])
def test_flow_conserves_hyperboloid(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        p = random_point_sh(n, rng)
        q = geodesic_flow(p, rng.uniform(-5, 5))
        assert abs(mink(q.x, q.x) + 1) < 1e-10 * max(1.0, q.x[0] ** 2)


def test_base_point_boundary_maps():
    b = boundary_maps(base_point(2))
    assert b.phi_plus == 1 and b.phi_minus == 1
    assert np.allclose(b.b_plus, [0, 0, 1]) and np.allclose(b.b_minus, [0, 0, -1])


def test_flow_boundary_behaviour():
    rng = np.random.default_rng(5)
    p = random_point_sh(2, rng)
    b0 = boundary_maps(p)
    for t in (-3.0, 0.5, 4.0):
        bt = boundary_maps(geodesic_flow(p, t))
        assert np.allclose(bt.b_minus, b0.b_minus, atol=1e-10)
        assert abs(bt.phi_plus / (np.exp(t) * b0.phi_plus) - 1) < 1e-10
    # pi_S(phi_t p) -> B_+ as t -> +infinity, at rate e^{-2t}
    errs = []
    for t in (4.0, 6.0, 8.0):
        xs = geodesic_flow(p, t).x
        errs.append(np.abs(xs[1:] / xs[0] - b0.b_plus).max())
    assert errs[-1] < 1e-6 and errs[0] > errs[1] > errs[2]


def test_poisson_kernel_examples():
    n = 2
    e0 = np.eye(n + 2)[0]
    y = random_sphere_point(n, np.random.default_rng(1))
    assert poisson_kernel(e0, y) == pytest.approx(1.0, abs=1e-15)
    t = 1.3
    q = geodesic_flow(base_point(n), t)
    assert poisson_kernel(q.x, boundary_maps(q).b_plus) == pytest.approx(np.exp(t), rel=1e-12)


def test_xi_minus_inverts_b_minus():
    rng = np.random.default_rng(2)
    for _ in range(50):
        x = random_hyperboloid_point(3, rng)
        y = random_sphere_point(3, rng)
        p = xi_minus(x, y)
        assert mink(p.xi, p.xi) == pytest.approx(1.0, abs=1e-10)
        assert np.abs(boundary_maps(p).b_minus - y).max() < 1e-12
        assert boundary_maps(p).phi_minus == pytest.approx(poisson_kernel(x, y), rel=1e-12)


def test_tau_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = random_point_sh(2, rng)
        b = boundary_maps(p).b_minus
        v = rng.normal(size=3)
        v -= (v @ b) * b
        assert np.abs(tau_minus(p, tau_minus_inv(p, v)) - v).max() < 1e-12


def test_tau_coefficients_at_r_zero():
    b, bij = halfspace_tau_coefficients(0.5, [0.2, -0.1], [0.2, -0.1])
    assert b == [0, 0]
    assert bij == [[1, 0], [0, 1]]


def test_tau_coefficients_even_in_rho():
    y, yp = [Fraction(1, 3), Fraction(-2, 5)], [Fraction(3, 7), Fraction(1, 2)]
    rho = Fraction(5, 11)
    assert halfspace_tau_coefficients(rho, y, yp) == halfspace_tau_coefficients(-rho, y, yp)


def test_tau_half_space_formula_matches_hyperboloid():
    rng = np.random.default_rng(9)
    n, h = 2, 1e-6
    for _ in range(5):
        hp = HalfSpacePoint(rng.uniform(0.2, 2.0), rng.normal(size=n))
        yp = rng.normal(size=n)
        p = xi_minus(halfspace_to_hyperboloid(hp), halfspace_boundary_point(yp))
        b, bij = halfspace_tau_coefficients(hp.rho, hp.y, yp)
        kappa = halfspace_metric_factor(yp)
        for i in range(n):
            step = np.eye(n)[i] * h
            zeta = (halfspace_boundary_point(yp + step) - halfspace_boundary_point(yp - step)) / (2 * h)
            coef = kappa * hp.rho * np.array([b[i] * hp.rho] + list(bij[i]))
            assert np.abs(tau_minus_inv(p, zeta) - halfspace_jacobian(hp) @ coef).max() < 1e-8


def test_boundary_action_identity_and_cocycle():
    rng = np.random.default_rng(4)
    y = random_sphere_point(2, rng)
    T, U = boundary_action(np.eye(4), y)
    assert T == 1 and np.allclose(U, y)
    g1, g2 = random_lorentz(2, rng), random_lorentz(2, rng)
    T2, U2 = boundary_action(g2, y)
    T1, _ = boundary_action(g1, U2)
    T12, _ = boundary_action(g1 @ g2, y)
    assert T12 == pytest.approx(T1 * T2, rel=1e-10)


def test_boost_equivariance():
    rng = np.random.default_rng(6)
    g = boost(2, 0.7)
    p = random_point_sh(2, rng)
    b, bg = boundary_maps(p), boundary_maps(act(g, p))
    T, U = boundary_action(g, b.b_minus)
    assert np.allclose(bg.b_minus, U, atol=1e-10)
    assert bg.phi_minus == pytest.approx(T * b.phi_minus, rel=1e-10)


def test_rational_lorentz_is_exact():
    rng = np.random.default_rng(7)
    g = rational_lorentz(2, rng)
    N = 4
    eta = [[-1 if i == j == 0 else int(i == j) for j in range(N)] for i in range(N)]
    gt_eta_g = [[sum(g[k][i] * eta[k][l] * g[l][j] for k in range(N) for l in range(N))
                 for j in range(N)] for i in range(N)]
    assert gt_eta_g == eta
    assert is_lorentz(np.array(g, dtype=float))


def test_half_space_chart():
    hp = hyperboloid_to_halfspace(np.eye(4)[0])
    assert hp.rho == pytest.approx(1.0) and np.allclose(hp.y, 0)
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = random_hyperboloid_point(2, rng)
        assert np.abs(halfspace_to_hyperboloid(hyperboloid_to_halfspace(x)) - x).max() < 1e-12


def test_half_space_poisson_kernel():
    rng = np.random.default_rng(10)
    yp = rng.normal(size=2)
    y = halfspace_boundary_point(yp)
    for _ in range(10):
        x = random_hyperboloid_point(2, rng)
        hp = hyperboloid_to_halfspace(x)
        assert halfspace_poisson(hp, yp) == pytest.approx(poisson_kernel(x, y), rel=1e-11)


def test_corrupted_inputs():
    with pytest.raises(GeometryError):
        HalfSpacePoint(-1.0, [0.0, 0.0])
    with pytest.raises(GeometryError):
        geodesic_flow(PointSH(np.array([2.0, 0, 0, 0]), np.array([0, 0, 0, 1.0])), 1.0)
    with pytest.raises(GeometryError):
        boundary_action(np.diag([1.0, 2.0, 1.0, 1.0]), [1.0, 0, 0])


@pytest.mark.parametrize("n", [2, 3])
def test_sampled_identities(n):
    rows = sample_identity_residuals(n, 30, np.random.default_rng(n))
    worst = max(max(r.values()) for _, r in rows)
    assert worst < 1e-9
