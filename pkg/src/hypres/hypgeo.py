"""Hyperboloid and upper half-space models of hyperbolic (n+1)-space.

Points of the unit tangent bundle are pairs (x, xi) in R^{1,n+1} with
<x,x> = -1, x_0 > 0, <xi,xi> = 1, <x,xi> = 0.  Boundary points are unit
vectors y in R^{n+1}, identified with the light ray through (1, y).

Half-space chart: (rho, y) -> ((q+1)/(2 rho), y/rho, (q-1)/(2 rho)) with
q = rho^2 + |y|^2.  It sends (1, 0) to e_0, the boundary point y' to
(2y', |y'|^2 - 1)/(1 + |y'|^2) and infinity to +e_{n+1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

FLOAT_TOL = 1e-10


class GeometryError(ValueError):
    pass


def mink(a, b):
    """Minkowski product -a_0 b_0 + sum a_i b_i (works on exact sequences too)."""
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)
    return -a[0] * b[0] + sum(p * q for p, q in zip(a[1:], b[1:]))


def eta(n: int) -> np.ndarray:
    return np.diag([-1.0] + [1.0] * (n + 1))


@dataclass(frozen=True)
class PointSH:
    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))

    @property
    def n(self) -> int:
        return self.x.shape[0] - 2

    def invariant_residual(self) -> float:
        x, xi = self.x, self.xi
        return max(abs(mink(x, x) + 1), abs(mink(xi, xi) - 1), abs(mink(x, xi)))

    def validate(self, tol: float = 1e-12) -> "PointSH":
        scale = max(1.0, float(np.max(np.abs(self.x))) ** 2)
        if self.x[0] <= 0 or self.invariant_residual() > tol * scale:
            raise GeometryError(f"not a unit tangent vector (residual {self.invariant_residual():.3e})")
        return self


def base_point(n: int) -> PointSH:
    x = np.zeros(n + 2)
    xi = np.zeros(n + 2)
    x[0] = 1.0
    xi[n + 1] = 1.0
    return PointSH(x, xi)


def geodesic_flow(p: PointSH, t: float) -> PointSH:
    p.validate(1e-9)
    c, s = np.cosh(t), np.sinh(t)
    return PointSH(p.x * c + p.xi * s, p.x * s + p.xi * c)


@dataclass(frozen=True)
class BoundaryData:
    phi_plus: float
    phi_minus: float
    b_plus: np.ndarray
    b_minus: np.ndarray


def boundary_maps(p: PointSH) -> BoundaryData:
    """x +- xi = Phi_+-(1, B_+-)."""
    vp, vm = p.x + p.xi, p.x - p.xi
    if vp[0] <= 0 or vm[0] <= 0:
        raise GeometryError("Phi_+- must be positive; point is corrupted")
    return BoundaryData(vp[0], vm[0], vp[1:] / vp[0], vm[1:] / vm[0])


def light(y) -> np.ndarray:
    return np.concatenate([[1.0], np.asarray(y, dtype=float)])


def poisson_kernel(x, y) -> float:
    """P(x, y) = -1 / <x, e_0 + y>."""
    return -1.0 / mink(np.asarray(x, dtype=float), light(y))


def xi_minus(x, y) -> PointSH:
    x = np.asarray(x, dtype=float)
    return PointSH(x, x - poisson_kernel(x, y) * light(y))


def xi_plus(x, y) -> PointSH:
    x = np.asarray(x, dtype=float)
    return PointSH(x, -x + poisson_kernel(x, y) * light(y))


def random_hyperboloid_point(n: int, rng, scale: float = 1.0) -> np.ndarray:
    v = rng.normal(size=n + 1) * scale
    return np.concatenate([[np.sqrt(1.0 + v @ v)], v])


def random_sphere_point(n: int, rng) -> np.ndarray:
    v = rng.normal(size=n + 1)
    return v / np.linalg.norm(v)


def random_point_sh(n: int, rng, scale: float = 1.0) -> PointSH:
    x = random_hyperboloid_point(n, rng, scale)
    return xi_minus(x, random_sphere_point(n, rng))


# -- the identification tau_- : E_(x,xi) -> T_{B_-} S^n ---------------------------

def tau_minus(p: PointSH, v) -> np.ndarray:
    """v -> v + <v,e_0> e_0 - <v,y> y, returned as a spatial (n+1)-vector."""
    y = boundary_maps(p).b_minus
    vs = np.asarray(v, dtype=float)[1:]
    return vs - (vs @ y) * y


def tau_minus_inv(p: PointSH, zeta) -> np.ndarray:
    """zeta -> zeta + <zeta, x>(x - xi), an ambient vector in E_(x,xi)."""
    z = np.concatenate([[0.0], np.asarray(zeta, dtype=float)])
    return z + mink(z, p.x) * (p.x - p.xi)


def tau_minus_pullback(p: PointSH, omega, y=None) -> np.ndarray:
    """Pull back a covector on T_y S^n (given as an ambient (n+1)-vector) to E_p.

    The result is returned as its metric dual, an ambient vector in E_p; since
    tau_- is an isometry this is tau_-^{-1} applied to the tangential part.
    """
    b = boundary_maps(p).b_minus
    if y is not None and np.linalg.norm(np.asarray(y, dtype=float) - b) > 1e-9:
        raise GeometryError("covector base point differs from B_-(p)")
    om = np.asarray(omega, dtype=float)
    om = om - (om @ b) * b
    return tau_minus_inv(p, om)


# -- boundary action of the Lorentz group --------------------------------------------

def is_lorentz(gamma, tol: float = 1e-9) -> bool:
    g = np.asarray(gamma, dtype=float)
    N = g.shape[0]
    if g.shape != (N, N):
        return False
    e = eta(N - 2)
    ok = np.allclose(g.T @ e @ g, e, atol=tol * max(1.0, np.abs(g).max() ** 2))
    return bool(ok and g[0, 0] > 0 and np.linalg.det(g) > 0)


def boundary_action(gamma, y) -> Tuple[float, np.ndarray]:
    """gamma (1, y) = T (1, U)."""
    if not is_lorentz(gamma):
        raise GeometryError("gamma is not in SO_0(1, n+1)")
    v = np.asarray(gamma, dtype=float) @ light(y)
    return v[0], v[1:] / v[0]


def act(gamma, p: PointSH) -> PointSH:
    g = np.asarray(gamma, dtype=float)
    return PointSH(g @ p.x, g @ p.xi)


def boost(n: int, t: float, k: Optional[int] = None) -> np.ndarray:
    """exp(t P_k); the default k = n+1 is the geodesic-flow generator A."""
    k = n + 1 if k is None else k
    g = np.eye(n + 2)
    g[0, 0] = g[k, k] = np.cosh(t)
    g[0, k] = g[k, 0] = np.sinh(t)
    return g


def rotation(n: int, i: int, j: int, theta: float) -> np.ndarray:
    """exp(theta R_ij) for spatial indices 1 <= i, j <= n+1."""
    g = np.eye(n + 2)
    c, s = np.cos(theta), np.sin(theta)
    g[i, i] = g[j, j] = c
    g[i, j], g[j, i] = -s, s
    return g


def random_lorentz(n: int, rng, scale: float = 1.0) -> np.ndarray:
    g = np.eye(n + 2)
    for _ in range(3):
        i, j = rng.choice(np.arange(1, n + 2), size=2, replace=False)
        g = g @ rotation(n, int(i), int(j), rng.uniform(-np.pi, np.pi))
        g = g @ boost(n, rng.uniform(-scale, scale), int(rng.integers(1, n + 2)))
    return g


def rational_lorentz(n: int, rng, factors: int = 3):
    """Exact element of SO_0(1, n+1) with Fraction entries.

    Products of rational rotations ((1-t^2)/(1+t^2), 2t/(1+t^2)) and rational
    boosts ((1+t^2)/(1-t^2), 2t/(1-t^2)).
    """
    N = n + 2
    g = [[Fraction(int(i == j)) for j in range(N)] for i in range(N)]

    def mul(a, b):
        return [[sum((a[i][k] * b[k][j] for k in range(N)), Fraction(0)) for j in range(N)]
                for i in range(N)]

    for _ in range(factors):
        t = Fraction(int(rng.integers(1, 5)), int(rng.integers(5, 9)))
        i, j = (int(v) for v in rng.choice(np.arange(1, N), size=2, replace=False))
        rot = [[Fraction(int(a == b)) for b in range(N)] for a in range(N)]
        c, s = (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)
        rot[i][i] = rot[j][j] = c
        rot[i][j], rot[j][i] = -s, s
        g = mul(g, rot)
        k = int(rng.integers(1, N))
        bst = [[Fraction(int(a == b)) for b in range(N)] for a in range(N)]
        ch, sh = (1 + t * t) / (1 - t * t), 2 * t / (1 - t * t)
        bst[0][0] = bst[k][k] = ch
        bst[0][k] = bst[k][0] = sh
        g = mul(g, bst)
    return g


# -- upper half-space model ----------------------------------------------------------

@dataclass(frozen=True)
class HalfSpacePoint:
    rho: float
    y: np.ndarray

    def __post_init__(self):
        if not self.rho > 0:
            raise GeometryError("rho must be positive")
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))


def halfspace_to_hyperboloid(p: HalfSpacePoint) -> np.ndarray:
    rho, y = p.rho, p.y
    q = rho * rho + y @ y
    return np.concatenate([[(q + 1) / (2 * rho)], y / rho, [(q - 1) / (2 * rho)]])


def hyperboloid_to_halfspace(x) -> HalfSpacePoint:
    x = np.asarray(x, dtype=float)
    if abs(mink(x, x) + 1) > 1e-9 or x[0] <= 0:
        raise GeometryError("not on the upper hyperboloid sheet")
    # x_0 - x_{n+1} = 1/rho
    rho = 1.0 / (x[0] - x[-1])
    return HalfSpacePoint(rho, x[1:-1] * rho)


def halfspace_boundary_point(yp) -> np.ndarray:
    yp = np.asarray(yp, dtype=float)
    s = yp @ yp
    return np.concatenate([2 * yp, [s - 1]]) / (1 + s)


def sphere_to_halfspace_boundary(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if abs(1 - y[-1]) < 1e-14:
        raise GeometryError("point at infinity has no half-space coordinate")
    return y[:-1] / (1 - y[-1])


def halfspace_metric_factor(yp) -> float:
    """Conformal factor 2/(1+|y'|^2) of the round metric in the y' chart."""
    yp = np.asarray(yp, dtype=float)
    return 2.0 / (1.0 + yp @ yp)


def halfspace_poisson(p: HalfSpacePoint, yp) -> float:
    """rho (1+|y'|^2) / (rho^2 + |y - y'|^2); equals the hyperboloid kernel exactly."""
    yp = np.asarray(yp, dtype=float)
    r = p.y - yp
    return p.rho * (1 + yp @ yp) / (p.rho ** 2 + r @ r)


def halfspace_tau_coefficients(rho, y, yp):
    """(b, b_ij) with tau_-^* dy'_i = kappa^{-1} rho^{-1}(b_i rho drho + sum_j b_ij dy_j).

    b_i = -2 r_i/(rho^2 + r^2) and b_ij = delta_ij - 2 r_i r_j/(rho^2 + r^2),
    r = y - y', kappa = 2/(1+|y'|^2).  Both depend on rho only through rho^2.
    Works with numpy arrays or exact Fractions.
    """
    r = [a - b for a, b in zip(y, yp)]
    den = rho * rho + sum(v * v for v in r)
    n = len(r)
    b = [-2 * r[i] / den for i in range(n)]
    bij = [[(1 if i == j else 0) - 2 * r[i] * r[j] / den for j in range(n)] for i in range(n)]
    return b, bij


def halfspace_jacobian(p: HalfSpacePoint) -> np.ndarray:
    """d(hyperboloid point)/d(rho, y_1..y_n), shape (n+2, n+1)."""
    rho, y = p.rho, p.y
    n = y.shape[0]
    J = np.zeros((n + 2, n + 1))
    J[0, 0] = (rho * rho - y @ y - 1) / (2 * rho * rho)
    J[n + 1, 0] = (rho * rho - y @ y + 1) / (2 * rho * rho)
    J[1:n + 1, 0] = -y / (rho * rho)
    J[0, 1:] = y / rho
    J[n + 1, 1:] = y / rho
    J[1:n + 1, 1:] = np.eye(n) / rho
    return J


# -- identity residuals on random samples ------------------------------------------------

def identity_residuals(p: PointSH, gamma, t: float, s: float, y) -> dict:
    """Residuals of the model identities at one sample (all should be ~ rounding)."""
    y = np.asarray(y, dtype=float)
    g = np.asarray(gamma, dtype=float)
    out = {}
    out["invariants"] = p.invariant_residual()
    q = geodesic_flow(p, t)
    out["flow_invariants"] = q.invariant_residual()
    comp = geodesic_flow(geodesic_flow(p, s), t)
    direct = geodesic_flow(p, s + t)
    out["flow_composition"] = float(max(np.abs(comp.x - direct.x).max(), np.abs(comp.xi - direct.xi).max()))
    b0, bt = boundary_maps(p), boundary_maps(q)
    out["B_minus_flow_invariant"] = float(np.abs(bt.b_minus - b0.b_minus).max())
    out["Phi_plus_flow"] = abs(bt.phi_plus - np.exp(t) * b0.phi_plus) / bt.phi_plus
    x = p.x
    pm = xi_minus(x, y)
    out["Phi_minus_xi_minus"] = abs(boundary_maps(pm).phi_minus - poisson_kernel(x, y))
    out["B_minus_inverse"] = float(np.abs(boundary_maps(pm).b_minus - y).max())
    gp = act(g, p)
    bg = boundary_maps(gp)
    for sign, b, phi, bb, pp in (("+", b0.b_plus, b0.phi_plus, bg.b_plus, bg.phi_plus),
                                 ("-", b0.b_minus, b0.phi_minus, bg.b_minus, bg.phi_minus)):
        T, U = boundary_action(g, b)
        out[f"B{sign}_equivariance"] = float(np.abs(bb - U).max())
        out[f"Phi{sign}_equivariance"] = abs(pp - T * phi) / pp
    T2, U2 = boundary_action(g, y)
    T12, _ = boundary_action(g @ g, y)
    T1, _ = boundary_action(g, U2)
    out["T_cocycle"] = abs(T12 - T1 * T2) / T12
    hp = hyperboloid_to_halfspace(x)
    out["halfspace_round_trip"] = float(np.abs(halfspace_to_hyperboloid(hp) - x).max())
    yp = sphere_to_halfspace_boundary(y)
    out["halfspace_poisson"] = abs(halfspace_poisson(hp, yp) - poisson_kernel(x, y)) / poisson_kernel(x, y)
    v = np.asarray(y, dtype=float) - (y @ b0.b_minus) * b0.b_minus
    out["tau_round_trip"] = float(np.abs(tau_minus(p, tau_minus_inv(p, v)) - v).max())
    return out


def sample_identity_residuals(n: int, samples: int, rng, scale: float = 1.0):
    """[(half-space point, residual dict)] for random points, times, boosts and boundary points."""
    rows = []
    for _ in range(samples):
        p = random_point_sh(n, rng, scale)
        gamma = random_lorentz(n, rng, scale)
        t, s = rng.uniform(-5, 5, size=2)
        y = random_sphere_point(n, rng)
        rows.append((hyperboloid_to_halfspace(p.x), identity_residuals(p, gamma, t, s, y)))
    return rows
