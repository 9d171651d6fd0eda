"""Numerical Poisson transform on the boundary sphere S^n.

P_lam w(x) = int_{S^n} P(x, y)^(n + lam) (tau_-^* w)(y) dS(y) for scalar (m = 0)
and 1-form (m = 1) boundary data.  1-forms on S^n are ambient (n+1)-vectors
tangent at y; 1-forms on the hyperboloid are returned as their metric duals,
ambient (n+2)-vectors tangent at x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, roots_gegenbauer

from .hypgeo import (boundary_action, halfspace_boundary_point, light, mink,
                     random_hyperboloid_point, random_lorentz)


class PoissonError(ValueError):
    pass


class UnsupportedRegimeError(PoissonError):
    """The quadrature formula is only used where it converges absolutely."""


class StepTooSmallError(PoissonError):
    pass


class IllConditionedFitError(PoissonError):
    pass


def sphere_volume(n: int) -> float:
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def monomial_integral(n: int, exps: Sequence[int]) -> float:
    """int_{S^n} prod y_i^{a_i} dS."""
    if any(a % 2 for a in exps):
        return 0.0
    b = [(a + 1) / 2 for a in exps]
    return 2 * math.exp(sum(gammaln(v) for v in b) - gammaln(sum(b)))


# -- quadrature ------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureGrid:
    n: int
    points: np.ndarray  # (K, n+1) unit vectors
    weights: np.ndarray  # (K,)
    scheme: str
    order: int
    exactness: int

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def integrate(self, values: np.ndarray):
        return np.tensordot(self.weights, values, axes=(0, 0))


def _circle(order: int):
    M = 2 * order
    phi = 2 * np.pi * np.arange(M) / M
    return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(M, 2 * np.pi / M)


def _sphere_nodes(n: int, order: int):
    if n == 1:
        return _circle(order)
    # S^n = { (sqrt(1-t^2) z, t) }, dS = (1-t^2)^{(n-2)/2} dt dS^{n-1}
    t, wt = roots_gegenbauer(order, (n - 1) / 2)
    if n == 2:
        from numpy.polynomial.legendre import leggauss
        t, wt = leggauss(order)
    sub, ws = _sphere_nodes(n - 1, order)
    r = np.sqrt(1 - t * t)
    pts = np.concatenate([(r[:, None, None] * sub[None, :, :]),
                          np.broadcast_to(t[:, None, None], (order, sub.shape[0], 1))], axis=2)
    w = wt[:, None] * ws[None, :]
    return pts.reshape(-1, n + 1), w.reshape(-1)


@lru_cache(maxsize=32)
def sphere_grid(n: int, order: int = 24) -> QuadratureGrid:
    """Product Gauss-Gegenbauer x uniform azimuth; exact for polynomials of degree <= 2*order-1.

    For n = 2 this is Gauss-Legendre in the polar cosine times a 2*order point trapezoid.
    """
    if n < 1 or order < 1:
        raise PoissonError("need n >= 1 and order >= 1")
    pts, w = _sphere_nodes(n, order)
    grid = QuadratureGrid(n, pts, w, "gauss-gegenbauer x trapezoid", order, 2 * order - 1)
    err = grid_self_test(grid)
    if err > 1e-12:
        raise PoissonError(f"quadrature self-test failed ({err:.2e})")
    return grid


def grid_self_test(grid: QuadratureGrid, max_degree: int = 8) -> float:
    """Max error on monomials up to min(exactness, max_degree), plus the volume."""
    n = grid.n
    deg = min(grid.exactness, max_degree)
    err = abs(grid.weights.sum() - sphere_volume(n)) / sphere_volume(n)
    rng = np.random.default_rng(0)
    for _ in range(12):
        exps = rng.multinomial(deg, np.ones(n + 1) / (n + 1))
        vals = np.prod(grid.points ** exps, axis=1)
        err = max(err, abs(grid.integrate(vals) - monomial_integral(n, exps)))
    return float(err)


# -- boundary data -------------------------------------------------------------------------

@dataclass
class BoundaryTensorField:
    """Smooth tensor field on S^n; evaluator maps (K, n+1) points to (K,) or (K, n+1)."""

    n: int
    m: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def __post_init__(self):
        if self.m not in (0, 1):
            raise PoissonError("numerical transform supports m in {0, 1}")

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = np.atleast_2d(y)
        val = np.asarray(self.evaluator(y))
        if self.m == 1:
            # drop any radial part so the field is tangent
            val = val - np.sum(val * y, axis=1)[:, None] * y
        return val

    def tangency_defect(self, y: np.ndarray) -> float:
        if self.m == 0:
            return 0.0
        y = np.atleast_2d(y)
        raw = np.asarray(self.evaluator(y))
        return float(np.abs(np.sum(raw * y, axis=1)).max())

    def scaled(self, c) -> "BoundaryTensorField":
        return BoundaryTensorField(self.n, self.m, lambda y: c * self.evaluator(y), self.name)

    def __add__(self, other):
        return BoundaryTensorField(self.n, self.m, lambda y: self.evaluator(y) + other.evaluator(y))


def zero_field(n: int, m: int = 0) -> BoundaryTensorField:
    if m == 0:
        return BoundaryTensorField(n, 0, lambda y: np.zeros(y.shape[0]), "0")
    return BoundaryTensorField(n, 1, lambda y: np.zeros_like(y), "0")


def constant_field(n: int, c: float = 1.0) -> BoundaryTensorField:
    return BoundaryTensorField(n, 0, lambda y: np.full(y.shape[0], c), "1")


_HARMONICS = {
    # real orthonormal spherical harmonics on S^2 in Cartesian form
    "Y00": lambda y: np.full(y.shape[0], 0.5 / np.sqrt(np.pi)),
    "Y10": lambda y: np.sqrt(3 / (4 * np.pi)) * y[:, 2],
    "Y11": lambda y: np.sqrt(3 / (4 * np.pi)) * y[:, 0],
    "Y20": lambda y: np.sqrt(5 / (16 * np.pi)) * (3 * y[:, 2] ** 2 - 1),
    "Y21": lambda y: np.sqrt(15 / (4 * np.pi)) * y[:, 0] * y[:, 2],
    "Y22": lambda y: np.sqrt(15 / (16 * np.pi)) * (y[:, 0] ** 2 - y[:, 1] ** 2),
}


def harmonic(name: str, n: int = 2) -> BoundaryTensorField:
    """Y_l^k on S^2 (names Y00, Y10, Y11, Y20, Y21, Y22); for n > 2 the same
    polynomials in (y_1, y_2, y_{n+1}) restricted to S^n."""
    if name not in _HARMONICS:
        raise PoissonError(f"unknown harmonic {name!r}")
    fn = _HARMONICS[name]
    if n == 2:
        return BoundaryTensorField(2, 0, fn, name)
    return BoundaryTensorField(n, 0, lambda y: fn(y[:, [0, 1, n]]), name)


def gradient_field(name: str, n: int = 2) -> BoundaryTensorField:
    """The 1-form d Y on S^n (tangential gradient of a harmonic polynomial)."""
    base = harmonic(name, n)
    h = 1e-6

    def grad(y):
        out = np.zeros_like(y)
        for i in range(y.shape[1]):
            e = np.zeros(y.shape[1])
            e[i] = h
            out[:, i] = (base.evaluator(y + e) - base.evaluator(y - e)) / (2 * h)
        return out - np.sum(out * y, axis=1)[:, None] * y

    return BoundaryTensorField(n, 1, grad, "d" + name)


def rotation_field(n: int = 2, i: int = 0, j: int = 1) -> BoundaryTensorField:
    """Killing 1-form y_i dy_j - y_j dy_i (divergence-free on S^n)."""
    def f(y):
        out = np.zeros_like(y)
        out[:, j] = y[:, i]
        out[:, i] = -y[:, j]
        return out

    return BoundaryTensorField(n, 1, f, f"K{i}{j}")


# -- the transform -----------------------------------------------------------------------------

def _check_regime(n: int, lam):
    if np.real(n + lam) <= 0:
        raise UnsupportedRegimeError(
            f"Re(n + lambda) = {np.real(n + lam)} <= 0: continuation is not attempted")


def kernel_powers(x: np.ndarray, pts: np.ndarray, lam) -> Tuple[np.ndarray, np.ndarray]:
    """(P(x, y), P(x, y)^(n + lam)) over grid points."""
    n = pts.shape[1] - 1
    P = 1.0 / (x[0] - pts @ x[1:])
    expo = n + lam
    Pw = P ** expo if np.isrealobj(expo) else np.exp(expo * np.log(P))
    return P, Pw


def twist_vectors(x: np.ndarray, pts: np.ndarray, w: np.ndarray, P: np.ndarray) -> np.ndarray:
    """tau_-^{-1} of tangent boundary vectors w at y: (0, w) + <w, x_sp> P (1, y)."""
    K, N = w.shape
    out = np.zeros((K, N + 1), dtype=np.result_type(w, float))
    out[:, 1:] = w
    c = (w @ x[1:]) * P
    out[:, 0] += c
    out[:, 1:] += c[:, None] * pts
    return out


def _raw_transform(omega: BoundaryTensorField, lam, x: np.ndarray, grid: QuadratureGrid):
    P, Pw = kernel_powers(x, grid.points, lam)
    vals = omega(grid.points)
    if omega.m == 0:
        return grid.integrate(Pw * vals)
    tw = twist_vectors(x, grid.points, vals, P)
    return grid.integrate(Pw[:, None] * tw)


@dataclass
class PoissonValue:
    value: object
    error: float
    grid_order: int


def poisson_transform(omega: BoundaryTensorField, lam, x, grid: Optional[QuadratureGrid] = None,
                      estimate_error: bool = True) -> PoissonValue:
    """P_lam w(x); the error estimate compares with a grid of 3/4 the order."""
    x = np.asarray(x, dtype=float)
    n = omega.n
    _check_regime(n, lam)
    if abs(mink(x, x) + 1) > 1e-9 or x[0] <= 0:
        raise PoissonError("x must lie on the upper hyperboloid sheet")
    grid = grid or sphere_grid(n)
    if grid.n != n:
        raise PoissonError("grid dimension mismatch")
    val = _raw_transform(omega, lam, x, grid)
    err = float("nan")
    if estimate_error:
        coarse = sphere_grid(n, max(2, (3 * grid.order) // 4))
        err = float(np.max(np.abs(val - _raw_transform(omega, lam, x, coarse))))
    return PoissonValue(val, err, grid.order)


def transform_function(omega: BoundaryTensorField, lam, grid: QuadratureGrid):
    """x -> P_lam w(x) on the fixed grid (a finite sum of exact eigenfunctions)."""
    _check_regime(omega.n, lam)
    return lambda x: _raw_transform(omega, lam, np.asarray(x, dtype=float), grid)


# -- geodesic normal coordinates -------------------------------------------------------------

def tangent_frame(x: np.ndarray) -> np.ndarray:
    """Columns e_1..e_{n+1}: orthonormal frame of T_x from the boost taking e_0 to x."""
    x = np.asarray(x, dtype=float)
    N = x.shape[0]
    v = x[1:]
    B = np.zeros((N, N))
    B[0, 0] = x[0]
    B[0, 1:] = v
    B[1:, 0] = v
    B[1:, 1:] = np.eye(N - 1) + np.outer(v, v) / (1 + x[0])
    return B[:, 1:]


def geodesic(x: np.ndarray, e: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """(gamma(t), gamma'(t)) for the unit-speed geodesic with gamma(0) = x, gamma'(0) = e."""
    return np.cosh(t) * x + np.sinh(t) * e, np.sinh(t) * x + np.cosh(t) * e


def transport_back(W: np.ndarray, x: np.ndarray, e: np.ndarray, t: float) -> np.ndarray:
    """Parallel transport of W in T_gamma(t) back to T_x along the geodesic."""
    _, gp = geodesic(x, e, t)
    a = mink(W, gp)
    return W - a * gp + a * e


def fd_operators(F, x: np.ndarray, m: int, h: float):
    """Central-difference rough Laplacian and divergence at x.

    For m = 0, Delta F(x) = -sum_i d^2/dt^2 F(exp_x(t e_i)).  For m = 1 the
    values along each geodesic are transported back to x first, so the same
    stencil computes nabla^* nabla; div F = -sum_i d/dt <F, gamma_i'>.
    """
    frame = tangent_frame(x)
    F0 = F(x)
    lap = -0.0 * F0
    div = 0.0
    for i in range(frame.shape[1]):
        e = frame[:, i]
        vals = {}
        for t in (h, -h):
            p, gp = geodesic(x, e, t)
            Fp = F(p)
            if m == 1:
                vals[t] = transport_back(Fp, x, e, t)
            else:
                vals[t] = Fp
        lap = lap - (vals[h] - 2 * F0 + vals[-h]) / h ** 2
        if m == 1:
            div = div - (mink(vals[h], e) - mink(vals[-h], e)) / (2 * h)
    return F0, lap, div


def _tangent_norm(v: np.ndarray, x: np.ndarray) -> float:
    frame = tangent_frame(x)
    comps = np.array([mink(v, frame[:, i]) for i in range(frame.shape[1])])
    return float(np.sqrt(np.sum(np.abs(comps) ** 2)))


@dataclass
class ResidualReport:
    n: int
    m: int
    lam: complex
    fd_step: float
    grid_order: int
    points: List[np.ndarray]
    residuals: List[float]
    raw: List[float]
    raw_coarse: List[float]
    divergence: List[float]
    trace: List[float]
    scale: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def order(self) -> float:
        """Observed order of the plain second-order stencil between 2h and h (nan if both vanish)."""
        a, b = max(self.raw_coarse, default=0.0), max(self.raw, default=0.0)
        if a == 0.0 or b == 0.0:
            return float("nan")
        return math.log(a / b, 2)

    def as_dict(self):
        return {"n": self.n, "m": self.m, "lambda": _fmt_complex(self.lam), "fd_step": self.fd_step,
                "grid_order": self.grid_order, "max_residual": self.max_residual,
                "max_raw_residual": max(self.raw, default=0.0),
                "max_raw_residual_double_step": max(self.raw_coarse, default=0.0),
                "observed_order": self.order,
                "max_divergence": max(self.divergence, default=0.0),
                "max_trace": max(self.trace, default=0.0),
                "value_scale": self.scale}


def _fmt_complex(z) -> str:
    z = complex(z)
    return repr(z.real) if z.imag == 0 else f"{z.real!r},{z.imag!r}"


def sample_points(n: int, count: int, rng, scale: float = 0.6) -> List[np.ndarray]:
    return [random_hyperboloid_point(n, rng, scale) for _ in range(count)]


def pointwise_residual(F, x: np.ndarray, m: int, shift, h: float):
    """(residual vector at step h, divergence, value) of (nabla^* nabla - shift) F at x."""
    F0, lap, div = fd_operators(F, x, m, h)
    return lap - shift * F0, div, F0


def pde_residual(omega: BoundaryTensorField, lam, points: Sequence[np.ndarray],
                 grid: Optional[QuadratureGrid] = None, fd_step: float = 1e-3,
                 guard: bool = True) -> ResidualReport:
    """|(nabla^* nabla - s(n-s) - m) P_lam w| at each point, s = n + lam.

    The second-order stencil is applied at 2h and h; the reported residual is
    their Richardson combination (R_h + (R_h - R_2h)/3), the raw values give
    the observed order.  An order below 1 on a non-negligible residual means
    the step is in the cancellation regime.
    """
    n, m = omega.n, omega.m
    grid = grid or sphere_grid(n, 32)
    F = transform_function(omega, lam, grid)
    s = n + lam
    shift = s * (n - s) + m
    norm = (lambda v, x: abs(v)) if m == 0 else _tangent_norm
    res, raw, raw2, divs, traces = [], [], [], [], []
    scale = 0.0
    for x in points:
        x = np.asarray(x, dtype=float)
        r1, div, F0 = pointwise_residual(F, x, m, shift, fd_step)
        r2, div2, _ = pointwise_residual(F, x, m, shift, 2 * fd_step)
        res.append(float(norm(r1 + (r1 - r2) / 3, x)))
        raw.append(float(norm(r1, x)))
        raw2.append(float(norm(r2, x)))
        divs.append(float(abs(div + (div - div2) / 3)))
        traces.append(0.0)  # Lambda vanishes identically on 1-forms
        scale = max(scale, float(np.max(np.abs(F0))))
    rep = ResidualReport(n, m, lam, fd_step, grid.order, [np.asarray(p) for p in points],
                         res, raw, raw2, divs, traces, scale)
    if guard and max(raw2, default=0.0) > 1e-10 * max(scale, 1.0) and rep.order < 1.0:
        raise StepTooSmallError(f"observed order {rep.order:.2f}: step too small for the stencil")
    return rep


# -- equivariance --------------------------------------------------------------------------------

def boundary_jacobian(gamma: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """(T, U, dU) for gamma (1, y) = T (1, U); dU is the ambient (n+1)x(n+1) derivative."""
    g = np.asarray(gamma, dtype=float)
    v = g @ light(y)
    T, U = v[0], v[1:] / v[0]
    G = g[:, 1:]
    dU = (G[1:, :] - np.outer(U, G[0, :])) / T
    return T, U, dU


def pulled_back_field(omega: BoundaryTensorField, gamma, lam) -> BoundaryTensorField:
    """T_gamma^(lam + m) U_gamma^* w."""
    g = np.asarray(gamma, dtype=float)
    m = omega.m

    def ev(y):
        out = []
        for yy in y:
            T, U, dU = boundary_jacobian(g, yy)
            val = omega(U[None, :])[0]
            fac = T ** (lam + m)
            out.append(fac * val if m == 0 else fac * (dU.T @ val))
        return np.array(out)

    return BoundaryTensorField(omega.n, m, ev, "pullback")


def equivariance_residual(omega: BoundaryTensorField, lam, gamma, x,
                          grid: Optional[QuadratureGrid] = None) -> float:
    """|P(T^(lam+m) U^* w)(x) - (gamma^* P w)(x)|."""
    g = np.asarray(gamma, dtype=float)
    grid = grid or sphere_grid(omega.n, 48)
    x = np.asarray(x, dtype=float)
    lhs = _raw_transform(pulled_back_field(omega, g, lam), lam, x, grid)
    rhs = _raw_transform(omega, lam, g @ x, grid)
    if omega.m == 1:
        rhs = np.linalg.solve(g, rhs)
    return float(np.max(np.abs(lhs - rhs)))


def random_boosts(n: int, count: int, rng, scale: float = 0.5) -> List[np.ndarray]:
    return [random_lorentz(n, rng, scale) for _ in range(count)]


# -- fibre integration -----------------------------------------------------------------------------

def minus_section(omega: BoundaryTensorField, lam):
    """u(x, xi) = Phi_-^lam (tau_-^* w)(B_-): the section whose fibre integral is P_lam w."""
    def u(x, xi):
        v = x - xi
        phi = v[0]
        b = v[1:] / phi
        val = omega(b[None, :])[0]
        pw = phi ** lam
        if omega.m == 0:
            return pw * val
        return pw * twist_vectors(x, b[None, :], val[None, :], np.array([phi]))[0]

    return u


def fiber_pushforward(u, x, grid: Optional[QuadratureGrid] = None, n: Optional[int] = None):
    """int over the unit tangent sphere S_x of u(x, xi) dS(xi)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0] - 2 if n is None else n
    grid = grid or sphere_grid(n)
    frame = tangent_frame(x)
    vals = [u(x, frame @ eta) for eta in grid.points]
    return grid.integrate(np.array(vals))


# -- weak expansion near the boundary ---------------------------------------------------------------

@dataclass(frozen=True)
class ChartBump:
    """Smooth bump amp * exp(1 - 1/(1 - |y - c|^2/R^2)) in the half-space boundary chart."""

    center: Tuple[float, ...]
    radius: float
    amp: float = 1.0

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = np.atleast_2d(y)
        q = np.sum((y - np.asarray(self.center)) ** 2, axis=1) / self.radius ** 2
        out = np.zeros(y.shape[0])
        inside = q < 1
        out[inside] = self.amp * np.exp(1 - 1 / (1 - q[inside]))
        return out

    def box(self, nodes: int):
        """Tensor trapezoid grid over the bounding box (spectral for the bump)."""
        d = len(self.center)
        t = np.linspace(-self.radius, self.radius, nodes + 1)[1:-1]
        h = t[1] - t[0] if t.size > 1 else 2 * self.radius
        mesh = np.meshgrid(*([t] * d), indexing="ij")
        pts = np.stack([g.reshape(-1) for g in mesh], axis=1) + np.asarray(self.center)
        vals = self(pts)
        keep = vals > 0
        return pts[keep], np.full(keep.sum(), h ** d)

    def zero(self) -> bool:
        return self.amp == 0


def _radial_nodes(rho: float, reach: float, panel: float = 0.05, per_panel: int = 16):
    """Gauss-Legendre panels on [0, reach]: dyadic below max(rho, panel), uniform above."""
    from numpy.polynomial.legendre import leggauss
    x, w = leggauss(per_panel)
    edges = [0.0]
    a = min(rho / 8, panel)
    while a < panel:
        edges.append(a)
        a *= 2
    edges.append(panel)
    k = int(math.ceil(reach / panel))
    edges += [panel * (i + 1) for i in range(1, k)]
    edges = sorted(set(edges))
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes.append((hi - lo) / 2 * x + (hi + lo) / 2)
        weights.append((hi - lo) / 2 * w)
    return np.concatenate(nodes), np.concatenate(weights)


def boundary_pairing(omega: ChartBump, psi: ChartBump, lam, rho: float, n: int = 2,
                     box_nodes: int = 20, directions: int = 24) -> complex:
    """<P_lam w (rho, .), Psi> = int P_lam w(rho, y) Psi(y) dy in the half-space chart.

    w is the sphere function whose chart expression is omega; dS = kappa^n dy'
    and P = rho (1+|y'|^2)/(rho^2+|y-y'|^2), integrated in polar coordinates
    around y so the rho-scale peak is resolved.
    """
    _check_regime(n, lam)
    if omega.zero() or psi.zero():
        return 0.0
    ys, wy = psi.box(box_nodes)
    reach = (np.linalg.norm(np.asarray(psi.center) - np.asarray(omega.center))
             + psi.radius + omega.radius)
    t, wt = _radial_nodes(rho, reach)
    dirs = sphere_grid(n - 1, directions) if n > 1 else None
    expo = n + lam
    total = 0.0
    kern = rho ** expo / (rho * rho + t * t) ** expo * t ** (n - 1) * wt
    for y, w in zip(ys, wy):
        yp = y[None, None, :] + t[:, None, None] * dirs.points[None, :, :]
        flat = yp.reshape(-1, n)
        s = np.sum(flat * flat, axis=1)
        a = omega(flat) * (1 + s) ** expo * (2 / (1 + s)) ** n
        a = a.reshape(t.shape[0], -1) @ dirs.weights
        total += w * psi(y[None, :])[0] * np.sum(kern * a)
    return total


@dataclass
class FitResult:
    lam: complex
    n: int
    rhos: List[float]
    values: List[complex]
    f_minus0: complex
    f_plus0: complex
    noise_floor: float
    residual: float
    residual_no_corrections: float
    corrections: int

    def as_dict(self):
        return {"lambda": _fmt_complex(self.lam), "n": self.n, "rhos": self.rhos,
                "values": [float(np.real(v)) for v in self.values],
                "F_minus_0": float(np.real(self.f_minus0)), "F_plus_0": float(np.real(self.f_plus0)),
                "noise_floor": self.noise_floor, "fit_residual": self.residual,
                "fit_residual_without_even_corrections": self.residual_no_corrections,
                "even_corrections": self.corrections}


def dyadic_ladder(rho0: float = 0.4, K: int = 8) -> List[float]:
    return [rho0 * 2.0 ** (-k) for k in range(K + 1)]


def _two_branch_fit(rhos, vals, lam, n, corrections):
    r = np.asarray(rhos)
    cols = []
    for c in range(corrections + 1):
        cols.append(r ** (-lam) * r ** (2 * c))
    for c in range(corrections + 1):
        cols.append(r ** (n + lam) * r ** (2 * c))
    A = np.stack(cols, axis=1)
    norms = np.linalg.norm(A, axis=0)
    An = A / norms
    coef, *_ = np.linalg.lstsq(An, vals, rcond=None)
    resid = vals - An @ coef
    dof = max(len(vals) - A.shape[1], 1)
    sigma = math.sqrt(float(np.sum(np.abs(resid) ** 2)) / dof)
    cov = np.linalg.inv(An.T @ An)
    coef = coef / norms
    se = sigma * np.sqrt(np.abs(np.diag(cov))) / norms
    return coef, se, float(np.linalg.norm(resid))


def asymptotic_fit(omega: ChartBump, psi: ChartBump, lam, rhos: Optional[Sequence[float]] = None,
                   n: int = 2, corrections: int = 2, **quad) -> FitResult:
    """Fit rho^-lam F_-(rho) + rho^(n+lam) F_+(rho), F_+- even, to the boundary pairing."""
    if abs(np.real(n + 2 * lam)) < 0.05:
        raise IllConditionedFitError("branches rho^-lam and rho^(n+lam) nearly coincide")
    lam_r = np.real(lam)
    if np.imag(lam) == 0 and float(lam_r + n / 2).is_integer() and lam_r + n / 2 >= 0:
        raise IllConditionedFitError("lambda in -n/2 + N needs the logarithmic model")
    rhos = list(rhos) if rhos is not None else dyadic_ladder()
    vals = np.array([boundary_pairing(omega, psi, lam, r, n, **quad) for r in rhos])
    if not np.any(vals):
        return FitResult(lam, n, rhos, list(vals), 0.0, 0.0, 0.0, 0.0, 0.0, corrections)
    coef, se, resid = _two_branch_fit(rhos, vals, lam, n, corrections)
    _, _, resid0 = _two_branch_fit(rhos, vals, lam, n, 0)
    k = corrections + 1
    floor = float(se[0])
    return FitResult(lam, n, rhos, list(vals), coef[0], coef[k], floor, resid, resid0, corrections)
