"""Horosphere operators on Phi_-^lambda-twisted symmetric tensor sections.

Sections are written in the equivariant frame: a section of Sym^m E is a
Sym^m(R^n)-valued function on the group, and every operator is built from
Lie derivatives along left-invariant fields (see :mod:`hypres.liealg`).
Functions live in the frame ring Q[lam, g{a}_{j}] extended to rational
functions, with lam the formal twist exponent.  A section stands for
Phi_-^lam * body, and a field D acts by

    D(Phi_-^lam f) = Phi_-^lam (D f + lam (D Phi_-)/Phi_- f).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import liealg
from .algebra import (Derivation, MultiPoly, PolyRing, RationalFn, as_rational_fn,
                      derive)
from .bands import p_rk_poly
from .hypgeo import rational_lorentz
from .symtensor import (SymTensor, TensorError, basis_keys, contract_basis,
                        lefschetz_L, lefschetz_Lambda, lefschetz_power, sym_product,
                        trace_free_part, unit)


class FrameError(ValueError):
    pass


@dataclass(frozen=True)
class TwistedSection:
    """Phi_-^lam (x) body, body a SymTensor with RationalFn coefficients."""

    n: int
    body: SymTensor

    def __post_init__(self):
        if self.body.fibre_dim != self.n:
            raise FrameError(f"body lives on R^{self.body.fibre_dim}, frame has n={self.n}")

    @property
    def degree(self) -> int:
        return self.body.degree

    def _same(self, other):
        if other.n != self.n:
            raise FrameError(f"frame mismatch: n={self.n} vs n={other.n}")

    def __add__(self, other):
        self._same(other)
        return TwistedSection(self.n, self.body + other.body)

    def __sub__(self, other):
        self._same(other)
        return TwistedSection(self.n, self.body - other.body)

    def scale(self, c):
        return TwistedSection(self.n, self.body.scale(c))

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def __eq__(self, other):
        if not isinstance(other, TwistedSection):
            return NotImplemented
        return self.n == other.n and self.body == other.body

    __hash__ = None


class HorosphereFrame:
    """Cached derivations and twist ratios for a fixed n."""

    def __init__(self, n: int):
        if n < 1:
            raise FrameError("n must be positive")
        self.n = n
        self.ring: PolyRing = liealg.frame_ring(n)
        self.lam = RationalFn(self.ring.var(liealg.LAMBDA))
        self.phi = liealg.phi_minus(n, self.ring)
        self.A = liealg.to_derivation(liealg.generator(n, "A"), self.ring)
        self.Nplus = [liealg.to_derivation(liealg.generator(n, "Nplus", k), self.ring)
                      for k in range(1, n + 1)]
        self.Nminus = [liealg.to_derivation(liealg.generator(n, "Nminus", k), self.ring)
                       for k in range(1, n + 1)]
        self._ratio: Dict[str, RationalFn] = {}

    def ratio(self, D: Derivation) -> RationalFn:
        """(D Phi_-)/Phi_-."""
        key = D.name
        if key not in self._ratio:
            self._ratio[key] = RationalFn(derive(D, self.phi), self.phi)
        return self._ratio[key]

    def N(self, sign: int) -> List[Derivation]:
        return self.Nplus if sign > 0 else self.Nminus

    # -- scalars and sections -------------------------------------------------------
    def rf(self, value) -> RationalFn:
        return as_rational_fn(value, self.ring)

    def section(self, body: SymTensor) -> TwistedSection:
        return TwistedSection(self.n, body.map(self.rf))

    def scalar_section(self, f) -> TwistedSection:
        return self.section(SymTensor.scalar(self.n, f))

    # -- operators --------------------------------------------------------------------
    def lie(self, D: Derivation, u: TwistedSection) -> TwistedSection:
        r = self.ratio(D)
        twist = self.lam * r if not r.is_zero() else None

        def act(f):
            out = derive(D, f)
            if twist is not None:
                out = out + twist * f
            return out

        return TwistedSection(self.n, u.body.map(act))

    def flow_A(self, u: TwistedSection) -> TwistedSection:
        return self.lie(self.A, u)

    def d(self, sign: int, u: TwistedSection) -> TwistedSection:
        out = SymTensor.zero(self.n, u.degree + 1)
        for k, D in enumerate(self.N(sign)):
            out = out + sym_product(unit(self.n, k), self.lie(D, u).body)
        return TwistedSection(self.n, out)

    def div(self, sign: int, u: TwistedSection) -> TwistedSection:
        if u.degree == 0:
            raise TensorError("divergence of a degree-0 section")
        out = SymTensor.zero(self.n, u.degree - 1)
        for k, D in enumerate(self.N(sign)):
            out = out - contract_basis(k, self.lie(D, u).body)
        return TwistedSection(self.n, out)

    def div_tensor(self, sign: int, u: TwistedSection) -> TwistedSection:
        """Divergence adjoint to d for the tensor-product inner product.

        That inner product is deg! times the permutation-sum one, so this is
        deg(u) * div.
        """
        return self.div(sign, u).scale(u.degree)

    def laplacian(self, sign: int, u: TwistedSection) -> TwistedSection:
        """[div, d] = div d - d div (the second term is absent in degree 0)."""
        out = self.div(sign, self.d(sign, u))
        if u.degree > 0:
            out = out - self.d(sign, self.div(sign, u))
        return out

    def laplacian_sum(self, sign: int, u: TwistedSection) -> TwistedSection:
        """-sum_k L_{N_k} L_{N_k}."""
        out = TwistedSection(self.n, SymTensor.zero(self.n, u.degree))
        for D in self.N(sign):
            out = out - self.lie(D, self.lie(D, u))
        return out

    def nabla_power_scalar(self, sign: int, f: TwistedSection, m: int) -> Dict[tuple, RationalFn]:
        """(nabla)^m of a scalar section as an unsymmetrized tensor {index sequence: coeff}.

        nabla = sum_k e_k (x) L_{N_k}; the sequence (k_1..k_m) carries
        L_{N_{k_m}} ... L_{N_{k_1}} f.
        """
        if f.degree != 0:
            raise FrameError("nabla power implemented for scalar sections")
        layer = {(): f}
        for _ in range(m):
            nxt = {}
            for seq, g in layer.items():
                for k, D in enumerate(self.N(sign)):
                    nxt[seq + (k,)] = self.lie(D, g)
            layer = nxt
        return {seq: g.body[()] for seq, g in layer.items()}

    def L(self, u: TwistedSection) -> TwistedSection:
        return TwistedSection(self.n, lefschetz_L(u.body))

    def Lambda(self, u: TwistedSection) -> TwistedSection:
        return TwistedSection(self.n, lefschetz_Lambda(u.body))

    # -- evaluation at exact group points -----------------------------------------------
    def group_values(self, gamma, lam=None) -> Dict[str, Fraction]:
        N = self.n + 2
        vals = {liealg.frame_var(a, j): Fraction(gamma[a][j]) for a in range(N) for j in range(N)}
        if lam is not None:
            vals[liealg.LAMBDA] = Fraction(lam)
        return vals

    def evaluate(self, u: TwistedSection, gamma, lam=None) -> Dict[tuple, object]:
        vals = self.group_values(gamma, lam)
        out = {}
        for K, c in u.body.coeffs.items():
            v = c.subs(vals)
            out[K] = v.evaluate({}) if not v.used_variables() else v
        return out


@lru_cache(maxsize=None)
def frame(n: int) -> HorosphereFrame:
    return HorosphereFrame(n)


# -- model states Phi_-^lam Q_- omega -------------------------------------------------------

def boundary_ring(n: int) -> PolyRing:
    """Q[y1, ..., y_{n+1}], ambient coordinates of the boundary sphere."""
    return PolyRing(tuple(f"y{a}" for a in range(1, n + 2)))


def _compose(p, images: Sequence[RationalFn], one: RationalFn) -> RationalFn:
    """Substitute y_a -> images[a] into a polynomial p over the boundary ring."""
    if not isinstance(p, MultiPoly):
        return one * Fraction(p)
    out = one * 0
    powers: Dict[tuple, RationalFn] = {}
    for exps, c in p.terms():
        term = one * c
        for a, e in enumerate(exps):
            if e:
                key = (a, e)
                if key not in powers:
                    powers[key] = images[a] ** e
                term = term * powers[key]
        out = out + term
    return out


def model_data(n: int):
    """B_-^a = (x - xi)_a / Phi_- and the columns tau_-(c_k) as rational functions.

    tau_-(c_k) = c_k,sp - c_k,0 B_-, equal on the group to the tangential
    projection of c_k at B_-, since <c_k, x - xi> = 0 there.
    """
    fr = frame(n)
    N = n + 2
    g = lambda a, j: fr.ring.var(liealg.frame_var(a, j))
    B = [RationalFn(g(a, 0) - g(a, N - 1), fr.phi) for a in range(1, N)]
    tau_cols = [[fr.rf(g(a, k)) - B[a - 1] * g(0, k) for a in range(1, N)]
                for k in range(1, n + 1)]
    return B, tau_cols


def build_twisted_state(n: int, omega: SymTensor, project: bool = False,
                        check_points: int = 3, seed: int = 0) -> TwistedSection:
    """u = Phi_-^lam (tensor^m tau_-^*) omega o B_-.

    omega is an ambient symmetric tensor on R^{n+1} with coefficients that are
    rationals or polynomials over :func:`boundary_ring`.  Only its restriction
    to T S^n matters.  The result is returned in trace-free form in the E
    frame; unless ``project`` is set the restriction of omega must already be
    trace-free, which is tested exactly at rational group elements.
    """
    if omega.fibre_dim != n + 1:
        raise FrameError(f"omega must live on R^{n + 1}")
    fr = frame(n)
    B, tau_cols = model_data(n)
    one = fr.rf(1)
    # tau^* e_a = sum_k (tau c_k)_a e_k
    pulled = [SymTensor(n, 1, {(k,): tau_cols[k][a] for k in range(n)}) for a in range(n + 1)]
    body = SymTensor.zero(n, omega.degree)
    for K, c in omega.coeffs.items():
        term = SymTensor.scalar(n, _compose(c, B, one))
        for a in K:
            term = sym_product(term, pulled[a])
        body = body + term
    if omega.degree >= 2:
        if not project:
            rng = np.random.default_rng(seed)
            trace = lefschetz_Lambda(body)
            for _ in range(check_points):
                gamma = rational_lorentz(n, rng)
                vals = fr.group_values(gamma)
                if any(c.evaluate(vals) != 0 for c in trace.coeffs.values()):
                    raise TensorError("omega is not trace-free on the tangent spaces of S^n")
        body = trace_free_part(body)
    return TwistedSection(n, body)


def tangential_trace_free_2(n: int, omega: SymTensor) -> SymTensor:
    """Trace-free part of the restriction of an ambient 2-tensor to T S^n.

    Returns a polynomial ambient tensor omega_0 with the same pullback as
    omega - (tr_T omega / n) (delta - y y) on the sphere, where
    tr_T omega = tr omega - omega(y, y) in the sigma convention.
    """
    if omega.degree != 2 or omega.fibre_dim != n + 1:
        raise FrameError("expected an ambient 2-tensor on R^{n+1}")
    ring = boundary_ring(n)
    ys = ring.gens()
    poly = lambda c: c if isinstance(c, MultiPoly) else ring.constant(c)
    # omega(v, v) for v = y is sum_K c_K e_K(y, y) = sum_K c_K * 2 * prod y_K / ... use polar form
    tr = ring.zero()
    for K, c in omega.coeffs.items():
        if K[0] == K[1]:
            tr = tr + poly(c) * 2
    quad = ring.zero()
    for K, c in omega.coeffs.items():
        # e_K(y, y) = 2 y_i y_j for the permutation-sum convention
        quad = quad + poly(c) * ys[K[0]] * ys[K[1]] * 2
    tr_t = tr - quad
    # g restricted to T S^n is (1/2) sum_a e_a sigma e_a - (1/2) y sigma y in this convention
    metric = SymTensor(n + 1, 2, {(a, a): Fraction(1, 2) for a in range(n + 1)})
    yy = SymTensor(n + 1, 2, {})
    for a in range(n + 1):
        for b in range(a, n + 1):
            c = ys[a] * ys[b] * (Fraction(1, 2) if a == b else 1)
            yy = yy + SymTensor(n + 1, 2, {(a, b): c})
    proj = metric - yy
    return omega.map(poly) - proj.map(lambda c: c * tr_t * Fraction(1, n))


# -- horocycle inversion identity (d_-)^m (Delta_+)^k (div_+)^r = L^k P_{r,k}(A) --------------------------

@dataclass
class InversionReport:
    n: int
    m: int
    r: int
    k: int
    exact_zero: bool
    residual: str
    lhs_nonzero: bool
    convention: str = "tensor"

    def as_dict(self):
        return {"n": self.n, "m": self.m, "r": self.r, "k": self.k,
                "div_convention": self.convention,
                "identity": "(d-)^m (Delta+)^k (div+)^r = L^k P_rk(A)",
                "exact_zero": self.exact_zero,
                "lambda_polynomial_residual": self.residual,
                "lhs_nonzero": self.lhs_nonzero,
                "status": "pass" if self.exact_zero else "fail"}


DIV_CONVENTIONS = ("tensor", "sym")


def verify_horocycle_inversion(n: int, m: int, k: int, omega: Optional[SymTensor] = None,
                               state: Optional[TwistedSection] = None,
                               convention: str = "tensor") -> InversionReport:
    """Exact check of (d_-)^m (Delta_+)^k (div_+)^r = L^k P_{r,k}(A) on a model state.

    ``convention`` picks the divergence in the (div_+)^r factor: "tensor" uses
    the adjoint for the tensor-product inner product, under which the
    constant 2^{k+r} m! (r!)^2 is exact; "sym" uses the permutation-sum
    adjoint (the one obeying [Lambda, d] = -2 div), under which one factor
    r! drops out.  Delta_+ acts in degree 0 where both agree.
    """
    if convention not in DIV_CONVENTIONS:
        raise ValueError(f"convention must be one of {DIV_CONVENTIONS}")
    r = m - 2 * k
    if r < 0 or k < 0:
        raise ValueError("need m = r + 2k with r, k >= 0")
    fr = frame(n)
    if state is None:
        state = build_twisted_state(n, omega if omega is not None else default_omega(n, r))
    if state.degree != r:
        raise ValueError(f"state has degree {state.degree}, expected r = {r}")
    u = state
    div = fr.div_tensor if convention == "tensor" else fr.div
    for _ in range(r):
        u = div(+1, u)
    for _ in range(k):
        u = fr.laplacian(+1, u)
    for _ in range(m):
        u = fr.d(-1, u)
    # A acts on the state by -lam
    p_val = p_rk_poly(n, r, k).eval_at(-fr.lam)
    if convention == "sym":
        p_val = p_val * Fraction(1, math.factorial(r))
    rhs = TwistedSection(n, lefschetz_power(state.body.scale(p_val), k))
    diff = u - rhs
    residual = "0" if diff.is_zero() else "; ".join(
        f"{K}: {c}" for K, c in sorted(diff.body.coeffs.items()))
    return InversionReport(n, m, r, k, diff.is_zero(), residual, not u.is_zero(), convention)


def default_omega(n: int, r: int) -> SymTensor:
    """Polynomial boundary tensor of degree r used for the model states."""
    ring = boundary_ring(n)
    ys = ring.gens()
    if r == 0:
        return SymTensor(n + 1, 0, {(): ys[0] + 2 * ys[-1] + 1})
    if r == 1:
        return SymTensor(n + 1, 1, {(0,): ys[1] + 1, (1,): ys[0] * 2, (n,): ring.constant(3)})
    if r == 2:
        base = SymTensor(n + 1, 2, {(0, 1): ring.one(), (0, 0): ys[1], (1, n): ys[0] + 1})
        return tangential_trace_free_2(n, base)
    raise ValueError("default boundary tensors provided for r <= 2")


def random_section(n: int, m: int, rng, terms: int = 2, deg: int = 2) -> TwistedSection:
    """Twisted section with random sparse polynomial components in the frame ring."""
    fr = frame(n)
    N = n + 2
    names = [liealg.frame_var(a, j) for a in range(N) for j in range(N)]
    body = {}
    for K in basis_keys(n, m):
        if rng.random() < 0.3 and body:
            continue
        p = fr.ring.zero()
        for _ in range(terms):
            mono = fr.ring.constant(int(rng.integers(-3, 4)) or 1)
            for _ in range(int(rng.integers(0, deg + 1))):
                mono = mono * fr.ring.var(names[int(rng.integers(len(names)))])
            p = p + mono
        body[K] = fr.rf(p)
    return TwistedSection(n, SymTensor(n, m, body))


def commutation_checks(n: int, u: TwistedSection) -> Dict[str, bool]:
    """Exact operator identities on one section; names mirror the table."""
    fr = frame(n)
    A = fr.flow_A
    out = {}

    def eq(a, b):
        return (a - b).is_zero()

    for s, name in ((+1, "+"), (-1, "-")):
        d = lambda v, s=s: fr.d(s, v)
        dv = lambda v, s=s: fr.div(s, v)
        lap = lambda v, s=s: fr.laplacian(s, v)
        du = d(u)
        out[f"[A,d{name}] = {name}d{name}"] = eq(A(du) - d(A(u)), du.scale(s))
        out[f"[L,d{name}] = 0"] = eq(fr.L(du), d(fr.L(u)))
        if u.degree >= 1:
            out[f"[Lambda,d{name}] = -2div{name}"] = eq(
                fr.Lambda(du) - d(fr.Lambda(u)) if u.degree >= 2 else fr.Lambda(du),
                dv(u).scale(-2))
        lu = fr.L(u)
        divl = dv(lu)
        out[f"[L,div{name}] = 2d{name}"] = eq(
            fr.L(dv(u)) - divl if u.degree >= 1 else divl.scale(-1), du.scale(2))
        if u.degree >= 1:
            du_ = dv(u)
            out[f"[A,div{name}] = {name}div{name}"] = eq(A(du_) - dv(A(u)), du_.scale(s))
        if u.degree >= 3:
            # vacuous below degree 3, where both sides fall off the bottom
            out[f"[Lambda,div{name}] = 0"] = eq(fr.Lambda(dv(u)), dv(fr.Lambda(u)))
        lu_ = lap(u)
        out[f"[A,Delta{name}] = {name}2Delta{name}"] = eq(A(lu_) - lap(A(u)), lu_.scale(2 * s))
        out[f"Delta{name} = -sum L_N^2"] = eq(lu_, fr.laplacian_sum(s, u))
    return out
