"""Collar operators, Jordan chains and the log-cancelling ansatz."""
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from hypres.quantum import (
    A_operator, LogSymbol, OneForm, SymbolError, chain_residuals, collar_laplacian,
    conjugated_identity_lhs, conjugated_identity_rhs, div_one_form, indicial_residuals,
    jordan_build, numeric_A_check, numeric_laplacian_function, phi_ansatz,
    q_operator_residual, rough_drho, rough_dy, symbol_ring, verify_phi_ansatz,
)

# -- sympy oracle in the flat collar g = rho^-2 (drho^2 + dy^2), n = 2 ----------------

RHO, Y1, Y2, S = sp.symbols("rho y1 y2 s", positive=True)
COORDS = (RHO, Y1, Y2)
G = sp.diag(*[RHO ** -2] * 3)
GINV = G.inv()
SQRTG = RHO ** -3


def _christoffel():
    N = len(COORDS)
    return [[[sum(GINV[k, l] * (sp.diff(G[l, i], COORDS[j]) + sp.diff(G[l, j], COORDS[i])
                                - sp.diff(G[i, j], COORDS[l])) for l in range(N)) / 2
              for j in range(N)] for i in range(N)] for k in range(N)]


GAMMA = _christoffel()


def sym_laplacian(f):
    N = len(COORDS)
    return -sum(sp.diff(SQRTG * GINV[i, j] * sp.diff(f, COORDS[j]), COORDS[i])
                for i in range(N) for j in range(N)) / SQRTG


def sym_rough(w):
    """-g^{ik} (nabla nabla w)_{ikj} for a 1-form w (list of components)."""
    N = len(COORDS)
    nw = [[sp.diff(w[j], COORDS[i]) - sum(GAMMA[k][i][j] * w[k] for k in range(N))
           for j in range(N)] for i in range(N)]
    out = []
    for j in range(N):
        acc = 0
        for i in range(N):
            for k in range(N):
                if GINV[i, k] == 0:
                    continue
                t = sp.diff(nw[k][j], COORDS[i])
                t -= sum(GAMMA[l][i][k] * nw[l][j] for l in range(N))
                t -= sum(GAMMA[l][i][j] * nw[k][l] for l in range(N))
                acc += GINV[i, k] * t
        out.append(sp.simplify(-acc))
    return out


def sym_div(w):
    N = len(COORDS)
    return -sum(GINV[i, i] * (sp.diff(w[i], COORDS[i]) - sum(GAMMA[k][i][i] * w[k] for k in range(N)))
                for i in range(N))


POINTS = [(0.7, 0.1, -0.2), (1.3, -0.5, 0.4), (0.35, 0.8, 0.25)]


def _close(symbol, expr, s_val=None):
    for rho, y1, y2 in POINTS:
        subs = {RHO: rho, Y1: y1, Y2: y2}
        if s_val is not None:
            subs[S] = s_val
        want = float(expr.subs(subs))
        got = symbol.evaluate(rho, (y1, y2), s_val)
        assert abs(got - want) < 1e-10 * max(1.0, abs(want))


def test_collar_laplacian_against_sympy():
    ring = symbol_ring(2)
    y1, y2 = ring.var("y1"), ring.var("y2")
    f = (LogSymbol.monomial(2, 1, 0, 2, y1 * y1 * y2 + 3)
         + LogSymbol.monomial(2, 0, Fraction(5, 3), 1, y2 ** 3))
    expr = RHO ** S * sp.log(RHO) ** 2 * (Y1 ** 2 * Y2 + 3) + RHO ** sp.Rational(5, 3) * sp.log(RHO) * Y2 ** 3
    _close(collar_laplacian(f), sym_laplacian(expr), s_val=0.37)


def test_rough_laplacian_on_dy_against_sympy():
    a = sp.Rational(7, 3)
    F = LogSymbol.monomial(2, 0, Fraction(7, 3), 1)
    w = [0, RHO ** a * sp.log(RHO), 0]
    _close(rough_dy(F), sym_rough(w)[1])


def test_rough_laplacian_on_drho_against_sympy():
    a = sp.Rational(-1, 2)
    Gs = LogSymbol.monomial(2, 0, Fraction(-1, 2), 2)
    w = [RHO ** a * sp.log(RHO) ** 2, 0, 0]
    rough = sym_rough(w)
    _close(rough_drho(Gs), rough[0])
    assert sp.simplify(rough[1]) == 0 and sp.simplify(rough[2]) == 0


def test_divergence_against_sympy():
    Gs = LogSymbol.monomial(2, 0, Fraction(3, 2), 1)
    w = [RHO ** sp.Rational(3, 2) * sp.log(RHO), RHO ** 4, 0]
    _close(div_one_form(Gs, [LogSymbol.monomial(2, 0, 4), LogSymbol(2)]), sym_div(w))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_indicial_identities(n):
    res = indicial_residuals(n)
    assert res and all(res.values()), res


def test_laplacian_of_constant():
    assert collar_laplacian(LogSymbol.monomial(3)).is_zero()


def test_numeric_laplacian_matches_symbol():
    ring = symbol_ring(2)
    f = LogSymbol.monomial(2, 0, Fraction(3, 2), 1, ring.var("y1") ** 2 + 1)
    fn = lambda rho, y: f.evaluate(rho, y)
    want = collar_laplacian(f).evaluate(0.8, (0.3, -0.1))
    assert abs(numeric_laplacian_function(fn, 0.8, (0.3, -0.1), 1e-4) - want) < 1e-6


# -- Jordan chains ---------------------------------------------------------------------

def test_order_one_chain():
    chain = jordan_build(2, Fraction(1, 3), 1, seeds=[1])
    assert chain.state(1) == LogSymbol.monomial(2, 0, Fraction(1, 3))
    assert phi_ansatz(chain, 1) == LogSymbol.monomial(2)


def test_order_two_chain_log_term():
    s0 = Fraction(1, 3)
    chain = jordan_build(2, s0, 2, seeds=[1, 0])
    assert chain.state(2) == LogSymbol.monomial(2, 0, s0, 1)
    assert all(chain_residuals(chain))
    lhs = conjugated_identity_lhs(chain, 2)
    assert lhs == phi_ansatz(chain, 1).theta().scale(2)


@pytest.mark.parametrize("n,s0,j", [
    (2, Fraction(1, 3), 1), (2, Fraction(1, 3), 4), (3, Fraction(-1, 3), 4),
    (2, "s", 3), (4, Fraction(7, 3), 3), (3, Fraction(5, 4), 4), (2, Fraction(-3, 2), 2),
])
def test_chain_and_ansatz(n, s0, j):
    rep = verify_phi_ansatz(jordan_build(n, s0, j))
    assert rep.ok, rep.as_dict()


def test_log_cancellation_order_three():
    chain = jordan_build(2, Fraction(2, 7), 3)
    raw = chain.state(3)
    assert not raw.log_free()
    assert phi_ansatz(chain, 3).log_free()
    assert phi_ansatz(chain, 3).even()


@pytest.mark.parametrize("n,s0,j", [(2, Fraction(5, 2), 4), (3, "s", 3), (3, Fraction(1, 5), 2)])
def test_one_form_chains(n, s0, j):
    rep = verify_phi_ansatz(jordan_build(n, s0, j, m=1))
    assert rep.ok, rep.as_dict()


def test_conjugated_identity_each_level():
    chain = jordan_build(3, Fraction(-1, 3), 4)
    for k in range(1, 5):
        assert conjugated_identity_lhs(chain, k) == conjugated_identity_rhs(chain, k)


def test_chain_errors():
    with pytest.raises(SymbolError):
        jordan_build(2, Fraction(1, 3), 0)
    with pytest.raises(SymbolError):
        jordan_build(2, 1, 2)
    with pytest.raises(SymbolError):
        jordan_build(4, 2, 1)
    with pytest.raises(SymbolError):
        jordan_build(2, Fraction(1, 3), 2, m=1, seeds=[symbol_ring(2).var("y1"), 1])


def test_resonant_level_is_reported():
    # s0 + 2 = n - s0 for n = 3, s0 = -1/2: the second level hits the partner root
    with pytest.raises(SymbolError, match="collision"):
        jordan_build(3, Fraction(-1, 2), 2)


def test_q_operator_scalar():
    f = LogSymbol.monomial(2, 1, 0, 0)
    first, second = q_operator_residual(f, "s", 0)
    assert first.is_zero() and second is None


def test_q_operator_one_form():
    n = 2
    phi = OneForm(n, LogSymbol(n), (LogSymbol.monomial(n, 1, -1), LogSymbol(n)))
    first, second = q_operator_residual(phi, "s", 1)
    assert first.is_zero() and second.is_zero()


def test_q_operator_rejects_y_dependence():
    ring = symbol_ring(2)
    bad = LogSymbol.monomial(2, 1, -1, 0, ring.var("y1"))
    with pytest.raises(SymbolError):
        q_operator_residual(OneForm(2, LogSymbol(2), (bad, LogSymbol(2))), "s", 1)


def test_A_operator_one_form_indicial():
    assert A_operator(LogSymbol.monomial(3, 1, -1), "s", m=1).is_zero()


def test_finite_difference_convergence():
    res = numeric_A_check(2, 1.7)
    assert res["errors"][-1] < 1e-4
    assert min(res["orders"]) > 1.8
