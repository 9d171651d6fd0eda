"""Band polynomials, exceptional set, non-vanishing scan and correspondence table."""
from fractions import Fraction

import pytest
import sympy as sp

from hypres.bands import (
    ExceptionalLambdaError, GaussianRational, admissible_grid, correspondence_table,
    exceptional_member, expected_zero, nonvanishing_scan, p_rk_eval, p_rk_poly,
    parse_lambda0,
)


def test_degenerate_polynomial():
    for n in (2, 3, 7):
        assert p_rk_poly(n, 0, 0).coeffs == (1,)


def test_evaluation_examples():
    assert p_rk_eval(2, 1, 0, -3) == -8
    for n in (2, 3, 4):
        assert p_rk_eval(n, 0, 1, 0) == 0


def test_expanded_matches_product():
    for n, r, k in [(2, 1, 1), (3, 2, 1), (5, 0, 3), (4, 3, 0)]:
        poly = p_rk_poly(n, r, k)
        for a in (Fraction(-7, 3), Fraction(1, 2), Fraction(5)):
            assert poly.eval_at(a) == p_rk_eval(n, r, k, a)
        assert poly.degree == r + 2 * k


def test_complex_evaluation_is_exact():
    a = GaussianRational(Fraction(1, 2), Fraction(3))
    v = p_rk_eval(3, 1, 1, a)
    w = complex(p_rk_eval(3, 1, 1, complex(a)))
    assert abs(complex(v) - w) < 1e-9 * abs(w)


def test_exceptional_set():
    assert exceptional_member(Fraction(-3, 2), 3)
    assert exceptional_member("-5/2", 3)
    assert not exceptional_member(-1, 3)
    assert not exceptional_member("-2,1", 2)
    assert not exceptional_member(Fraction(-7, 3), 2)


def test_parse_lambda0():
    assert parse_lambda0("-11/5")[0] == GaussianRational(Fraction(-11, 5))
    assert parse_lambda0("-2,1/2")[0] == GaussianRational(-2, Fraction(1, 2))
    lam, snapped = parse_lambda0(-2.2)
    assert lam == GaussianRational(Fraction(-11, 5)) and snapped
    with pytest.raises(ValueError):
        parse_lambda0("1,2,3")


def test_scan_without_exception():
    # -3 is exceptional for n <= 6; first admissible at n = 7
    rep = nonvanishing_scan(7, -3, 3)
    assert rep.ok
    assert not [r for r in rep.zeros() if r.in_band_bound]


def test_scan_detects_single_exception():
    rep = nonvanishing_scan(5, -2, 4)
    hits = [(r.m, r.r, r.k) for r in rep.zeros() if r.in_band_bound]
    assert hits == [(2, 0, 1)]
    assert rep.ok


def test_scan_refuses_exceptional():
    for n in (2, 3, 4):
        with pytest.raises(ExceptionalLambdaError):
            nonvanishing_scan(n, Fraction(-n, 2), 3)
    with pytest.raises(ExceptionalLambdaError):
        nonvanishing_scan(2, -2, 3)


def _sympy_zero(n, r, k, a0):
    A = sp.Symbol("A")
    expr = sp.Integer(2) ** (k + r) * sp.factorial(r + 2 * k) * sp.factorial(r) ** 2
    for j in range(1, k + 1):
        expr *= (A + r + j - 1) * (-2 * A + n - 2 * j)
    for j in range(1, r + 1):
        expr *= (A - n - j + 2)
    return sp.expand(expr).subs(A, a0) == 0


@pytest.mark.parametrize("n", [2, 3, 5])
def test_scan_against_sympy(n):
    grid = [g for g in admissible_grid(n) if g.is_real][:25]
    for lam in grid:
        rep = nonvanishing_scan(n, lam, 6)
        for row in rep.rows:
            a0 = -(sp.Rational(lam.re.numerator, lam.re.denominator) + row.m)
            assert row.zero == _sympy_zero(n, row.r, row.k, a0)
        assert rep.ok


def test_grid_size_and_admissibility():
    for n in (2, 3, 4, 5):
        grid = admissible_grid(n)
        assert len(grid) >= 40
        assert all(not exceptional_member(v, n) and v.re <= -1 for v in grid)


def test_expected_zero_pattern():
    lam = GaussianRational(-4)
    assert expected_zero(lam, 4, 0, 2)
    assert not expected_zero(lam, 4, 2, 1)
    assert not expected_zero(lam, 2, 0, 1)


def test_table_example():
    t = correspondence_table("-11/5", 2)
    got = [(e.m, e.k, e.tensor_order, str(e.s0), e.excluded) for e in t.entries]
    assert got == [(0, 0, 0, "-1/5", False), (1, 0, 1, "4/5", False),
                   (2, 0, 2, "9/5", False), (2, 1, 0, "9/5", False)]
    assert t.empty_from_band == 3


@pytest.mark.parametrize("lam,n", [("-2", 5), ("-4", 9)])
def test_table_exclusion_flags(lam, n):
    t = correspondence_table(lam, n)
    assert sorted({e.m for e in t.entries if e.excluded}) == [-int(lam)]


def test_table_empty_for_positive_lambda():
    t = correspondence_table(1, 2)
    assert t.entries == [] and t.empty_from_band == 0


def test_table_refuses_exceptional():
    with pytest.raises(ExceptionalLambdaError):
        correspondence_table(-1, 2)
