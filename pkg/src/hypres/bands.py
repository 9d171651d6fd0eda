"""Band bookkeeping: the inversion polynomial P_{r,k}, the exceptional set,
the non-vanishing scan and the resonance correspondence table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

SNAP_TOL = 1e-9


class ExceptionalLambdaError(ValueError):
    """lambda_0 lies in the excluded set -n/2 - N_0/2."""


@dataclass(frozen=True)
class GaussianRational:
    """re + i*im with exact rational parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def _co(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return format_rational(self.re) if self.im == 0 else \
            f"{format_rational(self.re)},{format_rational(self.im)}"

    def __repr__(self):
        return f"GaussianRational({self})"


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _snap(v: float) -> Tuple[Fraction, bool]:
    q = Fraction(v).limit_denominator(10**6)
    if abs(float(q) - v) > SNAP_TOL:
        raise ValueError(f"cannot snap {v!r} to a rational within {SNAP_TOL}")
    return q, q != Fraction(v)


def parse_lambda0(value) -> Tuple[GaussianRational, bool]:
    """Accept "re", "re,im" (rationals like -11/5 or decimals), numbers or complex.

    Returns the exact value and whether a float input had to be snapped.
    """
    if isinstance(value, GaussianRational):
        return value, False
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value), False
    if isinstance(value, float):
        q, snapped = _snap(value)
        return GaussianRational(q), snapped
    if isinstance(value, complex):
        a, s1 = _snap(value.real)
        b, s2 = _snap(value.imag)
        return GaussianRational(a, b), s1 or s2
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        if len(parts) not in (1, 2) or not all(parts):
            raise ValueError(f"malformed lambda0 {value!r}; expected 're' or 're,im'")
        vals = [Fraction(p) for p in parts]
        return GaussianRational(*vals), False
    raise TypeError(f"cannot interpret {value!r} as lambda0")


@dataclass(frozen=True)
class BandPolynomial:
    """P_{r,k}(A) with exact coefficients, lowest degree first."""

    n: int
    r: int
    k: int
    coeffs: Tuple[Fraction, ...]

    @property
    def m(self) -> int:
        return self.r + 2 * self.k

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coeffs[-1]

    def eval_at(self, a):
        """Horner evaluation at any ring element (Fraction, RationalFn, complex ...)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(format_rational(c) + ("" if i == 0 else "*A" if i == 1 else f"*A^{i}"))
        return " + ".join(terms) or "0"


def _polymul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def p_rk_factors(n: int, r: int, k: int):
    """(constant, [(a, b)]) with P_{r,k}(A) = constant * prod (a*A + b)."""
    const = 2 ** (k + r) * math.factorial(r + 2 * k) * math.factorial(r) ** 2
    lin = []
    for j in range(1, k + 1):
        lin.append((1, r + j - 1))
        lin.append((-2, n - 2 * j))
    for j in range(1, r + 1):
        lin.append((1, -n - j + 2))
    return const, lin


@lru_cache(maxsize=None)
def p_rk_poly(n: int, r: int, k: int) -> BandPolynomial:
    if n < 2 or r < 0 or k < 0:
        raise ValueError("need n >= 2 and r, k >= 0")
    const, lin = p_rk_factors(n, r, k)
    poly = [Fraction(const)]
    for a, b in lin:
        poly = _polymul(poly, [Fraction(b), Fraction(a)])
    return BandPolynomial(n, r, k, tuple(poly))


p_rk = p_rk_poly


def p_rk_eval(n: int, r: int, k: int, a0):
    """Exact on rationals and Gaussian rationals; float in, float out."""
    if isinstance(a0, str):
        a0 = parse_lambda0(a0)[0]
    const, lin = p_rk_factors(n, r, k)
    out = const
    for a, b in lin:
        out = out * (a0 * a + b)
    return out


def exceptional_member(lambda0, n: int) -> bool:
    """True iff lambda0 is in {-n/2 - j/2 : j = 0, 1, 2, ...}."""
    lam, _ = parse_lambda0(lambda0)
    if not lam.is_real:
        return False
    j = -2 * lam.re - n
    return j.denominator == 1 and j >= 0


def _require_admissible(lam: GaussianRational, n: int):
    if exceptional_member(lam, n):
        raise ExceptionalLambdaError(f"lambda0 = {lam} lies in -{format_rational(Fraction(n, 2))} - N_0/2")


def expected_zero(lam: GaussianRational, m: int, r: int, k: int) -> bool:
    """The single exception: m even, r = 0, k = m/2, lambda0 + m = 0."""
    return m > 0 and m % 2 == 0 and r == 0 and 2 * k == m and lam + m == 0


@dataclass
class ScanRow:
    m: int
    r: int
    k: int
    value: GaussianRational
    zero: bool
    expected_zero: bool
    in_band_bound: bool


@dataclass
class ScanReport:
    n: int
    lambda0: GaussianRational
    m_max: int
    rows: List[ScanRow]

    @property
    def unexpected(self) -> List[ScanRow]:
        return [row for row in self.rows if row.in_band_bound and row.zero != row.expected_zero]

    @property
    def ok(self) -> bool:
        return not self.unexpected

    def zeros(self) -> List[ScanRow]:
        return [row for row in self.rows if row.zero]


def nonvanishing_scan(n: int, lambda0, m_max: int) -> ScanReport:
    """Evaluate P_{r,k}(-(lambda0 + m)) for all r + 2k = m <= m_max.

    Rows outside the band bound Re lambda0 + m <= 0 are evaluated and listed
    but do not count toward the verdict.
    """
    lam, _ = parse_lambda0(lambda0)
    _require_admissible(lam, n)
    if lam.re > -1:
        raise ValueError("scan hypothesis requires Re lambda0 <= -1")
    rows = []
    for m in range(m_max + 1):
        a0 = -(lam + m)
        for k in range(m // 2 + 1):
            r = m - 2 * k
            val = p_rk_eval(n, r, k, a0)
            val = val if isinstance(val, GaussianRational) else GaussianRational(val)
            rows.append(ScanRow(m, r, k, val, val.is_zero(), expected_zero(lam, m, r, k),
                                lam.re + m <= 0))
    return ScanReport(n, lam, m_max, rows)


def admissible_grid(n: int, lo: int = -6, hi: int = -1,
                    denominators: Sequence[int] = (1, 2, 3, 4, 5, 7),
                    imaginary: Sequence[Fraction] = (Fraction(1, 2), Fraction(1), Fraction(3))):
    """Rational grid in [lo, hi] plus complex shifts, minus the exceptional set."""
    reals = sorted({Fraction(p, d) for d in denominators for p in range(lo * d, hi * d + 1)})
    vals = [GaussianRational(q) for q in reals]
    vals += [GaussianRational(q, b) for q in range(lo, hi + 1) for b in imaginary]
    return [v for v in vals if not exceptional_member(v, n)]


# -- correspondence table ----------------------------------------------------------------

@dataclass(frozen=True)
class BandEntry:
    m: int
    k: int
    tensor_order: int
    s0: GaussianRational
    excluded: bool = False
    reason: str = ""

    def as_dict(self):
        return {"m": self.m, "k": self.k, "tensor_order": self.tensor_order,
                "s0": str(self.s0), "excluded": self.excluded, "reason": self.reason}


@dataclass
class CorrespondenceTable:
    lambda0: GaussianRational
    n: int
    entries: List[BandEntry]
    empty_from_band: Optional[int]
    snapped: bool = False

    def as_dict(self):
        return {"lambda0": str(self.lambda0), "n": self.n, "snapped": self.snapped,
                "entries": [e.as_dict() for e in self.entries],
                "empty_from_band": self.empty_from_band,
                "empty_reason": "bands with Re lambda0 + m > 0 carry no states"}


def correspondence_table(lambda0, n: int) -> CorrespondenceTable:
    lam, snapped = parse_lambda0(lambda0)
    _require_admissible(lam, n)
    entries = []
    m = 0
    while lam.re + m <= 0:
        s0 = lam + (m + n)
        excl = lam.is_real and lam.re == -m and m > 0 and m % 2 == 0
        for k in range(m // 2 + 1):
            entries.append(BandEntry(
                m, k, m - 2 * k, s0, excl,
                "lambda0 in -2N with m = -lambda0: band carries no states" if excl else ""))
        m += 1
    return CorrespondenceTable(lam, n, entries, m, snapped)
