"""Exact rational algebra: multivariate polynomials, rational functions, derivations.

Polynomials are sparse over Q with graded-lexicographic term order, backed by
FLINT's ``fmpq_mpoly``.  Rational functions keep their denominator as a product
of monic irreducible factors, so lowest terms are maintained by trial division
instead of a full multivariate gcd after every operation.  Equality of two
normalized rational functions is therefore structural and every identity check
reduces to an exact zero test.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import flint

BigRational = Fraction

DEFAULT_TERM_BUDGET = 10**6


class DomainError(ValueError):
    """Operands live over incompatible variable sets."""


class ResourceError(RuntimeError):
    """A polynomial exceeded the configured term-count budget."""


def term_budget() -> int:
    raw = os.environ.get("HYPRES_BUDGET")
    return int(raw) if raw else DEFAULT_TERM_BUDGET


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions, flint rationals and ``"p/q"`` strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, flint.fmpq):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, flint.fmpz):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _fmpq(value) -> flint.fmpq:
    q = as_rational(value)
    return flint.fmpq(q.numerator, q.denominator)


def _check_budget(raw) -> None:
    if len(raw) > term_budget():
        raise ResourceError(
            f"polynomial with {len(raw)} terms exceeds budget {term_budget()}"
        )


class PolyRing:
    """Q[v1, ..., vk] with a fixed ordered tuple of variable names.

    Rings are interned per name tuple, so ``PolyRing(names) is PolyRing(names)``.
    """

    _cache: Dict[Tuple[str, ...], "PolyRing"] = {}

    def __new__(cls, names: Sequence[str]):
        names = tuple(names)
        ring = cls._cache.get(names)
        if ring is None:
            if len(set(names)) != len(names):
                raise ValueError(f"duplicate variable names in {names}")
            ring = super().__new__(cls)
            ring.names = names
            ring.ctx = flint.fmpq_mpoly_ctx.get(names if names else ("_",), "deglex")
            ring._index = {v: i for i, v in enumerate(names)}
            cls._cache[names] = ring
        return ring

    def __repr__(self):
        return f"PolyRing({', '.join(self.names)})"

    def __reduce__(self):
        return (PolyRing, (self.names,))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DomainError(f"variable {name!r} not in {self}") from None

    def var(self, name: str) -> "MultiPoly":
        return MultiPoly(self, self.ctx.gens()[self.index(name)])

    def gens(self) -> Tuple["MultiPoly", ...]:
        return tuple(MultiPoly(self, g) for g in self.ctx.gens()[: self.nvars])

    def constant(self, c) -> "MultiPoly":
        return MultiPoly(self, self.ctx.constant(_fmpq(c)))

    def zero(self) -> "MultiPoly":
        return self.constant(0)

    def one(self) -> "MultiPoly":
        return self.constant(1)

    def from_terms(self, terms: Mapping[Tuple[int, ...], object]) -> "MultiPoly":
        raw = self.ctx.from_dict({tuple(e): _fmpq(c) for e, c in terms.items() if c != 0})
        return MultiPoly(self, raw)

    def coerce(self, value) -> "MultiPoly":
        if isinstance(value, MultiPoly):
            if value.ring is self:
                return value
            return value.to_ring(self)
        return self.constant(value)


class MultiPoly:
    """Immutable polynomial over Q in the variables of its ring."""

    __slots__ = ("ring", "raw")

    def __init__(self, ring: PolyRing, raw):
        self.ring = ring
        self.raw = raw

    # -- construction helpers -------------------------------------------------
    def _wrap(self, raw) -> "MultiPoly":
        return MultiPoly(self.ring, raw)

    def _other(self, other):
        if isinstance(other, MultiPoly):
            if other.ring is not self.ring:
                raise DomainError(f"{self.ring} vs {other.ring}")
            return other.raw
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return self.ring.ctx.constant(_fmpq(other))
        return NotImplemented

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self._wrap(self.raw + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self._wrap(self.raw - o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self._wrap(o - self.raw)

    def __neg__(self):
        return self._wrap(-self.raw)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        raw = self.raw * o
        _check_budget(raw)
        return self._wrap(raw)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers need RationalFn")
        raw = self.raw**k
        _check_budget(raw)
        return self._wrap(raw)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return self._wrap(self.raw / _fmpq(other))
        return RationalFn(self) / other

    def __rtruediv__(self, other):
        return RationalFn(self.ring.coerce(other)) / RationalFn(self)

    def exquo(self, other: "MultiPoly") -> "MultiPoly":
        """Exact division; raises ValueError when ``other`` does not divide."""
        q, r = divmod(self.raw, self._other(other))
        if not r.is_zero():
            raise ValueError("division is not exact")
        return self._wrap(q)

    def divides_into(self, other: "MultiPoly"):
        """Return ``other / self`` if exact, else None."""
        q, r = divmod(other.raw, self.raw)
        return self._wrap(q) if r.is_zero() else None

    # -- comparisons ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RationalFn):
            return other == self
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self.raw == o

    def __hash__(self):
        return hash((self.ring.names, tuple(self.terms())))

    def is_zero(self) -> bool:
        return self.raw.is_zero()

    def __bool__(self):
        return not self.raw.is_zero()

    def is_constant(self) -> bool:
        return self.raw.is_constant()

    # -- inspection -----------------------------------------------------------
    def terms(self):
        """List of ``(exponent tuple, Fraction)`` in graded-lex order, leading first."""
        return [(tuple(e), as_rational(c)) for e, c in self.raw.terms()]

    def __len__(self):
        return len(self.raw)

    def used_variables(self) -> Tuple[str, ...]:
        used = set()
        for e, _ in self.raw.terms():
            used.update(i for i, k in enumerate(e) if k)
        return tuple(self.ring.names[i] for i in sorted(used))

    def total_degree(self) -> int:
        return -1 if self.is_zero() else int(self.raw.total_degree())

    def degree_in(self, name: str) -> int:
        if self.is_zero():
            return -1
        return int(self.raw.degrees()[self.ring.index(name)])

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return as_rational(self.raw.coefficient(0)) if len(self.raw) else Fraction(0)

    def leading_coefficient(self) -> Fraction:
        return as_rational(self.raw.leading_coefficient())

    # -- calculus / evaluation --------------------------------------------------
    def diff(self, name: str) -> "MultiPoly":
        return self._wrap(self.raw.derivative(self.ring.index(name)))

    def subs(self, values: Mapping[str, object]) -> "MultiPoly":
        """Substitute exact rational values for some variables."""
        mapping = {v: _fmpq(c) for v, c in values.items() if v in self.ring._index}
        return self._wrap(self.raw.subs(mapping)) if mapping else self

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        p = self.subs(values)
        if not p.is_constant():
            missing = [v for v in p.used_variables()]
            raise ValueError(f"unassigned variables: {missing}")
        return p.constant_value()

    def to_ring(self, ring: PolyRing) -> "MultiPoly":
        if ring is self.ring:
            return self
        for name in self.used_variables():
            if name not in ring._index:
                raise DomainError(f"variable {name!r} not in {ring}")
        index_map = [ring._index.get(v) for v in self.ring.names]
        terms = {}
        for e, c in self.raw.terms():
            new = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    new[index_map[i]] = int(k)
            terms[tuple(new)] = c
        return MultiPoly(ring, ring.ctx.from_dict(terms))

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if self.ring.nvars == 0:
            return str(self.constant_value())
        return self.raw.str()


def _monic_factors(poly: MultiPoly):
    """Split ``poly`` into (rational content, [(monic irreducible, exponent)])."""
    const, facs = poly.raw.factor()
    content = as_rational(const)
    out = []
    for f, e in facs:
        lc = f.leading_coefficient()
        content *= as_rational(lc) ** int(e)
        out.append((MultiPoly(poly.ring, f / lc), int(e)))
    return content, out


Scalar = Union[int, Fraction]


class RationalFn:
    """Quotient ``num / prod(f_i ** e_i)`` in lowest terms.

    The denominator factors are monic irreducible polynomials, so the
    denominator has leading coefficient 1 and ``gcd(num, den) == 1``.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num, den=None, *, _factors=None, _reduced=False):
        if isinstance(num, RationalFn):
            if den is not None:
                raise TypeError("use division for RationalFn / denominator")
            self.num, self.factors = num.num, num.factors
            return
        if not isinstance(num, MultiPoly):
            raise TypeError("numerator must be a MultiPoly")
        if _factors is not None:
            factors = list(_factors)
        elif den is None:
            factors = []
        else:
            den = num.ring.coerce(den)
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            content, factors = _monic_factors(den)
            num = num / content if content != 1 else num
        if num.is_zero():
            factors = []
        elif not _reduced:
            num, factors = _cancel(num, factors)
        self.num = num
        self.factors = tuple(sorted(factors, key=lambda fe: str(fe[0])))

    # -- structure ------------------------------------------------------------
    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @property
    def den(self) -> MultiPoly:
        d = self.ring.one()
        for f, e in self.factors:
            d = d * f**e
        return d

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.factors

    def _coerce(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            if other.ring is not self.ring:
                raise DomainError(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, MultiPoly):
            if other.ring is not self.ring:
                raise DomainError(f"{self.ring} vs {other.ring}")
            return RationalFn(other, _factors=(), _reduced=True)
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return RationalFn(self.ring.constant(other), _factors=(), _reduced=True)
        return NotImplemented

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        merged, scale_a, scale_b = _lcm_factors(self.factors, o.factors, self.ring)
        num = self.num * scale_a + o.num * scale_b
        return RationalFn(num, _factors=merged)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, _factors=self.factors, _reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            if other == 0:
                return RationalFn(self.ring.zero(), _factors=())
            return RationalFn(self.num * other, _factors=self.factors, _reduced=True)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RationalFn(self.ring.zero(), _factors=())
        # each numerator is already coprime to its own denominator
        n1, f2 = _cancel(self.num, o.factors)
        n2, f1 = _cancel(o.num, self.factors)
        merged = _add_exponents(f1, f2)
        return RationalFn(n1 * n2, _factors=merged, _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFn(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return RationalFn(self.num / other, _factors=self.factors, _reduced=True)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFn(self.num**k, _factors=[(f, e * k) for f, e in self.factors],
                          _reduced=True)

    # -- comparisons ----------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.factors == o.factors

    def __hash__(self):
        return hash((self.num, tuple((f, e) for f, e in self.factors)))

    # -- calculus / evaluation --------------------------------------------------
    def diff(self, name: str) -> "RationalFn":
        # (n / prod f^e)' = (n' * prod f - n * sum e f' prod_{j!=i} f_j) / (prod f^e * prod f)
        dn = self.num.diff(name)
        if not self.factors:
            return RationalFn(dn, _factors=(), _reduced=True)
        fs = [f for f, _ in self.factors]
        full = self.ring.one()
        for f in fs:
            full = full * f
        acc = dn * full
        for i, (f, e) in enumerate(self.factors):
            df = f.diff(name)
            if df.is_zero():
                continue
            rest = self.ring.one()
            for j, g in enumerate(fs):
                if j != i:
                    rest = rest * g
            acc = acc - self.num * df * rest * e
        return RationalFn(acc, _factors=[(f, e + 1) for f, e in self.factors])

    def subs(self, values: Mapping[str, object]) -> "RationalFn":
        return RationalFn(self.num.subs(values), self.den.subs(values))

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        d = self.den.evaluate(values)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return self.num.evaluate(values) / d

    def used_variables(self):
        used = set(self.num.used_variables())
        for f, _ in self.factors:
            used.update(f.used_variables())
        return tuple(v for v in self.ring.names if v in used)

    def to_ring(self, ring: PolyRing) -> "RationalFn":
        return RationalFn(self.num.to_ring(ring),
                          _factors=[(f.to_ring(ring), e) for f, e in self.factors],
                          _reduced=True)

    def __repr__(self):
        return f"RationalFn({self})"

    def __str__(self):
        if not self.factors:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _cancel(num: MultiPoly, factors):
    out = []
    for f, e in factors:
        while e > 0:
            q = f.divides_into(num)
            if q is None:
                break
            num, e = q, e - 1
        if e:
            out.append((f, e))
    return num, out


def _add_exponents(fa, fb):
    merged = [list(x) for x in fa]
    for f, e in fb:
        for slot in merged:
            if slot[0] == f:
                slot[1] += e
                break
        else:
            merged.append([f, e])
    return [(f, e) for f, e in merged if e]


def _lcm_factors(fa, fb, ring):
    """Merged factor list plus the multipliers bringing each side to it."""
    merged = [list(x) for x in fa]
    for f, e in fb:
        for slot in merged:
            if slot[0] == f:
                if e > slot[1]:
                    slot[1] = e
                break
        else:
            merged.append([f, e])
    scale_a = scale_b = ring.one()
    for f, e in merged:
        ea = next((x for g, x in fa if g == f), 0)
        eb = next((x for g, x in fb if g == f), 0)
        if e > ea:
            scale_a = scale_a * f ** (e - ea)
        if e > eb:
            scale_b = scale_b * f ** (e - eb)
    return [tuple(x) for x in merged], scale_a, scale_b


def as_rational_fn(value, ring: PolyRing) -> RationalFn:
    if isinstance(value, RationalFn):
        return value if value.ring is ring else value.to_ring(ring)
    return RationalFn(ring.coerce(value), _factors=(), _reduced=True)


class Derivation:
    """Linear vector field ``D = sum_v D(v) d/dv`` on a polynomial ring.

    ``action`` maps variable names to their polynomial images; absent variables
    are constants for ``D``.  The Leibniz rule holds by construction.
    """

    __slots__ = ("name", "ring", "action")

    def __init__(self, name: str, ring: PolyRing, action: Mapping[str, MultiPoly]):
        self.name = name
        self.ring = ring
        clean = {}
        for v, img in action.items():
            ring.index(v)
            img = ring.coerce(img)
            if not img.is_zero():
                clean[v] = img
        self.action = clean

    def __call__(self, f):
        return derive(self, f)

    def image(self, var: str) -> MultiPoly:
        return self.action.get(var, self.ring.zero())

    def is_zero(self) -> bool:
        return not self.action

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.ring is other.ring and self.action == other.action

    def __hash__(self):
        return hash((self.ring.names, frozenset(self.action.items())))

    def __add__(self, other: "Derivation") -> "Derivation":
        _same_ring(self, other)
        keys = set(self.action) | set(other.action)
        return Derivation(f"({self.name}+{other.name})", self.ring,
                          {v: self.image(v) + other.image(v) for v in keys})

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + other.scaled(-1)

    def scaled(self, c) -> "Derivation":
        return Derivation(f"{c}*{self.name}", self.ring,
                          {v: img * c for v, img in self.action.items()})

    __rmul__ = scaled

    def __repr__(self):
        body = ", ".join(f"{v}->{img}" for v, img in sorted(self.action.items()))
        return f"Derivation({self.name}: {body})"


def _same_ring(d1: Derivation, d2: Derivation):
    if d1.ring is not d2.ring:
        raise DomainError(f"{d1.ring} vs {d2.ring}")


def derive(D: Derivation, f):
    """Apply ``D`` to a polynomial or rational function: ``sum_v D(v) * df/dv``."""
    if isinstance(f, (int, Fraction)):
        return D.ring.zero()
    if f.ring is not D.ring:
        missing = [v for v in f.used_variables() if v not in D.ring._index]
        if missing:
            raise DomainError(f"variables {missing} outside the domain of {D.name}")
        f = f.to_ring(D.ring)
    if isinstance(f, MultiPoly):
        out = D.ring.zero()
        for v, img in D.action.items():
            df = f.diff(v)
            if not df.is_zero():
                out = out + img * df
        return out
    return derive_rational(D, f)


def derive_rational(D: Derivation, f: RationalFn) -> RationalFn:
    ring = D.ring
    dn = derive(D, f.num)
    if not f.factors:
        return RationalFn(dn, _factors=(), _reduced=True)
    fs = [g for g, _ in f.factors]
    full = ring.one()
    for g in fs:
        full = full * g
    acc = dn * full
    for i, (g, e) in enumerate(f.factors):
        dg = derive(D, g)
        if dg.is_zero():
            continue
        rest = ring.one()
        for j, h in enumerate(fs):
            if j != i:
                rest = rest * h
        acc = acc - f.num * dg * rest * e
    return RationalFn(acc, _factors=[(g, e + 1) for g, e in f.factors])


def commutator(D1: Derivation, D2: Derivation) -> Derivation:
    """``[D1, D2] = D1 D2 - D2 D1``, exact on the generators."""
    _same_ring(D1, D2)
    keys = set(D1.action) | set(D2.action)
    action = {v: derive(D1, D2.image(v)) - derive(D2, D1.image(v)) for v in keys}
    return Derivation(f"[{D1.name},{D2.name}]", D1.ring, action)


def zero_derivation(ring: PolyRing, name: str = "0") -> Derivation:
    return Derivation(name, ring, {})


@lru_cache(maxsize=None)
def rational_ring(names: Tuple[str, ...]) -> PolyRing:
    return PolyRing(names)
