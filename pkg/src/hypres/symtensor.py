"""Symmetric tensor algebra on a metric fibre E = R^n.

Basis tensors e_K are keyed by sorted index tuples K (indices 0..n-1).  The
product is the unnormalized permutation sum, so with the induced inner
product g(e_K, e_J) = delta_KJ * prod_i mult_i(K)!.  Under e_K <-> t^K the
algebra becomes the polynomial ring: sigma is multiplication, e_j-contraction
is d/dt_j, L multiplies by |t|^2 and Lambda is the flat Laplacian.

Coefficients may be Fractions, floats, or exact polynomials/rational
functions from :mod:`hypres.algebra`.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

import flint

Key = Tuple[int, ...]


class TensorError(ValueError):
    pass


def is_zero_scalar(c) -> bool:
    f = getattr(c, "is_zero", None)
    if f is not None:
        return f()
    return c == 0


@lru_cache(maxsize=None)
def basis_keys(n: int, m: int) -> Tuple[Key, ...]:
    """Sorted index sequences of Sym^m(R^n) in lexicographic order."""
    return tuple(itertools.combinations_with_replacement(range(n), m))


def key_norm2(K: Key) -> int:
    """g(e_K, e_K) = product of factorials of the multiplicities."""
    out = 1
    for c in Counter(K).values():
        out *= math.factorial(c)
    return out


def _merge(K: Key, J: Key) -> Key:
    return tuple(sorted(K + J))


def _remove(K: Key, j: int) -> Key:
    i = K.index(j)
    return K[:i] + K[i + 1:]


@dataclass(frozen=True)
class SymTensor:
    fibre_dim: int
    degree: int
    coeffs: Dict[Key, object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for K, c in self.coeffs.items():
            K = tuple(sorted(K))
            if len(K) != self.degree or any(not 0 <= i < self.fibre_dim for i in K):
                raise TensorError(f"index {K} inconsistent with Sym^{self.degree}(R^{self.fibre_dim})")
            if K in clean:
                c = clean[K] + c
            if is_zero_scalar(c):
                clean.pop(K, None)
            else:
                clean[K] = c
        object.__setattr__(self, "coeffs", clean)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, n: int, m: int) -> "SymTensor":
        return cls(n, m, {})

    @classmethod
    def scalar(cls, n: int, c=1) -> "SymTensor":
        return cls(n, 0, {(): c})

    @classmethod
    def basis(cls, n: int, K: Sequence[int], c=1) -> "SymTensor":
        return cls(n, len(K), {tuple(sorted(K)): c})

    @classmethod
    def vector(cls, components: Sequence) -> "SymTensor":
        n = len(components)
        return cls(n, 1, {(i,): c for i, c in enumerate(components)})

    # -- vector space -----------------------------------------------------------
    def _same(self, other: "SymTensor"):
        if other.fibre_dim != self.fibre_dim:
            raise TensorError(f"fibre mismatch: {self.fibre_dim} vs {other.fibre_dim}")
        if other.degree != self.degree:
            raise TensorError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._same(other)
        out = dict(self.coeffs)
        for K, c in other.coeffs.items():
            out[K] = out[K] + c if K in out else c
        return SymTensor(self.fibre_dim, self.degree, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SymTensor":
        return SymTensor(self.fibre_dim, self.degree,
                         {K: v * c for K, v in self.coeffs.items()})

    def __mul__(self, c):
        if isinstance(c, SymTensor):
            return sym_product(self, c)
        return self.scale(c)

    def __rmul__(self, c):
        return SymTensor(self.fibre_dim, self.degree,
                         {K: c * v for K, v in self.coeffs.items()})

    def map(self, fn: Callable) -> "SymTensor":
        return SymTensor(self.fibre_dim, self.degree, {K: fn(v) for K, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, K):
        return self.coeffs.get(tuple(sorted(K)), 0)

    def __eq__(self, other):
        if not isinstance(other, SymTensor):
            return NotImplemented
        if (self.fibre_dim, self.degree) != (other.fibre_dim, other.degree):
            return False
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self.coeffs:
            return f"SymTensor(n={self.fibre_dim}, m={self.degree}, 0)"
        body = " + ".join(f"({c})e{''.join(str(i + 1) for i in K) or '0'}"
                          for K, c in sorted(self.coeffs.items()))
        return f"SymTensor(n={self.fibre_dim}, m={self.degree}, {body})"

    def vector_of(self, keys=None) -> List:
        return [self.coeffs.get(K, 0) for K in (keys or basis_keys(self.fibre_dim, self.degree))]


def _check_fibre(u: SymTensor, v: SymTensor):
    if u.fibre_dim != v.fibre_dim:
        raise TensorError(f"fibre mismatch: {u.fibre_dim} vs {v.fibre_dim}")


def sym_product(u: SymTensor, v: SymTensor) -> SymTensor:
    _check_fibre(u, v)
    out: Dict[Key, object] = {}
    for K, a in u.coeffs.items():
        for J, b in v.coeffs.items():
            KJ = _merge(K, J)
            t = a * b
            out[KJ] = out[KJ] + t if KJ in out else t
    return SymTensor(u.fibre_dim, u.degree + v.degree, out)


def inner(u: SymTensor, v: SymTensor):
    _check_fibre(u, v)
    if u.degree != v.degree:
        raise TensorError(f"degree mismatch: {u.degree} vs {v.degree}")
    total = 0
    for K, a in u.coeffs.items():
        b = v.coeffs.get(K)
        if b is not None:
            total = total + a * b * key_norm2(K)
    return total


def contract_basis(j: int, w: SymTensor) -> SymTensor:
    """e_j contraction: e_j -| e_K = mult_j(K) e_{K minus one j}."""
    if w.degree == 0:
        raise TensorError("cannot contract a degree-0 tensor")
    out: Dict[Key, object] = {}
    for K, c in w.coeffs.items():
        mult = K.count(j)
        if mult:
            R = _remove(K, j)
            t = c * mult
            out[R] = out[R] + t if R in out else t
    return SymTensor(w.fibre_dim, w.degree - 1, out)


def contract(u: SymTensor, w: SymTensor) -> SymTensor:
    """Metric adjoint of ``u sigma``: inner(contract(u, w), z) = inner(w, u sigma z)."""
    _check_fibre(u, w)
    if u.degree != 1:
        raise TensorError("contraction vector must have degree 1")
    out = SymTensor.zero(w.fibre_dim, w.degree - 1) if w.degree else None
    if out is None:
        raise TensorError("cannot contract a degree-0 tensor")
    for (j,), c in u.coeffs.items():
        out = out + contract_basis(j, w).scale(c)
    return out


def unit(n: int, j: int, c=1) -> SymTensor:
    return SymTensor(n, 1, {(j,): c})


def lefschetz_L(u: SymTensor) -> SymTensor:
    n = u.fibre_dim
    out: Dict[Key, object] = {}
    for K, c in u.coeffs.items():
        for i in range(n):
            KK = _merge(K, (i, i))
            out[KK] = out[KK] + c if KK in out else c
    return SymTensor(n, u.degree + 2, out)


def lefschetz_Lambda(u: SymTensor) -> SymTensor:
    if u.degree < 2:
        return SymTensor.zero(u.fibre_dim, 0)
    n = u.fibre_dim
    out: Dict[Key, object] = {}
    for K, c in u.coeffs.items():
        counts = Counter(K)
        for i, mult in counts.items():
            if mult >= 2:
                R = _remove(_remove(K, i), i)
                t = c * (mult * (mult - 1))
                out[R] = out[R] + t if R in out else t
    return SymTensor(n, u.degree - 2, out)


def lefschetz_power(u: SymTensor, k: int) -> SymTensor:
    for _ in range(k):
        u = lefschetz_L(u)
    return u


# -- exact linear algebra on basis coordinates ----------------------------------

def _operator_matrix(op, n: int, m_in: int, m_out: int) -> flint.fmpq_mat:
    rows, cols = basis_keys(n, m_out), basis_keys(n, m_in)
    index = {K: i for i, K in enumerate(rows)}
    M = flint.fmpq_mat(len(rows), len(cols))
    for j, K in enumerate(cols):
        img = op(SymTensor.basis(n, K, Fraction(1)))
        for R, c in img.coeffs.items():
            M[index[R], j] = flint.fmpq(c.numerator, c.denominator)
    return M


@lru_cache(maxsize=None)
def _lambda_matrix(n: int, m: int) -> flint.fmpq_mat:
    return _operator_matrix(lefschetz_Lambda, n, m, m - 2)


@lru_cache(maxsize=None)
def _lambda_L_inverse(n: int, m: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Exact inverse of Lambda o L on Sym^m(R^n)."""
    M = _operator_matrix(lambda t: lefschetz_Lambda(lefschetz_L(t)), n, m, m)
    if M.rank() != M.nrows():
        raise TensorError(f"singular Gram system for n={n}, m={m}")
    inv = M.inv()
    return tuple(tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(inv.ncols()))
                 for i in range(inv.nrows()))


def lambda_kernel_dim(n: int, m: int) -> int:
    """dim ker(Lambda) on Sym^m(R^n), by exact elimination."""
    total = len(basis_keys(n, m))
    if m < 2:
        return total
    return total - _lambda_matrix(n, m).rank()


def trace_free_dim(n: int, m: int) -> int:
    """Closed form C(n+m-1, m) - C(n+m-3, m-2)."""
    lower = math.comb(n + m - 3, m - 2) if m >= 2 else 0
    return math.comb(n + m - 1, m) - lower


@dataclass(frozen=True)
class TraceDecomposition:
    parts: Tuple[Tuple[int, SymTensor], ...]

    def reassemble(self) -> SymTensor:
        out = None
        for k, v in self.parts:
            term = lefschetz_power(v, k)
            out = term if out is None else out + term
        return out

    def part(self, k: int) -> SymTensor:
        for kk, v in self.parts:
            if kk == k:
                return v
        raise KeyError(k)


def _apply_matrix(mat, vec):
    out = []
    for row in mat:
        acc = 0
        for c, v in zip(row, vec):
            if c and not is_zero_scalar(v):
                acc = acc + v * c
        out.append(acc)
    return out


def trace_free_decompose(u: SymTensor) -> TraceDecomposition:
    """Split u = sum_k L^k v_k with Lambda v_k = 0.

    Sym^m = ker(Lambda) + im(L) orthogonally, so v_0 = u - L w where
    (Lambda L) w = Lambda u; then recurse on w.
    """
    n = u.fibre_dim
    if n < 2:
        raise TensorError("trace-free decomposition needs fibre_dim >= 2")
    parts = []
    k = 0
    cur = u
    while True:
        if cur.degree < 2:
            parts.append((k, cur))
            break
        lam_u = lefschetz_Lambda(cur)
        keys = basis_keys(n, cur.degree - 2)
        w_vec = _apply_matrix(_lambda_L_inverse(n, cur.degree - 2), lam_u.vector_of(keys))
        w = SymTensor(n, cur.degree - 2, dict(zip(keys, w_vec)))
        parts.append((k, cur - lefschetz_L(w)))
        cur, k = w, k + 1
    return TraceDecomposition(tuple(parts))


def trace_free_part(u: SymTensor) -> SymTensor:
    return trace_free_decompose(u).part(0)
