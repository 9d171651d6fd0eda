"""Matrix generators of so(1, n+1) and their realization as derivations.

Indices run 0..n+1 with metric eta = diag(-1, 1, ..., 1).  The derivation
representation acts on the *frame ring*: polynomial functions of the entries
``g{a}_{j}`` of a group element gamma, whose column 0 is the base point x,
column n+1 is the direction xi and columns 1..n span the fibre of E.  A Lie
algebra element M becomes the left-invariant field d/dt f(gamma exp(tM)), so
``[D(M1), D(M2)] = D([M1, M2])`` (sign EPSILON = +1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Derivation, PolyRing

# global sign of the derivation representation, fixed by A(Phi_-) = -Phi_-
EPSILON = 1

LAMBDA = "lam"


class LorentzError(ValueError):
    pass


@dataclass(frozen=True)
class LorentzMatrix:
    n: int
    entries: Tuple[Tuple[Fraction, ...], ...]
    label: str = ""

    @property
    def size(self) -> int:
        return self.n + 2

    @classmethod
    def from_rows(cls, n: int, rows, label: str = "") -> "LorentzMatrix":
        entries = tuple(tuple(Fraction(v) for v in row) for row in rows)
        if len(entries) != n + 2 or any(len(r) != n + 2 for r in entries):
            raise LorentzError(f"expected {(n + 2)}x{(n + 2)} matrix")
        return cls(n, entries, label)

    @classmethod
    def zero(cls, n: int) -> "LorentzMatrix":
        return cls.from_rows(n, [[0] * (n + 2) for _ in range(n + 2)], "0")

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def _check(self, other: "LorentzMatrix"):
        if other.n != self.n:
            raise LorentzError(f"size mismatch: n={self.n} vs n={other.n}")

    def __add__(self, other):
        self._check(other)
        return LorentzMatrix(self.n, tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "LorentzMatrix":
        c = Fraction(c)
        return LorentzMatrix(self.n, tuple(tuple(c * a for a in r) for r in self.entries))

    def __rmul__(self, c):
        return self.scale(c)

    def matmul(self, other: "LorentzMatrix") -> "LorentzMatrix":
        self._check(other)
        N = self.size
        cols = list(zip(*other.entries))
        return LorentzMatrix(self.n, tuple(
            tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols)
            for row in self.entries))

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.entries for v in r)

    def is_infinitesimal_isometry(self) -> bool:
        # M^T eta + eta M = 0  <=>  eta_ii M_ij + eta_jj M_ji = 0
        N = self.size
        eta = [-1] + [1] * (N - 1)
        return all(eta[i] * self[i, j] + eta[j] * self[j, i] == 0
                   for i in range(N) for j in range(N))

    def __eq__(self, other):
        if not isinstance(other, LorentzMatrix):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, self.entries))

    def to_lists(self) -> List[List[Fraction]]:
        return [list(r) for r in self.entries]


def _unit(n: int, i: int, j: int) -> LorentzMatrix:
    rows = [[0] * (n + 2) for _ in range(n + 2)]
    rows[i][j] = 1
    return LorentzMatrix.from_rows(n, rows)


def generator(n: int, kind: str, *indices: int) -> LorentzMatrix:
    """Exact generator matrix.

    kind is one of ``R`` (i, j in 1..n+1), ``P`` (k in 1..n+1), ``A``,
    ``Nplus`` / ``Nminus`` (k in 1..n).
    """
    if n < 1:
        raise LorentzError("n must be positive")

    def need(count):
        if len(indices) != count:
            raise LorentzError(f"{kind} takes {count} indices, got {len(indices)}")

    def in_range(k, hi):
        if not 1 <= k <= hi:
            raise LorentzError(f"index {k} outside 1..{hi} for {kind}")

    if kind == "R":
        need(2)
        i, j = indices
        in_range(i, n + 1)
        in_range(j, n + 1)
        M = _unit(n, i, j) - _unit(n, j, i)
        label = f"R{i}{j}"
    elif kind == "P":
        need(1)
        (k,) = indices
        in_range(k, n + 1)
        M = _unit(n, 0, k) + _unit(n, k, 0)
        label = f"P{k}"
    elif kind == "A":
        need(0)
        M = generator(n, "P", n + 1)
        label = "A"
    elif kind in ("Nplus", "Nminus"):
        need(1)
        (k,) = indices
        in_range(k, n)
        sign = 1 if kind == "Nplus" else -1
        M = generator(n, "P", k) + generator(n, "R", n + 1, k).scale(sign)
        label = f"N{'+' if sign > 0 else '-'}{k}"
    else:
        raise LorentzError(f"unknown generator kind {kind!r}")
    return LorentzMatrix(n, M.entries, label)


def bracket(M1: LorentzMatrix, M2: LorentzMatrix) -> LorentzMatrix:
    return M1.matmul(M2) - M2.matmul(M1)


def basis(n: int) -> List[LorentzMatrix]:
    """Ordered basis of so(1, n+1): A, N+_k, N-_k, R_ij (1 <= i < j <= n)."""
    out = [generator(n, "A")]
    out += [generator(n, "Nplus", k) for k in range(1, n + 1)]
    out += [generator(n, "Nminus", k) for k in range(1, n + 1)]
    out += [generator(n, "R", i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return out


def decompose(M: LorentzMatrix) -> Dict[str, Fraction]:
    """Coordinates of M in :func:`basis`; raises if M is not in the span.

    The basis is triangular in the entries (0, n+1), (0, k), (n+1, k), (i, j)
    so the solve is a direct read-off followed by an exact residual check.
    """
    n = M.n
    coeffs: Dict[str, Fraction] = {}
    a = M[0, n + 1]
    if a:
        coeffs["A"] = a
    for k in range(1, n + 1):
        # P_k = (N+ + N-)/2 sits at (0,k); R_{n+1,k} = (N+ - N-)/2 at (n+1,k)
        p, r = M[0, k], M[n + 1, k]
        if p + r:
            coeffs[f"N+{k}"] = (p + r) / 2
        if p - r:
            coeffs[f"N-{k}"] = (p - r) / 2
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if M[i, j]:
                coeffs[f"R{i}{j}"] = M[i, j]
    rebuilt = LorentzMatrix.zero(n)
    lookup = {g.label: g for g in basis(n)}
    for name, c in coeffs.items():
        rebuilt = rebuilt + lookup[name].scale(c)
    if rebuilt != M:
        raise LorentzError("matrix is not in so(1, n+1)")
    return coeffs


def _relations(n: int, gen=generator):
    """Yield (relation name, lhs, rhs) for every so(1, n+1) commutator relation."""
    A = gen(n, "A")
    Np = {k: gen(n, "Nplus", k) for k in range(1, n + 1)}
    Nm = {k: gen(n, "Nminus", k) for k in range(1, n + 1)}
    Nsig = {"+": Np, "-": Nm}
    zero = LorentzMatrix.zero(n)
    idx = range(1, n + 1)

    def R(i, j):
        return zero if i == j else gen(n, "R", i, j)

    def delta(i, j):
        return 1 if i == j else 0

    for s, sign in (("+", 1), ("-", -1)):
        for i in idx:
            yield f"[A,N{s}_{i}] = {s}N{s}_{i}", bracket(A, Nsig[s][i]), Nsig[s][i].scale(sign)
        for i, j in itertools.product(idx, idx):
            yield f"[N{s}_{i},N{s}_{j}] = 0", bracket(Nsig[s][i], Nsig[s][j]), zero
    for i, j in itertools.product(idx, idx):
        rhs = A.scale(2 * delta(i, j)) + R(i, j).scale(2)
        yield f"[N+_{i},N-_{j}] = 2A d_ij + 2R_ij", bracket(Np[i], Nm[j]), rhs
    for i, j in itertools.product(idx, idx):
        yield f"[R_{i}{j},A] = 0", bracket(R(i, j), A), zero
    for i, j, k in itertools.product(idx, idx, idx):
        for s in ("+", "-"):
            rhs = Nsig[s][i].scale(delta(j, k)) - Nsig[s][j].scale(delta(i, k))
            yield (f"[R_{i}{j},N{s}_{k}] = N{s}_{i} d_jk - N{s}_{j} d_ik",
                   bracket(R(i, j), Nsig[s][k]), rhs)
    for i, j, k, l in itertools.product(idx, idx, idx, idx):
        rhs = (R(i, l).scale(delta(j, k)) + R(j, k).scale(delta(i, l))
               - R(i, k).scale(delta(j, l)) - R(j, l).scale(delta(i, k)))
        yield (f"[R_{i}{j},R_{k}{l}] = R_il d_jk + R_jk d_il - R_ik d_jl - R_jl d_ik",
               bracket(R(i, j), R(k, l)), rhs)


def verify_structure_constants(n: int, max_n: int = 8, gen=generator) -> Dict[str, str]:
    """Check every commutator relation exactly; one pass/fail entry per relation family.

    ``gen`` can be swapped for a corrupted generator factory in negative tests.
    """
    if not 2 <= n <= max_n:
        raise LorentzError(f"n must lie in 2..{max_n}")
    report: Dict[str, str] = {}
    for name, lhs, rhs in _relations(n, gen):
        ok = lhs == rhs
        if report.get(name) != "fail":
            report[name] = "pass" if ok else "fail"
    for g in basis(n):
        name = "M^T eta + eta M = 0"
        ok = gen(n, *_kind_args(g.label)).is_infinitesimal_isometry()
        if report.get(name) != "fail":
            report[name] = "pass" if ok else "fail"
    return report


def _kind_args(label: str):
    if label == "A":
        return ("A",)
    if label.startswith("N+"):
        return ("Nplus", int(label[2:]))
    if label.startswith("N-"):
        return ("Nminus", int(label[2:]))
    return ("R", int(label[1]), int(label[2]))


# -- frame ring and derivations ------------------------------------------------

def frame_var(a: int, j: int) -> str:
    return f"g{a}_{j}"


@lru_cache(maxsize=None)
def frame_ring(n: int) -> PolyRing:
    N = n + 2
    return PolyRing((LAMBDA,) + tuple(frame_var(a, j) for a in range(N) for j in range(N)))


def to_derivation(M: LorentzMatrix, ring: Optional[PolyRing] = None) -> Derivation:
    """Left-invariant field of M on the frame ring: g_{a,j} -> sum_i g_{a,i} M_{ij}."""
    n = M.n
    ring = ring or frame_ring(n)
    N = n + 2
    action = {}
    for a in range(N):
        for j in range(N):
            img = ring.zero()
            for i in range(N):
                c = M[i, j]
                if c:
                    img = img + ring.var(frame_var(a, i)) * c
            if not img.is_zero():
                action[frame_var(a, j)] = img
    return Derivation(M.label or "M", ring, action)


def x_coord(n: int, a: int, ring: Optional[PolyRing] = None):
    return (ring or frame_ring(n)).var(frame_var(a, 0))


def xi_coord(n: int, a: int, ring: Optional[PolyRing] = None):
    return (ring or frame_ring(n)).var(frame_var(a, n + 1))


def phi_minus(n: int, ring: Optional[PolyRing] = None):
    """Phi_- = x_0 - xi_0 as a frame-ring polynomial."""
    return x_coord(n, 0, ring) - xi_coord(n, 0, ring)


def phi_plus(n: int, ring: Optional[PolyRing] = None):
    return x_coord(n, 0, ring) + xi_coord(n, 0, ring)


def verify_derivation_representation(n: int) -> Dict[str, object]:
    """Check [D(M1), D(M2)] = EPSILON * D([M1, M2]) on all basis pairs plus anchors."""
    from .algebra import commutator, derive

    gens = basis(n)
    ders = {g.label: to_derivation(g) for g in gens}
    failures = []
    for g1, g2 in itertools.combinations_with_replacement(gens, 2):
        lhs = commutator(ders[g1.label], ders[g2.label])
        rhs = to_derivation(bracket(g1, g2)).scaled(EPSILON)
        if lhs.action != rhs.action:
            failures.append(f"[{g1.label},{g2.label}]")
    phi = phi_minus(n)
    anchor_A = derive(ders["A"], phi) == -phi
    anchor_N = all(derive(ders[f"N-{k}"], phi).is_zero() for k in range(1, n + 1))
    anchor_plus = derive(ders["A"], phi_plus(n)) == phi_plus(n)
    return {
        "pairs_checked": len(gens) * (len(gens) + 1) // 2,
        "failures": failures,
        "A(Phi-) = -Phi-": anchor_A,
        "N-_k(Phi-) = 0": anchor_N,
        "A(Phi+) = Phi+": anchor_plus,
        "epsilon": EPSILON,
        "ok": not failures and anchor_A and anchor_N and anchor_plus,
    }
