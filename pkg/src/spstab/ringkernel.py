"""Exact arithmetic over Z/p^k and over the integers.

Matrices are plain nested lists (row-major).  Ring entries are kept as
canonical residues in ``range(modulus)``; integer matrices use Python ints,
so nothing here can overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .errors import NotAUnit, NotPrime, NotSkew, NotSquare, OddSize


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Ring:
    """The local ring Z/p^k (a prime field when k = 1)."""

    p: int
    k: int = 1

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    @property
    def residue_char(self) -> int:
        return self.p

    @property
    def kind(self) -> str:
        return "prime_field" if self.k == 1 else "zmod"

    def __str__(self):
        if self.k == 1:
            return f"F{self.p}"
        return f"Z/{self.modulus}"

    def elements(self) -> range:
        return range(self.modulus)

    def units(self) -> list[int]:
        return [x for x in range(self.modulus) if x % self.p]

    def maximal_ideal(self) -> list[int]:
        return list(range(0, self.modulus, self.p))

    def is_unit(self, x: int) -> bool:
        return x % self.p != 0

    def inv(self, x: int) -> int:
        return unit_inverse(self, x)

    def red(self, x: int) -> int:
        return x % self.modulus

    def residue(self, x: int) -> int:
        return x % self.p


def make_local_ring(p: int, k: int = 1) -> Ring:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise ValueError("exponent must be at least 1")
    return Ring(p, k)


def parse_ring(spec: str) -> Ring:
    """Parse ``"3^2"``, ``"9"`` or ``"5"`` into a ring; raises NotPrime otherwise."""
    s = str(spec).strip()
    try:
        if "^" in s:
            base, exp = s.split("^")
            p, k = int(base), int(exp)
        else:
            q = int(s)
            p, k = _prime_power(q)
    except (ValueError, TypeError):
        raise NotPrime(f"{spec!r}: not a prime power") from None
    if k < 1 or not is_prime(p):
        raise NotPrime(f"{spec!r}: not a prime power")
    return Ring(p, k)


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError
    p = 2
    while q % p:
        p += 1
    k = 0
    while q % p == 0:
        q //= p
        k += 1
    if q != 1:
        raise ValueError
    return p, k


def unit_inverse(R: Ring, x: int) -> int:
    x %= R.modulus
    if x % R.p == 0:
        raise NotAUnit(f"{x} is not a unit in {R}")
    return pow(x, -1, R.modulus)


# ---------------------------------------------------------------- matrices

def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> list[list[int]]:
    return [[0] * n for _ in range(m)]


def matmul(A, B, mod: int | None = None) -> list[list[int]]:
    n = len(B[0]) if B else 0
    Bt = list(zip(*B)) if B else [()] * n
    out = []
    for row in A:
        r = [sum(a * b for a, b in zip(row, col)) for col in Bt]
        if mod is not None:
            r = [x % mod for x in r]
        out.append(r)
    return out


def transpose(A):
    return [list(r) for r in zip(*A)]


def _int_det(M) -> int:
    # Bareiss fraction-free elimination; exact over Z.
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def det(M, R: Ring | None = None) -> int:
    """Determinant of a square matrix, reduced into R when given.

    The entries are lifted to Z and the integer determinant is computed with
    Bareiss elimination, so the result is exact even over non-domains.
    """
    if any(len(row) != len(M) for row in M):
        raise NotSquare("matrix is not square")
    d = _int_det(M)
    return d % R.modulus if R is not None else d


def _check_skew(A, mod):
    n = len(A)
    red = (lambda x: x % mod) if mod else (lambda x: x)
    for i in range(n):
        if len(A[i]) != n:
            raise NotSkew("matrix is not square")
        if red(A[i][i]):
            raise NotSkew("nonzero diagonal")
        for j in range(i + 1, n):
            if red(A[i][j] + A[j][i]):
                raise NotSkew("not antisymmetric")


def pfaffian(A, R: Ring | None = None) -> int:
    """Pfaffian by recursive expansion along the first remaining row."""
    mod = R.modulus if R is not None else 0
    n = len(A)
    _check_skew(A, mod)
    if n % 2:
        raise OddSize("Pfaffian needs even size")
    rows = tuple(tuple(r) for r in A)

    @lru_cache(maxsize=None)
    def pf(idx: tuple) -> int:
        if not idx:
            return 1
        i = idx[0]
        total = 0
        for pos in range(1, len(idx)):
            j = idx[pos]
            a = rows[i][j]
            if a == 0:
                continue
            rest = idx[1:pos] + idx[pos + 1:]
            term = a * pf(rest)
            total += -term if (pos - 1) % 2 else term
        return total % mod if mod else total

    return pf(tuple(range(n)))


# ------------------------------------------------------ Smith normal form

def smith_decomposition(M, want_inverses: bool = False, left: bool = True,
                        right: bool = True, ncols: int | None = None):
    """Smith normal form with transforms.

    Returns ``(D, U, V, Uinv, Vinv)`` with ``U*M*V == D``.  Transforms on a
    side switched off by ``left``/``right`` are returned as ``None``, and so
    are the inverses unless requested.  Pivots are chosen by minimal
    absolute value.  ``ncols`` gives the width when M has no rows.
    """
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    A = [list(r) for r in M]
    U = identity(m) if left else None
    V = identity(n) if right else None
    Ui = identity(m) if want_inverses and left else None
    Vi = identity(n) if want_inverses and right else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]
        if Ui is not None:
            for row in Ui:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]
        if Vi is not None:
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q == 0:
            return
        a, b = A[dst], A[src]
        for c in range(n):
            if b[c]:
                a[c] += q * b[c]
        if U is not None:
            a, b = U[dst], U[src]
            for c in range(m):
                if b[c]:
                    a[c] += q * b[c]
        if Ui is not None:
            for row in Ui:
                if row[dst]:
                    row[src] -= q * row[dst]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        if q == 0:
            return
        for row in A:
            if row[src]:
                row[dst] += q * row[src]
        if V is not None:
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]
        if Vi is not None:
            a, b = Vi[src], Vi[dst]
            for c in range(n):
                if b[c]:
                    a[c] -= q * b[c]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]
        if Ui is not None:
            for row in Ui:
                row[i] = -row[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            changed = False
            piv = A[t][t]
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    add_row(i, t, -(x // piv))
                    if A[i][t]:
                        swap_rows(i, t)
                        changed = True
                        break
            if changed:
                continue
            piv = A[t][t]
            row_t = A[t]
            for j in range(t + 1, n):
                x = row_t[j]
                if x:
                    add_col(j, t, -(x // piv))
                    if row_t[j]:
                        swap_cols(j, t)
                        changed = True
                        break
            if changed:
                continue
            piv = A[t][t]
            if abs(piv) != 1:
                bad = None
                for i in range(t + 1, m):
                    row = A[i]
                    for j in range(t + 1, n):
                        if row[j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is not None:
                    add_row(t, bad, 1)
                    continue
            break
        if A[t][t] < 0:
            negate_row(t)
        t += 1
    return A, U, V, Ui, Vi


def smith_normal_form(M):
    """Return ``(U, D, V)`` with ``U*M*V == D`` in Smith form."""
    D, U, V, _, _ = smith_decomposition(M)
    return U, D, V


def invariant_factors(M) -> list[int]:
    """Diagonal of the Smith form, zeros dropped."""
    D = smith_decomposition(M, left=False, right=False)[0]
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


@dataclass(frozen=True)
class FGAbelianGroup:
    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        for d in t:
            if d <= 1:
                raise ValueError("torsion factors must exceed 1")
        for a, b in zip(t, t[1:]):
            if b % a:
                raise ValueError("torsion factors must form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_diagonal(cls, diag: Sequence[int], n_generators: int) -> "FGAbelianGroup":
        """Cokernel of a map onto Z^n_generators whose Smith diagonal is ``diag``."""
        nz = [abs(d) for d in diag if d]
        torsion = sorted(d for d in nz if d > 1)
        return cls(n_generators - len(nz), tuple(torsion))

    @classmethod
    def from_relations(cls, rel, n_generators: int) -> "FGAbelianGroup":
        """Z^n modulo the column span of ``rel`` (an n x r matrix)."""
        if not rel or not rel[0]:
            return cls(n_generators, ())
        return cls.from_diagonal(invariant_factors(rel), n_generators)

    @property
    def order(self):
        if self.free_rank:
            return None
        o = 1
        for d in self.torsion:
            o *= d
        return o

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def invariants(self) -> list[int]:
        """Invariant factors with 0 standing for each free summand."""
        return list(self.torsion) + [0] * self.free_rank

    def __str__(self):
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def cyclic_tensor_power(R: Ring, t: int) -> tuple[int, Callable[[int], int]]:
    """Realize R^{(x)t} as Z/modulus, with a^{(x)t} sent to a^t."""
    if t < 1:
        raise ValueError("t must be at least 1")
    m = R.modulus
    return m, lambda a: pow(a % m, t, m)


def solve_mod(A, b, R: Ring) -> list[int]:
    """Solve A x = b over R for invertible A (Gauss-Jordan with unit pivots)."""
    n = len(A)
    m = R.modulus
    M = [[A[i][j] % m for j in range(n)] + [b[i] % m] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] % R.p), None)
        if piv is None:
            raise NotAUnit("matrix is not invertible")
        M[c], M[piv] = M[piv], M[c]
        inv = unit_inverse(R, M[c][c])
        M[c] = [x * inv % m for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % m for x, y in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


class Lattice:
    """Membership in the Z-span of a list of integer columns."""

    def __init__(self, cols, dim: int):
        cols = [list(c) for c in cols]
        if not cols:
            self.U = identity(dim)
            self.diag = [0] * dim
            return
        M = [[c[i] for c in cols] for i in range(dim)]
        D, U, _, _, _ = smith_decomposition(M, right=False)
        self.U = U
        self.diag = [D[i][i] if i < len(D[0]) else 0 for i in range(dim)]

    def contains(self, vec) -> bool:
        y = [sum(u * v for u, v in zip(row, vec)) for row in self.U]
        for yi, d in zip(y, self.diag):
            if d == 0:
                if yi:
                    return False
            elif yi % d:
                return False
        return True
