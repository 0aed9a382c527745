"""Symplectic groups Sp_r(R) for even and odd r, and finite group tables.

Sp_{2n+1}(R) is realized inside Sp_{2n+2}(R) as the stabilizer of e_1, so
every group element is a square matrix of even size (r for even r, r + 1
for odd r).  Matrices are tuples of tuples of canonical residues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, NotAUnit, NotOddSymplectic, OddSize, RankOrder
from .ringkernel import Ring, identity, matmul, unit_inverse


def standard_symplectic_form(n: int) -> list[list[int]]:
    psi = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        psi[2 * i][2 * i + 1] = 1
        psi[2 * i + 1][2 * i] = -1
    return psi


def as_matrix(A) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in A)


def _red(A, R: Ring) -> tuple:
    m = R.modulus
    return tuple(tuple(int(x) % m for x in row) for row in A)


def form(x, y, R: Ring | None = None) -> int:
    """<x, y> = x^T psi y."""
    v = 0
    for i in range(0, len(x), 2):
        v += x[i] * y[i + 1] - x[i + 1] * y[i]
    return v % R.modulus if R is not None else v


def is_symplectic(A, R: Ring) -> bool:
    n2 = len(A)
    if n2 % 2:
        raise OddSize("symplectic matrices have even size")
    m = R.modulus
    cols = list(zip(*A))
    for i in range(n2):
        for j in range(n2):
            want = 1 if (i % 2 == 0 and j == i + 1) else (-1 if (i % 2 == 1 and j == i - 1) else 0)
            if (form(cols[i], cols[j]) - want) % m:
                return False
    return True


def matrix_size(r: int) -> int:
    """Size of the matrices representing Sp_r."""
    return r if r % 2 == 0 else r + 1


@dataclass(frozen=True)
class SpElement:
    mat: tuple

    @property
    def n(self) -> int:
        return len(self.mat)


@dataclass(frozen=True)
class OddSpElement:
    """(c, u, M) coordinates of an element of Sp_{2n+1}."""

    c: int
    u: tuple
    M: tuple

    @property
    def n(self) -> int:
        return len(self.u) // 2


def odd_compose(c: int, u, M, R: Ring) -> tuple:
    m = R.modulus
    n2 = len(u)
    psi = standard_symplectic_form(n2 // 2)
    top = matmul([list(u)], matmul(psi, [list(r) for r in M])) if n2 else [[]]
    rows = [[1, c % m] + [x % m for x in top[0]], [0, 1] + [0] * n2]
    for i in range(n2):
        rows.append([0, u[i] % m] + [M[i][j] % m for j in range(n2)])
    return as_matrix(rows)


def odd_decompose(A, R: Ring) -> OddSpElement:
    size = len(A)
    if size < 2 or size % 2:
        raise NotOddSymplectic("need an even-size matrix")
    m = R.modulus
    if any(A[i][0] % m != (1 if i == 0 else 0) for i in range(size)):
        raise NotOddSymplectic("matrix does not fix e1")
    if not is_symplectic(A, R):
        raise NotOddSymplectic("matrix is not symplectic")
    c = A[0][1] % m
    u = tuple(A[i][1] % m for i in range(2, size))
    M = tuple(tuple(A[i][j] % m for j in range(2, size)) for i in range(2, size))
    return OddSpElement(c, u, M)


def to_matrix(g: OddSpElement, R: Ring) -> tuple:
    return odd_compose(g.c, g.u, g.M, R)


def monoid_act(a: int, g: OddSpElement, R: Ring) -> OddSpElement:
    m = R.modulus
    return OddSpElement(a * a * g.c % m, tuple(a * x % m for x in g.u), g.M)


def monoid_act_matrix(a: int, A, R: Ring) -> tuple:
    return to_matrix(monoid_act(a, odd_decompose(A, R), R), R)


def rho(g: OddSpElement) -> tuple:
    """The projection Sp_{2n+1} -> Sp_{2n}, (c, u, M) -> M."""
    return g.M


def conj_diag(a: int, A, R: Ring) -> tuple:
    """A -> D A D^-1 with D = diag(a, a^-1, 1, ..., 1)."""
    m = R.modulus
    if not R.is_unit(a):
        raise NotAUnit(f"{a} is not a unit")
    ai = unit_inverse(R, a)
    diag = [a % m, ai] + [1] * (len(A) - 2)
    dinv = [ai, a % m] + [1] * (len(A) - 2)
    return tuple(tuple(diag[i] * A[i][j] * dinv[j] % m for j in range(len(A)))
                 for i in range(len(A)))


def embed(A, r: int, s: int, R: Ring | None = None) -> tuple:
    """The inclusion Sp_r -> Sp_s on matrices (identity block in front)."""
    if r > s:
        raise RankOrder(f"cannot embed Sp_{r} into Sp_{s}")
    k = matrix_size(s) - matrix_size(r)
    size = matrix_size(s)
    out = [[int(i == j) for j in range(size)] for i in range(size)]
    for i in range(len(A)):
        for j in range(len(A)):
            out[k + i][k + j] = A[i][j]
    return as_matrix(out)


def transvection(w, R: Ring) -> tuple:
    """x -> x + <x, w> w."""
    n2 = len(w)
    psi = standard_symplectic_form(n2 // 2)
    pw = [sum(psi[i][j] * w[j] for j in range(n2)) for i in range(n2)]
    return _red([[int(i == j) + w[i] * pw[j] for j in range(n2)] for i in range(n2)], R)


def sp_generators(r: int, R: Ring) -> list[tuple]:
    """A generating set of Sp_r(R) (transvections, plus the odd part)."""
    if r == 0:
        return []
    if r % 2 == 0:
        gens = []
        for k in range(r):
            w = [0] * r
            w[k] = 1
            gens.append(transvection(w, R))
        for k in range(r):
            for l in range(k + 1, r):
                w = [0] * r
                w[k] = w[l] = 1
                gens.append(transvection(w, R))
        return gens
    n2 = r - 1
    ident = as_matrix(identity(n2))
    gens = [embed(g, n2, r) for g in sp_generators(n2, R)]
    gens.append(odd_compose(1, (0,) * n2, ident, R))
    for k in range(n2):
        u = [0] * n2
        u[k] = 1
        gens.append(odd_compose(0, tuple(u), ident, R))
    return gens


def sp_order(n: int, q: int, k: int = 1) -> int:
    """|Sp_{2n}(Z/q^k)| for prime q, from the standard formula."""
    o = q ** (n * n)
    for i in range(1, n + 1):
        o *= q ** (2 * i) - 1
    return o * q ** ((k - 1) * n * (2 * n + 1))


# ------------------------------------------------------------- group tables

class FinGroup:
    """Finite matrix group with elements sorted in row-major order."""

    def __init__(self, elements: np.ndarray, R: Ring, gens=None):
        self.R = R
        self.E = np.asarray(elements, dtype=np.int64)
        self.size = self.E.shape[1] if self.E.ndim == 3 else 0
        self.gens = [as_matrix(g) for g in (gens or [])]
        m = R.modulus
        d2 = self.size * self.size
        self._int_codes = d2 == 0 or m ** d2 < 2 ** 62
        if self._int_codes:
            self._pow = np.array([m ** (d2 - 1 - i) for i in range(d2)], dtype=np.int64)
        codes = self.encode(self.E)
        order = np.argsort(codes, kind="stable") if self._int_codes else np.array(
            sorted(range(len(codes)), key=lambda i: codes[i]), dtype=np.int64)
        self.E = self.E[order]
        if self._int_codes:
            self.codes = np.asarray(codes)[order]
        else:
            self._lookup = {self.E[i].tobytes(): i for i in range(len(self.E))}
        ident = np.eye(self.size, dtype=np.int64)
        self.identity = int(self.indices_of(ident[None])[0])
        self._table = None
        self._inv = None

    def __len__(self):
        return len(self.E)

    @property
    def order(self) -> int:
        return len(self.E)

    def encode(self, mats):
        mats = np.asarray(mats, dtype=np.int64)
        flat = mats.reshape(len(mats), -1)
        if self._int_codes:
            return flat @ self._pow if flat.shape[1] else np.zeros(len(mats), dtype=np.int64)
        return [row.tobytes() for row in np.ascontiguousarray(flat)]

    def indices_of(self, mats, missing_ok: bool = False) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64) % self.R.modulus
        if self._int_codes:
            c = self.encode(mats)
            idx = np.searchsorted(self.codes, c)
            idx = np.minimum(idx, len(self.codes) - 1)
            ok = self.codes[idx] == c
        else:
            flat = np.ascontiguousarray(mats.reshape(len(mats), self.size, self.size))
            idx = np.array([self._lookup.get(x.tobytes(), -1) for x in flat], dtype=np.int64)
            ok = idx >= 0
        if not ok.all():
            if missing_ok:
                return np.where(ok, idx, -1)
            raise KeyError("matrix not in group")
        return idx.astype(np.int64)

    def index(self, A) -> int:
        return int(self.indices_of(np.asarray(A)[None])[0])

    def element(self, i: int) -> tuple:
        return as_matrix(self.E[i])

    def products(self, a, b) -> np.ndarray:
        """Indices of E[a] @ E[b] for index arrays a, b."""
        a = np.asarray(a)
        b = np.asarray(b)
        out = np.empty(np.broadcast(a, b).shape, dtype=np.int64)
        fa = np.broadcast_to(a, out.shape).ravel()
        fb = np.broadcast_to(b, out.shape).ravel()
        res = np.empty(len(fa), dtype=np.int64)
        step = 200_000
        for s in range(0, len(fa), step):
            P = np.matmul(self.E[fa[s:s + step]], self.E[fb[s:s + step]]) % self.R.modulus
            res[s:s + step] = self.indices_of(P)
        out[...] = res.reshape(out.shape)
        return out

    def table(self) -> np.ndarray:
        if self._table is None:
            N = len(self)
            if N > 6000:
                raise CapExceeded("multiplication table too large")
            idx = np.arange(N)
            self._table = self.products(idx[:, None], idx[None, :]).astype(np.int32)
        return self._table

    def mul(self, i: int, j: int) -> int:
        if self._table is not None:
            return int(self._table[i, j])
        return int(self.products(np.array([i]), np.array([j]))[0])

    @property
    def inverse(self) -> np.ndarray:
        if self._inv is None:
            if self._table is not None or len(self) <= 6000:
                t = self.table()
                self._inv = np.argmax(t == self.identity, axis=1).astype(np.int64)
            else:
                inv_mats = np.array([_inv_matrix(e, self.R) for e in self.E])
                self._inv = self.indices_of(inv_mats)
        return self._inv

    def hom_indices(self, target: "FinGroup", f) -> np.ndarray:
        """Index array of the map i -> index of f(element i) in ``target``."""
        imgs = np.array([np.asarray(f(self.element(i)), dtype=np.int64) for i in range(len(self))])
        return target.indices_of(imgs.reshape(len(self), target.size, target.size))

    def subgroup(self, indices) -> "FinGroup":
        return FinGroup(self.E[np.asarray(indices)], self.R)

    def save(self, path):
        np.savez(path, elements=self.E, modulus=self.R.modulus, p=self.R.p, k=self.R.k,
                 gens=np.array(self.gens, dtype=np.int64).reshape(len(self.gens), self.size, self.size))

    @classmethod
    def load(cls, path) -> "FinGroup":
        z = np.load(path)
        R = Ring(int(z["p"]), int(z["k"]))
        return cls(z["elements"], R, [as_matrix(g) for g in z["gens"]])


def _inv_matrix(A, R: Ring):
    # symplectic inverse: A^-1 = -psi A^T psi
    n2 = len(A)
    psi = np.array(standard_symplectic_form(n2 // 2), dtype=np.int64)
    return (-(psi @ np.asarray(A).T @ psi)) % R.modulus


def enumerate_group(gens, R: Ring, cap: int = 10 ** 6) -> FinGroup:
    """Breadth-first closure of the generators (identity included)."""
    gens = [np.asarray(g, dtype=np.int64) % R.modulus for g in gens]
    if not gens:
        raise ValueError("need at least one generator (use an identity matrix)")
    size = gens[0].shape[0]
    m = R.modulus
    ident = np.eye(size, dtype=np.int64)
    d2 = size * size
    if m ** d2 < 2 ** 62:
        pw = np.array([m ** (d2 - 1 - i) for i in range(d2)], dtype=np.int64)

        def keys(X):
            return (X.reshape(len(X), -1) @ pw).tolist()
    else:
        def keys(X):
            return [x.tobytes() for x in np.ascontiguousarray(X)]

    seen = set(keys(ident[None]))
    found = [ident[None]]
    frontier = ident[None]
    G = np.stack(gens)
    while len(frontier):
        prods = (frontier[:, None] @ G[None]) % m
        prods = prods.reshape(-1, size, size)
        ks = keys(prods)
        new = []
        for i, key in enumerate(ks):
            if key not in seen:
                seen.add(key)
                new.append(i)
        if len(seen) > cap:
            raise CapExceeded(f"group exceeds {cap} elements")
        frontier = prods[new] if new else np.zeros((0, size, size), dtype=np.int64)
        if new:
            found.append(frontier)
    return FinGroup(np.concatenate(found), R, [as_matrix(g) for g in gens])


def sp_group(r: int, R: Ring, cap: int = 10 ** 6) -> FinGroup:
    """Enumerate Sp_r(R) as a matrix group of size matrix_size(r)."""
    if r == 0:
        return FinGroup(np.zeros((1, 0, 0), dtype=np.int64), R)
    return enumerate_group(sp_generators(r, R), R, cap)
