"""Non-degenerate unimodular sequences, Skew+ matrices and Gram matrices.

Vectors of R^{2n} are encoded as integers (base-modulus digits, first
coordinate most significant), so a sequence of q vectors is a row of q
codes and lexicographic order of sequences is the order of the rows.
Enumeration is done for all sequences at once with numpy.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, NotNondegenerate, RankBound
from .ringkernel import Ring, pfaffian, solve_mod
from .symplectic import form, sp_generators, standard_symplectic_form

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class SkewMat:
    """Skew-symmetric q x q matrix stored by its entries above the diagonal."""

    q: int
    upper: tuple

    def matrix(self, R: Ring | None = None) -> list[list[int]]:
        q = self.q
        A = [[0] * q for _ in range(q)]
        it = iter(self.upper)
        for i in range(q):
            for j in range(i + 1, q):
                a = next(it)
                A[i][j] = a
                A[j][i] = -a % R.modulus if R is not None else -a
        return A

    @classmethod
    def from_matrix(cls, A, R: Ring) -> "SkewMat":
        q = len(A)
        m = R.modulus
        for i in range(q):
            if A[i][i] % m:
                raise ValueError("diagonal must vanish")
            for j in range(i + 1, q):
                if (A[i][j] + A[j][i]) % m:
                    raise ValueError("matrix is not skew-symmetric")
        return cls(q, tuple(A[i][j] % m for i in range(q) for j in range(i + 1, q)))

    def entry(self, i: int, j: int, R: Ring) -> int:
        if i == j:
            return 0
        if i > j:
            return -self.entry(j, i, R) % R.modulus
        q = self.q
        return self.upper[i * q - i * (i + 1) // 2 + (j - i - 1)]

    def face(self, i: int) -> "SkewMat":
        """Delete row and column i (0-based)."""
        q = self.q
        keep = [k for k in range(q) if k != i]
        A = self.matrix()
        return SkewMat(q - 1, tuple(A[a][b] for x, a in enumerate(keep) for b in keep[x + 1:]))

    def to_json(self):
        return [list(r) for r in self.matrix()]


@dataclass(frozen=True)
class UnimodSeq:
    n: int
    vectors: tuple

    @property
    def q(self) -> int:
        return len(self.vectors)

    def face(self, i: int) -> "UnimodSeq":
        return UnimodSeq(self.n, self.vectors[:i] + self.vectors[i + 1:])

    def columns(self) -> list[list[int]]:
        """The 2n x q matrix with the vectors as columns."""
        return [[v[r] for v in self.vectors] for r in range(2 * self.n)]

    def to_json(self):
        return [list(v) for v in self.vectors]


def gram(v: UnimodSeq, R: Ring) -> SkewMat:
    q = v.q
    return SkewMat(q, tuple(form(v.vectors[i], v.vectors[j], R)
                            for i in range(q) for j in range(i + 1, q)))


def is_skew_nondegenerate(A: SkewMat, R: Ring) -> bool:
    M = A.matrix(R)
    for size in range(2, A.q + 1, 2):
        for I in itertools.combinations(range(A.q), size):
            sub = [[M[i][j] for j in I] for i in I]
            if not R.is_unit(pfaffian(sub, R)):
                return False
    return True


def residue_rank(vectors, R: Ring) -> int:
    """Rank over the residue field of the given vectors."""
    p = R.p
    rows = [[x % p for x in v] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def is_nondeg_unimodular(v: UnimodSeq, R: Ring) -> bool:
    q = v.q
    lim = min(q, 2 * v.n)
    for size in range(1, lim + 1):
        for I in itertools.combinations(range(q), size):
            vecs = [v.vectors[i] for i in I]
            if residue_rank(vecs, R) < size:
                return False
    return gram_half_ok(v, R)


def gram_half_ok(v: UnimodSeq, R: Ring) -> bool:
    """The even-subset Gram condition alone."""
    q = v.q
    lim = min(q, 2 * v.n)
    M = gram(v, R).matrix(R)
    for size in range(2, lim + 1, 2):
        for I in itertools.combinations(range(q), size):
            sub = [[M[i][j] for j in I] for i in I]
            if not R.is_unit(pfaffian(sub, R)):
                return False
    return True


# ------------------------------------------------------------- normal form

def normal_form(A, n: int, R: Ring) -> UnimodSeq:
    """A sequence u in normal form with Gram matrix A (A in Skew+_q, q <= 2n+1)."""
    if not isinstance(A, SkewMat):
        A = SkewMat.from_matrix(A, R)
    q = A.q
    if q > 2 * n + 1:
        raise RankBound(f"q = {q} exceeds 2n + 1 = {2 * n + 1}")
    if not is_skew_nondegenerate(A, R):
        raise NotNondegenerate("matrix is not in Skew+")
    m = R.modulus
    dim = 2 * n
    us: list[list[int]] = []
    if q == 0:
        return UnimodSeq(n, ())
    e1 = [0] * dim
    e1[0] = 1
    us.append(e1)
    for k in range(1, q):
        # extend (u_1..u_k) by u_{k+1}; k is the current length
        col = [A.entry(i, k, R) for i in range(k)]
        if k % 2 == 0:
            x = _solve_block(us, k, col, R)
            u = x + [0] * (dim - k)
            if k < dim:
                u[k] = 1
        else:
            x = _solve_block(us[:k - 1], k - 1, col[:k - 1], R)
            u = x + [0] * (dim - k + 1)
            alpha = (col[k - 1] - form(us[k - 1], u)) % m
            u[k] = alpha
        us.append([c % m for c in u])
    return UnimodSeq(n, tuple(tuple(v) for v in us))


def _solve_block(us, k: int, rhs, R: Ring) -> list[int]:
    # x in R^k with <u_i, x> = rhs_i, the u_i supported on the first k coords
    if k == 0:
        return []
    psi = standard_symplectic_form(k // 2)
    # row i of u^T psi
    M = [[sum(us[i][a] * psi[a][b] for a in range(k)) for b in range(k)] for i in range(k)]
    return solve_mod(M, rhs, R)


def is_normal_form(u: UnimodSeq, R: Ring) -> bool:
    """Upper triangular, (u_i)_i = 1 for odd i, (u_i)_{i-1} = 0 for even i."""
    m = R.modulus
    r = min(u.q, 2 * u.n)
    for i in range(r):
        v = u.vectors[i]
        if any(v[j] % m for j in range(i + 1, 2 * u.n)):
            return False
        if i % 2 == 0 and v[i] % m != 1:
            return False
        if i % 2 == 1 and v[i - 1] % m:
            return False
    return True


# ------------------------------------------------------------ enumeration

class VecSpace:
    """Code tables for R^{2n}."""

    def __init__(self, n: int, R: Ring):
        self.n = n
        self.R = R
        self.dim = 2 * n
        m = R.modulus
        self.V = m ** self.dim
        self.coords = _grid(m, self.dim)
        self.pow = np.array([m ** (self.dim - 1 - i) for i in range(self.dim)], dtype=np.int64)
        X = self.coords
        W = np.zeros((self.V, self.V), dtype=np.int64)
        for i in range(n):
            a, b = 2 * i, 2 * i + 1
            W += np.outer(X[:, a], X[:, b]) - np.outer(X[:, b], X[:, a])
        self.W = W % m
        self.unit_pair = self.W % R.p != 0
        self.nonzero = (X % R.p).any(axis=1) if self.dim else np.zeros(1, dtype=bool)
        # residue field tables: codes of x mod p, addition and scaling
        p = R.p
        rpow = np.array([p ** (self.dim - 1 - i) for i in range(self.dim)], dtype=np.int64)
        self.rcode = (X % p) @ rpow
        RX = _grid(p, self.dim)
        self.radd = ((RX[:, None, :] + RX[None, :, :]) % p) @ rpow
        self.rscale = np.stack([((a * RX) % p) @ rpow for a in range(p)])

    def code(self, vec) -> int:
        return int(np.dot(np.asarray(vec, dtype=np.int64) % self.R.modulus, self.pow))

    def vector(self, code: int) -> tuple:
        return tuple(int(x) for x in self.coords[code])

    def act(self, g) -> np.ndarray:
        """Permutation of vector codes induced by the matrix g."""
        G = np.asarray(g, dtype=np.int64)
        imgs = (self.coords @ G.T) % self.R.modulus
        return imgs @ self.pow


def _grid(m: int, d: int) -> np.ndarray:
    """All of (Z/m)^d in lexicographic order, shape (m^d, d)."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((m,) * d).reshape(d, -1).T.astype(np.int64)


@lru_cache(maxsize=None)
def vec_space(n: int, R: Ring) -> VecSpace:
    return VecSpace(n, R)


def outside_span(space: "VecSpace", S: np.ndarray, c: np.ndarray) -> np.ndarray:
    """For vector codes S (B, k) and c (B,): is c outside span(S) mod p?

    Used when the rows of S are already independent mod p, so that (S, c)
    is independent exactly when this holds.
    """
    p = space.R.p
    k = S.shape[1]
    rs = space.rcode[S]
    rc = space.rcode[c]
    out = np.ones(len(c), dtype=bool)
    for coeffs in itertools.product(range(p), repeat=k):
        acc = np.zeros(len(c), dtype=np.int64)
        for j, a in enumerate(coeffs):
            if a:
                acc = space.radd[acc, space.rscale[a, rs[:, j]]]
        out &= acc != rc
    return out


def batch_pfaffian(G: np.ndarray, idx: tuple, m: int) -> np.ndarray:
    """Pfaffian of the principal submatrices G[:, idx, idx] (even length)."""
    if not idx:
        return np.ones(G.shape[0], dtype=np.int64)
    i = idx[0]
    total = np.zeros(G.shape[0], dtype=np.int64)
    for pos in range(1, len(idx)):
        rest = idx[1:pos] + idx[pos + 1:]
        term = G[:, i, idx[pos]] * batch_pfaffian(G, rest, m) % m
        total = (total - term) if (pos - 1) % 2 else (total + term)
    return total % m


def _extend_ok(space: VecSpace, prefix: np.ndarray, cand: np.ndarray, q: int) -> np.ndarray:
    """Conditions on subsets containing the new (last) vector."""
    R = space.R
    lim = min(q, space.dim)
    k = q - 1
    ok = np.ones(len(cand), dtype=bool)
    if lim >= 1:
        ok &= space.nonzero[cand]
    if lim >= 2:
        for i in range(k):
            ok &= space.unit_pair[prefix[:, i], cand]
    for size in range(3, lim + 1):
        for S in itertools.combinations(range(k), size - 1):
            sel = np.nonzero(ok)[0]
            if not len(sel):
                return ok
            cols = np.concatenate([prefix[sel][:, list(S)], cand[sel][:, None]], axis=1)
            if size % 2:
                good = outside_span(space, cols[:, :-1], cols[:, -1])
            else:
                G = space.W[cols[:, :, None], cols[:, None, :]]
                good = batch_pfaffian(G, tuple(range(size)), R.modulus) % R.p != 0
            ok[sel] = good
    return ok


_U_CACHE: dict = {}
_U_TOO_BIG: dict = {}  # key -> a cap that was exceeded


def U_codes(q: int, n: int, R: Ring, cap: int = DEFAULT_CAP, threads: int = 1) -> np.ndarray:
    """All of U_q(R^{2n}) as a (count, q) array of vector codes, sorted.

    Results are cached per (q, n, R). With ``threads`` > 1 the prefixes are
    split into chunks handled by a thread pool; chunks are concatenated in
    order so the output does not depend on the thread count.
    """
    key = (q, n, R)
    if _U_TOO_BIG.get(key, cap + 1) <= cap:
        raise CapExceeded(f"|U_{q}(R^{2 * n})| exceeds {cap}")
    if key in _U_CACHE:
        res = _U_CACHE[key]
        if len(res) > cap:
            raise CapExceeded(f"|U_{q}(R^{2 * n})| exceeds {cap}")
        return res
    if q == 0:
        res = np.zeros((1, 0), dtype=np.int64)
    else:
        try:
            res = _extend_all(q, n, R, U_codes(q - 1, n, R, cap, threads), cap, threads)
        except CapExceeded:
            _U_TOO_BIG[key] = max(cap, _U_TOO_BIG.get(key, 0))
            raise
    res.setflags(write=False)
    _U_CACHE[key] = res
    return res


def _extend_all(q, n, R, prev, cap, threads):
    space = vec_space(n, R)
    V = space.V
    if len(prev) * V > 50 * cap:
        raise CapExceeded(f"|U_{q - 1}| * |R^{2 * n}| too large to scan")
    chunk = max(1, 2_000_000 // V)

    def work(s):
        P = prev[s:s + chunk]
        rows = np.repeat(np.arange(len(P)), V)
        cand = np.tile(np.arange(V, dtype=np.int64), len(P))
        keep = np.nonzero(_extend_ok(space, P[rows], cand, q))[0]
        return np.concatenate([P[rows[keep]], cand[keep][:, None]], axis=1)

    starts = range(0, len(prev), chunk)
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            blocks = list(pool.map(work, starts))
    else:
        blocks, total = [], 0
        for s in starts:
            blocks.append(work(s))
            total += len(blocks[-1])
            if total > cap:
                break
    total = sum(len(b) for b in blocks)
    if total > cap:
        raise CapExceeded(f"|U_{q}(R^{2 * n})| exceeds {cap}")
    return np.concatenate(blocks) if blocks else np.zeros((0, q), dtype=np.int64)


def save_codes(path, codes: np.ndarray, n: int, R: Ring) -> None:
    """Write sequences as JSON lines (one array of vectors per line)."""
    space = vec_space(n, R)
    with open(path, "w") as fh:
        for row in codes.tolist():
            fh.write(json.dumps([list(space.vector(c)) for c in row]) + "\n")


def load_codes(path, n: int, R: Ring) -> np.ndarray:
    space = vec_space(n, R)
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rows.append([space.code(v) for v in json.loads(line)])
    q = len(rows[0]) if rows else 0
    return np.array(rows, dtype=np.int64).reshape(len(rows), q)


def enumerate_U(q: int, n: int, R: Ring, cap: int = DEFAULT_CAP) -> list[UnimodSeq]:
    space = vec_space(n, R)
    codes = U_codes(q, n, R, cap)
    return [UnimodSeq(n, tuple(space.vector(c) for c in row)) for row in codes.tolist()]


def row_keys(rows: np.ndarray, base: int):
    """Order-preserving keys for rows of codes (int64 when they fit)."""
    rows = np.asarray(rows, dtype=np.int64)
    q = rows.shape[1]
    if base ** max(q, 1) < 2 ** 62:
        pw = np.array([base ** (q - 1 - i) for i in range(q)], dtype=np.int64)
        return rows @ pw if q else np.zeros(len(rows), dtype=np.int64)
    return None


def lookup_rows(table: np.ndarray, rows: np.ndarray, base: int) -> np.ndarray:
    """Indices of ``rows`` inside the sorted ``table`` (-1 when absent)."""
    kt = row_keys(table, base)
    kr = row_keys(rows, base)
    if kt is not None:
        idx = np.searchsorted(kt, kr)
        idx = np.minimum(idx, max(len(kt) - 1, 0))
        found = kt[idx] == kr if len(kt) else np.zeros(len(kr), dtype=bool)
        return np.where(found, idx, -1)
    pos = {tuple(r): i for i, r in enumerate(table.tolist())}
    return np.array([pos.get(tuple(r), -1) for r in rows.tolist()], dtype=np.int64)


def gram_upper(codes: np.ndarray, n: int, R: Ring) -> np.ndarray:
    """Upper Gram entries (row-major) for each row of vector codes."""
    space = vec_space(n, R)
    q = codes.shape[1]
    cols = [space.W[codes[:, i], codes[:, j]] for i in range(q) for j in range(i + 1, q)]
    if not cols:
        return np.zeros((len(codes), 0), dtype=np.int64)
    return np.stack(cols, axis=1)


@lru_cache(maxsize=None)
def skew_codes(q: int, R: Ring, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Skew+_q(R) as rows of upper entries (row-major), sorted."""
    m = R.modulus
    if q <= 1:
        return np.zeros((1, 0), dtype=np.int64)
    prev = skew_codes(q - 1, R, cap)
    ncand = m ** (q - 1)
    if len(prev) * ncand > 50 * cap:
        raise CapExceeded("Skew+ enumeration too large")
    newcols = _grid(m, q - 1)
    rows = np.repeat(np.arange(len(prev)), ncand)
    cols = np.tile(newcols, (len(prev), 1))
    B = len(rows)
    A = np.zeros((B, q, q), dtype=np.int64)
    up = prev[rows]
    t = 0
    for i in range(q - 1):
        for j in range(i + 1, q - 1):
            A[:, i, j] = up[:, t]
            t += 1
    A[:, :q - 1, q - 1] = cols
    A = (A - A.transpose(0, 2, 1)) % m
    ok = np.ones(B, dtype=bool)
    for size in range(2, q + 1, 2):
        for S in itertools.combinations(range(q - 1), size - 1):
            ok &= batch_pfaffian(A, S + (q - 1,), m) % R.p != 0
    A = A[ok]
    iu = np.triu_indices(q, 1)
    res = A[:, iu[0], iu[1]]
    order = np.lexsort(res.T[::-1]) if len(res) else np.arange(0)
    res = res[order]
    if len(res) > cap:
        raise CapExceeded("Skew+ enumeration exceeds cap")
    res.setflags(write=False)
    return res


def enumerate_skew_plus(q: int, R: Ring) -> list[SkewMat]:
    return [SkewMat(q, tuple(r)) for r in skew_codes(q, R).tolist()]


# ------------------------------------------------------------------ orbits

def union_find_components(n_items: int, perms) -> np.ndarray:
    """Component labels (smallest member) of the graph i -- perm[i].

    Array union-find: hook the larger root under the smaller one for every
    edge, then compress paths by pointer jumping, until nothing moves.
    """
    parent = np.arange(n_items, dtype=np.int64)
    while True:
        before = parent.copy()
        for perm in perms:
            a, b = parent, parent[perm]
            np.minimum.at(parent, np.maximum(a, b), np.minimum(a, b))
        while True:
            nxt = parent[parent]
            if np.array_equal(nxt, parent):
                break
            parent = nxt
        if np.array_equal(parent, before):
            return parent


def orbit_partition(q: int, n: int, R: Ring) -> tuple[np.ndarray, np.ndarray]:
    """Codes of U_q(R^{2n}) and orbit labels under the generators of Sp_{2n}(R)."""
    space = vec_space(n, R)
    codes = U_codes(q, n, R)
    perms = []
    for g in sp_generators(2 * n, R):
        idx = lookup_rows(codes, space.act(g)[codes], space.V)
        if (idx < 0).any():
            raise RuntimeError("generator does not preserve U_q")
        perms.append(idx)
    return codes, union_find_components(len(codes), perms)


def orbit_count(q: int, n: int, R: Ring) -> tuple[int, int]:
    _, labels = orbit_partition(q, n, R)
    return len(np.unique(labels)), len(skew_codes(q, R))
