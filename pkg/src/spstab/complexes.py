"""Chain complexes of unimodular sequences and Skew+ matrices, the auxiliary
complexes C_*(R^{2n}; r) with their comparison maps, and the Z0[R]-matrices
gamma and M(U) together with the limit computations built on them.

Degree conventions: in Z[U_*] and Z[Skew+_*] the basis of degree q is the
set of length-q sequences (q x q matrices).  C_*(R^{2n}; r) has its top
piece in degree 2r+1 and Z[U_{2r+1}(R^{2r})] in degree 2r.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import CapExceeded, InputNotNondegenerate, LimitUndefined, NotAUnit
from .homology import ChainComplex
from .monoidring import AdmissibleFn, PolyR, Z0RElem, limit_admissible
from .ringkernel import Lattice, Ring, det, pfaffian, unit_inverse
from .symplectic import form
from .unimodular import (
    SkewMat,
    UnimodSeq,
    U_codes,
    gram,
    gram_upper,
    is_nondeg_unimodular,
    lookup_rows,
    normal_form,
    skew_codes,
    vec_space,
)


class LabeledComplex(ChainComplex):
    """ChainComplex whose basis in each degree is an array of label codes."""

    def __init__(self, ranks, diffs, codes: dict, kind: str, R: Ring, n: int | None = None):
        super().__init__(ranks, diffs)
        self.codes = codes
        self.kind = kind
        self.R = R
        self.n = n

    def label(self, p: int, i: int):
        row = self.codes[p][i].tolist()
        if self.kind == "U":
            space = vec_space(self.n, self.R)
            return UnimodSeq(self.n, tuple(space.vector(c) for c in row))
        return SkewMat(p, tuple(row))

    def truncate(self, q: int) -> "LabeledComplex":
        """The subcomplex C_{<=q} of the filtration by degree."""
        keep = [p for p in self.degrees if p <= q]
        return LabeledComplex(
            {p: self.ranks[p] for p in keep},
            {p: self.diffs[p] for p in keep if p in self.diffs},
            {p: self.codes[p] for p in keep},
            self.kind, self.R, self.n,
        )

    def to_json(self, with_basis: bool = True) -> dict:
        out = {
            "kind": self.kind,
            "ring": self.R.modulus,
            "n": self.n,
            "degrees": self.degrees,
            "ranks": {str(p): self.rank(p) for p in self.degrees},
            "differentials": {},
        }
        for p, D in self.diffs.items():
            coo = D.tocoo()
            out["differentials"][str(p)] = {
                "shape": list(D.shape),
                "triplets": [[int(r), int(c), int(v)] for r, c, v in zip(coo.row, coo.col, coo.data)],
            }
        if with_basis:
            out["basis"] = {
                str(p): [self.label(p, i).to_json() for i in range(self.rank(p))]
                for p in self.degrees
            }
        return out


def _face_matrix(src: np.ndarray, dst: np.ndarray, face, base: int, q: int | None = None):
    """Alternating sum of q faces: sum_i (-1)^i [face(src, i)] (i 0-based)."""
    q = src.shape[1] if q is None else q
    rows, cols, vals = [], [], []
    ar = np.arange(len(src))
    for i in range(q):
        idx = lookup_rows(dst, face(src, i), base)
        if (idx < 0).any():
            raise RuntimeError("face of a basis element is not a basis element")
        rows.append(idx)
        cols.append(ar)
        vals.append(np.full(len(src), -1 if i % 2 else 1, dtype=np.int64))
    if not rows:
        return sp.csr_matrix((len(dst), len(src)), dtype=np.int64)
    M = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(dst), len(src)),
    )
    return M.tocsr()


def _delete_col(codes: np.ndarray, i: int) -> np.ndarray:
    return np.delete(codes, i, axis=1)


def build_U_complex(R: Ring, n: int, q_max: int | None = None, cap=None) -> LabeledComplex:
    """Z[U_q(R^{2n})] for 0 <= q <= q_max with d = sum (-1)^{i+1} d_i."""
    q_max = 2 * n if q_max is None else q_max
    kw = {} if cap is None else {"cap": cap}
    codes = {q: U_codes(q, n, R, **kw) for q in range(q_max + 1)}
    base = vec_space(n, R).V
    diffs = {q: _face_matrix(codes[q], codes[q - 1], _delete_col, base) for q in range(1, q_max + 1)}
    return LabeledComplex({q: len(c) for q, c in codes.items()}, diffs, codes, "U", R, n)


def _skew_face(q: int):
    # positions of the upper entries that survive deleting row/column i
    pairs = [(a, b) for a in range(q) for b in range(a + 1, q)]

    def face(codes, i):
        keep = [k for k, (a, b) in enumerate(pairs) if i not in (a, b)]
        return codes[:, keep]

    return face


def build_skew_complex(R: Ring, q_max: int) -> LabeledComplex:
    """Z[Skew+_q(R)] for 0 <= q <= q_max."""
    codes = {q: skew_codes(q, R) for q in range(q_max + 1)}
    diffs = {
        q: _face_matrix(codes[q], codes[q - 1], _skew_face(q), R.modulus, q)
        for q in range(1, q_max + 1)
    }
    return LabeledComplex({q: len(c) for q, c in codes.items()}, diffs, codes, "Skew", R)


# -------------------------------------------------------- auxiliary complex

class AuxComplex(ChainComplex):
    """C_*(R^{2n}; r).

    For r < n the top basis (degree 2r+1) is listed as arrays ``top_i``
    (1-based column index), ``top_u`` (codes in R^{2r}) and ``top_w``
    (code of w_i in R^{2n-2r}); the bottom basis (degree 2r) is
    U_{2r+1}(R^{2r}).  For r = n there is a single degree 2n with basis
    U_{2n+1}(R^{2n}).
    """

    def __init__(self, R: Ring, n: int, r: int, cap=None):
        if not 0 <= r <= n:
            raise ValueError("need 0 <= r <= n")
        self.R, self.n, self.r = R, n, r
        kw = {} if cap is None else {"cap": cap}
        if r == n:
            self.top = U_codes(2 * n + 1, n, R, **kw)
            super().__init__({2 * n: len(self.top)}, {})
            return
        q = 2 * r + 2
        U = U_codes(q, r, R, **kw)
        W1 = U_codes(1, n - r, R, **kw)[:, 0]
        I, Ui, Wi = np.meshgrid(np.arange(1, q + 1), np.arange(len(U)), np.arange(len(W1)), indexing="ij")
        self.top_i = I.ravel()
        self.top_u = U[Ui.ravel()]
        self.top_w = W1[Wi.ravel()]
        if len(self.top_i) > (cap or 5_000_000):
            raise CapExceeded("auxiliary complex too large")
        self.bottom = U_codes(q - 1, r, R, **kw)
        base = vec_space(r, R).V
        rows, vals = [], []
        for i in range(1, q + 1):
            sel = self.top_i == i
            idx = lookup_rows(self.bottom, np.delete(self.top_u[sel], i - 1, axis=1), base)
            if (idx < 0).any():
                raise RuntimeError("d_i u is not in U_{2r+1}")
            rows.append((np.nonzero(sel)[0], idx, (-1) ** i))
        cols = np.concatenate([c for c, _, _ in rows])
        rr = np.concatenate([x for _, x, _ in rows])
        vv = np.concatenate([np.full(len(c), s, dtype=np.int64) for c, _, s in rows])
        D = sp.coo_matrix((vv, (rr, cols)), shape=(len(self.bottom), len(self.top_i))).tocsr()
        super().__init__({2 * r: len(self.bottom), 2 * r + 1: len(self.top_i)}, {2 * r + 1: D})

    def top_sequences(self) -> np.ndarray:
        """Top labels as sequences of vector codes in R^{2n}."""
        if self.r == self.n:
            return self.top
        M = self.R.modulus ** (2 * (self.n - self.r))
        full = self.top_u * M
        full[np.arange(len(full)), self.top_i - 1] += self.top_w
        return full

    def label(self, p: int, k: int):
        space = vec_space(self.n, self.R)
        if p == 2 * self.r + 1 or self.r == self.n:
            row = self.top_sequences()[k].tolist()
            return UnimodSeq(self.n, tuple(space.vector(c) for c in row))
        small = vec_space(self.r, self.R)
        return UnimodSeq(self.r, tuple(small.vector(c) for c in self.bottom[k].tolist()))


def build_aux_complex(R: Ring, n: int, r: int, cap=None) -> AuxComplex:
    return AuxComplex(R, n, r, cap)


def _embed_codes(codes: np.ndarray, r: int, n: int, R: Ring) -> np.ndarray:
    # R^{2r} sits in R^{2n} as the first 2r coordinates
    return codes * R.modulus ** (2 * (n - r))


def phi_chain_map(aux: AuxComplex, full: LabeledComplex) -> dict:
    """phi: C_*(R^{2n}; r) -> Z[U_*(R^{2n})] as sparse matrices per degree."""
    n, r, R = aux.n, aux.r, aux.R
    if full.n != n:
        raise ValueError("ambient ranks differ")
    if r == n:
        if max(full.degrees) < 2 * n + 1:
            raise ValueError("full complex must reach degree 2n+1")
        return {2 * n: full.d(2 * n + 1)}
    if max(full.degrees) < 2 * r + 1:
        raise ValueError("full complex must reach degree 2r+1")
    base = vec_space(n, R).V
    seqs = aux.top_sequences()
    q = 2 * r + 2
    target = full.codes[q - 1]
    rows, cols, vals = [], [], []
    for j in range(1, q + 1):
        sel = np.nonzero(aux.top_i != j)[0]
        idx = lookup_rows(target, np.delete(seqs[sel], j - 1, axis=1), base)
        if (idx < 0).any():
            raise RuntimeError("d_j v is not in U_{2r+1}(R^{2n})")
        rows.append(idx)
        cols.append(sel)
        vals.append(np.full(len(sel), (-1) ** (j + 1), dtype=np.int64))
    top = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(target), len(seqs)),
    ).tocsr()
    bottom_emb = _embed_codes(aux.bottom, r, n, R)
    bot = _face_matrix(bottom_emb, full.codes[q - 2], _delete_col, base)
    return {2 * r + 1: top, 2 * r: bot}


def check_chain_map(aux: AuxComplex, full: LabeledComplex, phi: dict) -> bool:
    """d o phi = phi o d in every degree of the auxiliary complex."""
    for p in aux.degrees:
        left = full.d(p) @ phi[p]
        if p - 1 in phi:
            right = phi[p - 1] @ aux.d(p)
        else:
            right = sp.csr_matrix(left.shape, dtype=np.int64)
        diff = (left - right).tocsr()
        diff.eliminate_zeros()
        if diff.nnz:
            return False
    return True


# --------------------------------------------------------- Z0[R]-matrices

def delta_sign(i: int, j: int) -> int:
    if i < 1 or j < 1:
        raise ValueError("indices are 1-based")
    if i < j:
        return (-1) ** (i + 1)
    if i == j:
        return 0
    return (-1) ** i


class Z0RMatrix:
    """Sparse matrix with Z0[R] entries; ``entries[(i, j)]`` is a Z0RElem."""

    def __init__(self, n_rows: int, n_cols: int, R: Ring, entries=None):
        self.n_rows, self.n_cols, self.R = n_rows, n_cols, R
        self.entries = {}
        for key, v in (entries or {}).items():
            if not v.is_zero():
                self.entries[key] = v

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    def __getitem__(self, key) -> Z0RElem:
        return self.entries.get(key, Z0RElem.zero(self.R))

    def dense(self) -> list[list[Z0RElem]]:
        return [[self[i, j] for j in range(self.n_cols)] for i in range(self.n_rows)]

    def specialize(self, H) -> list[list[int]]:
        """Integer matrix of the map H^cols -> H^rows (blocks of rank H)."""
        k = H.rank
        out = [[0] * (k * self.n_cols) for _ in range(k * self.n_rows)]
        for (i, j), v in self.entries.items():
            S = H.sigma_matrix(v)
            for a in range(k):
                for b in range(k):
                    out[i * k + a][j * k + b] += S[a][b]
        return out

    def det(self) -> Z0RElem:
        if self.n_rows != self.n_cols:
            raise ValueError("matrix is not square")
        return z0_det(self.dense(), self.R)

    def to_json(self) -> dict:
        return {
            "shape": [self.n_rows, self.n_cols],
            "entries": [[i, j, v.to_json()] for (i, j), v in sorted(self.entries.items())],
        }


def z0_det(M, R: Ring) -> Z0RElem:
    """Determinant over Z0[R] by cofactor expansion along rows."""
    N = len(M)

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset) -> Z0RElem:
        if row == N:
            return Z0RElem.one(R)
        total = Z0RElem.zero(R)
        for pos, c in enumerate(sorted(cols)):
            e = M[row][c]
            if e.is_zero():
                continue
            term = e * minor(row + 1, cols - {c})
            total = total - term if pos % 2 else total + term
        return total

    return minor(0, frozenset(range(N)))


def _minor_det(vectors, drop, R: Ring) -> int:
    cols = [v for k, v in enumerate(vectors) if k not in drop]
    if not cols:
        return 1
    return det([[c[r] for c in cols] for r in range(len(cols))], R)


def _unit_inv(x: int, R: Ring) -> int:
    if not R.is_unit(x):
        raise NotAUnit(f"{x} is not a unit")
    return unit_inverse(R, x)


def gamma_terms(R: Ring, r: int, cap=None):
    """Yield the individual terms of gamma over H = Z0[R] as
    (row, col, sign, unit): sign * <unit> contributes at (row, col).

    Rows index Skew+_{2r+1}(R); columns are (i, u) with i = 1..2r+2 major
    and u in U_{2r+2}(R^{2r}) minor.  Over a finite ring two faces of u can
    share a Gram matrix, so a matrix entry may collect several terms.
    """
    kw = {} if cap is None else {"cap": cap}
    q = 2 * r + 2
    U = U_codes(q, r, R, **kw)
    rows = skew_codes(q - 1, R)
    space = vec_space(r, R)
    face_row = [lookup_rows(rows, gram_upper(np.delete(U, j, axis=1), r, R), R.modulus)
                for j in range(q)]
    nU = len(U)
    for k, row in enumerate(U.tolist()):
        vecs = [space.vector(c) for c in row]
        dets = {}
        for i in range(1, q + 1):
            for j in range(1, q + 1):
                if i == j:
                    continue
                key = (min(i, j), max(i, j))
                if key not in dets:
                    dets[key] = _unit_inv(_minor_det(vecs, {i - 1, j - 1}, R), R)
                unit = delta_sign(i, j) * dets[key] % R.modulus
                yield int(face_row[j - 1][k]), (i - 1) * nU + k, (-1) ** (j + 1), unit


def gamma_matrix(R: Ring, r: int, cap=None) -> Z0RMatrix:
    """gamma over H = Z0[R] as a Z0[R]-matrix (terms summed per entry)."""
    acc: dict = {}
    for row, col, sign, unit in gamma_terms(R, r, cap):
        d = acc.setdefault((row, col), {})
        d[unit] = d.get(unit, 0) + sign
    q = 2 * r + 2
    n_cols = q * len(U_codes(q, r, R))
    entries = {key: Z0RElem(d, R) for key, d in acc.items()}
    return Z0RMatrix(len(skew_codes(q - 1, R)), n_cols, R, entries)


def m_matrix(U: UnimodSeq, x, R: Ring) -> Z0RMatrix:
    """M(U, x) = (<delta_ij det^-1 (U, x)^_ij>) with zero diagonal."""
    W = UnimodSeq(U.n, tuple(U.vectors) + (tuple(int(c) % R.modulus for c in x),))
    if len(W.vectors) != 2 * U.n + 2 or not is_nondeg_unimodular(W, R):
        raise InputNotNondegenerate("(U, x) is not a non-degenerate unimodular sequence")
    N = W.q
    entries = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i != j:
                d = _unit_inv(_minor_det(W.vectors, {i - 1, j - 1}, R), R)
                entries[(i - 1, j - 1)] = Z0RElem.basis(delta_sign(i, j) * d % R.modulus, R)
    return Z0RMatrix(N, N, R, entries)


def m_det(U: UnimodSeq, x, R: Ring) -> Z0RElem:
    return m_matrix(U, x, R).det()


def gamma_relations_check(R: Ring, r: int, H) -> bool:
    """Each column (i, W) of gamma, specialized to H, equals the i-th entry of
    M(W) X(W) for the generators h of H."""
    G = gamma_matrix(R, r)
    spec = G.specialize(H)
    k = H.rank
    q = 2 * r + 2
    U = U_codes(q, r, R)
    space = vec_space(r, R)
    rows = skew_codes(q - 1, R)
    nU = len(U)
    for c, row in enumerate(U.tolist()):
        vecs = [space.vector(v) for v in row]
        W = UnimodSeq(r, tuple(vecs))
        M = m_matrix(UnimodSeq(r, tuple(vecs[:-1])), vecs[-1], R)
        face_idx = []
        for j in range(q):
            g = gram(W.face(j), R)
            face_idx.append(int(lookup_rows(rows, np.array([g.upper], dtype=np.int64).reshape(1, -1),
                                            R.modulus)[0]))
        for i in range(q):
            for h in range(k):
                expect = [0] * (k * len(rows))
                for j in range(q):
                    if i == j:
                        continue
                    S = H.sigma_matrix(M[i, j])
                    sign = 1 if j % 2 == 0 else -1
                    for a in range(k):
                        expect[face_idx[j] * k + a] += sign * S[a][h]
                got = [spec[t][((i * nU) + c) * k + h] for t in range(k * len(rows))]
                if any((x - y) % H.d[t % k] for t, (x, y) in enumerate(zip(got, expect))):
                    return False
    return True


def adjugate_chain_check(U: UnimodSeq, x, H) -> bool:
    """det M(U, x) * h * [Gamma(W^_j)] = 0 in coker(gamma_H) for all j and h."""
    R = H.R
    if H.rank == 0:
        return True
    r = U.n
    D = m_det(U, x, R)
    G = gamma_matrix(R, r)
    spec = G.specialize(H)
    k = H.rank
    nrows = k * G.n_rows
    # relations: image of gamma plus the orders of H in every block
    rel_cols = [[spec[t][c] for t in range(nrows)] for c in range(len(spec[0]))]
    for b in range(G.n_rows):
        for a in range(k):
            col = [0] * nrows
            col[b * k + a] = H.d[a]
            rel_cols.append(col)
    lattice = Lattice(rel_cols, nrows)
    rows = skew_codes(2 * r + 1, R)
    W = UnimodSeq(r, tuple(U.vectors) + (tuple(x),))
    S = H.sigma_matrix(D)
    for j in range(W.q):
        g = gram(W.face(j), R)
        b = int(lookup_rows(rows, np.array([g.upper], dtype=np.int64).reshape(1, -1), R.modulus)[0])
        for h in range(k):
            vec = [0] * nrows
            for a in range(k):
                vec[b * k + a] = S[a][h]
            if not lattice.contains(vec):
                return False
    return True


# --------------------------------------------------------- limit machinery

def admissible_det(entries, R: Ring) -> AdmissibleFn:
    """det of a square matrix whose entries are None (zero) or pairs (P, Q)
    standing for <P(t)/Q(t)>, as an admissible function of t."""
    N = len(entries)
    pairs, slot = [], {}
    for i in range(N):
        for j in range(N):
            if entries[i][j] is not None:
                slot[(i, j)] = len(pairs)
                pairs.append(entries[i][j])
    P: dict = {}
    for perm in itertools.permutations(range(N)):
        if any((i, perm[i]) not in slot for i in range(N)):
            continue
        exps = [0] * len(pairs)
        for i in range(N):
            exps[slot[(i, perm[i])]] += 1
        sign = _perm_sign(perm)
        key = tuple(exps)
        P[key] = P.get(key, 0) + sign
    return AdmissibleFn(P, pairs, R)


def _perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _poly_det(cols, R: Ring) -> PolyR:
    """Determinant of a square matrix given by columns of PolyR entries."""
    N = len(cols)
    if N == 0:
        return PolyR.const(1, R)
    total = PolyR([], R)
    for perm in itertools.permutations(range(N)):
        term = PolyR.const(_perm_sign(perm), R)
        for c in range(N):
            term = term * cols[c][perm[c]]
        total = total + term
    return total


def endgame_function(a: int, b: int, c: int, R: Ring) -> AdmissibleFn:
    """f(1, t) = det M(U(1), (1, t)) with U(1) = [[1, 0, b], [0, a, c]]."""
    for v in (a, b, c):
        if not R.is_unit(v):
            raise NotAUnit(f"{v} is not a unit")
    X, k = PolyR.X(R), (lambda v: PolyR.const(v, R))
    W = [(k(1), k(0)), (k(0), k(a)), (k(b), k(c)), (k(1), X)]
    entries = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            if i != j:
                rest = [W[m] for m in range(4) if m not in (i, j)]
                entries[i][j] = (k(delta_sign(i + 1, j + 1)), _poly_det(rest, R))
    return admissible_det(entries, R)


def endgame_limit_check(a: int, b: int, c: int, R: Ring) -> Z0RElem:
    """lim_{t -> inf} det M(U(1), (1, t)); expected <(ac)^-1>^2."""
    return limit_admissible(endgame_function(a, b, c, R), None, R)


# ----------------------------------------------- induction step, traced

def _affine_minors(Uplus: UnimodSeq, x, R: Ring) -> dict:
    """L_ij(s, t) = det of (Uplus, xi)^_ij for xi = (s, t, x), as (c0, cs, ct)."""
    m = R.modulus
    N = Uplus.q + 1

    def minors(s, t):
        xi = (s, t) + tuple(x)
        W = list(Uplus.vectors) + [xi]
        return {(i, j): _minor_det(W, {i - 1, j - 1}, R)
                for i in range(1, N + 1) for j in range(i + 1, N + 1)}

    base, ds, dt = minors(0, 0), minors(1, 0), minors(0, 1)
    return {key: (base[key], (ds[key] - base[key]) % m, (dt[key] - base[key]) % m) for key in base}


def feasible_extensions(Uplus: UnimodSeq, x, R: Ring) -> list[tuple[int, int]]:
    """(s, t) for which every L_ij(s, t), i < j <= q, and every
    Pf Gamma(U_I, xi) for odd |I| < q - 1 is a unit (q = len(Uplus))."""
    q = Uplus.q
    L = _affine_minors(Uplus, x, R)
    out = []
    for s in range(R.modulus):
        for t in range(R.modulus):
            ok = all(R.is_unit(c0 + cs * s + ct * t) for (i, j), (c0, cs, ct) in L.items() if j <= q)
            if ok:
                xi = (s, t) + tuple(x)
                for size in range(1, q - 1, 2):
                    for I in itertools.combinations(range(q), size):
                        vecs = [Uplus.vectors[i] for i in I] + [xi]
                        G = [[form(u, v, R) for v in vecs] for u in vecs]
                        if not R.is_unit(pfaffian(G, R)):
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                out.append((s, t))
    return out


def truncate_normal_form(U: UnimodSeq, k: int) -> UnimodSeq:
    """Delete the first k rows and columns."""
    return UnimodSeq(U.n - k // 2, tuple(tuple(v[k:]) for v in U.vectors[k:]))


def induction_trace(B: SkewMat, x, R: Ring, gammas=None) -> dict:
    """Follow one descending step (l+1 -> l) of the radical-annihilator
    induction for B in Skew+_{2l+3} and x with (U(l), x) non-degenerate.

    Returns the affine minors, the t -> inf limits for each sampled gamma,
    the gamma -> 0 limit of <gamma>^2 f(gamma), and the block-determinant
    value it should equal.
    """
    if B.q % 2 == 0 or B.q < 5:
        raise ValueError("B must be in Skew+_{2l+3} with l >= 1")
    ell = (B.q - 3) // 2
    m = R.modulus
    Uplus = normal_form(B, ell + 1, R)
    alpha = Uplus.vectors[1][1]
    Ul = truncate_normal_form(Uplus, 2)
    if not is_nondeg_unimodular(UnimodSeq(ell, Ul.vectors + (tuple(x),)), R):
        raise InputNotNondegenerate("(U(l), x) is not non-degenerate")
    N = Uplus.q + 1
    L = _affine_minors(Uplus, x, R)
    c, a, b = L[(1, 2)]
    if not R.is_unit(a):
        raise LimitUndefined("coefficient of s in L_12 is not a unit")
    ainv = unit_inverse(R, a)

    def subst(key):
        # L(s, t) with s = a^-1 (gamma - c - b t): returns (t-coeff, const(gamma))
        c0, cs, ct = L[key]
        k = cs * ainv % m
        return (ct - k * b) % m, PolyR([c0 - k * c, k], R)

    def entry_key(i, j):
        return (min(i, j), max(i, j))

    trace: dict = {"ell": ell, "alpha": alpha, "minors": {f"{i},{j}": list(v) for (i, j), v in L.items()}}
    # t -> inf for sampled gamma values
    gammas = [g for g in range(m) if R.is_unit(g)] if gammas is None else list(gammas)
    t_limits = {}
    for g0 in gammas:
        ent = [[None] * N for _ in range(N)]
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                if i != j:
                    lead, const = subst(entry_key(i, j))
                    ent[i - 1][j - 1] = (PolyR.const(delta_sign(i, j), R), PolyR([const(g0), lead], R))
        try:
            t_limits[g0] = limit_admissible(admissible_det(ent, R), None, R)
        except LimitUndefined as exc:
            t_limits[g0] = str(exc)
    trace["t_limits"] = t_limits
    # entrywise t-limit with gamma kept symbolic, then rows 1, 2 times <gamma>
    ent = [[None] * N for _ in range(N)]
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i == j:
                continue
            lead, const = subst(entry_key(i, j))
            if lead % m:
                if not R.is_unit(lead):
                    raise LimitUndefined(f"t-coefficient of L_{i}{j} is not a unit")
                continue
            P = PolyR.const(delta_sign(i, j), R)
            if i <= 2:
                P = P * PolyR.X(R)
            ent[i - 1][j - 1] = _cancel_x(P, const)
    g = admissible_det(ent, R)
    trace["gamma_limit"] = limit_admissible(g, 0, R)
    inner = m_det(Ul, x, R)
    ainv_b = Z0RElem.basis(unit_inverse(R, alpha), R)
    trace["expected"] = -(ainv_b ** (2 * ell + 2)) * inner
    trace["expected_exponent_2l"] = -(ainv_b ** (2 * ell)) * inner
    trace["match"] = trace["gamma_limit"] == trace["expected"]
    return trace


def _cancel_x(P: PolyR, Q: PolyR):
    # divide numerator and denominator by X while both vanish at 0
    while not P.is_zero() and not Q.is_zero() and P.coeff(0) == 0 and Q.coeff(0) == 0:
        P = PolyR([P.coeff(k) for k in range(1, P.degree + 1)], P.R)
        Q = PolyR([Q.coeff(k) for k in range(1, Q.degree + 1)], Q.R)
    return (P, Q)
