"""Homology of sparse integral chain complexes.

The work is split in two.  A streaming sparse elimination (see ``_reduce``)
consumes the columns of d_{p+1} and removes every cell of degree p that can
be cancelled against a unit entry.  What survives is small, and a dense Smith
normal form on it yields invariant factors, coordinates and cycle
representatives.

Cells of degree p are never cancelled against degree p-1, so a survivor
vector is literally a chain in C_p and representatives need no lifting.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from . import _reduce
from .errors import NotAComplex
from .ringkernel import FGAbelianGroup, invariant_factors, smith_decomposition

try:
    from . import _reduce_cy
except ImportError:  # extension not built
    _reduce_cy = None


def available_backends() -> list[str]:
    return ["compiled", "python"] if _reduce_cy is not None else ["python"]


def default_backend() -> str:
    if _reduce_cy is None or os.environ.get("SPSTAB_PURE", "") not in ("", "0"):
        return "python"
    return "compiled"


def reduce_columns(n_rows, indptr, indices, data, backend: str | None = None):
    backend = backend or default_backend()
    data = np.asarray(data)
    if backend == "compiled" and _reduce_cy is not None and data.dtype != object:
        try:
            return _reduce_cy.reduce_columns(
                n_rows,
                np.asarray(indptr, dtype=np.int64),
                np.asarray(indices, dtype=np.int64),
                data.astype(np.int64),
            )
        except OverflowError:
            pass
    return _reduce.reduce_columns(n_rows, indptr, indices, data)


class Reduction:
    """Cells of one degree modulo the boundaries streamed into the reducer."""

    def __init__(self, n_rows: int, raw: dict):
        self.n_rows = n_rows
        self.survivors = raw["survivors"]
        self.pos = np.full(n_rows, -1, dtype=np.int64)
        self.pos[self.survivors] = np.arange(len(self.survivors))
        self._rule_rows = raw["rule_rows"]
        self._rptr = raw["rule_indptr"]
        self._ridx = raw["rule_indices"]
        self._rval = raw["rule_data"]
        ptr, idx, val = raw["pending_indptr"], raw["pending_indices"], raw["pending_data"]
        self.pending = [
            dict(zip(idx[ptr[j]:ptr[j + 1]].tolist(), val[ptr[j]:ptr[j + 1]].tolist()))
            for j in range(len(ptr) - 1)
        ]

    @classmethod
    def from_csc(cls, n_rows: int, mat, backend=None) -> "Reduction":
        mat = sp.csc_matrix(mat)
        raw = reduce_columns(n_rows, mat.indptr, mat.indices, mat.data, backend)
        return cls(n_rows, raw)

    @classmethod
    def trivial(cls, n_rows: int) -> "Reduction":
        return cls(n_rows, reduce_columns(n_rows, [0], [], [], "python"))

    def project(self, chain: dict) -> dict:
        """Rewrite a chain (cell -> coeff) on the survivors, modulo boundaries."""
        out: dict = {}
        for cell, c in chain.items():
            if not c:
                continue
            i = int(self.pos[cell])
            if i >= 0:
                out[i] = out.get(i, 0) + c
                continue
            t = int(np.searchsorted(self._rule_rows, cell))
            a, b = int(self._rptr[t]), int(self._rptr[t + 1])
            for j, v in zip(self._ridx[a:b].tolist(), self._rval[a:b].tolist()):
                out[j] = out.get(j, 0) + c * v
        return {k: v for k, v in out.items() if v}


class HomologyGroup:
    """H_p with explicit coordinates and cycle representatives.

    ``moduli[i]`` is the order of the i-th generator (0 for a free one);
    ``coords`` maps a cycle to its coordinate vector and ``representative``
    gives a cycle for each generator.
    """

    def __init__(self, red: Reduction, boundary=None):
        self.reduction = red
        surv = red.survivors.tolist()
        s = len(surv)
        D = _dense_boundary(boundary, surv) if boundary is not None else []
        Dd, _, V, _, Vi = smith_decomposition(D, want_inverses=True, left=False, ncols=s)
        r = sum(1 for i in range(min(len(Dd), s)) if Dd[i][i])
        k = s - r
        kc = Vi[r:]
        kb = [row[r:] for row in V]
        rel = [[sum(row[i] * c for i, c in col.items()) for col in red.pending] for row in kc]
        if k and red.pending:
            D2, U2, _, U2i, _ = smith_decomposition(rel, want_inverses=True, right=False)
            diag = [D2[i][i] if i < len(red.pending) else 0 for i in range(k)]
        else:
            U2 = [[int(i == j) for j in range(k)] for i in range(k)]
            U2i = U2
            diag = [0] * k
        sel = [i for i in range(k) if diag[i] != 1]
        self.moduli = [abs(diag[i]) for i in sel]
        rows = [[sum(U2[i][a] * kc[a][j] for a in range(k) if U2[i][a]) for j in range(s)]
                for i in sel]
        self._coord_rows = [{j: x for j, x in enumerate(row) if x} for row in rows]
        self._reps = []
        for i in sel:
            vec = [sum(kb[j][a] * U2i[a][i] for a in range(k) if U2i[a][i]) for j in range(s)]
            self._reps.append({surv[j]: x for j, x in enumerate(vec) if x})
        self.group = FGAbelianGroup(
            sum(1 for d in self.moduli if d == 0),
            tuple(d for d in self.moduli if d),
        )

    def __len__(self):
        return len(self.moduli)

    def coords(self, chain: dict) -> tuple:
        x = self.reduction.project(chain)
        out = []
        for row, d in zip(self._coord_rows, self.moduli):
            y = sum(row.get(j, 0) * c for j, c in x.items())
            out.append(y % d if d else y)
        return tuple(out)

    def representative(self, i: int) -> dict:
        return dict(self._reps[i])

    def reduce_coords(self, vec) -> tuple:
        return tuple(v % d if d else v for v, d in zip(vec, self.moduli))


def _dense_boundary(boundary, cells) -> list:
    cols = boundary(cells)
    rows = sorted({r for col in cols for r in col})
    if not rows:
        return []
    ri = {r: i for i, r in enumerate(rows)}
    D = [[0] * len(cells) for _ in rows]
    for j, col in enumerate(cols):
        for r, v in col.items():
            D[ri[r]][j] += v
    return D


def _rank_of(D) -> int:
    if not D or not D[0]:
        return 0
    return len(invariant_factors(D))


def induced_matrix(src: HomologyGroup, dst: HomologyGroup, chain_map) -> list:
    """Matrix (rows = target generators) of the map induced by ``chain_map``.

    ``chain_map`` takes a chain (cell -> coeff) and returns its image chain.
    """
    cols = [dst.coords(chain_map(src.representative(i))) for i in range(len(src))]
    return [[cols[j][i] for j in range(len(src))] for i in range(len(dst))]


# ----------------------------------------------------------- chain complexes

class ChainComplex:
    """Free chain complex with sparse integer differentials.

    ``ranks[p]`` is the rank of C_p and ``diffs[p]`` the matrix of
    d_p: C_p -> C_{p-1} (shape ranks[p-1] x ranks[p]).
    """

    def __init__(self, ranks: dict, diffs: dict):
        self.ranks = dict(ranks)
        self.diffs = {p: sp.csr_matrix(m, dtype=np.int64) for p, m in diffs.items()}

    @property
    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def rank(self, p: int) -> int:
        return self.ranks.get(p, 0)

    def d(self, p: int):
        if p in self.diffs:
            return self.diffs[p]
        return sp.csr_matrix((self.rank(p - 1), self.rank(p)), dtype=np.int64)

    def dd_is_zero(self, p: int) -> bool:
        prod = self.d(p - 1) @ self.d(p)
        prod.eliminate_zeros()
        return prod.nnz == 0

    def check(self):
        for p in self.degrees:
            if not self.dd_is_zero(p):
                raise NotAComplex(f"d_{p - 1} o d_{p} is nonzero")


def homology_group(C: ChainComplex, p: int, backend=None) -> HomologyGroup:
    """H_p(C) with coordinates and representatives."""
    red = Reduction.from_csc(C.rank(p), C.d(p + 1), backend)
    dp = C.d(p).tocsc()

    def boundary(cells):
        out = []
        for c in cells:
            a, b = dp.indptr[c], dp.indptr[c + 1]
            out.append(dict(zip(dp.indices[a:b].tolist(), dp.data[a:b].tolist())))
        return out

    return HomologyGroup(red, boundary if dp.nnz else None)


def complex_homology(C: ChainComplex, backend=None, degrees=None) -> list[FGAbelianGroup]:
    """Homology groups H_p for p in ``degrees`` (default all), via Smith normal form."""
    C.check()
    out = []
    for p in (C.degrees if degrees is None else degrees):
        n = C.rank(p)
        red = Reduction.from_csc(n, C.d(p + 1), backend)
        surv = red.survivors
        s = len(surv)
        dp = C.d(p)
        if dp.nnz and s:
            sub = dp[:, surv].tocsc()
            sub = sub[np.unique(sub.indices), :] if sub.nnz else sub
            r = _rank_of(sub.toarray().tolist()) if sub.nnz else 0
        else:
            r = 0
        if red.pending:
            rel = [[col.get(i, 0) for col in red.pending] for i in range(s)]
            inv = invariant_factors(rel)
        else:
            inv = []
        torsion = tuple(sorted(abs(d) for d in inv if abs(d) > 1))
        out.append(FGAbelianGroup(s - r - len(inv), torsion))
    return out
