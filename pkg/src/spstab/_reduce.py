"""Pure-Python column reducer (fallback for the compiled ``_reduce_cy``).

Input is a sparse integer matrix in CSC form whose columns span a lattice B
inside Z^n_rows.  Columns are streamed; whenever a reduced column has a
coefficient of +-1 the corresponding row is eliminated, giving a rewrite rule
``row == combination of other rows (mod B)``.  Columns with no unit entry are
kept as pending relations.  At the end every eliminated row is expressed in
terms of the surviving rows, and the pending relations (also on survivors)
span B restricted to the survivors.

The result of reducing a vector is independent of the order in which rules
are applied, so both implementations produce identical output.
"""

from __future__ import annotations

import heapq

import numpy as np


def _normalize(col: dict) -> tuple:
    items = sorted(col.items())
    if items[0][1] < 0:
        items = [(r, -v) for r, v in items]
    return tuple(items)


def reduce_columns(n_rows, indptr, indices, data):
    time = [-1] * n_rows
    piv: list[int] = []
    sgn: list[int] = []
    rhs: list[tuple] = []

    def reduce(col: dict) -> dict:
        heap = [time[r] for r in col if time[r] >= 0]
        heapq.heapify(heap)
        seen = set(heap)
        while heap:
            t = heapq.heappop(heap)
            c = col.pop(piv[t], 0)
            if not c:
                continue
            f = c * sgn[t]
            rows, vals = rhs[t]
            for r, v in zip(rows, vals):
                x = col.get(r, 0) - f * v
                if x:
                    col[r] = x
                else:
                    del col[r]
                tr = time[r]
                if tr >= 0 and tr not in seen:
                    seen.add(tr)
                    heapq.heappush(heap, tr)
        return col

    def absorb(col: dict):
        # returns None (zero), True (new rule) or the reduced column
        col = reduce(col)
        if not col:
            return None
        best = -1
        for r, v in col.items():
            if (v == 1 or v == -1) and r > best:
                best = r
        if best < 0:
            return col
        t = len(piv)
        piv.append(best)
        sgn.append(col.pop(best))
        rows = sorted(col)
        rhs.append((rows, [col[r] for r in rows]))
        time[best] = t
        return True

    pending = []
    indptr = np.asarray(indptr)
    indices = np.asarray(indices)
    data = np.asarray(data)
    for j in range(len(indptr) - 1):
        a, b = int(indptr[j]), int(indptr[j + 1])
        col: dict = {}
        for r, v in zip(indices[a:b].tolist(), data[a:b].tolist()):
            x = col.get(r, 0) + v
            if x:
                col[r] = x
            else:
                col.pop(r, None)
        if not col:
            continue
        res = absorb(col)
        if res is not None and res is not True:
            pending.append(res)

    while True:
        changed = False
        nxt = []
        for col in pending:
            res = absorb(dict(col))
            if res is True:
                changed = True
            elif res is not None:
                nxt.append(res)
        pending = nxt
        if not changed:
            break

    survivors = [r for r in range(n_rows) if time[r] < 0]
    pos = {r: i for i, r in enumerate(survivors)}

    full: list = [None] * len(piv)
    for t in range(len(piv) - 1, -1, -1):
        acc: dict = {}
        s = -sgn[t]
        rows, vals = rhs[t]
        for r, v in zip(rows, vals):
            tr = time[r]
            if tr < 0:
                i = pos[r]
                acc[i] = acc.get(i, 0) + s * v
            else:
                for i, w in full[tr].items():
                    acc[i] = acc.get(i, 0) + s * v * w
        full[t] = {i: x for i, x in acc.items() if x}

    order = sorted(range(len(piv)), key=lambda t: piv[t])
    rule_rows = [piv[t] for t in order]
    r_ptr, r_idx, r_val = [0], [], []
    for t in order:
        items = sorted(full[t].items())
        r_idx.extend(i for i, _ in items)
        r_val.extend(x for _, x in items)
        r_ptr.append(len(r_idx))

    uniq = sorted({_normalize({pos[r]: v for r, v in col.items()}) for col in pending})
    p_ptr, p_idx, p_val = [0], [], []
    for items in uniq:
        p_idx.extend(i for i, _ in items)
        p_val.extend(x for _, x in items)
        p_ptr.append(len(p_idx))

    def arr(x):
        return np.asarray(x, dtype=object if _big(x) else np.int64)

    return {
        "survivors": np.asarray(survivors, dtype=np.int64),
        "rule_rows": np.asarray(rule_rows, dtype=np.int64),
        "rule_indptr": np.asarray(r_ptr, dtype=np.int64),
        "rule_indices": np.asarray(r_idx, dtype=np.int64),
        "rule_data": arr(r_val),
        "pending_indptr": np.asarray(p_ptr, dtype=np.int64),
        "pending_indices": np.asarray(p_idx, dtype=np.int64),
        "pending_data": arr(p_val),
    }


def _big(vals) -> bool:
    lim = 1 << 62
    return any(v >= lim or v <= -lim for v in vals)
