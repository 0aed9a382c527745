# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled column reducer; same contract and output as ``_reduce.py``.

Coefficients are int64.  If any intermediate value leaves +-2**62 an
OverflowError is raised and the caller reruns the pure-Python version.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue
from libcpp.algorithm cimport sort

cnp.import_array()

cdef int64_t LIM = (<int64_t>1) << 62
cdef int64_t HALF = (<int64_t>1) << 31


cdef class _State:
    cdef int64_t n
    cdef vector[int64_t] time
    cdef vector[int64_t] piv
    cdef vector[int64_t] sgn
    cdef vector[vector[int64_t]] rhs_rows
    cdef vector[vector[int64_t]] rhs_vals
    cdef vector[int64_t] acc
    cdef vector[int64_t] touch_stamp
    cdef vector[int64_t] push_stamp
    cdef vector[int64_t] touched
    cdef vector[int64_t] out_rows
    cdef vector[int64_t] out_vals
    cdef int64_t cur

    def __cinit__(self, int64_t n):
        self.n = n
        self.time.assign(n, -1)
        self.acc.assign(n, 0)
        self.touch_stamp.assign(n, -1)
        self.push_stamp.assign(n, -1)
        self.cur = 0

    cdef inline void _touch(self, int64_t r):
        if self.touch_stamp[r] != self.cur:
            self.touch_stamp[r] = self.cur
            self.acc[r] = 0
            self.touched.push_back(r)

    cdef int _reduce(self, int64_t* rows, int64_t* vals, Py_ssize_t nnz) except -1:
        # reduce the column into out_rows/out_vals (sorted by row)
        cdef priority_queue[int64_t] heap
        cdef Py_ssize_t k
        cdef int64_t r, v, t, b, c, f, x, tr
        self.cur += 1
        self.touched.clear()
        for k in range(nnz):
            r = rows[k]
            self._touch(r)
            x = self.acc[r] + vals[k]
            if x >= LIM or x <= -LIM:
                raise OverflowError("coefficient overflow")
            self.acc[r] = x
            if self.time[r] >= 0 and self.push_stamp[r] != self.cur:
                self.push_stamp[r] = self.cur
                heap.push(-self.time[r])
        while not heap.empty():
            t = -heap.top()
            heap.pop()
            b = self.piv[t]
            c = self.acc[b]
            if c == 0:
                continue
            self.acc[b] = 0
            f = c * self.sgn[t]
            if f >= HALF or f <= -HALF:
                raise OverflowError("coefficient overflow")
            for k in range(<Py_ssize_t>self.rhs_rows[t].size()):
                r = self.rhs_rows[t][k]
                v = self.rhs_vals[t][k]
                if v >= HALF or v <= -HALF:
                    raise OverflowError("coefficient overflow")
                self._touch(r)
                x = self.acc[r] - f * v
                if x >= LIM or x <= -LIM:
                    raise OverflowError("coefficient overflow")
                self.acc[r] = x
                tr = self.time[r]
                if tr >= 0 and self.push_stamp[r] != self.cur:
                    self.push_stamp[r] = self.cur
                    heap.push(-tr)
        sort(self.touched.begin(), self.touched.end())
        self.out_rows.clear()
        self.out_vals.clear()
        for k in range(<Py_ssize_t>self.touched.size()):
            r = self.touched[k]
            if self.acc[r] != 0:
                self.out_rows.push_back(r)
                self.out_vals.push_back(self.acc[r])
        return 0

    cdef int _absorb(self, int64_t* rows, int64_t* vals, Py_ssize_t nnz) except -2:
        # 0: zero, 1: new rule, 2: pending (left in out_rows/out_vals)
        cdef Py_ssize_t k, m
        cdef int64_t best = -1, bestpos = -1, v, t
        cdef vector[int64_t] rr, vv
        self._reduce(rows, vals, nnz)
        m = <Py_ssize_t>self.out_rows.size()
        if m == 0:
            return 0
        for k in range(m):
            v = self.out_vals[k]
            if (v == 1 or v == -1) and self.out_rows[k] > best:
                best = self.out_rows[k]
                bestpos = k
        if best < 0:
            return 2
        t = <int64_t>self.piv.size()
        self.piv.push_back(best)
        self.sgn.push_back(self.out_vals[bestpos])
        for k in range(m):
            if k != bestpos:
                rr.push_back(self.out_rows[k])
                vv.push_back(self.out_vals[k])
        self.rhs_rows.push_back(rr)
        self.rhs_vals.push_back(vv)
        self.time[best] = t
        return 1


def reduce_columns(n_rows, indptr, indices, data):
    cdef int64_t n = n_rows
    cdef cnp.ndarray[int64_t, ndim=1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] dv = np.ascontiguousarray(data, dtype=np.int64)
    cdef _State st = _State(n)
    cdef Py_ssize_t j, a, b, k, ncols = ip.shape[0] - 1
    cdef int res
    cdef vector[vector[int64_t]] pend_rows, pend_vals, nxt_rows, nxt_vals
    cdef bint changed
    cdef int64_t* empty_ptr = NULL

    for j in range(ncols):
        a = ip[j]
        b = ip[j + 1]
        if a == b:
            continue
        res = st._absorb(&ix[a] if b > a else empty_ptr, &dv[a] if b > a else empty_ptr, b - a)
        if res == 2:
            pend_rows.push_back(st.out_rows)
            pend_vals.push_back(st.out_vals)

    while True:
        changed = False
        nxt_rows.clear()
        nxt_vals.clear()
        for k in range(<Py_ssize_t>pend_rows.size()):
            res = st._absorb(pend_rows[k].data(), pend_vals[k].data(),
                             <Py_ssize_t>pend_rows[k].size())
            if res == 1:
                changed = True
            elif res == 2:
                nxt_rows.push_back(st.out_rows)
                nxt_vals.push_back(st.out_vals)
        pend_rows.swap(nxt_rows)
        pend_vals.swap(nxt_vals)
        if not changed:
            break

    # survivors and their positions
    cdef vector[int64_t] surv
    cdef vector[int64_t] pos
    pos.assign(n, -1)
    for k in range(n):
        if st.time[k] < 0:
            pos[k] = <int64_t>surv.size()
            surv.push_back(k)
    cdef Py_ssize_t s = <Py_ssize_t>surv.size()
    cdef Py_ssize_t nr = <Py_ssize_t>st.piv.size()

    # fully reduced rules, latest first
    cdef vector[vector[int64_t]] full_idx, full_val
    full_idx.resize(nr)
    full_val.resize(nr)
    cdef vector[int64_t] dacc, dstamp, dtouched
    dacc.assign(s, 0)
    dstamp.assign(s, -1)
    cdef Py_ssize_t t, q, w
    cdef int64_t sg, r, v, tr, i, x, y
    for t in range(nr - 1, -1, -1):
        dtouched.clear()
        sg = -st.sgn[t]
        for q in range(<Py_ssize_t>st.rhs_rows[t].size()):
            r = st.rhs_rows[t][q]
            v = st.rhs_vals[t][q] * sg
            tr = st.time[r]
            if tr < 0:
                i = pos[r]
                if dstamp[i] != t:
                    dstamp[i] = t
                    dacc[i] = 0
                    dtouched.push_back(i)
                dacc[i] += v
            else:
                if v >= HALF or v <= -HALF:
                    raise OverflowError("coefficient overflow")
                for w in range(<Py_ssize_t>full_idx[tr].size()):
                    i = full_idx[tr][w]
                    y = full_val[tr][w]
                    if y >= HALF or y <= -HALF:
                        raise OverflowError("coefficient overflow")
                    if dstamp[i] != t:
                        dstamp[i] = t
                        dacc[i] = 0
                        dtouched.push_back(i)
                    x = dacc[i] + v * y
                    if x >= LIM or x <= -LIM:
                        raise OverflowError("coefficient overflow")
                    dacc[i] = x
        sort(dtouched.begin(), dtouched.end())
        for q in range(<Py_ssize_t>dtouched.size()):
            i = dtouched[q]
            if dacc[i] != 0:
                full_idx[t].push_back(i)
                full_val[t].push_back(dacc[i])

    order = sorted(range(nr), key=lambda tt: st.piv[tt])
    r_ptr = [0]
    r_idx = []
    r_val = []
    for tt in order:
        r_idx.extend(full_idx[tt])
        r_val.extend(full_val[tt])
        r_ptr.append(len(r_idx))

    uniq = set()
    for k in range(<Py_ssize_t>pend_rows.size()):
        items = [(pos[pend_rows[k][q]], pend_vals[k][q])
                 for q in range(<Py_ssize_t>pend_rows[k].size())]
        if items[0][1] < 0:
            items = [(a2, -b2) for a2, b2 in items]
        uniq.add(tuple(items))
    p_ptr = [0]
    p_idx = []
    p_val = []
    for items in sorted(uniq):
        p_idx.extend(a2 for a2, _ in items)
        p_val.extend(b2 for _, b2 in items)
        p_ptr.append(len(p_idx))

    return {
        "survivors": np.asarray(surv, dtype=np.int64),
        "rule_rows": np.asarray([st.piv[tt] for tt in order], dtype=np.int64),
        "rule_indptr": np.asarray(r_ptr, dtype=np.int64),
        "rule_indices": np.asarray(r_idx, dtype=np.int64),
        "rule_data": np.asarray(r_val, dtype=np.int64),
        "pending_indptr": np.asarray(p_ptr, dtype=np.int64),
        "pending_indices": np.asarray(p_idx, dtype=np.int64),
        "pending_data": np.asarray(p_val, dtype=np.int64),
    }
