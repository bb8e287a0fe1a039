# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled breadth-first reachability exploration; mirrors ``_explore_py``."""

import numpy as np
cimport numpy as cnp
from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING
from libc.string cimport memcpy

cnp.import_array()

DEF COUNT_MAX = 65535


cdef class _Buf:
    cdef object arr
    cdef int[::1] mv
    cdef Py_ssize_t n

    def __init__(self):
        self.arr = np.empty(4096, dtype=np.int32)
        self.mv = self.arr
        self.n = 0

    cdef inline void push(self, long long v) except *:
        if self.n >= self.mv.shape[0]:
            self.arr = np.resize(self.arr, 2 * self.mv.shape[0])
            self.mv = self.arr
        self.mv[self.n] = <int>v
        self.n += 1

    def view(self):
        return self.arr[:self.n].copy()


def explore(net, init, long long budget):
    cdef signed char[::1] kind = net.kind
    cdef long long[::1] ra = net.reactant_a
    cdef long long[::1] rb = net.reactant_b
    cdef long long[::1] d_ptr = net.delta_ptr
    cdef long long[::1] d_sp = net.delta_species
    cdef long long[::1] d_val = net.delta_value
    cdef Py_ssize_t n_rx = kind.shape[0]
    cdef Py_ssize_t n_sp = net.voter.shape[0]
    cdef Py_ssize_t nbytes = n_sp * sizeof(cnp.uint16_t)

    cdef cnp.uint16_t[::1] cur = np.zeros(n_sp, dtype=np.uint16)
    cdef cnp.uint16_t[::1] new = np.zeros(n_sp, dtype=np.uint16)
    cdef long long[::1] wide = np.zeros(n_sp, dtype=np.int64)
    cdef Py_ssize_t r, q, sp, head = 0, j, n_nodes
    cdef signed char k
    cdef long long val
    cdef bint capped = False, ok

    init_arr = np.asarray(init, dtype=np.int64)
    if (init_arr > COUNT_MAX).any():
        raise OverflowError(f"counts above {COUNT_MAX} are not supported")
    cur_arr = init_arr.astype(np.uint16)
    key0 = cur_arr.tobytes()
    cdef dict index = {key0: 0}
    cdef list keys = [key0]
    cdef _Buf parent = _Buf()
    cdef _Buf parent_rx = _Buf()
    cdef _Buf src = _Buf()
    cdef _Buf dst = _Buf()
    cdef _Buf rxn = _Buf()
    parent.push(-1)
    parent_rx.push(-1)

    while head < len(keys) and not capped:
        memcpy(&cur[0], PyBytes_AS_STRING(keys[head]), nbytes)
        for r in range(n_rx):
            k = kind[r]
            if k == 1:
                if cur[ra[r]] < 1:
                    continue
            elif k == 2:
                if cur[ra[r]] < 1 or cur[rb[r]] < 1:
                    continue
            elif cur[ra[r]] < 2:
                continue
            for sp in range(n_sp):
                wide[sp] = cur[sp]
            for q in range(d_ptr[r], d_ptr[r + 1]):
                sp = d_sp[q]
                wide[sp] += d_val[q]
                if wide[sp] > COUNT_MAX:
                    raise OverflowError(f"counts above {COUNT_MAX} are not supported")
            for sp in range(n_sp):
                new[sp] = <cnp.uint16_t>wide[sp]
            key = PyBytes_FromStringAndSize(<char*>&new[0], nbytes)
            got = index.get(key)
            if got is None:
                n_nodes = len(keys)
                if n_nodes >= budget:
                    capped = True
                    break
                j = n_nodes
                index[key] = j
                keys.append(key)
                parent.push(head)
                parent_rx.push(r)
            else:
                j = got
            src.push(head)
            dst.push(j)
            rxn.push(r)
        head += 1

    index = None
    configs = np.frombuffer(b"".join(keys), dtype=np.uint16).reshape(len(keys), n_sp)
    return (configs, parent.view(), parent_rx.view(), src.view(), dst.view(), rxn.view(),
            capped)
