# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled direct-method SSA kernel; mirrors ``_ssa_py.run_ssa`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log

cnp.import_array()

DEF BLOCK = 2048

cdef int QUIESCENT = 0, HORIZON = 1, EVENT_CAP = 2, SILENT = 3, MASS_BOUND = 4


cdef inline double _propensity(signed char kind, long long a, long long b,
                               long long[::1] c, double volume) noexcept nogil:
    cdef long long n
    if kind == 1:
        return <double>c[a]
    if kind == 2:
        return <double>(c[a] * c[b]) / volume
    n = c[a]
    return 0.5 * <double>(n * (n - 1)) / volume


cdef inline int _vote_status(long long yes, long long no) noexcept nogil:
    if yes > 0 and no == 0:
        return 1
    if no > 0 and yes == 0:
        return 0
    return -1


def run_ssa(net, cnp.ndarray counts_arr, double volume, rng, double t_max,
            long long max_events, long long silence, long long mass_cap, bint record):
    cdef signed char[::1] kind = net.kind
    cdef long long[::1] ra = net.reactant_a
    cdef long long[::1] rb = net.reactant_b
    cdef long long[::1] d_ptr = net.delta_ptr
    cdef long long[::1] d_sp = net.delta_species
    cdef long long[::1] d_val = net.delta_value
    cdef long long[::1] dep_ptr = net.dep_ptr
    cdef long long[::1] dep_rx = net.dep_reactions
    cdef unsigned char[::1] out_change = net.output_change
    cdef signed char[::1] voter = net.voter
    cdef long long[::1] mass_delta = net.mass_delta
    cdef Py_ssize_t n_rx = kind.shape[0]
    cdef Py_ssize_t n_sp = voter.shape[0]

    cdef long long[::1] c = np.ascontiguousarray(counts_arr, dtype=np.int64).copy()
    cdef double[::1] prop = np.empty(n_rx, dtype=np.float64)
    cdef double[::1] buf = np.empty(0, dtype=np.float64)
    cdef Py_ssize_t r, q, e, sp, chosen, pos = BLOCK
    cdef long long dv, total_mass = 0, yes = 0, no = 0, events = 0, since = 0
    cdef int status = QUIESCENT, status_vote, new_vote, changed
    cdef signed char v
    cdef double a0, u1, u2, dt, target, acc, p, t = 0.0, last_change = 0.0

    times_arr = np.empty(1024 if record else 0, dtype=np.float64)
    rxns_arr = np.empty(1024 if record else 0, dtype=np.int64)
    cdef double[::1] times = times_arr
    cdef long long[::1] rxns = rxns_arr
    cdef Py_ssize_t cap = times.shape[0]

    for r in range(n_rx):
        prop[r] = _propensity(kind[r], ra[r], rb[r], c, volume)
    for sp in range(n_sp):
        total_mass += c[sp]
        if voter[sp] == 1:
            yes += c[sp]
        elif voter[sp] == 0:
            no += c[sp]
    status_vote = _vote_status(yes, no)

    while True:
        a0 = 0.0
        for r in range(n_rx):
            a0 += prop[r]
        if a0 <= 0.0:
            status = QUIESCENT
            break
        if events >= max_events:
            status = EVENT_CAP
            break
        if pos >= BLOCK:
            buf = rng.random(BLOCK)
            pos = 0
        u1 = buf[pos]
        u2 = buf[pos + 1]
        pos += 2
        dt = -log(1.0 - u1) / a0
        if t + dt > t_max:
            t = t_max
            status = HORIZON
            break
        t += dt
        target = u2 * a0
        acc = 0.0
        chosen = -1
        for r in range(n_rx):
            p = prop[r]
            if p > 0.0:
                chosen = r
                acc += p
                if acc > target:
                    break
        for q in range(d_ptr[chosen], d_ptr[chosen + 1]):
            sp = d_sp[q]
            dv = d_val[q]
            c[sp] += dv
            v = voter[sp]
            if v == 1:
                yes += dv
            elif v == 0:
                no += dv
        for q in range(d_ptr[chosen], d_ptr[chosen + 1]):
            sp = d_sp[q]
            for e in range(dep_ptr[sp], dep_ptr[sp + 1]):
                r = dep_rx[e]
                prop[r] = _propensity(kind[r], ra[r], rb[r], c, volume)
        if record:
            if events >= cap:
                cap *= 2
                times_arr = np.resize(times_arr, cap)
                rxns_arr = np.resize(rxns_arr, cap)
                times = times_arr
                rxns = rxns_arr
            times[events] = t
            rxns[events] = chosen
        events += 1
        changed = out_change[chosen]
        new_vote = _vote_status(yes, no)
        if new_vote != status_vote:
            status_vote = new_vote
            changed = 1
        if changed:
            last_change = t
            since = 0
        else:
            since += 1
        total_mass += mass_delta[chosen]
        if mass_cap >= 0 and total_mass > mass_cap:
            status = MASS_BOUND
            break
        if silence > 0 and since >= silence:
            status = SILENT
            break

    counts_arr[:] = np.asarray(c)
    if record:
        return status, events, t, last_change, times_arr[:events].tolist(), rxns_arr[:events].tolist()
    return status, events, t, last_change, [], []
