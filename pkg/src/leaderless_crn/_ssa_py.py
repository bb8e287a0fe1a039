"""Pure-Python direct-method SSA kernel.

Reference implementation of the loop in ``_ssa.pyx``. Both consume
uniforms from the generator in blocks of ``BLOCK`` and perform the same
floating-point operations in the same order, so for a given seed they
produce identical trajectories.
"""

import math

BLOCK = 2048

QUIESCENT, HORIZON, EVENT_CAP, SILENT, MASS_BOUND = range(5)


def _propensity(kind, a, b, counts, volume):
    if kind == 1:
        return float(counts[a])
    if kind == 2:
        return (counts[a] * counts[b]) / volume
    c = counts[a]
    return 0.5 * (c * (c - 1)) / volume


def _vote_status(yes, no):
    if yes > 0 and no == 0:
        return 1
    if no > 0 and yes == 0:
        return 0
    return -1


def run_ssa(net, counts, volume, rng, t_max, max_events, silence, mass_cap, record):
    """Advance ``counts`` (modified in place) until a stop rule fires.

    Returns ``(status, n_events, t, last_change_t, times, reactions)``;
    the two lists are empty unless ``record`` is true.
    """
    kind = net.kind.tolist()
    ra = net.reactant_a.tolist()
    rb = net.reactant_b.tolist()
    d_ptr = net.delta_ptr.tolist()
    d_sp = net.delta_species.tolist()
    d_val = net.delta_value.tolist()
    dep_ptr = net.dep_ptr.tolist()
    dep_rx = net.dep_reactions.tolist()
    out_change = net.output_change.tolist()
    voter = net.voter.tolist()
    mass_delta = net.mass_delta.tolist()
    n_rx = len(kind)

    c = counts.tolist()
    prop = [_propensity(kind[r], ra[r], rb[r], c, volume) for r in range(n_rx)]
    total_mass = sum(c)
    yes = sum(n for n, v in zip(c, voter) if v == 1)
    no = sum(n for n, v in zip(c, voter) if v == 0)
    status_vote = _vote_status(yes, no)

    times = []
    rxns = []
    t = 0.0
    last_change = 0.0
    events = 0
    since = 0
    buf = []
    pos = BLOCK
    status = QUIESCENT
    while True:
        a0 = 0.0
        for p in prop:
            a0 += p
        if a0 <= 0.0:
            status = QUIESCENT
            break
        if events >= max_events:
            status = EVENT_CAP
            break
        if pos >= BLOCK:
            buf = rng.random(BLOCK).tolist()
            pos = 0
        u1 = buf[pos]
        u2 = buf[pos + 1]
        pos += 2
        dt = -math.log(1.0 - u1) / a0
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
        events += 1
        if record:
            times.append(t)
            rxns.append(chosen)
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
    counts[:] = c
    return status, events, t, last_change, times, rxns
