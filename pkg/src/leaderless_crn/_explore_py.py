"""Pure-Python breadth-first reachability exploration.

Reference for ``_explore.pyx``; both return identical graphs (same node
numbering, same edge order).
"""

import numpy as np

COUNT_MAX = 65535


def explore(net, init, budget):
    """BFS closure of ``init`` under all reactions of ``net``.

    Returns ``(configs, parent, parent_rx, src, dst, rxn, capped)`` where
    ``configs`` is an ``(N, S)`` uint16 array, ``parent``/``parent_rx``
    give the BFS tree, and ``capped`` is true when the node budget stopped
    the search before closure.
    """
    kind = net.kind.tolist()
    ra = net.reactant_a.tolist()
    rb = net.reactant_b.tolist()
    d_ptr = net.delta_ptr.tolist()
    d_sp = net.delta_species.tolist()
    d_val = net.delta_value.tolist()
    n_rx = len(kind)
    n_sp = len(net.voter)
    deltas = [
        [(d_sp[q], d_val[q]) for q in range(d_ptr[r], d_ptr[r + 1])] for r in range(n_rx)
    ]

    start = tuple(int(v) for v in init)
    if any(v > COUNT_MAX for v in start):
        raise OverflowError(f"counts above {COUNT_MAX} are not supported")
    index = {start: 0}
    configs = [start]
    parent = [-1]
    parent_rx = [-1]
    src, dst, rxn = [], [], []
    capped = False
    head = 0
    while head < len(configs) and not capped:
        c = configs[head]
        for r in range(n_rx):
            k = kind[r]
            if k == 1:
                if c[ra[r]] < 1:
                    continue
            elif k == 2:
                if c[ra[r]] < 1 or c[rb[r]] < 1:
                    continue
            elif c[ra[r]] < 2:
                continue
            new = list(c)
            for sp, dv in deltas[r]:
                new[sp] += dv
                if new[sp] > COUNT_MAX:
                    raise OverflowError(f"counts above {COUNT_MAX} are not supported")
            key = tuple(new)
            j = index.get(key)
            if j is None:
                if len(configs) >= budget:
                    capped = True
                    break
                j = len(configs)
                index[key] = j
                configs.append(key)
                parent.append(head)
                parent_rx.append(r)
            src.append(head)
            dst.append(j)
            rxn.append(r)
        head += 1
    arr = np.asarray(configs, dtype=np.uint16).reshape(len(configs), n_sp)
    i32 = np.int32
    return (
        arr,
        np.asarray(parent, dtype=i32),
        np.asarray(parent_rx, dtype=i32),
        np.asarray(src, dtype=i32),
        np.asarray(dst, dtype=i32),
        np.asarray(rxn, dtype=i32),
        capped,
    )
