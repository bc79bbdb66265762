"""Pure-Python twin of the compiled simulation kernel.

Consumes the same uniform stream in the same order, so both backends produce
bit-identical trajectories for a given seed.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np


def _pick(cum: list, u: float) -> int:
    j = bisect_right(cum, u)
    n = len(cum) - 1
    return j if j < n else n


def simulate_chunk(cum_m, cum_tab, tab_mod, sched, sched_periodic, restart_h, cum_restart,
                   upsilon, i0, x, a, u, out_x, out_a, out_w, out_b):
    """Advance the chain over ``u.shape[0]`` steps starting at time ``i0``.

    ``x, a`` is the pair at time ``i0 - 1``. Row ``r`` of ``u`` supplies the
    transition (or restart) uniform, the control uniform and the exploration
    uniform for time ``i0 + r``. Returns the last pair.
    """
    k, d = cum_m.shape[0], cum_m.shape[1]
    cm = [[list(cum_m[l, s]) for s in range(d)] for l in range(k)]
    ct = [[list(cum_tab[j, s]) for s in range(d)] for j in range(cum_tab.shape[0])]
    n_tab = len(ct)
    sch = [int(v) for v in sched]
    n_sched = len(sch)
    cr = list(cum_restart)
    uu = u.tolist()
    xs = [0] * len(uu)
    as_ = [0] * len(uu)
    ws = [0] * len(uu)
    bs = [0] * len(uu)
    for r, (u0, u1, u2) in enumerate(uu):
        i = i0 + r
        if restart_h > 0 and i % restart_h == 0:
            j = _pick(cr, u0)
            x, a = j // k, j % k
            bs[r] = 1
        else:
            x = _pick(cm[a][x], u0)
            if n_sched > 0:
                a = sch[i % n_sched] if sched_periodic else sch[i]
            elif upsilon >= 0.0 and u2 < upsilon:
                a = int(u1 * k)
                if a >= k:
                    a = k - 1
                ws[r] = 1
            else:
                t = i % tab_mod if tab_mod > 0 else min(i, n_tab - 1)
                a = _pick(ct[t][x], u1)
        xs[r] = x
        as_[r] = a
    out_x[:] = xs
    out_a[:] = as_
    out_w[:] = ws
    out_b[:] = bs
    return x, a
