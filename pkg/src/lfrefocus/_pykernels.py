"""Pure-Python stream kernel; the reference for the compiled ``_kernels``."""

import numpy as np


def run_stream_kernel(x, states, we, expected, prod, use_table, latency, lam):
    """Clock one FIR module over a whole input row.

    Each PCLK the product of input ``t - lam`` is broadcast into the adder
    chain (add half-cycle), then the chain shifts towards PE ``W - 1`` whose
    content leaves the chain (shift half-cycle).  The chain output belongs to
    output index ``t - lam - latency``; it is latched when the write-enable bit
    of that output's phase is set and held otherwise.

    Returns ``(sums, valid, pclk_cycles)`` with undivided register contents.
    """
    x = np.asarray(x, dtype=np.int64)
    n = x.shape[0]
    M, W = states.shape
    sums = np.zeros(n, dtype=np.int64)
    valid = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return sums, valid, 0
    total = n + lam + W - 1
    st = states.tolist()
    xs = x.tolist()
    regs = [0] * W
    cnts = [0] * W
    out_sum, out_ok = 0, 0
    for t in range(total):
        m = t - lam
        if 0 <= m < n:
            xv = xs[m]
            row = st[m % M]
            for w in range(W):
                wt = row[w]
                if wt:
                    regs[w] += int(prod[wt, xv]) if use_table else wt * xv
                    cnts[w] += 1
        s, cn = regs[W - 1], cnts[W - 1]
        regs = [0] + regs[:-1]
        cnts = [0] + cnts[:-1]
        k = m - latency
        if 0 <= k < n:
            r = k % M
            if we[r]:
                out_sum, out_ok = s, int(cn == expected[r])
            sums[k] = out_sum
            valid[k] = out_ok
    return sums, valid, total
