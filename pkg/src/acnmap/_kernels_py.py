"""Pure-numpy evaluation kernels.

Drop-in fallback for the compiled extension. Arithmetic is arranged to be
bit-identical to the Cython kernels: per input, accumulators grow in
ascending index order, and the divider expression is evaluated with the
same operation sequence.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_BLOCK = 1 << 16


def exhaustive_eval(cap_pos, cap_neg, cb_pos, cb_neg, ca_pos, ca_neg,
                    weights, tau, v_max, start, stop):
    """Evaluate input codes [start, stop): bit i of each code is x_i.

    Returns (delta_vm, margin) where margin = w.x - tau.
    """
    n_bits = len(weights)
    total = stop - start
    delta = np.empty(total, dtype=np.float64)
    margin = np.empty(total, dtype=np.float64)
    pos = 0
    one = np.uint64(1)
    for lo in range(start, stop, _BLOCK):
        hi = min(lo + _BLOCK, stop)
        codes = np.arange(lo, hi, dtype=np.uint64)
        m = hi - lo
        acc_p = np.zeros(m, dtype=np.float64)
        acc_n = np.zeros(m, dtype=np.float64)
        acc_w = np.zeros(m, dtype=np.float64)
        for i in range(n_bits):
            bit = ((codes >> np.uint64(i)) & one).astype(np.float64)
            acc_p += cap_pos[i] * bit
            acc_n += cap_neg[i] * bit
            acc_w += weights[i] * bit
        vm_p = (v_max * (acc_p + cb_pos)) / ca_pos if ca_pos > 0.0 else np.zeros(m)
        vm_n = (v_max * (acc_n + cb_neg)) / ca_neg if ca_neg > 0.0 else np.zeros(m)
        delta[pos:pos + m] = vm_p - vm_n
        margin[pos:pos + m] = acc_w - tau
        pos += m
    return delta, margin


def corpus_eval(cap_pos, cap_neg, cb_pos, cb_neg, ca_pos, ca_neg,
                weights, tau, v_max, x):
    """Evaluate explicit input rows ``x`` (shape (rows, n), 0/1 bytes).

    Returns (delta_vm, margin) per row.
    """
    x = np.ascontiguousarray(x, dtype=np.uint8)
    rows, n_bits = x.shape
    acc_p = np.zeros(rows, dtype=np.float64)
    acc_n = np.zeros(rows, dtype=np.float64)
    acc_w = np.zeros(rows, dtype=np.float64)
    for i in range(n_bits):
        bit = x[:, i].astype(np.float64)
        acc_p += cap_pos[i] * bit
        acc_n += cap_neg[i] * bit
        acc_w += weights[i] * bit
    vm_p = (v_max * (acc_p + cb_pos)) / ca_pos if ca_pos > 0.0 else np.zeros(rows)
    vm_n = (v_max * (acc_n + cb_neg)) / ca_neg if ca_neg > 0.0 else np.zeros(rows)
    return vm_p - vm_n, acc_w - tau
