# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels: divider voltages and dot-product margins
over exhaustive input codes or explicit input rows.

Arithmetic mirrors _kernels_py exactly (ascending-index accumulation, same
operation order) so both backends give bit-identical results.
"""

import numpy as np

BACKEND = "compiled"


def exhaustive_eval(double[::1] cap_pos, double[::1] cap_neg,
                    double cb_pos, double cb_neg,
                    double ca_pos, double ca_neg,
                    double[::1] weights, double tau, double v_max,
                    unsigned long long start, unsigned long long stop):
    cdef Py_ssize_t n_bits = weights.shape[0]
    cdef Py_ssize_t total = <Py_ssize_t>(stop - start)
    delta_arr = np.empty(total, dtype=np.float64)
    margin_arr = np.empty(total, dtype=np.float64)
    cdef double[::1] delta = delta_arr
    cdef double[::1] margin = margin_arr
    cdef unsigned long long code
    cdef Py_ssize_t k, i
    cdef double acc_p, acc_n, acc_w, bit, vm_p, vm_n
    for k in range(total):
        code = start + <unsigned long long>k
        acc_p = 0.0
        acc_n = 0.0
        acc_w = 0.0
        for i in range(n_bits):
            bit = <double>((code >> i) & 1ULL)
            acc_p = acc_p + cap_pos[i] * bit
            acc_n = acc_n + cap_neg[i] * bit
            acc_w = acc_w + weights[i] * bit
        vm_p = (v_max * (acc_p + cb_pos)) / ca_pos if ca_pos > 0.0 else 0.0
        vm_n = (v_max * (acc_n + cb_neg)) / ca_neg if ca_neg > 0.0 else 0.0
        delta[k] = vm_p - vm_n
        margin[k] = acc_w - tau
    return delta_arr, margin_arr


def corpus_eval(double[::1] cap_pos, double[::1] cap_neg,
                double cb_pos, double cb_neg,
                double ca_pos, double ca_neg,
                double[::1] weights, double tau, double v_max,
                x):
    x_arr = np.ascontiguousarray(x, dtype=np.uint8)
    cdef const unsigned char[:, ::1] xv = x_arr
    cdef Py_ssize_t rows = xv.shape[0]
    cdef Py_ssize_t n_bits = xv.shape[1]
    if n_bits != weights.shape[0]:
        raise ValueError("input width does not match weight vector")
    delta_arr = np.empty(rows, dtype=np.float64)
    margin_arr = np.empty(rows, dtype=np.float64)
    cdef double[::1] delta = delta_arr
    cdef double[::1] margin = margin_arr
    cdef Py_ssize_t r, i
    cdef double acc_p, acc_n, acc_w, bit, vm_p, vm_n
    for r in range(rows):
        acc_p = 0.0
        acc_n = 0.0
        acc_w = 0.0
        for i in range(n_bits):
            bit = <double>xv[r, i]
            acc_p = acc_p + cap_pos[i] * bit
            acc_n = acc_n + cap_neg[i] * bit
            acc_w = acc_w + weights[i] * bit
        vm_p = (v_max * (acc_p + cb_pos)) / ca_pos if ca_pos > 0.0 else 0.0
        vm_n = (v_max * (acc_n + cb_neg)) / ca_neg if ca_neg > 0.0 else 0.0
        delta[r] = vm_p - vm_n
        margin[r] = acc_w - tau
    return delta_arr, margin_arr
