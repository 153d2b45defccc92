# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled point-at-a-time executor for kernel programs.

Twin of the NumPy backend; identical opcode semantics, but iterates points in
C with a fixed-size complex stack, which wins on scalar-heavy workloads such
as ODE stepping and adaptive refinement.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h":
    double complex cexp(double complex) nogil
    double cabs(double complex) nogil
    double complex conj(double complex) nogil

DEF STACK_CAP = 64

DEF OP_Z = 0
DEF OP_POW = 1
DEF OP_POLY = 2
DEF OP_MOBIUS = 3
DEF OP_EXPAFF = 4
DEF OP_BLASCHKE = 5
DEF OP_ADD = 6
DEF OP_MUL = 7
DEF OP_SCALE = 8


def eval_program(int[::1] ops, int[::1] ia, int[::1] ib,
                 double complex[::1] cargs, double complex[::1] z,
                 double complex[::1] out_w, double complex[::1] out_dw,
                 cnp.uint8_t[::1] out_bad, double pole_tol):
    cdef Py_ssize_t npts = z.shape[0]
    cdef Py_ssize_t nops = ops.shape[0]
    cdef Py_ssize_t i, j, k
    cdef int op, off, m, p, q
    cdef int top
    cdef double complex sw[STACK_CAP]
    cdef double complex sd[STACK_CAP]
    cdef double complex v, dv, u, du, acc, dacc, den, a, b, c, d, e, alpha, base
    cdef double aa
    cdef bint flagged

    with nogil:
        for i in range(npts):
            top = -1
            flagged = 0
            for j in range(nops):
                op = ops[j]
                if op == OP_Z:
                    top += 1
                    sw[top] = z[i]
                    sd[top] = 1.0
                elif op == OP_POW:
                    p = ia[j]
                    v = sw[top]
                    # integer power by repeated multiplication
                    acc = 1.0
                    base = v
                    q = p - 1
                    while q > 0:
                        if q & 1:
                            acc = acc * base
                        base = base * base
                        q >>= 1
                    sd[top] = p * acc * sd[top]
                    sw[top] = acc * v
                elif op == OP_POLY:
                    off = ia[j]
                    m = ib[j]
                    v = sw[top]
                    acc = cargs[off + m - 1]
                    dacc = 0.0
                    for k in range(m - 2, -1, -1):
                        dacc = dacc * v + acc
                        acc = acc * v + cargs[off + k]
                    sd[top] = dacc * sd[top]
                    sw[top] = acc
                elif op == OP_MOBIUS:
                    off = ia[j]
                    a = cargs[off]
                    b = cargs[off + 1]
                    c = cargs[off + 2]
                    d = cargs[off + 3]
                    v = sw[top]
                    den = c * v + d
                    if c != 0 and cabs(den) < pole_tol * cabs(c):
                        flagged = 1
                        den = 1.0
                    sd[top] = (a * d - b * c) / (den * den) * sd[top]
                    sw[top] = (a * v + b) / den
                elif op == OP_EXPAFF:
                    off = ia[j]
                    c = cargs[off]
                    d = cargs[off + 1]
                    e = cexp(d * sw[top])
                    sd[top] = -c * d * e * sd[top]
                    sw[top] = c * (1.0 - e)
                elif op == OP_BLASCHKE:
                    off = ia[j]
                    alpha = cargs[off]
                    v = sw[top]
                    den = 1.0 - conj(alpha) * v
                    aa = cabs(alpha)
                    if aa != 0 and cabs(den) < pole_tol * aa:
                        flagged = 1
                        den = 1.0
                    sd[top] = (1.0 - aa * aa) / (den * den) * sd[top]
                    sw[top] = (v - alpha) / den
                elif op == OP_ADD:
                    sw[top - 1] = sw[top - 1] + sw[top]
                    sd[top - 1] = sd[top - 1] + sd[top]
                    top -= 1
                elif op == OP_MUL:
                    v = sw[top]
                    dv = sd[top]
                    u = sw[top - 1]
                    du = sd[top - 1]
                    sw[top - 1] = u * v
                    sd[top - 1] = du * v + u * dv
                    top -= 1
                elif op == OP_SCALE:
                    c = cargs[ia[j]]
                    sw[top] = c * sw[top]
                    sd[top] = c * sd[top]
            out_w[i] = sw[0]
            out_dw[i] = sd[0]
            out_bad[i] = flagged
