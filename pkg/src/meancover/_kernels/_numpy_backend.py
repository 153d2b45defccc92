"""Vectorized NumPy executor for kernel programs.

Mirrors the compiled core instruction for instruction.  Points that land
within ``pole_tol`` of a pole (in domain distance, estimated through the
denominator scale) are flagged in the returned mask; their outputs are
unspecified and must not be consumed.
"""

from __future__ import annotations

import numpy as np

from .programs import (
    OP_ADD,
    OP_BLASCHKE,
    OP_EXPAFF,
    OP_MOBIUS,
    OP_MUL,
    OP_POLY,
    OP_POW,
    OP_SCALE,
    OP_Z,
    Program,
)


def eval_program(prog: Program, z: np.ndarray, pole_tol: float):
    n = z.shape[0]
    stack_w = [np.empty(0)] * prog.stack_need
    stack_d = [np.empty(0)] * prog.stack_need
    bad = np.zeros(n, dtype=bool)
    top = -1
    ops, ia, ib, cargs = prog.ops, prog.ia, prog.ib, prog.cargs
    with np.errstate(all="ignore"):
        for j in range(len(ops)):
            op = ops[j]
            if op == OP_Z:
                top += 1
                stack_w[top] = z.copy()
                stack_d[top] = np.ones(n, dtype=np.complex128)
            elif op == OP_POW:
                p = int(ia[j])
                v = stack_w[top]
                stack_d[top] = p * v ** (p - 1) * stack_d[top]
                stack_w[top] = v**p
            elif op == OP_POLY:
                off, m = int(ia[j]), int(ib[j])
                v = stack_w[top]
                acc = np.full(n, cargs[off + m - 1])
                dacc = np.zeros(n, dtype=np.complex128)
                for k in range(m - 2, -1, -1):
                    dacc = dacc * v + acc
                    acc = acc * v + cargs[off + k]
                stack_d[top] = dacc * stack_d[top]
                stack_w[top] = acc
            elif op == OP_MOBIUS:
                off = int(ia[j])
                a, b, c, d = cargs[off : off + 4]
                v = stack_w[top]
                den = c * v + d
                if c != 0:
                    near = np.abs(den) < pole_tol * abs(c)
                    if near.any():
                        bad |= near
                        den = np.where(near, 1.0, den)
                stack_d[top] = (a * d - b * c) / den**2 * stack_d[top]
                stack_w[top] = (a * v + b) / den
            elif op == OP_EXPAFF:
                off = int(ia[j])
                c, k = cargs[off], cargs[off + 1]
                e = np.exp(k * stack_w[top])
                stack_d[top] = -c * k * e * stack_d[top]
                stack_w[top] = c * (1.0 - e)
            elif op == OP_BLASCHKE:
                off = int(ia[j])
                alpha = cargs[off]
                v = stack_w[top]
                den = 1.0 - np.conj(alpha) * v
                if alpha != 0:
                    near = np.abs(den) < pole_tol * abs(alpha)
                    if near.any():
                        bad |= near
                        den = np.where(near, 1.0, den)
                stack_d[top] = (1.0 - abs(alpha) ** 2) / den**2 * stack_d[top]
                stack_w[top] = (v - alpha) / den
            elif op == OP_ADD:
                stack_w[top - 1] = stack_w[top - 1] + stack_w[top]
                stack_d[top - 1] = stack_d[top - 1] + stack_d[top]
                top -= 1
            elif op == OP_MUL:
                u, du = stack_w[top - 1], stack_d[top - 1]
                v, dv = stack_w[top], stack_d[top]
                stack_w[top - 1] = u * v
                stack_d[top - 1] = du * v + u * dv
                top -= 1
            elif op == OP_SCALE:
                c = cargs[int(ia[j])]
                stack_w[top] = c * stack_w[top]
                stack_d[top] = c * stack_d[top]
            else:
                raise AssertionError(f"unknown opcode {op}")
    return stack_w[0], stack_d[0], bad
