"""Flat instruction programs for expression-tree evaluation.

An expression tree is compiled once into a postfix program over a small stack
of (value, derivative) pairs.  Both the compiled core and the NumPy fallback
execute the same instruction stream, so the two backends are interchangeable
bit-for-bit up to floating-point library differences.

Each instruction transforms the top of the stack; the chain rule is built into
every unary opcode, which makes function composition a plain concatenation of
program fragments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OP_Z = 0        # push (z, 1)
OP_POW = 1      # ia = integer exponent n >= 1
OP_POLY = 2     # ia = offset into cargs, ib = number of coefficients
OP_MOBIUS = 3   # ia = offset of (a, b, c, d)
OP_EXPAFF = 4   # ia = offset of (c, k): v -> c * (1 - exp(k v))
OP_BLASCHKE = 5  # ia = offset of alpha: v -> (v - alpha) / (1 - conj(alpha) v)
OP_ADD = 6
OP_MUL = 7
OP_SCALE = 8    # ia = offset of scalar c

MAX_STACK = 64


@dataclass(frozen=True)
class Program:
    """Compiled postfix form of one expression tree."""

    ops: np.ndarray       # int32
    ia: np.ndarray        # int32
    ib: np.ndarray        # int32
    cargs: np.ndarray     # complex128 constant pool
    stack_need: int

    def __len__(self) -> int:
        return len(self.ops)


class ProgramBuilder:
    def __init__(self) -> None:
        self._ops: list[int] = []
        self._ia: list[int] = []
        self._ib: list[int] = []
        self._cargs: list[complex] = []

    def emit(self, op: int, ia: int = 0, ib: int = 0) -> None:
        self._ops.append(op)
        self._ia.append(ia)
        self._ib.append(ib)

    def const(self, *values: complex) -> int:
        """Append constants to the pool, returning the offset of the first."""
        off = len(self._cargs)
        self._cargs.extend(complex(v) for v in values)
        return off

    def build(self) -> Program:
        ops = np.asarray(self._ops, dtype=np.int32)
        depth = 0
        need = 0
        for op in self._ops:
            if op == OP_Z:
                depth += 1
            elif op in (OP_ADD, OP_MUL):
                depth -= 1
            need = max(need, depth)
        if need > MAX_STACK:
            raise ValueError(f"expression tree too deep for the kernel stack ({need})")
        return Program(
            ops=ops,
            ia=np.asarray(self._ia, dtype=np.int32),
            ib=np.asarray(self._ib, dtype=np.int32),
            cargs=np.asarray(self._cargs, dtype=np.complex128),
            stack_need=max(need, 1),
        )
