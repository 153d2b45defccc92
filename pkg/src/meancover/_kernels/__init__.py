"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
NumPy executor takes over with identical semantics.  ``MEANCOVER_FORCE_FALLBACK=1``
pins the fallback, which the benchmark and the backend-equivalence tests use.
"""

from __future__ import annotations

import os

import numpy as np

from . import _numpy_backend
from .programs import Program, ProgramBuilder  # noqa: F401  (re-export)

if os.environ.get("MEANCOVER_FORCE_FALLBACK"):
    _core = None
else:
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "python"


def execute(prog: Program, z, pole_tol: float = 1e-12):
    """Run a program at ``z`` (scalar or array).

    Returns ``(w, dw, bad)`` where ``bad`` marks points that fell within
    ``pole_tol`` (domain distance) of a pole.  Output shapes follow ``z``;
    scalar input yields scalar outputs and a bool.
    """
    arr = np.asarray(z, dtype=np.complex128)
    scalar = arr.ndim == 0
    flat = np.ascontiguousarray(arr.reshape(-1))
    n = flat.shape[0]
    if _core is not None:
        w = np.empty(n, dtype=np.complex128)
        dw = np.empty(n, dtype=np.complex128)
        bad = np.zeros(n, dtype=np.uint8)
        _core.eval_program(prog.ops, prog.ia, prog.ib, prog.cargs, flat, w, dw, bad, pole_tol)
        badmask = bad.astype(bool)
    else:
        w, dw, badmask = _numpy_backend.eval_program(prog, flat, pole_tol)
    if scalar:
        return complex(w[0]), complex(dw[0]), bool(badmask[0])
    shape = arr.shape
    return w.reshape(shape), dw.reshape(shape), badmask.reshape(shape)
