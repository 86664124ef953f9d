"""Kernel backend selection.

The compiled Cython extension (``ckernels``) is used when importable, the
numpy fallback (``pykernels``) otherwise.  Selection can be forced with the
environment variable ``SCALESPLIT_KERNELS`` (``compiled`` | ``python``) or at
runtime with :func:`use`; both backends expose the same functions over plain
numpy arrays, so factors built under one backend solve under the other.
"""

import os

from . import pykernels

_IMPLS = {"python": pykernels}

try:
    from . import ckernels

    _IMPLS["compiled"] = ckernels
except ImportError:  # extension not built
    ckernels = None

_active_name = None
_active = None


def available():
    """Names of the importable backends."""
    return tuple(sorted(_IMPLS))


def use(name):
    """Select the active backend ('compiled' or 'python')."""
    global _active, _active_name
    if name not in _IMPLS:
        raise ValueError(
            f"kernel backend {name!r} not available; have {available()}"
        )
    _active = _IMPLS[name]
    _active_name = name
    return name


def backend_name():
    return _active_name


def _initial_backend():
    want = os.environ.get("SCALESPLIT_KERNELS", "").strip().lower()
    if want in ("python", "py", "pure"):
        return "python"
    if want in ("compiled", "c", "cython"):
        if "compiled" not in _IMPLS:
            raise ImportError(
                "SCALESPLIT_KERNELS=compiled but the ckernels extension is not built"
            )
        return "compiled"
    return "compiled" if "compiled" in _IMPLS else "python"


use(_initial_backend())


def csr_matvec(indptr, indices, data, x):
    return _active.csr_matvec(indptr, indices, data, x)


def solve_lower_csc(Lp, Li, Lx, b):
    return _active.solve_lower_csc(Lp, Li, Lx, b)


def solve_lower_t_csc(Lp, Li, Lx, b):
    return _active.solve_lower_t_csc(Lp, Li, Lx, b)


def etree(n, Ap, Ai):
    return _active.etree(n, Ap, Ai)


def chol_colcounts(n, Ap, Ai, parent):
    return _active.chol_colcounts(n, Ap, Ai, parent)


def chol_numeric(n, Ap, Ai, Ax, parent, Lp):
    return _active.chol_numeric(n, Ap, Ai, Ax, parent, Lp)


def ict(n, Ap, Ai, Ax, thresh, modified):
    return _active.ict(n, Ap, Ai, Ax, thresh, modified)


def ilut(n, Ap, Ai, Az, thresh, modified, pattern_only=False):
    return _active.ilut(n, Ap, Ai, Az, thresh, modified, pattern_only)


def solve_unit_lower_csr_cplx(Lp, Li, Lz, x):
    return _active.solve_unit_lower_csr_cplx(Lp, Li, Lz, x)


def solve_upper_csr_cplx(Up, Ui, Uz, x):
    return _active.solve_upper_csr_cplx(Up, Ui, Uz, x)


def min_degree(n, Ap, Ai):
    return _active.min_degree(n, Ap, Ai)
