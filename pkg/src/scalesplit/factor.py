"""Direct and incomplete factorizations.

Exact sparse Cholesky with a fill-reducing (minimum-degree) reordering backs
the stationary methods' inner solves; threshold incomplete Cholesky (optionally
row-sum compensated) preconditions the inner PCG of the inexact variants; a
complex modified ILUT provides the baseline BiCGSTAB preconditioner.  The
ordering affects fill only — permuted and unpermuted factorizations solve to
the same result, so iteration counts never depend on it.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .sparse import INT, ComplexVector, merge_complex


class NotPositiveDefiniteError(Exception):
    """Cholesky hit a nonpositive pivot: the SPD hypothesis is violated."""


class NonpositivePivotError(Exception):
    """Incomplete Cholesky broke down; retry with a smaller drop tolerance."""


class ZeroPivotError(Exception):
    """Incomplete LU hit an exactly zero pivot."""


def reorder_fill_reducing(A):
    """Minimum-degree permutation of A's pattern; perm[k] = k-th pivot."""
    return K.min_degree(A.n, A.indptr, A.indices)


def _permute_pattern(A, perm):
    """Symmetric permutation bookkeeping: permuted CSR pattern plus the map
    from original data positions to permuted ones."""
    n = A.n
    pinv = np.empty(n, INT)
    pinv[perm] = np.arange(n, dtype=INT)
    rows = np.repeat(np.arange(n, dtype=INT), np.diff(A.indptr))
    prow = pinv[rows]
    pcol = pinv[A.indices]
    order = np.lexsort((pcol, prow))
    pAp = np.zeros(n + 1, INT)
    np.cumsum(np.bincount(prow, minlength=n), out=pAp[1:])
    return pinv, pAp, pcol[order].astype(INT, copy=False), order


@dataclass(frozen=True)
class SymbolicCholesky:
    """Ordering + elimination-tree analysis, reusable across all matrices
    sharing one sparsity pattern (e.g. alpha*W + T for every alpha)."""

    n: int
    perm: np.ndarray
    pinv: np.ndarray
    pAp: np.ndarray
    pAi: np.ndarray
    posmap: np.ndarray
    parent: np.ndarray
    Lp: np.ndarray

    @classmethod
    def analyze(cls, A, perm=None):
        if perm is None:
            perm = reorder_fill_reducing(A)
        perm = np.asarray(perm, dtype=INT)
        pinv, pAp, pAi, posmap = _permute_pattern(A, perm)
        parent = K.etree(A.n, pAp, pAi)
        counts = K.chol_colcounts(A.n, pAp, pAi, parent)
        Lp = np.zeros(A.n + 1, INT)
        np.cumsum(counts, out=Lp[1:])
        return cls(A.n, perm, pinv, pAp, pAi, posmap, parent, Lp)


@dataclass(frozen=True)
class CholeskyFactor:
    """P A P^T = L L^T with strictly positive diagonal of L."""

    symbolic: SymbolicCholesky
    Li: np.ndarray
    Lx: np.ndarray

    @property
    def n(self):
        return self.symbolic.n

    @property
    def perm(self):
        return self.symbolic.perm

    @property
    def Lp(self):
        return self.symbolic.Lp

    @property
    def factor_nnz(self):
        return int(self.symbolic.Lp[self.n])

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.n,):
            raise ValueError("dimension mismatch")
        y = K.solve_lower_csc(self.Lp, self.Li, self.Lx, rhs[self.symbolic.perm])
        z = K.solve_lower_t_csc(self.Lp, self.Li, self.Lx, y)
        x = np.empty(self.n)
        x[self.symbolic.perm] = z
        return x

    def solve_complex(self, v):
        """Solve for a complex right-hand side as two independent real solves
        (the coefficient matrix is real SPD)."""
        return ComplexVector(self.solve(v.re), self.solve(v.im))


def cholesky(A, perm=None, symbolic=None):
    """Sparse Cholesky of the SPD matrix A.

    Pass ``symbolic`` to reuse an analysis of the same pattern; otherwise one
    is computed (with a minimum-degree ordering unless ``perm`` is given).
    """
    if symbolic is None:
        symbolic = SymbolicCholesky.analyze(A, perm=perm)
    pAx = A.data[symbolic.posmap]
    Li, Lx, bad = K.chol_numeric(A.n, symbolic.pAp, symbolic.pAi, pAx,
                                 symbolic.parent, symbolic.Lp)
    if bad >= 0:
        raise NotPositiveDefiniteError(
            f"nonpositive pivot at elimination step {bad}"
        )
    return CholeskyFactor(symbolic, Li, Lx)


def cholesky_solve(factor, rhs):
    return factor.solve(rhs)


# ---------------------------------------------------------------------------
# triangular-solve plumbing (array-level, shared by factors and tests)
# ---------------------------------------------------------------------------

def lower_triangular_solve(Lp, Li, Lx, b):
    """x = L^{-1} b for CSC lower triangular L with the diagonal first."""
    _check_diag(Lp, Lx)
    return K.solve_lower_csc(Lp, Li, Lx, np.asarray(b, dtype=float))


def lower_transpose_solve(Lp, Li, Lx, b):
    """x = L^{-T} b for the same storage."""
    _check_diag(Lp, Lx)
    return K.solve_lower_t_csc(Lp, Li, Lx, np.asarray(b, dtype=float))


def complex_lu_solve(Lp, Li, Lz, Up, Ui, Uz, v):
    """x = U^{-1} L^{-1} v for unit-lower L / upper U complex CSR factors."""
    z = v.to_complex()
    K.solve_unit_lower_csr_cplx(Lp, Li, Lz, z)
    if np.any(Uz[Up[:-1]] == 0.0):
        raise ZeroPivotError("zero diagonal in U")
    K.solve_upper_csr_cplx(Up, Ui, Uz, z)
    return ComplexVector.from_complex(z)


def _check_diag(Lp, Lx):
    if np.any(Lx[Lp[:-1]] == 0.0):
        raise ZeroPivotError("zero diagonal in triangular factor")


# ---------------------------------------------------------------------------
# incomplete Cholesky (ICT)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IncompleteCholesky:
    """Threshold incomplete Cholesky L ~ chol(A), natural ordering.

    With ``modified`` the dropped mass is folded back into the diagonal so
    that row sums of L L^T equal row sums of A exactly.
    """

    n: int
    Lp: np.ndarray
    Li: np.ndarray
    Lx: np.ndarray
    droptol: float
    modified: bool

    @property
    def factor_nnz(self):
        return int(self.Lp[self.n])

    def solve(self, rhs):
        """Apply (L L^T)^{-1}, the PCG preconditioner action."""
        y = K.solve_lower_csc(self.Lp, self.Li, self.Lx,
                              np.asarray(rhs, dtype=float))
        return K.solve_lower_t_csc(self.Lp, self.Li, self.Lx, y)

    def product_dense(self):
        """Dense L L^T (tests only)."""
        L = np.zeros((self.n, self.n))
        for j in range(self.n):
            sl = slice(self.Lp[j], self.Lp[j + 1])
            L[self.Li[sl], j] = self.Lx[sl]
        return L @ L.T


def incomplete_cholesky(A, droptol, modified=True):
    """ICT factorization of SPD A; entries with |value| < droptol * ||row||_2
    are dropped.  droptol = 0 reproduces the exact factorization."""
    thresh = float(droptol) * A.row_norms()
    Lp, Li, Lx, bad = K.ict(A.n, A.indptr, A.indices, A.data, thresh,
                            bool(modified))
    if bad >= 0:
        raise NonpositivePivotError(
            f"nonpositive pivot at column {bad} (droptol={droptol})"
        )
    return IncompleteCholesky(A.n, Lp, Li, Lx, float(droptol), bool(modified))


# droptol fallback ladder used when ICT breaks down (mirrors the benchmark
# protocol for the inexact methods)
IC_DROPTOL_LADDER = (1e-2, 5e-3, 1e-3, 5e-4, 1e-5)


def incomplete_cholesky_ladder(A, droptol=1e-2, modified=True):
    """ICT with automatic retries down the drop-tolerance ladder.

    Returns (factor, droptol_used); raises NonpositivePivotError only if the
    whole ladder breaks down.
    """
    tols = [droptol] + [t for t in IC_DROPTOL_LADDER if t < droptol]
    last = None
    for tol in tols:
        try:
            return incomplete_cholesky(A, tol, modified=modified), tol
        except NonpositivePivotError as exc:
            last = exc
    raise last


# ---------------------------------------------------------------------------
# complex modified ILUT
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexILU:
    """Incomplete LU of A = W + iT: unit lower L, upper U (diagonal first).

    Row-sum compensated ('milu row'): the U diagonal absorbs dropped mass so
    that (L U) 1 = A 1 exactly.
    """

    n: int
    Lp: np.ndarray
    Li: np.ndarray
    Lz: np.ndarray
    Up: np.ndarray
    Ui: np.ndarray
    Uz: np.ndarray
    droptol: float

    @property
    def factor_nnz(self):
        return int(self.Lp[self.n] + self.Up[self.n])

    def solve(self, v):
        """Apply (L U)^{-1} to a ComplexVector."""
        return complex_lu_solve(self.Lp, self.Li, self.Lz,
                                self.Up, self.Ui, self.Uz, v)

    def product_dense(self):
        """Dense L @ U (tests only)."""
        L = np.eye(self.n, dtype=np.complex128)
        U = np.zeros((self.n, self.n), dtype=np.complex128)
        for i in range(self.n):
            sl = slice(self.Lp[i], self.Lp[i + 1])
            L[i, self.Li[sl]] = self.Lz[sl]
            su = slice(self.Up[i], self.Up[i + 1])
            U[i, self.Ui[su]] = self.Uz[su]
        return L @ U


def complex_ilut(W, T, droptol, modified=True, zero_fill=False):
    """Incomplete LU of A = W + iT.

    Default: threshold dropping, |candidate| < droptol * ||row of A||_2, with
    row-sum diagonal compensation when ``modified``.  ``zero_fill`` instead
    restricts both factors to the sparsity pattern of A (droptol ignored),
    matching the reference tool's default no-fill factorization used for the
    baseline BiCGSTAB preconditioner rows.
    """
    Ap, Ai, Az = merge_complex(W, T)
    n = W.n
    sq = Az.real * Az.real + Az.imag * Az.imag
    rows = np.repeat(np.arange(n), np.diff(Ap))
    rownorm = np.sqrt(np.bincount(rows, weights=sq, minlength=n))
    thresh = float(droptol) * rownorm
    Lp, Li, Lz, Up, Ui, Uz, bad = K.ilut(n, Ap, Ai, Az, thresh, bool(modified),
                                         bool(zero_fill))
    if bad >= 0:
        raise ZeroPivotError(f"zero pivot at row {bad} (droptol={droptol})")
    return ComplexILU(n, Lp, Li, Lz, Up, Ui, Uz, float(droptol))
