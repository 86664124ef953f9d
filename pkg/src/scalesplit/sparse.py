"""Real symmetric sparse matrices in CSR form and split-storage complex vectors.

These are the carriers for W, T and all constituent matrices of the test
problems, plus the complex iterates and right-hand sides.  Matrices store both
triangles (full symmetric storage) with sorted column indices per row;
construction goes through triplets so duplicates are summed and explicit zeros
produced by cancellation are kept, which makes linear combinations structurally
stable.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K

INT = np.int64


@dataclass
class TripletBuffer:
    """Single-owner accumulator of (row, col, value) entries for assembly."""

    n: int
    rows: list = field(default_factory=list)
    cols: list = field(default_factory=list)
    vals: list = field(default_factory=list)

    def add(self, i, j, v):
        self.rows.append(i)
        self.cols.append(j)
        self.vals.append(v)

    def extend(self, rows, cols, vals):
        self.rows.extend(np.asarray(rows).tolist())
        self.cols.extend(np.asarray(cols).tolist())
        self.vals.extend(np.asarray(vals).tolist())


@dataclass(frozen=True)
class SparseSymMatrix:
    """Numerically symmetric sparse matrix, CSR with both triangles stored.

    Invariants (established by :func:`assemble`): indptr nondecreasing with
    indptr[0] = 0 and indptr[n] = nnz; column indices strictly increasing
    within each row; for every stored (i, j, v) the entry (j, i, v) is stored
    with the identical value.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    symmetry_checked: bool = False

    @property
    def nnz(self):
        return int(self.indptr[self.n])

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"dimension mismatch: matrix is {self.n}, vector {x.shape}")
        return K.csr_matvec(self.indptr, self.indices, self.data, x)

    def diagonal(self):
        d = np.zeros(self.n)
        for i in range(self.n):
            row = self.indices[self.indptr[i]:self.indptr[i + 1]]
            hit = np.searchsorted(row, i)
            if hit < row.shape[0] and row[hit] == i:
                d[i] = self.data[self.indptr[i] + hit]
        return d

    def row_norms(self):
        """2-norm of each row (used by the relative drop rules)."""
        sq = self.data * self.data
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return np.sqrt(np.bincount(rows, weights=sq, minlength=self.n))

    def to_triplets(self):
        rows = np.repeat(np.arange(self.n, dtype=INT), np.diff(self.indptr))
        return rows, self.indices.copy(), self.data.copy()

    def to_dense(self):
        M = np.zeros((self.n, self.n))
        rows, cols, vals = self.to_triplets()
        M[rows, cols] = vals
        return M

    def scaled(self, a):
        return SparseSymMatrix(self.n, self.indptr, self.indices, a * self.data,
                               self.symmetry_checked)


def spmv(A, x):
    """y = A x with deterministic row-major accumulation."""
    return A.matvec(x)


def _compress(n, rows, cols, vals):
    order = np.lexsort((cols, rows))
    r = rows[order]
    c = cols[order]
    v = vals[order]
    if r.shape[0]:
        new = np.empty(r.shape[0], bool)
        new[0] = True
        new[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
        starts = np.flatnonzero(new)
        sums = np.add.reduceat(v, starts)
        r = r[starts]
        c = c[starts]
        v = sums
    indptr = np.zeros(n + 1, INT)
    np.cumsum(np.bincount(r, minlength=n), out=indptr[1:])
    return indptr, c.astype(INT, copy=False), np.asarray(v, dtype=float)


def assemble(buf_or_n, rows=None, cols=None, vals=None, check_symmetry=True):
    """Build a SparseSymMatrix from a TripletBuffer (or raw triplet arrays).

    Duplicate (row, col) pairs are summed; exact zeros surviving the sum are
    retained so the structure is stable under cancellation.  Raises on indices
    outside [0, n) and, by default, on numerically nonsymmetric input.
    """
    if isinstance(buf_or_n, TripletBuffer):
        n = buf_or_n.n
        rows = np.asarray(buf_or_n.rows, dtype=INT)
        cols = np.asarray(buf_or_n.cols, dtype=INT)
        vals = np.asarray(buf_or_n.vals, dtype=float)
    else:
        n = int(buf_or_n)
        rows = np.asarray(rows, dtype=INT)
        cols = np.asarray(cols, dtype=INT)
        vals = np.asarray(vals, dtype=float)
    if rows.shape[0] and (rows.min() < 0 or rows.max() >= n):
        raise ValueError("row index out of range")
    if cols.shape[0] and (cols.min() < 0 or cols.max() >= n):
        raise ValueError("column index out of range")
    indptr, indices, data = _compress(n, rows, cols, vals)
    A = SparseSymMatrix(n, indptr, indices, data)
    if check_symmetry:
        return check_symmetric(A)
    return A


def check_symmetric(A, raise_on_fail=True):
    """Verify that every stored (i, j, v) has a stored (j, i, v) twin with the
    identical value; returns a copy with symmetry_checked=True."""
    rows, cols, vals = A.to_triplets()
    tp, ti, tv = _compress(A.n, cols, rows, vals)
    ok = (
        np.array_equal(tp, A.indptr)
        and np.array_equal(ti, A.indices)
        and np.array_equal(tv, A.data)
    )
    if not ok:
        if raise_on_fail:
            raise ValueError("matrix is not numerically symmetric")
        return A
    return SparseSymMatrix(A.n, A.indptr, A.indices, A.data, True)


def identity(n, scale=1.0):
    idx = np.arange(n, dtype=INT)
    return assemble(n, idx, idx, np.full(n, float(scale)), check_symmetry=False)


def tridiag(m, off=-1.0, dia=2.0):
    """Symmetric Toeplitz tridiagonal of order m."""
    i = np.arange(m, dtype=INT)
    rows = np.concatenate((i, i[:-1], i[1:]))
    cols = np.concatenate((i, i[1:], i[:-1]))
    vals = np.concatenate((np.full(m, dia), np.full(m - 1, off), np.full(m - 1, off)))
    return assemble(m, rows, cols, vals, check_symmetry=False)


def kron_sum(V):
    """I (x) V + V (x) I of order m^2 with grid index (i, j) -> i*m + j."""
    m = V.n
    rows, cols, vals = V.to_triplets()
    blk = np.arange(m, dtype=INT)
    # I (x) V: block-diagonal copies of V
    r1 = (blk[:, None] * m + rows[None, :]).ravel()
    c1 = (blk[:, None] * m + cols[None, :]).ravel()
    v1 = np.tile(vals, m)
    # V (x) I: V entries spread across blocks
    r2 = (rows[:, None] * m + blk[None, :]).ravel()
    c2 = (cols[:, None] * m + blk[None, :]).ravel()
    v2 = np.repeat(vals, m)
    return assemble(m * m, np.concatenate((r1, r2)), np.concatenate((c1, c2)),
                    np.concatenate((v1, v2)), check_symmetry=False)


def lincomb(a, A, b, B):
    """a*A + b*B keeping the structural union of both patterns, even where
    values cancel."""
    if A.n != B.n:
        raise ValueError("dimension mismatch")
    ra, ca, va = A.to_triplets()
    rb, cb, vb = B.to_triplets()
    return assemble(A.n, np.concatenate((ra, rb)), np.concatenate((ca, cb)),
                    np.concatenate((a * va, b * vb)), check_symmetry=False)


# ---------------------------------------------------------------------------
# complex vectors, stored as split real/imaginary parts
# ---------------------------------------------------------------------------


@dataclass
class ComplexVector:
    """Complex vector u = re + i*im with the parts held as float64 arrays."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        self.re = np.asarray(self.re, dtype=float)
        self.im = np.asarray(self.im, dtype=float)
        if self.re.shape != self.im.shape:
            raise ValueError("re and im parts must have equal length")

    def __len__(self):
        return self.re.shape[0]

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def from_complex(cls, z):
        z = np.asarray(z, dtype=np.complex128)
        return cls(z.real.copy(), z.imag.copy())

    def to_complex(self):
        return self.re + 1j * self.im

    def copy(self):
        return ComplexVector(self.re.copy(), self.im.copy())

    def norm(self):
        return np.sqrt(np.dot(self.re, self.re) + np.dot(self.im, self.im))

    def scale(self, c):
        """(c_re + i c_im) * self, exact split arithmetic."""
        c = complex(c)
        return ComplexVector(c.real * self.re - c.imag * self.im,
                             c.real * self.im + c.imag * self.re)

    def __add__(self, other):
        return ComplexVector(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return ComplexVector(self.re - other.re, self.im - other.im)


def complex_matvec(W, T, v):
    """(W + iT) v via four real products: re = W v_re - T v_im,
    im = W v_im + T v_re."""
    if W.n != T.n or W.n != len(v):
        raise ValueError("dimension mismatch")
    Wr = W.matvec(v.re)
    Wi = W.matvec(v.im)
    Tr = T.matvec(v.re)
    Ti = T.matvec(v.im)
    return ComplexVector(Wr - Ti, Wi + Tr)


def merge_complex(W, T):
    """CSR of A = W + iT on the union pattern: (indptr, indices, complex data)."""
    Wu = lincomb(1.0, W, 0.0, T)
    Tu = lincomb(0.0, W, 1.0, T)
    return Wu.indptr, Wu.indices, Wu.data + 1j * Tu.data
