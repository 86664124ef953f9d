"""Matrix Market import/export for symmetric matrices.

Files are written in coordinate real symmetric form (1-based indices, lower
triangle stored) via scipy.io, and read back into full symmetric CSR storage.
"""

import numpy as np
import scipy.io
import scipy.sparse

from .sparse import SparseSymMatrix, assemble


def write_matrix_market(A, path, comment=""):
    """Write a SparseSymMatrix as 'matrix coordinate real symmetric'."""
    rows, cols, vals = A.to_triplets()
    keep = rows >= cols  # lower triangle incl. diagonal
    coo = scipy.sparse.coo_matrix(
        (vals[keep], (rows[keep], cols[keep])), shape=(A.n, A.n)
    )
    scipy.io.mmwrite(str(path), coo, comment=comment, field="real",
                     precision=17, symmetry="symmetric")


def read_matrix_market(path):
    """Read a coordinate-format file into a SparseSymMatrix.

    Symmetric files are expanded to full storage; general files must already
    be numerically symmetric.
    """
    M = scipy.io.mmread(str(path))
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix is not square")
    coo = scipy.sparse.coo_matrix(M)
    return assemble(coo.shape[0], coo.row.astype(np.int64),
                    coo.col.astype(np.int64), coo.data.astype(float))
