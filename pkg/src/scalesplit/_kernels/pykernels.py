"""Pure-Python (numpy) implementations of the numeric kernels.

Every function here has a signature-identical compiled twin in ``ckernels.pyx``;
this module is the fallback used when the extension is not built, and the
reference the parity tests compare against.  Index arrays are int64, value
arrays float64 (or complex128 for the complex LU kernels).

Error reporting convention: factorization kernels return a trailing ``bad``
index (-1 on success, offending row/column on breakdown) instead of raising,
so both backends stay exception-free at the C level.
"""

import heapq
import math

import numpy as np

INT = np.int64


# ---------------------------------------------------------------------------
# matrix-vector product
# ---------------------------------------------------------------------------

def csr_matvec(indptr, indices, data, x):
    """y = A x for CSR A; row-major accumulation."""
    n = indptr.shape[0] - 1
    if data.shape[0] == 0:
        return np.zeros(n)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(rows, weights=data * x[indices], minlength=n)


# ---------------------------------------------------------------------------
# triangular solves with the Cholesky factor (CSC, diagonal first per column)
# ---------------------------------------------------------------------------

def solve_lower_csc(Lp, Li, Lx, b):
    """x = L^{-1} b, L lower triangular in CSC with the diagonal entry first."""
    x = np.array(b, dtype=float, copy=True)
    n = Lp.shape[0] - 1
    for j in range(n):
        p0 = Lp[j]
        p1 = Lp[j + 1]
        xj = x[j] / Lx[p0]
        x[j] = xj
        if p1 > p0 + 1:
            x[Li[p0 + 1:p1]] -= xj * Lx[p0 + 1:p1]
    return x


def solve_lower_t_csc(Lp, Li, Lx, b):
    """x = L^{-T} b (back substitution through the CSC storage of L)."""
    x = np.array(b, dtype=float, copy=True)
    n = Lp.shape[0] - 1
    for j in range(n - 1, -1, -1):
        p0 = Lp[j]
        p1 = Lp[j + 1]
        if p1 > p0 + 1:
            x[j] -= np.dot(Lx[p0 + 1:p1], x[Li[p0 + 1:p1]])
        x[j] /= Lx[p0]
    return x


# ---------------------------------------------------------------------------
# sparse Cholesky (up-looking, elimination-tree based)
# ---------------------------------------------------------------------------

def etree(n, Ap, Ai):
    """Elimination tree of a symmetric matrix (upper triangle used)."""
    parent = np.full(n, -1, INT)
    ancestor = np.full(n, -1, INT)
    for k in range(n):
        for p in range(Ap[k], Ap[k + 1]):
            i = Ai[p]
            while i != -1 and i < k:
                inext = ancestor[i]
                ancestor[i] = k
                if inext == -1:
                    parent[i] = k
                i = inext
    return parent


def chol_colcounts(n, Ap, Ai, parent):
    """Nonzero count of each column of L (diagonal included)."""
    counts = np.ones(n, INT)
    flag = np.full(n, -1, INT)
    for k in range(n):
        flag[k] = k
        for p in range(Ap[k], Ap[k + 1]):
            i = Ai[p]
            if i >= k:
                continue
            while flag[i] != k:
                counts[i] += 1
                flag[i] = k
                i = parent[i]
    return counts


def chol_numeric(n, Ap, Ai, Ax, parent, Lp):
    """Up-looking numeric factorization P A P^T = L L^T (A already permuted).

    Returns (Li, Lx, bad); bad == -1 on success, else the column with a
    nonpositive pivot.  Column pattern of L is rebuilt deterministically from
    the elimination tree on every call, so one symbolic analysis serves any
    matrix with the same sparsity.
    """
    nz = int(Lp[n])
    Li = np.empty(nz, INT)
    Lx = np.empty(nz)
    c = np.array(Lp[:n], dtype=INT, copy=True)
    x = np.zeros(n)
    flag = np.full(n, -1, INT)
    s = np.empty(n, INT)
    for k in range(n):
        top = n
        flag[k] = k
        d = 0.0
        for p in range(Ap[k], Ap[k + 1]):
            i = Ai[p]
            if i > k:
                continue
            if i == k:
                d = Ax[p]
                continue
            x[i] = Ax[p]
            ln = 0
            while flag[i] != k:
                s[ln] = i
                ln += 1
                flag[i] = k
                i = parent[i]
            while ln > 0:
                top -= 1
                ln -= 1
                s[top] = s[ln]
        for pp in range(top, n):
            i = s[pp]
            lki = x[i] / Lx[Lp[i]]
            x[i] = 0.0
            ci = c[i]
            if ci > Lp[i] + 1:
                sl = slice(Lp[i] + 1, ci)
                x[Li[sl]] -= lki * Lx[sl]
            d -= lki * lki
            Li[ci] = k
            Lx[ci] = lki
            c[i] = ci + 1
        if d <= 0.0:
            return Li, Lx, k
        ck = c[k]
        Li[ck] = k
        Lx[ck] = math.sqrt(d)
        c[k] = ck + 1
    return Li, Lx, -1


# ---------------------------------------------------------------------------
# incomplete Cholesky with threshold dropping (left-looking by column)
# ---------------------------------------------------------------------------

def ict(n, Ap, Ai, Ax, thresh, modified):
    """Threshold incomplete Cholesky; thresh[i] is the absolute drop bound
    for entries in row i.

    ``modified`` enables the compensated (row-sum preserving) variant: every
    dropped Schur entry (i,j) is added back to the diagonals i and j, so the
    error matrix has zero row sums and L L^T 1 = A 1 exactly.

    Returns (Lp, Li, Lx, bad); bad == -1 on success.
    """
    colrows = [None] * n
    colvals = [None] * n
    head = np.full(n, -1, INT)
    nxt = np.full(n, -1, INT)
    ptr = np.zeros(n, INT)
    comp = np.zeros(n)
    w = np.zeros(n)
    stamp = np.full(n, -1, INT)
    for j in range(n):
        touch = [j]
        stamp[j] = j
        w[j] = 0.0
        for p in range(Ap[j], Ap[j + 1]):
            i = Ai[p]
            if i < j:
                continue
            if stamp[i] != j:
                stamp[i] = j
                touch.append(i)
            w[i] = Ax[p]
        w[j] += comp[j]
        k = head[j]
        while k != -1:
            knext = nxt[k]
            rows_k = colrows[k]
            vals_k = colvals[k]
            pos = ptr[k]
            ljk = vals_k[pos]
            seg_r = rows_k[pos:]
            seg_v = vals_k[pos:]
            fresh = stamp[seg_r] != j
            if fresh.any():
                newr = seg_r[fresh]
                stamp[newr] = j
                w[newr] = 0.0
                touch.extend(newr.tolist())
            w[seg_r] -= ljk * seg_v
            pos += 1
            ptr[k] = pos
            if pos < rows_k.shape[0]:
                r = rows_k[pos]
                nxt[k] = head[r]
                head[r] = k
            k = knext
        order = np.array(sorted(touch), INT)
        offs = order[order > j]
        vals = w[offs]
        dropm = np.abs(vals) < thresh[offs]
        if modified and dropm.any():
            dropped = vals[dropm]
            w[j] += dropped.sum()
            comp[offs[dropm]] += dropped
        keep = offs[~dropm]
        d = w[j]
        if d <= 0.0:
            return None, None, None, j
        ljj = math.sqrt(d)
        rows_j = np.concatenate((np.array([j], INT), keep))
        vals_j = np.concatenate((np.array([ljj]), w[keep] / ljj))
        colrows[j] = rows_j
        colvals[j] = vals_j
        ptr[j] = 1
        if rows_j.shape[0] > 1:
            r0 = rows_j[1]
            nxt[j] = head[r0]
            head[r0] = j
        w[order] = 0.0
    counts = np.array([colrows[j].shape[0] for j in range(n)], INT)
    Lp = np.zeros(n + 1, INT)
    np.cumsum(counts, out=Lp[1:])
    Li = np.concatenate(colrows) if n else np.empty(0, INT)
    Lx = np.concatenate(colvals) if n else np.empty(0)
    return Lp, Li, Lx, -1


# ---------------------------------------------------------------------------
# complex ILUT with row-sum compensation (IKJ by row)
# ---------------------------------------------------------------------------

def ilut(n, Ap, Ai, Az, thresh, modified, pattern_only=False):
    """Threshold incomplete LU of a complex CSR matrix.

    L is unit lower triangular (diagonal not stored), U upper triangular with
    the diagonal first in each row.  Both the multiplier and the U-part drop
    tests compare the unscaled candidate |w| against thresh[row]; with
    ``pattern_only`` the threshold is replaced by zero-fill dropping (keep a
    position iff A stores it), which is what the reference tool's default
    factorization does.  When ``modified``, the U diagonal is set so that row
    sums of L U equal row sums of A exactly (milu-row compensation).

    Returns (Lp, Li, Lz, Up, Ui, Uz, bad); bad == -1 on success, else the row
    with an exactly zero pivot.
    """
    rs_target = np.empty(n, np.complex128)
    for i in range(n):
        rs_target[i] = Az[Ap[i]:Ap[i + 1]].sum()
    rs_U = np.zeros(n, np.complex128)
    urows = [None] * n
    uvals = [None] * n
    lrows = [None] * n
    lvals = [None] * n
    w = np.zeros(n, np.complex128)
    stamp = np.full(n, -1, INT)
    pat = np.full(n, -1, INT)
    for i in range(n):
        touch = []
        heap = []
        for p in range(Ap[i], Ap[i + 1]):
            jcol = Ai[p]
            w[jcol] = Az[p]
            stamp[jcol] = i
            pat[jcol] = i
            touch.append(jcol)
            if jcol < i:
                heapq.heappush(heap, jcol)
        ti = thresh[i]
        rowsum_acc = 0.0 + 0.0j
        li = []
        lv = []
        while heap:
            k = heapq.heappop(heap)
            wk = w[k]
            w[k] = 0.0
            if pattern_only:
                if pat[k] != i:
                    continue
            elif abs(wk) < ti:
                continue
            ur = urows[k]
            uv = uvals[k]
            mult = wk / uv[0]
            li.append(k)
            lv.append(mult)
            rowsum_acc += mult * rs_U[k]
            if ur.shape[0] > 1:
                seg = ur[1:]
                fresh = stamp[seg] != i
                if fresh.any():
                    newc = seg[fresh]
                    stamp[newc] = i
                    w[newc] = 0.0
                    touch.extend(newc.tolist())
                    for cc in newc:
                        if cc < i:
                            heapq.heappush(heap, int(cc))
                w[seg] -= mult * uv[1:]
        if stamp[i] != i:
            stamp[i] = i
            w[i] = 0.0
            touch.append(i)
        ucols = np.array(sorted(c for c in touch if c >= i), INT)
        vals = w[ucols]
        if pattern_only:
            dropm = (ucols != i) & (pat[ucols] != i)
        else:
            dropm = (ucols != i) & (np.abs(vals) < ti)
        keep = ucols[~dropm]
        kv = np.array(w[keep], copy=True)
        kept_off = kv[1:].sum() if kv.shape[0] > 1 else 0.0 + 0.0j
        if modified:
            uii = rs_target[i] - rowsum_acc - kept_off
        else:
            uii = kv[0]
        if uii == 0.0:
            return None, None, None, None, None, None, i
        kv[0] = uii
        rs_U[i] = uii + kept_off
        urows[i] = keep
        uvals[i] = kv
        lrows[i] = np.array(li, INT)
        lvals[i] = np.array(lv, np.complex128)
        w[np.array(touch, INT)] = 0.0
    lcount = np.array([lrows[i].shape[0] for i in range(n)], INT)
    ucount = np.array([urows[i].shape[0] for i in range(n)], INT)
    Lp = np.zeros(n + 1, INT)
    Up = np.zeros(n + 1, INT)
    np.cumsum(lcount, out=Lp[1:])
    np.cumsum(ucount, out=Up[1:])
    Li = np.concatenate(lrows) if n else np.empty(0, INT)
    Lz = np.concatenate(lvals) if n else np.empty(0, np.complex128)
    Ui = np.concatenate(urows) if n else np.empty(0, INT)
    Uz = np.concatenate(uvals) if n else np.empty(0, np.complex128)
    return Lp, Li, Lz, Up, Ui, Uz, -1


def solve_unit_lower_csr_cplx(Lp, Li, Lz, x):
    """In-place forward substitution with unit lower triangular CSR L."""
    n = Lp.shape[0] - 1
    for i in range(n):
        p0 = Lp[i]
        p1 = Lp[i + 1]
        if p1 > p0:
            x[i] -= np.dot(Lz[p0:p1], x[Li[p0:p1]])


def solve_upper_csr_cplx(Up, Ui, Uz, x):
    """In-place back substitution with upper triangular CSR U, diagonal first."""
    n = Up.shape[0] - 1
    for i in range(n - 1, -1, -1):
        p0 = Up[i]
        p1 = Up[i + 1]
        if p1 > p0 + 1:
            x[i] -= np.dot(Uz[p0 + 1:p1], x[Ui[p0 + 1:p1]])
        x[i] /= Uz[p0]


# ---------------------------------------------------------------------------
# minimum-degree ordering (quotient graph, exact external degrees)
# ---------------------------------------------------------------------------

def min_degree(n, Ap, Ai):
    """Fill-reducing elimination order: repeatedly eliminate the variable of
    least external degree (lowest index on ties), maintaining a quotient
    graph with element absorption.

    Returns perm with perm[k] = original index of the k-th pivot.
    """
    adj = [[int(j) for j in Ai[Ap[v]:Ap[v + 1]] if j != v] for v in range(n)]
    elem_vars = []
    elem_alive = []
    var_elems = [[] for _ in range(n)]
    alive = np.ones(n, bool)
    degree = np.array([len(a) for a in adj], INT)
    stamp = np.full(n, -1, INT)
    tick = 0
    heap = [(int(degree[v]), v) for v in range(n)]
    heapq.heapify(heap)
    perm = np.empty(n, INT)
    for step in range(n):
        while True:
            d, v = heapq.heappop(heap)
            if alive[v] and d == degree[v]:
                break
        alive[v] = False
        perm[step] = v
        tick += 1
        stamp[v] = tick
        reach = []
        for u in adj[v]:
            if alive[u] and stamp[u] != tick:
                stamp[u] = tick
                reach.append(u)
        for e in var_elems[v]:
            if elem_alive[e]:
                for u in elem_vars[e]:
                    if alive[u] and stamp[u] != tick:
                        stamp[u] = tick
                        reach.append(u)
                elem_alive[e] = False
        reach.sort()
        enew = len(elem_vars)
        elem_vars.append(reach)
        elem_alive.append(True)
        cover = tick
        for u in reach:
            adj[u] = [t for t in adj[u] if alive[t] and stamp[t] != cover]
            var_elems[u] = [e for e in var_elems[u] if elem_alive[e]]
            var_elems[u].append(enew)
        for u in reach:
            tick += 1
            stamp[u] = tick
            deg = 0
            for t in adj[u]:
                if stamp[t] != tick:
                    stamp[t] = tick
                    deg += 1
            for e in var_elems[u]:
                for t in elem_vars[e]:
                    if alive[t] and t != u and stamp[t] != tick:
                        stamp[t] = tick
                        deg += 1
            degree[u] = deg
            heapq.heappush(heap, (deg, u))
    return perm
