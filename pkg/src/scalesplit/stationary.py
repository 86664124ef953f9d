"""Stationary splitting iterations for (W + iT)u = b.

Five methods with exact (Cholesky) inner solves plus their inexact variants
whose inner SPD systems are solved by PCG in residual-correction form:

* SCSP      (alpha W + T) u' = i(W - alpha T) u + (alpha - i) b
* TSCSP     the two-step alternation of the (alpha-i)- and (1-alpha*i)-scaled
            fixed-point equations (equals TTSCSP with beta = alpha)
* TTSCSP    half-step 1: (alpha W + T) u' = i(W - alpha T) u + (alpha - i) b
            half-step 2: (W + beta T) u'' = i(beta W - T) u' + (1 - beta*i) b
* PMHSS     (alpha V + W) u' = (alpha V - iT) u + b
            (alpha V + T) u'' = (alpha V + iW) u' - i b       (V = W or I)
* GSOR      alternating real solves with W on the (x; y) block form

All coefficient matrices are real SPD, so complex right-hand sides are solved
as two independent real solves.  The stopping rule always recomputes the true
residual b - A u from scratch each outer iteration.
"""

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .factor import SymbolicCholesky, cholesky, incomplete_cholesky_ladder
from .krylov import cg_solve
from .sparse import ComplexVector, identity, lincomb


class Method(str, Enum):
    SCSP = "scsp"
    TSCSP = "tscsp"
    TTSCSP = "ttscsp"
    PMHSS = "pmhss"
    GSOR = "gsor"


class PmhssV(str, Enum):
    W = "w"
    IDENTITY = "identity"


@dataclass(frozen=True)
class SplittingParams:
    """Iteration parameters; beta is only read by TTSCSP, pmhss_v only by
    PMHSS (V = W reproduces the reference iteration counts)."""

    method: Method
    alpha: float
    beta: float = 1.0
    pmhss_v: PmhssV = PmhssV.W

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")


@dataclass(frozen=True)
class StoppingRule:
    """Relative-residual stopping: ||b - A u^(k)||_2 / ||b||_2 < rel_tol."""

    rel_tol: float = 1e-6
    max_iter: int = 500
    initial_guess: ComplexVector = None

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")


@dataclass
class SolveReport:
    iterations: float
    converged: bool
    residual_history: np.ndarray
    wall_seconds: float
    inner_iterations: int = 0
    inner_droptols: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InnerSolveConfig:
    """PCG configuration for the inexact variants: each real part of a complex
    inner system is solved to relative residual rel_tol."""

    rel_tol: float = 1e-2
    droptol: float = 1e-2
    use_ic: bool = True
    max_inner: int = 1000

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError("inner rel_tol must lie in (0, 1)")


class FactorCache:
    """Factors of a*W + b*T (and a*I + b*W etc.) for one problem, reusing the
    symbolic analysis across coefficients that share a sparsity pattern."""

    def __init__(self, problem):
        self.problem = problem
        self._symbolic = {}
        self._factors = {}
        self._matrices = {}

    def matrix(self, kind, a, b):
        key = (kind, float(a), float(b))
        M = self._matrices.get(key)
        if M is None:
            P = self.problem
            if kind == "WT":
                M = lincomb(a, P.W, b, P.T)
            elif kind == "IW":
                M = lincomb(a, identity(P.n), b, P.W)
            elif kind == "IT":
                M = lincomb(a, identity(P.n), b, P.T)
            else:
                raise ValueError(kind)
            self._matrices[key] = M
        return M

    def factor(self, kind, a, b):
        key = (kind, float(a), float(b))
        F = self._factors.get(key)
        if F is None:
            M = self.matrix(kind, a, b)
            sym = self._symbolic.get(kind)
            if sym is None:
                sym = SymbolicCholesky.analyze(M)
                self._symbolic[kind] = sym
            F = cholesky(M, symbolic=sym)
            self._factors[key] = F
        return F


def _start(problem, stop):
    u = stop.initial_guess.copy() if stop.initial_guess is not None else \
        ComplexVector.zeros(problem.n)
    bnorm = problem.b.norm()
    if bnorm == 0.0:
        return u, 0.0, None
    return u, bnorm, problem.residual(u).norm() / bnorm


def _finish(u, history, converged, iters, t0, inner=0, droptols=None):
    return u, SolveReport(
        iterations=float(iters),
        converged=bool(converged),
        residual_history=np.asarray(history),
        wall_seconds=time.perf_counter() - t0,
        inner_iterations=int(inner),
        inner_droptols=droptols or {},
    )


def _run_exact(problem, stop, step):
    t0 = time.perf_counter()
    u, bnorm, rel0 = _start(problem, stop)
    if rel0 is None:  # b = 0: zero guess is the solution
        return _finish(ComplexVector.zeros(problem.n), [0.0], True, 0, t0)
    history = [rel0]
    if rel0 < stop.rel_tol:
        return _finish(u, history, True, 0, t0)
    for k in range(1, stop.max_iter + 1):
        u = step(u)
        rel = problem.residual(u).norm() / bnorm
        history.append(rel)
        if rel < stop.rel_tol:
            return _finish(u, history, True, k, t0)
    return _finish(u, history, False, stop.max_iter, t0)


# ---------------------------------------------------------------------------
# exact methods
# ---------------------------------------------------------------------------

def _half_step_1(u, fac, WmaT, b, alpha):
    """(alpha W + T) u' = i (W - alpha T) u + (alpha - i) b."""
    zr = WmaT.matvec(u.re)
    zi = WmaT.matvec(u.im)
    rhs_re = -zi + alpha * b.re + b.im
    rhs_im = zr + alpha * b.im - b.re
    return ComplexVector(fac.solve(rhs_re), fac.solve(rhs_im))


def _half_step_2(u, fac, bWmT, b, beta):
    """(W + beta T) u'' = i (beta W - T) u' + (1 - beta i) b."""
    zr = bWmT.matvec(u.re)
    zi = bWmT.matvec(u.im)
    rhs_re = -zi + b.re + beta * b.im
    rhs_im = zr + b.im - beta * b.re
    return ComplexVector(fac.solve(rhs_re), fac.solve(rhs_im))


def scsp_solve(problem, params, stop=StoppingRule(), cache=None):
    """One-step scale-splitting iteration."""
    cache = cache or FactorCache(problem)
    a = params.alpha
    fac = cache.factor("WT", a, 1.0)
    WmaT = cache.matrix("WT", 1.0, -a)
    return _run_exact(problem, stop,
                      lambda u: _half_step_1(u, fac, WmaT, problem.b, a))


def ttscsp_solve(problem, params, stop=StoppingRule(), cache=None):
    """Two-parameter two-step scale-splitting iteration."""
    cache = cache or FactorCache(problem)
    a, bta = params.alpha, params.beta
    fac1 = cache.factor("WT", a, 1.0)
    fac2 = cache.factor("WT", 1.0, bta)
    WmaT = cache.matrix("WT", 1.0, -a)
    bWmT = cache.matrix("WT", bta, -1.0)
    b = problem.b

    def step(u):
        u = _half_step_1(u, fac1, WmaT, b, a)
        return _half_step_2(u, fac2, bWmT, b, bta)

    return _run_exact(problem, stop, step)


def tscsp_solve(problem, params, stop=StoppingRule(), cache=None):
    """Two-step scale-splitting: the beta = alpha case of TTSCSP."""
    return ttscsp_solve(problem, replace(params, beta=params.alpha), stop,
                        cache)


def pmhss_solve(problem, params, stop=StoppingRule(), cache=None):
    """Preconditioned modified HSS iteration with V = W (default) or V = I."""
    cache = cache or FactorCache(problem)
    a = params.alpha
    W, T, b = problem.W, problem.T, problem.b
    if params.pmhss_v == PmhssV.W:
        fac1 = cache.factor("WT", a + 1.0, 0.0)      # alpha V + W = (1+a) W
        fac2 = cache.factor("WT", a, 1.0)            # alpha V + T = a W + T
        aV = lambda x: a * W.matvec(x)
    else:
        fac1 = cache.factor("IW", a, 1.0)            # alpha I + W
        fac2 = cache.factor("IT", a, 1.0)            # alpha I + T
        aV = lambda x: a * x

    def step(u):
        # (aV - iT)(x+iy) = (aVx + Ty) + i(aVy - Tx);  + b
        tr = T.matvec(u.re)
        ti = T.matvec(u.im)
        rhs_re = aV(u.re) + ti + b.re
        rhs_im = aV(u.im) - tr + b.im
        u = ComplexVector(fac1.solve(rhs_re), fac1.solve(rhs_im))
        # (aV + iW)(x+iy) = (aVx - Wy) + i(aVy + Wx);  - i b
        wr = W.matvec(u.re)
        wi = W.matvec(u.im)
        rhs_re = aV(u.re) - wi + b.im
        rhs_im = aV(u.im) + wr - b.re
        return ComplexVector(fac2.solve(rhs_re), fac2.solve(rhs_im))

    return _run_exact(problem, stop, step)


def gsor_solve(problem, params, stop=StoppingRule(), cache=None):
    """Generalized SOR on the real block form; only W is factorized."""
    cache = cache or FactorCache(problem)
    a = params.alpha
    facW = cache.factor("WT", 1.0, 0.0)
    T, b = problem.T, problem.b

    def step(u):
        x = (1.0 - a) * u.re + a * facW.solve(T.matvec(u.im) + b.re)
        y = (1.0 - a) * u.im + a * facW.solve(b.im - T.matvec(x))
        return ComplexVector(x, y)

    return _run_exact(problem, stop, step)


# ---------------------------------------------------------------------------
# inexact variants (PCG inner solves in residual-correction form)
# ---------------------------------------------------------------------------

def _pcg_pair(M, precond, rhs, inner):
    """Solve M z = rhs (complex rhs, real SPD M) as two real PCG runs."""
    total = 0
    parts = []
    for part in (rhs.re, rhs.im):
        z, rep = cg_solve(M, part, tol=inner.rel_tol, maxit=inner.max_inner,
                          precond=precond)
        parts.append(z)
        total += int(rep.iterations)
    return ComplexVector(*parts), total


def _inexact_loop(problem, stop, inner, half_specs, cache):
    """Generic residual-correction sweep: each half step solves
    M z = scal * (b - A u) inexactly and sets u += z."""
    t0 = time.perf_counter()
    systems = []
    droptols = {}
    for name, kind, ca, cb, scal in half_specs:
        M = cache.matrix(kind, ca, cb)
        pre = None
        if inner.use_ic:
            pre, used = incomplete_cholesky_ladder(M, inner.droptol)
            droptols[name] = used
        systems.append((M, pre, scal))
    u, bnorm, rel0 = _start(problem, stop)
    if rel0 is None:
        return _finish(ComplexVector.zeros(problem.n), [0.0], True, 0, t0,
                       droptols=droptols)
    history = [rel0]
    inner_total = 0
    if rel0 < stop.rel_tol:
        return _finish(u, history, True, 0, t0, droptols=droptols)
    for k in range(1, stop.max_iter + 1):
        for M, pre, scal in systems:
            r = problem.residual(u)
            z, its = _pcg_pair(M, pre, r.scale(scal), inner)
            inner_total += its
            u = u + z
        rel = problem.residual(u).norm() / bnorm
        history.append(rel)
        if rel < stop.rel_tol:
            return _finish(u, history, True, k, t0, inner_total, droptols)
    return _finish(u, history, False, stop.max_iter, t0, inner_total, droptols)


def ittscsp_solve(problem, params, stop=StoppingRule(),
                  inner=InnerSolveConfig(), cache=None):
    """Inexact TTSCSP: (alpha W + T) z = (alpha - i) r, u += z, then
    (W + beta T) z = (1 - beta i) r, u += z, with PCG inner solves."""
    a, bta = params.alpha, params.beta
    cache = cache or FactorCache(problem)
    specs = [
        ("alphaW+T", "WT", a, 1.0, a - 1j),
        ("W+betaT", "WT", 1.0, bta, 1.0 - bta * 1j),
    ]
    return _inexact_loop(problem, stop, inner, specs, cache)


def inexact_variant(problem, params, stop=StoppingRule(),
                    inner=InnerSolveConfig(), cache=None):
    """ISCSP / ITSCSP / ITTSCSP / IPMHSS, chosen by params.method."""
    a, bta = params.alpha, params.beta
    cache = cache or FactorCache(problem)
    m = params.method
    if m == Method.SCSP:
        specs = [("alphaW+T", "WT", a, 1.0, a - 1j)]
    elif m == Method.TSCSP:
        specs = [("alphaW+T", "WT", a, 1.0, a - 1j),
                 ("W+alphaT", "WT", 1.0, a, 1.0 - a * 1j)]
    elif m == Method.TTSCSP:
        specs = [("alphaW+T", "WT", a, 1.0, a - 1j),
                 ("W+betaT", "WT", 1.0, bta, 1.0 - bta * 1j)]
    elif m == Method.PMHSS:
        if params.pmhss_v == PmhssV.W:
            specs = [("alphaV+W", "WT", a + 1.0, 0.0, 1.0 + 0j),
                     ("alphaV+T", "WT", a, 1.0, -1j)]
        else:
            specs = [("alphaV+W", "IW", a, 1.0, 1.0 + 0j),
                     ("alphaV+T", "IT", a, 1.0, -1j)]
    else:
        raise ValueError(f"no inexact variant for method {m}")
    return _inexact_loop(problem, stop, inner, specs, cache)


# ---------------------------------------------------------------------------
# explicit iteration-operator form (validation / spectral diagnostics)
# ---------------------------------------------------------------------------

def iteration_operator_apply(problem, alpha, beta, v, cache=None):
    """G v = (W + beta T)^{-1} (T - beta W) (alpha W + T)^{-1} (W - alpha T) v,
    computed with two solves and two products per part."""
    cache = cache or FactorCache(problem)
    fac1 = cache.factor("WT", alpha, 1.0)
    fac2 = cache.factor("WT", 1.0, beta)
    WmaT = cache.matrix("WT", 1.0, -alpha)
    TmbW = cache.matrix("WT", -beta, 1.0)

    def one(x):
        y = fac1.solve(WmaT.matvec(x))
        return fac2.solve(TmbW.matvec(y))

    return ComplexVector(one(v.re), one(v.im))


def iteration_constant_term(problem, alpha, beta, cache=None):
    """C = (alpha + beta) (W + beta T)^{-1} (W - iT) (alpha W + T)^{-1} b."""
    cache = cache or FactorCache(problem)
    fac1 = cache.factor("WT", alpha, 1.0)
    fac2 = cache.factor("WT", 1.0, beta)
    z = fac1.solve_complex(problem.b)
    W, T = problem.W, problem.T
    w = ComplexVector(W.matvec(z.re) + T.matvec(z.im),
                      W.matvec(z.im) - T.matvec(z.re))  # (W - iT) z
    y = fac2.solve_complex(w)
    s = alpha + beta
    return ComplexVector(s * y.re, s * y.im)


_EXACT_SOLVERS = {
    Method.SCSP: scsp_solve,
    Method.TSCSP: tscsp_solve,
    Method.TTSCSP: ttscsp_solve,
    Method.PMHSS: pmhss_solve,
    Method.GSOR: gsor_solve,
}


def solve_stationary(problem, params, stop=StoppingRule(), inner=None,
                     cache=None):
    """Dispatch on params.method; inner=None runs the exact variant."""
    if inner is None:
        return _EXACT_SOLVERS[params.method](problem, params, stop, cache)
    return inexact_variant(problem, params, stop, inner, cache)
