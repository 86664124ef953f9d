"""Krylov solvers: CG/PCG for the real SPD inner systems and right-
preconditioned BiCGSTAB for the complex system (W + iT)u = b.

BiCGSTAB counts half iterations: if the residual test passes right after the
s-vector update the run is reported as (k - 0.5) iterations.  Convergence is
only accepted after verifying the true residual b - A x, so preconditioner
scaling never distorts the reported counts (right preconditioning leaves the
true residual invariant).
"""

import time
from dataclasses import dataclass

import numpy as np

from .factor import cholesky
from .sparse import ComplexVector, lincomb

RHO_BREAKDOWN = 1e-30


@dataclass
class KrylovReport:
    iterations: float
    converged: bool
    residual_history: np.ndarray
    wall_seconds: float = 0.0
    breakdown: bool = False


class CgBreakdownError(Exception):
    """p^T A p <= 0 in CG: the operator is not positive definite."""


def cg_solve(A, rhs, tol=1e-6, maxit=None, precond=None, x0=None,
             callback=None):
    """(Preconditioned) conjugate gradients for SPD A.

    precond, if given, must expose solve(r) returning an approximation of
    A^{-1} r (e.g. an IncompleteCholesky).  The stopping test uses the
    residual of the original system, ||rhs - A x|| <= tol * ||rhs||.
    """
    t0 = time.perf_counter()
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[0]
    if maxit is None:
        maxit = max(20, n)
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return np.zeros(n), KrylovReport(0.0, True, np.array([0.0]),
                                         time.perf_counter() - t0)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float, copy=True)
    r = rhs - A.matvec(x) if x0 is not None else rhs.copy()
    normr = np.linalg.norm(r)
    history = [normr / bnorm]
    if normr <= tol * bnorm:
        return x, KrylovReport(0.0, True, np.asarray(history),
                               time.perf_counter() - t0)
    rho = 0.0
    p = None
    for it in range(1, maxit + 1):
        z = precond.solve(r) if precond is not None else r
        rho_old = rho
        rho = float(np.dot(r, z))
        if it == 1:
            p = z.copy()
        else:
            p = z + (rho / rho_old) * p
        q = A.matvec(p)
        pq = float(np.dot(p, q))
        if pq <= 0.0:
            raise CgBreakdownError("p^T A p <= 0: matrix not positive definite")
        alpha = rho / pq
        x = x + alpha * p
        r = r - alpha * q
        normr = np.linalg.norm(r)
        history.append(normr / bnorm)
        if callback is not None:
            callback(x)
        if normr <= tol * bnorm:
            return x, KrylovReport(float(it), True, np.asarray(history),
                                   time.perf_counter() - t0)
    return x, KrylovReport(float(maxit), False, np.asarray(history),
                           time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# preconditioners (Preconditioner interface: apply_inverse on ComplexVector)
# ---------------------------------------------------------------------------

class TwoStepSplittingPreconditioner:
    """Action of Q^{-1} = (W + beta T)^{-1} (W - iT) (alpha W + T)^{-1}.

    Q = (alpha W + T)(W - iT)^{-1}(W + beta T) is the splitting matrix of the
    two-step iteration up to the positive scalar 1/(alpha+beta), which is
    omitted: right preconditioning is invariant under positive scaling.
    """

    def __init__(self, problem, alpha, beta):
        if alpha <= 0 or beta <= 0:
            raise ValueError("alpha and beta must be positive")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.W = problem.W
        self.T = problem.T
        self._fac1 = cholesky(lincomb(alpha, problem.W, 1.0, problem.T))
        self._fac2 = cholesky(lincomb(1.0, problem.W, beta, problem.T))

    def apply_inverse(self, v):
        z = self._fac1.solve_complex(v)
        w = ComplexVector(
            self.W.matvec(z.re) + self.T.matvec(z.im),
            self.W.matvec(z.im) - self.T.matvec(z.re),
        )  # (W - iT) z
        return self._fac2.solve_complex(w)


class IluPreconditioner:
    """Action of (L U)^{-1} for a ComplexILU factor."""

    def __init__(self, fac):
        self.fac = fac

    def apply_inverse(self, v):
        return self.fac.solve(v)


def ttscsp_preconditioner(problem, alpha, beta):
    return TwoStepSplittingPreconditioner(problem, alpha, beta)


def ilu_preconditioner(fac):
    return IluPreconditioner(fac)


# ---------------------------------------------------------------------------
# BiCGSTAB
# ---------------------------------------------------------------------------

def bicgstab_solve(matvec, rhs, tol=1e-6, maxit=500, precond=None):
    """Right-preconditioned BiCGSTAB.

    matvec maps a complex ndarray to A times it; rhs is a ComplexVector.
    Returns (ComplexVector, KrylovReport) with half-iteration granularity.
    """
    t0 = time.perf_counter()
    b = rhs.to_complex()
    n = b.shape[0]
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return ComplexVector.zeros(n), KrylovReport(
            0.0, True, np.array([0.0]), time.perf_counter() - t0)
    tolb = tol * bnorm

    def minv(z):
        if precond is None:
            return z
        return precond.apply_inverse(ComplexVector.from_complex(z)).to_complex()

    x = np.zeros(n, dtype=np.complex128)
    r = b.copy()
    normr = np.linalg.norm(r)
    history = [normr / bnorm]
    if normr <= tolb:
        return ComplexVector.from_complex(x), KrylovReport(
            0.0, True, np.asarray(history), time.perf_counter() - t0)
    rt = r.copy()
    rho = 1.0 + 0j
    omega = 1.0 + 0j
    alpha = 1.0 + 0j
    v = np.zeros(n, dtype=np.complex128)
    p = np.zeros(n, dtype=np.complex128)
    for it in range(1, maxit + 1):
        rho_old = rho
        rho = np.vdot(rt, r)
        if abs(rho) < RHO_BREAKDOWN or not np.isfinite(rho):
            return ComplexVector.from_complex(x), KrylovReport(
                float(it) - 1.0, False, np.asarray(history),
                time.perf_counter() - t0, breakdown=True)
        if it == 1:
            p = r.copy()
        else:
            beta = (rho / rho_old) * (alpha / omega)
            if beta == 0.0 or not np.isfinite(beta):
                return ComplexVector.from_complex(x), KrylovReport(
                    float(it) - 1.0, False, np.asarray(history),
                    time.perf_counter() - t0, breakdown=True)
            p = r + beta * (p - omega * v)
        ph = minv(p)
        v = matvec(ph)
        rtv = np.vdot(rt, v)
        if abs(rtv) < RHO_BREAKDOWN or not np.isfinite(rtv):
            return ComplexVector.from_complex(x), KrylovReport(
                float(it) - 1.0, False, np.asarray(history),
                time.perf_counter() - t0, breakdown=True)
        alpha = rho / rtv
        xhalf = x + alpha * ph
        s = r - alpha * v
        norms = np.linalg.norm(s)
        history.append(norms / bnorm)
        if norms <= tolb:
            # verify with the true residual before reporting the half step
            true_norm = np.linalg.norm(b - matvec(xhalf))
            if true_norm <= tolb:
                history[-1] = true_norm / bnorm
                return ComplexVector.from_complex(xhalf), KrylovReport(
                    float(it) - 0.5, True, np.asarray(history),
                    time.perf_counter() - t0)
        sh = minv(s)
        t = matvec(sh)
        tt = np.vdot(t, t)
        if abs(tt) < RHO_BREAKDOWN or not np.isfinite(tt):
            return ComplexVector.from_complex(xhalf), KrylovReport(
                float(it) - 0.5, False, np.asarray(history),
                time.perf_counter() - t0, breakdown=True)
        omega = np.vdot(t, s) / tt
        if omega == 0.0 or not np.isfinite(omega):
            return ComplexVector.from_complex(xhalf), KrylovReport(
                float(it) - 0.5, False, np.asarray(history),
                time.perf_counter() - t0, breakdown=True)
        x = xhalf + omega * sh
        r = s - omega * t
        normr = np.linalg.norm(r)
        history.append(normr / bnorm)
        if normr <= tolb:
            true_norm = np.linalg.norm(b - matvec(x))
            if true_norm <= tolb:
                history[-1] = true_norm / bnorm
                return ComplexVector.from_complex(x), KrylovReport(
                    float(it), True, np.asarray(history),
                    time.perf_counter() - t0)
    return ComplexVector.from_complex(x), KrylovReport(
        float(maxit), False, np.asarray(history), time.perf_counter() - t0)


def bicgstab_on_problem(problem, tol=1e-6, maxit=500, precond=None):
    """BiCGSTAB on (W + iT) u = b for a ProblemInstance."""

    def matvec(z):
        return problem.matvec(ComplexVector.from_complex(z)).to_complex()

    return bicgstab_solve(matvec, problem.b, tol=tol, maxit=maxit,
                          precond=precond)
