"""Benchmark problem generators.

Three families of complex symmetric systems (W + iT)u = b on an m x m grid
(n = m^2, mesh size h = 1/(m+1)):

* example1 - time-stepped parabolic model: W = K + (3-sqrt(3))/tau * I,
  T = K + (3+sqrt(3))/tau * I with K the five-point negative-Laplacian stencil
  (h^-2 scaling), b_j = (1-i) j / (tau (j+1)^2) for 1-based j; everything is
  normalized by h^2.
* example2 - damped structural dynamics: W = K - omega^2 I,
  T = omega*10*I + mu*K, b = (1+i) A 1, normalized by h^2.
* example3 - periodic/Dirichlet Laplacian pair (unscaled stencils):
  T = I(x)V + V(x)I, W = 10(I(x)Vc + Vc(x)I) + 9(e1 em^T + em e1^T)(x)I,
  b = (1+i) A 1.

Instances are immutable; examples 2-3 have the closed-form solution (1+i)*1.
"""

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from . import mmio
from .sparse import (INT, ComplexVector, SparseSymMatrix, assemble,
                     complex_matvec, identity, kron_sum, lincomb, tridiag)


@dataclass(frozen=True)
class ProblemInstance:
    W: SparseSymMatrix
    T: SparseSymMatrix
    b: ComplexVector
    m: int
    h: float
    label: str
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.W.n

    def matvec(self, u):
        """(W + iT) u."""
        return complex_matvec(self.W, self.T, u)

    def residual(self, u):
        """b - (W + iT) u."""
        return self.b - self.matvec(u)


def _laplacian_k(m):
    h = 1.0 / (m + 1)
    V = tridiag(m).scaled(1.0 / (h * h))
    return kron_sum(V), h


def example1(m, tau, normalize=True):
    """Time-dependent PDE model problem; tau is the time step (often h or
    500h)."""
    if m < 1 or tau <= 0:
        raise ValueError("need m >= 1 and tau > 0")
    K, h = _laplacian_k(m)
    n = m * m
    c1 = (3.0 - math.sqrt(3.0)) / tau
    c2 = (3.0 + math.sqrt(3.0)) / tau
    W = lincomb(1.0, K, c1, identity(n))
    T = lincomb(1.0, K, c2, identity(n))
    j = np.arange(1, n + 1, dtype=float)
    bj = j / (tau * (j + 1.0) ** 2)
    b = ComplexVector(bj, -bj)  # (1 - i) * j / (tau (j+1)^2)
    scale = h * h if normalize else 1.0
    return ProblemInstance(
        W.scaled(scale), T.scaled(scale),
        ComplexVector(scale * b.re, scale * b.im),
        m, h, "ex1",
        MappingProxyType({"tau": tau, "normalized": bool(normalize)}),
    )


def example2(m, omega=math.pi, mu_damp=0.02, normalize=True):
    """Structural dynamics model: inertia/stiffness with viscous (10I) and
    hysteretic (mu*K) damping at driving frequency omega."""
    if m < 1:
        raise ValueError("need m >= 1")
    K, h = _laplacian_k(m)
    n = m * m
    # smallest eigenvalue of K is 4 h^-2 (1 - cos(pi h)); W must stay SPD
    kmin = 4.0 / (h * h) * (1.0 - math.cos(math.pi * h))
    if kmin <= omega * omega:
        raise ValueError(
            f"W = K - omega^2 I is not positive definite for m={m}, omega={omega}"
        )
    W = lincomb(1.0, K, -omega * omega, identity(n))
    T = lincomb(mu_damp, K, 10.0 * omega, identity(n))
    ones = ComplexVector(np.ones(n), np.ones(n))  # (1+i) * 1
    b = complex_matvec(W, T, ones)
    scale = h * h if normalize else 1.0
    return ProblemInstance(
        W.scaled(scale), T.scaled(scale),
        ComplexVector(scale * b.re, scale * b.im),
        m, h, "ex2",
        MappingProxyType({"omega": omega, "mu_damp": mu_damp,
                          "normalized": bool(normalize)}),
    )


def example3(m):
    """Periodic (W) vs Dirichlet (T) Laplacian pair, unscaled stencils."""
    if m < 2:
        raise ValueError("need m >= 2")
    n = m * m
    h = 1.0 / (m + 1)
    V = tridiag(m)
    T = kron_sum(V)
    # Vc = V - e1 em^T - em e1^T  (periodic corner couplings)
    vr, vc, vv = V.to_triplets()
    Vc = assemble(
        m,
        np.concatenate((vr, np.array([0, m - 1], dtype=INT))),
        np.concatenate((vc, np.array([m - 1, 0], dtype=INT))),
        np.concatenate((vv, np.array([-1.0, -1.0]))),
        check_symmetry=False,
    )
    Wp = kron_sum(Vc).scaled(10.0)
    # 9 (e1 em^T + em e1^T) (x) I : couples grid rows 0 and m-1 columnwise
    j = np.arange(m, dtype=INT)
    r = np.concatenate((j, (m - 1) * m + j))
    c = np.concatenate(((m - 1) * m + j, j))
    corr = assemble(n, r, c, np.full(2 * m, 9.0), check_symmetry=False)
    W = lincomb(1.0, Wp, 1.0, corr)
    ones = ComplexVector(np.ones(n), np.ones(n))
    b = complex_matvec(W, T, ones)
    return ProblemInstance(W, T, b, m, h, "ex3", MappingProxyType({}))


def exact_solution(problem):
    """(1+i)*1 for examples 2-3 (b was built from it); None otherwise."""
    if problem.label in ("ex2", "ex3"):
        n = problem.n
        return ComplexVector(np.ones(n), np.ones(n))
    return None


# ---------------------------------------------------------------------------
# instance export/import: Matrix Market pair + JSON sidecar
# ---------------------------------------------------------------------------

def save_instance(problem, directory, stem=None):
    """Write {stem}_W.mtx, {stem}_T.mtx and {stem}.json into directory."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or problem.label
    mmio.write_matrix_market(problem.W, directory / f"{stem}_W.mtx")
    mmio.write_matrix_market(problem.T, directory / f"{stem}_T.mtx")
    meta = {
        "label": problem.label,
        "m": problem.m,
        "h": problem.h,
        "params": dict(problem.params),
        "b_re": problem.b.re.tolist(),
        "b_im": problem.b.im.tolist(),
    }
    with open(directory / f"{stem}.json", "w") as fh:
        json.dump(meta, fh)
    return stem


def load_instance(directory, stem):
    from pathlib import Path

    directory = Path(directory)
    with open(directory / f"{stem}.json") as fh:
        meta = json.load(fh)
    W = mmio.read_matrix_market(directory / f"{stem}_W.mtx")
    T = mmio.read_matrix_market(directory / f"{stem}_T.mtx")
    b = ComplexVector(np.array(meta["b_re"]), np.array(meta["b_im"]))
    return ProblemInstance(W, T, b, int(meta["m"]), float(meta["h"]),
                           meta["label"], MappingProxyType(meta["params"]))
