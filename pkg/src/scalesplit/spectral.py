"""Spectral machinery for the two-step splitting iteration.

Everything is driven by the eigenvalues mu_j of S = W^{-1/2} T W^{-1/2},
computed as the (equivalent) generalized symmetric problem T x = mu W x so no
matrix square root is formed.  On top of the spectrum:

* the eigenvalue map lambda(alpha, beta, mu) of the iteration operator
  G = (W + beta T)^{-1}(T - beta W)(alpha W + T)^{-1}(W - alpha T),
* the sufficient convergence regions for (alpha, beta), both the two-sided
  bounds and the mu_s-based variant with beta < alpha,
* the closed-form bound minimizers alpha* = (gamma + sqrt(gamma^2 + eta^2))/eta,
  beta* = 1/alpha* with eta = mu_1 + mu_n, gamma = 1 - mu_1 mu_n,
* the separable upper bound sigma(alpha, beta) >= rho(G),
* the inexact-iteration contraction estimate sigma_bar + epsilon built from
  the CG error factors and the norm/condition constants of the half-step
  operators.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .sparse import ComplexVector
from .stationary import FactorCache, iteration_operator_apply

DENSE_CAP = 4096


class PowerIterationStagnation(RuntimeError):
    """Power iteration failed to settle within the step cap."""


@dataclass(frozen=True)
class SpectrumSummary:
    """Spectrum of S; mu is the full sorted array in dense mode, None when
    only extremal estimates were computed."""

    mu: np.ndarray
    mu_min: float
    mu_max: float
    mu_s: float
    exact: bool

    @classmethod
    def from_values(cls, mu, exact=True):
        mu = np.sort(np.asarray(mu, dtype=float))
        if mu.size == 0:
            raise ValueError("empty spectrum")
        if mu[0] < -1e-10:
            raise ValueError(f"negative eigenvalue {mu[0]}: W SPD / T PSD violated")
        mu_s = _smallest_positive(mu)
        return cls(mu, float(mu[0]), float(mu[-1]), mu_s, exact)


def _smallest_positive(mu):
    cutoff = 1e-8 * max(mu[-1], 0.0)
    pos = mu[mu > cutoff]
    return float(pos[0]) if pos.size else 0.0


def spectrum_of_S(W, T, mode="dense", lanczos_steps=60):
    """Eigenvalues of S = W^{-1/2} T W^{-1/2}.

    dense: full spectrum by the symmetric generalized solver (n <= 4096).
    extremal: W-inner-product Lanczos estimates of mu_min / mu_max only.
    """
    if mode == "dense":
        if W.n > DENSE_CAP:
            raise ValueError(f"dense mode capped at n={DENSE_CAP}")
        mu = scipy.linalg.eigh(T.to_dense(), W.to_dense(), eigvals_only=True)
        return SpectrumSummary.from_values(mu)
    if mode == "extremal":
        mu = _lanczos_extremal(W, T, steps=lanczos_steps)
        summary = SpectrumSummary.from_values(mu, exact=False)
        return SpectrumSummary(None, summary.mu_min, summary.mu_max,
                               summary.mu_s, False)
    raise ValueError(f"unknown mode {mode!r}")


def _lanczos_extremal(W, T, steps):
    """Lanczos on B = W^{-1} T in the W-inner product, full
    reorthogonalization; returns the Ritz values."""
    from .factor import cholesky

    n = W.n
    facW = cholesky(W)
    steps = min(steps, n)
    q = np.ones(n)
    q /= math.sqrt(np.dot(q, W.matvec(q)))
    Q = [q]
    Wq = [W.matvec(q)]
    alphas = []
    betas = []
    for j in range(steps):
        z = facW.solve(T.matvec(Q[j]))
        a = float(np.dot(z, Wq[j]))
        alphas.append(a)
        z = z - a * Q[j]
        if j > 0:
            z = z - betas[-1] * Q[j - 1]
        # full reorthogonalization in the W-inner product
        for qi, wqi in zip(Q, Wq):
            z -= np.dot(z, wqi) * qi
        wz = W.matvec(z)
        bnext = math.sqrt(max(float(np.dot(z, wz)), 0.0))
        if bnext == 0.0 or j == steps - 1:
            break
        betas.append(bnext)
        q = z / bnext
        Q.append(q)
        Wq.append(W.matvec(q))
    return scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas),
                                         eigvals_only=True)


# ---------------------------------------------------------------------------
# iteration-operator eigenvalue map and convergence regions
# ---------------------------------------------------------------------------

def lambda_value(alpha, beta, mu):
    """Eigenvalue of the iteration operator attached to mu:
    (mu - beta)(1 - alpha mu) / ((1 + beta mu)(alpha + mu))."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    mu = np.asarray(mu, dtype=float)
    out = (mu - beta) * (1.0 - alpha * mu) / ((1.0 + beta * mu) * (alpha + mu))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ParamRegion:
    """Open parameter box (alpha_lo, alpha_hi) x (beta_lo, beta_hi); inf
    bounds mark the degenerate one-sided cases."""

    alpha_lo: float
    alpha_hi: float
    beta_lo: float
    beta_hi: float

    @property
    def empty(self):
        return not (self.alpha_lo < self.alpha_hi and self.beta_lo < self.beta_hi)

    def contains(self, alpha, beta):
        return (self.alpha_lo < alpha < self.alpha_hi
                and self.beta_lo < beta < self.beta_hi)


def theorem1_region(spec):
    """Sufficient two-sided parameter bounds from the extreme eigenvalues:
    (1-mu_1)/(1+mu_1) < alpha < (mu_n+1)/(mu_n-1) and
    (mu_n-1)/(mu_n+1) < beta < (1+mu_1)/(1-mu_1), with the one-sided
    degenerate forms when the spectrum sits entirely on one side of 1."""
    m1, mn = spec.mu_min, spec.mu_max
    alpha_lo = max(0.0, (1.0 - m1) / (1.0 + m1))
    alpha_hi = math.inf if mn <= 1.0 else (mn + 1.0) / (mn - 1.0)
    beta_lo = max(0.0, (mn - 1.0) / (mn + 1.0))
    beta_hi = math.inf if m1 >= 1.0 else (1.0 + m1) / (1.0 - m1)
    return ParamRegion(alpha_lo, alpha_hi, beta_lo, beta_hi)


@dataclass(frozen=True)
class OneSidedRegion:
    """alpha > alpha_min, beta > beta_min together with beta < alpha."""

    alpha_min: float
    beta_min: float

    def contains(self, alpha, beta):
        return alpha > self.alpha_min and beta > self.beta_min and beta < alpha


def theorem3_region(spec):
    """Sufficient bounds alpha > (1/mu_s - mu_s)/2, beta > (mu_n - 1/mu_n)/2,
    0 < beta < alpha, built from the smallest positive eigenvalue."""
    if spec.mu_s <= 0.0:
        raise ValueError("needs a strictly positive smallest eigenvalue mu_s")
    a_min = max(0.0, 0.5 * (1.0 / spec.mu_s - spec.mu_s))
    b_min = max(0.0, 0.5 * (spec.mu_max - 1.0 / spec.mu_max))
    return OneSidedRegion(a_min, b_min)


def optimal_params(spec):
    """Closed-form minimizers of the separable bound:
    alpha* = (gamma + sqrt(gamma^2 + eta^2)) / eta, beta* = 1/alpha*."""
    eta = spec.mu_min + spec.mu_max
    if eta <= 0.0:
        raise ValueError("degenerate spectrum (T = 0): no optimal parameters")
    gamma = 1.0 - spec.mu_min * spec.mu_max
    alpha_star = (gamma + math.hypot(gamma, eta)) / eta
    return alpha_star, 1.0 / alpha_star


def f_mu(alpha, mu):
    """First separable factor (1 - alpha mu)/(alpha + mu)."""
    return (1.0 - alpha * mu) / (alpha + mu)


def g_mu(beta, mu):
    """Second separable factor (mu - beta)/(1 + beta mu)."""
    return (mu - beta) / (1.0 + beta * mu)


def sigma_bound(alpha, beta, spec):
    """Separable upper bound on the spectral radius:
    max_j |g_mu_j(beta)| * max_j |f_mu_j(alpha)|."""
    if spec.mu is None:
        raise ValueError("sigma bound needs the full (dense-mode) spectrum")
    mu = spec.mu
    return float(np.max(np.abs(g_mu(beta, mu))) * np.max(np.abs(f_mu(alpha, mu))))


def spectral_radius_G(problem, alpha, beta, mode="dense", spec=None,
                      tol=1e-8, maxsteps=1000, cache=None):
    """rho(G) for the two-step iteration operator.

    dense: max |lambda(alpha, beta, mu_j)| over the computed spectrum (G and
    its symmetric transform are similar).  power: power iteration on the
    operator action with a deterministic all-ones start; two applications per
    step so a dominant +/- pair cannot stall the estimate.
    """
    if mode == "dense":
        if spec is None:
            spec = spectrum_of_S(problem.W, problem.T)
        return float(np.max(np.abs(lambda_value(alpha, beta, spec.mu))))
    if mode != "power":
        raise ValueError(f"unknown mode {mode!r}")
    cache = cache or FactorCache(problem)
    n = problem.n
    v = np.ones(n) / math.sqrt(n)
    est = None
    for _ in range(maxsteps):
        w = iteration_operator_apply(problem, alpha, beta,
                                     ComplexVector(v, np.zeros(n)), cache).re
        w = iteration_operator_apply(problem, alpha, beta,
                                     ComplexVector(w, np.zeros(n)), cache).re
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        new_est = math.sqrt(nrm)
        if est is not None and abs(new_est - est) <= tol * max(new_est, 1e-30):
            return new_est
        est = new_est
        v = w / nrm
    raise PowerIterationStagnation(
        f"power iteration did not settle in {maxsteps} steps")


# ---------------------------------------------------------------------------
# inexact-iteration contraction bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    rho_G: float
    sigma_bound: float
    theorem1_ok: bool
    alpha_range: tuple
    beta_range: tuple
    epsilon_ittscsp: float
    sigma_bar: float
    r: float
    c_h: float
    c_s: float
    sigma_h1: float
    sigma_h2: float

    @property
    def contraction(self):
        """The inexact-iteration error factor sigma_bar + epsilon."""
        return self.sigma_bar + self.epsilon_ittscsp


def cg_error_factor(kappa, steps):
    """2 ((sqrt(kappa) - 1)/(sqrt(kappa) + 1))^steps, the classical CG factor."""
    rk = math.sqrt(kappa)
    return 2.0 * ((rk - 1.0) / (rk + 1.0)) ** steps


def _spd_cond(M):
    ev = np.linalg.eigvalsh(M)
    return float(ev[-1] / ev[0])


def ittscsp_bound(problem, alpha, beta, tau, nu, spec=None):
    """Contraction estimate for the inexact two-step iteration with tau and nu
    inner CG steps per half step (dense computation, desk scale only).

    sigma_bar = ||(beta W - T)(alpha W + T)^{-1}(W - alpha T)(W + beta T)^{-1}||_2,
    r = kappa(W + beta T), c_h = ||(alpha W + T)^{-1}(W - alpha T)||_2,
    c_s = ||(W + beta T)^{-1}(beta W - T)||_2, and
    epsilon = (1 + r c_h)(s1 c_s + s1 s2 (1 + c_s)) + r s2 c_h (1 + c_s)
    with s1, s2 the CG error factors of the two half-step matrices.
    """
    if problem.n > DENSE_CAP:
        raise ValueError(f"dense bound computation capped at n={DENSE_CAP}")
    W = problem.W.to_dense()
    T = problem.T.to_dense()
    M1 = alpha * W + T
    M2 = W + beta * T
    WmaT = W - alpha * T
    bWmT = beta * W - T
    sigma_bar = float(np.linalg.norm(
        bWmT @ np.linalg.solve(M1, WmaT) @ np.linalg.inv(M2), 2))
    r = _spd_cond(M2)
    c_h = float(np.linalg.norm(np.linalg.solve(M1, WmaT), 2))
    c_s = float(np.linalg.norm(np.linalg.solve(M2, bWmT), 2))
    s1 = cg_error_factor(_spd_cond(M1), tau)
    s2 = cg_error_factor(_spd_cond(M2), nu)
    eps = ((1.0 + r * c_h) * (s1 * c_s + s1 * s2 * (1.0 + c_s))
           + r * s2 * c_h * (1.0 + c_s))
    if spec is None:
        spec = spectrum_of_S(problem.W, problem.T)
    region = theorem1_region(spec)
    rho = float(np.max(np.abs(lambda_value(alpha, beta, spec.mu))))
    return BoundReport(
        rho_G=rho,
        sigma_bound=sigma_bound(alpha, beta, spec),
        theorem1_ok=region.contains(alpha, beta),
        alpha_range=(region.alpha_lo, region.alpha_hi),
        beta_range=(region.beta_lo, region.beta_hi),
        epsilon_ittscsp=eps,
        sigma_bar=sigma_bar,
        r=r,
        c_h=c_h,
        c_s=c_s,
        sigma_h1=s1,
        sigma_h2=s2,
    )


def min_inner_steps_for_contraction(problem, alpha, beta, cap=200, spec=None):
    """Smallest tau = nu with sigma_bar + epsilon < 1, or None within cap.

    Finite whenever rho(G) < 1/sqrt(kappa(W)) (then sigma_bar < 1 and epsilon
    decays geometrically in the step count).
    """
    for steps in range(1, cap + 1):
        rep = ittscsp_bound(problem, alpha, beta, steps, steps, spec=spec)
        if rep.contraction < 1.0:
            return steps
    return None
