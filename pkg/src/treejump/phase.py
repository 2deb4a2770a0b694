"""Phase-diagram functionals at a given (d, beta).

psi(eta) = log(d * E[e^{eta T}]) is the log-Laplace transform of the
offspring process of the tree field viewed as a branching random walk:
strictly convex, symmetric about eta = 1/2, with psi(0) = psi(1) = log d.
Derived quantities:

  beta_c       root of psi_beta(1/2) = 0          (recurrence/transience)
  eta_star     argmin of psi(eta)/eta, the unique root of eta psi' - psi
  gamma        min of psi(eta)/eta                 (extremal-particle speed)
  beta_c_erg   where E_beta[T] = -log d, equivalently eta_star = 1
  nu           volume-scaling exponent, max(0, inf_{(0,1]} psi/(eta log d))
  tau(eta)     multifractal moment exponent (linear below eta_star)
  psi_star     Fenchel-Legendre dual of log E[e^{-lambda T}] (lower tails)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import specfun
from .increments import IncrementLaw


def psi(d: int, beta: float, eta: float) -> float:
    """log(d * E[e^{eta T}]); requires eta > 0 only through the Bessel order cap."""
    return math.log(d) + math.log(IncrementLaw(beta).exp_moment(eta))


def psi_prime(d: int, beta: float, eta: float) -> float:
    """d/d_eta psi = E[T e^{eta T}] / E[e^{eta T}], both factors by quadrature."""
    law = IncrementLaw(beta)
    return law.moment(1, tilt=eta) / law.exp_moment(eta)


def psi_second(d: int, beta: float, eta: float) -> float:
    """Variance of the eta-tilted increment; strictly positive."""
    law = IncrementLaw(beta)
    m0 = law.exp_moment(eta)
    m1 = law.moment(1, tilt=eta) / m0
    m2 = law.moment(2, tilt=eta) / m0
    return m2 - m1 * m1


def mean_t(beta: float) -> float:
    """E_beta[T] by quadrature of the increment density."""
    return IncrementLaw(beta).moment(1, tilt=0.0)


@lru_cache(maxsize=None)
def beta_c(d: int) -> float:
    """Root of psi_beta(1/2) = 0 in beta; unique since psi(1/2) increases in beta."""
    if d < 2:
        raise ValueError("d must be >= 2")

    def f(b):
        return psi(d, b, 0.5)

    lo, hi = 1e-8, 1.0
    while f(hi) < 0.0:
        hi *= 2.0
    return specfun.find_root(f, specfun.BracketedRoot(lo, hi, tol=1e-12))


@lru_cache(maxsize=None)
def beta_c_erg(d: int) -> float:
    """Root of E_beta[T] + log d = 0; E_beta[T] increases from -inf to 0."""
    if d < 2:
        raise ValueError("d must be >= 2")

    def f(b):
        return mean_t(b) + math.log(d)

    lo = 1e-4
    while f(lo) > 0.0:
        lo *= 0.5
    hi = 1.0
    while f(hi) < 0.0:
        hi *= 2.0
    return specfun.find_root(f, specfun.BracketedRoot(lo, hi, tol=1e-12))


def eta_star(d: int, beta: float) -> float:
    """Unique positive root of eta * psi'(eta) - psi(eta); argmin of psi/eta."""

    def f(eta):
        return eta * psi_prime(d, beta, eta) - psi(d, beta, eta)

    lo = 1e-3
    hi = 1.0
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > 64.0:
            raise specfun.BracketError("eta_star bracket expansion failed")
    return specfun.find_root(f, specfun.BracketedRoot(lo, hi, tol=1e-10))


def gamma(d: int, beta: float) -> float:
    """inf_eta psi(eta)/eta, attained at eta_star."""
    es = eta_star(d, beta)
    return psi(d, beta, es) / es


def nu(d: int, beta: float) -> float:
    """Volume-scaling exponent in [0, 1]; analytic case split on eta_star."""
    es = eta_star(d, beta)
    if es <= 1.0:
        g = psi(d, beta, es) / es
        return max(0.0, g / math.log(d))
    return 1.0  # psi(1)/log d with psi(1) = log d


def tau(d: int, beta: float, eta: float) -> float:
    """Multifractal moment exponent on eta in (0,1), intermediate phase only."""
    if not 0.0 < eta < 1.0:
        raise ValueError("tau requires eta in (0,1)")
    if not beta_c(d) < beta < beta_c_erg(d):
        raise specfun.DomainError(
            f"tau defined on the intermediate phase ({beta_c(d):.6g}, {beta_c_erg(d):.6g}); got beta={beta}"
        )
    es = eta_star(d, beta)
    if eta <= es:
        return (eta / es) * psi(d, beta, es) / math.log(d)
    return psi(d, beta, eta) / math.log(d)


def psi_star(beta: float, tau_arg: float, max_expand: int = 200) -> float:
    """sup_{lambda >= 0} (lambda*tau - log E[e^{-lambda T}]) by golden section.

    The objective is concave in lambda; the bracket is grown geometrically
    until the objective turns decreasing.
    """
    if tau_arg <= 0:
        raise ValueError("psi_star requires tau > 0")
    law = IncrementLaw(beta)

    def obj(lam):
        return lam * tau_arg - math.log(law.neg_laplace(lam))

    hi = 1.0
    for _ in range(max_expand):
        if obj(hi) < obj(hi / 2.0):
            break
        hi *= 2.0
    else:
        raise specfun.AccuracyError("psi_star bracket expansion budget exhausted")
    lam_best = specfun.golden_minimize(lambda l: -obj(l), 0.0, hi, tol=1e-10)
    return max(0.0, obj(lam_best))


@dataclass(frozen=True)
class PhasePoint:
    """All derived functionals at a given (d, beta), with resolution tolerances."""

    d: int
    beta: float
    beta_c: float
    beta_c_erg: float
    eta_star: float
    gamma: float
    nu: float
    root_tol: float = 1e-10

    @classmethod
    def compute(cls, d: int, beta: float) -> "PhasePoint":
        es = eta_star(d, beta)
        return cls(
            d=d,
            beta=beta,
            beta_c=beta_c(d),
            beta_c_erg=beta_c_erg(d),
            eta_star=es,
            gamma=psi(d, beta, es) / es,
            nu=nu(d, beta),
        )

    def psi(self, eta: float) -> float:
        return psi(self.d, self.beta, eta)

    def psi_prime(self, eta: float) -> float:
        return psi_prime(self.d, self.beta, eta)

    def tau(self, eta: float) -> float:
        return tau(self.d, self.beta, eta)

    @property
    def is_intermediate(self) -> bool:
        return self.beta_c < self.beta < self.beta_c_erg
