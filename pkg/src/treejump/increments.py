"""The field-increment distribution at inverse temperature beta.

Density  e^{-beta[cosh(t)-1] - t/2} * sqrt(beta/(2 pi))  on the real line.
Equivalently e^T follows the inverse Gaussian IG(1, beta) and e^{-T} its
reciprocal; sampling goes through the exact IG transform method.  The
exponential moments have the closed form

    E[e^{q T}] = sqrt(2 beta) e^beta K_{q-1/2}(beta) / sqrt(pi),

symmetric under q -> 1/2 - q because K_a = K_{-a}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .backend import kernels
from .rng import RngStream

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class IncrementLaw:
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    # -- density -----------------------------------------------------------

    def log_density(self, t):
        t = np.asarray(t, dtype=float)
        return -self.beta * (np.cosh(t) - 1.0) - 0.5 * t + 0.5 * math.log(self.beta / (2.0 * math.pi))

    def density(self, t):
        return np.exp(self.log_density(t))

    # -- exact transforms ---------------------------------------------------

    def exp_moment(self, q: float) -> float:
        """E[e^{qT}] via the Bessel-K closed form."""
        k = specfun.bessel_k(q - 0.5, self.beta)
        return math.sqrt(2.0 * self.beta) * math.exp(self.beta) * k / _SQRT_PI

    def neg_laplace(self, lam: float) -> float:
        """E[e^{-lam T}] by adaptive quadrature; finite for all lam >= 0."""
        if lam < 0:
            raise ValueError("neg_laplace requires lam >= 0")
        # e^{-lam t} * density peaks left of 0; integrate the two half lines.
        spec = specfun.QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=300)

        def f(t):
            return float(np.exp(-lam * t + self.log_density(t)))

        return specfun.integrate(f, -np.inf, 0.0, spec) + specfun.integrate(f, 0.0, np.inf, spec)

    def moment(self, k: int = 1, tilt: float = 0.0) -> float:
        """E[T^k e^{tilt*T}] by quadrature (un-normalised by exp_moment)."""
        spec = specfun.QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=300)

        def f(t):
            return float(t**k * np.exp(tilt * t + self.log_density(t)))

        return specfun.integrate(f, -np.inf, 0.0, spec) + specfun.integrate(f, 0.0, np.inf, spec)

    # -- sampling ------------------------------------------------------------

    def sample(self, rng: RngStream | np.random.Generator, size: int = 1) -> np.ndarray:
        """Draw increments T = log(IG(1, beta) variate); deterministic per stream."""
        gen = rng.generator() if isinstance(rng, RngStream) else rng
        return kernels.increment_slab(gen, self.beta, size)

    # -- quadrature CDF of e^T (test oracle support) -------------------------

    def ig_cdf(self, x) -> np.ndarray:
        """CDF of e^T ~ IG(1, beta) by numeric integration of the density."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        order = np.argsort(xs)
        spec = specfun.QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=300)

        def f(t):
            return float(np.exp(self.log_density(t)))

        out = np.empty_like(xs)
        prev_t = -np.inf
        acc = 0.0
        for i in order:
            ti = math.log(xs[i]) if xs[i] > 0 else -np.inf
            if ti > prev_t:
                acc += specfun.integrate(f, prev_t, ti, spec)
                prev_t = ti
            out[i] = min(acc, 1.0)
        return out if np.ndim(x) else out.reshape(())


def tilted_sample(law: IncrementLaw, eta: float, rng: RngStream | np.random.Generator, size: int) -> np.ndarray:
    """Sample from the tilted law with density proportional to e^{eta*t} q(t).

    Under x = e^t this is the generalised inverse Gaussian
    GIG(p = eta - 1/2, a = beta, b = beta); sampled with Devroye's
    rejection scheme (two-sided exponential envelope around the mode),
    vectorised by batching proposals.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    p = eta - 0.5
    omega = law.beta  # a == b == beta: scale 1, two-parameter GIG(p, omega)
    lam = abs(p)
    alpha = math.sqrt(omega * omega + lam * lam) - lam

    def psi(x):
        return -alpha * (np.cosh(x) - 1.0) - lam * (np.exp(x) - x - 1.0)

    def dpsi(x):
        return -alpha * np.sinh(x) - lam * (np.exp(x) - 1.0)

    # Envelope geometry per Devroye's construction.
    x0 = -float(psi(1.0))
    if 0.5 <= x0 <= 2.0:
        t_ = 1.0
    elif x0 > 2.0:
        t_ = math.sqrt(2.0 / (alpha + lam))
    else:
        t_ = math.log(4.0 / (alpha + 2.0 * lam))
    x0 = -float(psi(-1.0))
    if 0.5 <= x0 <= 2.0:
        s_ = 1.0
    elif x0 > 2.0:
        s_ = math.sqrt(4.0 / (alpha * math.cosh(1.0) + lam))
    else:
        s_log = math.log(1.0 + 1.0 / alpha + math.sqrt(1.0 / alpha**2 + 2.0 / alpha))
        s_ = min(1.0 / lam, s_log) if lam > 0 else s_log
    eta_, zeta = -float(psi(t_)), -float(dpsi(t_))
    theta, xi = -float(psi(-s_)), float(dpsi(-s_))
    pp = 1.0 / xi
    r = 1.0 / zeta
    td = t_ - r * eta_
    sd = s_ - pp * theta
    q = td + sd

    out = np.empty(size)
    filled = 0
    while filled < size:
        m = max(1024, 2 * (size - filled))
        u = gen.random(m)
        v = gen.random(m)
        w = gen.random(m)
        x = np.where(
            u < q / (pp + q + r),
            -sd + q * v,
            np.where(
                u < (q + r) / (pp + q + r),
                td - r * np.log(v),
                -sd + pp * np.log(v),
            ),
        )
        chi = np.where(
            (x >= -sd) & (x <= td),
            1.0,
            np.where(x > td, np.exp(-eta_ - zeta * (x - t_)), np.exp(-theta + xi * (x + s_))),
        )
        accept = w * chi <= np.exp(psi(x))
        take = x[accept][: size - filled]
        out[filled : filled + take.size] = take
        filled += take.size
    # Map back: X = e^out * (lam/omega + sqrt(1 + lam^2/omega^2)) follows
    # GIG(|p|, omega); for p < 0 use X_{-|p|} ~ 1/X_{|p|}.  We return t = log X.
    t = out + math.log(lam / omega + math.sqrt(1.0 + lam * lam / (omega * omega)))
    if p < 0:
        t = -t
    return t


__all__ = ["IncrementLaw", "tilted_sample"]
