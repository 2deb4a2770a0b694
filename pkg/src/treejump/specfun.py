"""Special functions and 1-D numerical kernels.

Modified Bessel K of real order, log-gamma, adaptive quadrature with an
explicit accuracy signal, bracketed root finding and golden-section
minimisation.  Everything here is deterministic and reusable from many
workers at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _si

MAX_BESSEL_ORDER = 50.0


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


class UnsupportedError(ValueError):
    """Argument outside the documented supported range."""


class IntegrandError(ArithmeticError):
    """The integrand produced a non-finite sample."""


class AccuracyError(ArithmeticError):
    """Requested accuracy was not reached within the evaluation budget."""


class BracketError(ValueError):
    """Root bracket does not straddle a sign change."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Absolute/relative tolerance and subdivision budget for integrate()."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max subdivisions must be >= 1")


@dataclass(frozen=True)
class BracketedRoot:
    """Root bracket [lower, upper] with an argument tolerance."""

    lower: float
    upper: float
    tol: float = 1e-12

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("bracket requires lower < upper")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


def integrate(f, a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Adaptive quadrature of f over [a, b]; endpoints may be +-inf.

    Raises IntegrandError on a non-finite sample and AccuracyError when the
    subdivision budget is exhausted before the tolerances are met.
    """
    spec = spec or QuadratureSpec()

    def guarded(x):
        y = f(x)
        if not math.isfinite(y):
            raise IntegrandError(f"integrand returned {y!r} at x={x!r}")
        return y

    with np.errstate(all="ignore"):
        value, abserr, infodict, *tail = _si.quad(
            guarded,
            a,
            b,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            full_output=1,
        )
    if tail:  # quadpack message attached => requested accuracy not reached
        raise AccuracyError(f"quadrature budget exhausted: {tail[0].strip()}")
    return value


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _bessel_log_integrand(t: np.ndarray, order: float, arg: float) -> np.ndarray:
    # log of e^{-arg cosh t} cosh(order t); log cosh written overflow-safe
    at = np.abs(order * t)
    return -arg * np.cosh(t) + at + np.log1p(np.exp(-2.0 * at)) - math.log(2.0)


def bessel_k(order: float, arg: float) -> float:
    """Modified Bessel function of the second kind, real order.

    Evaluated as the integral of e^{-arg cosh t} cosh(order t) over t >= 0,
    truncated where the integrand drops 1e-18 below its peak.  Exactly
    symmetric in the sign of the order.  Supported range |order| <= 50.
    """
    if arg <= 0:
        raise DomainError(f"bessel_k requires arg > 0, got {arg}")
    order = abs(order)
    if order > MAX_BESSEL_ORDER:
        raise UnsupportedError(f"order {order} outside supported range <= {MAX_BESSEL_ORDER}")
    # Peak of the log-integrand: at t=0 when order <= arg, else near
    # t* = arcosh(order/arg) where the two exponential scales balance.
    if order <= arg:
        t_peak = 0.0
    else:
        t_peak = math.acosh(order / arg)
    log_peak = float(_bessel_log_integrand(np.array([t_peak]), order, arg)[0])
    # March right until the integrand is below peak * 1e-18.
    cutoff = log_peak + math.log(1e-18)
    hi = max(1.0, 2.0 * t_peak)
    while float(_bessel_log_integrand(np.array([hi]), order, arg)[0]) > cutoff:
        hi *= 2.0
        if hi > 1e6:  # unreachable for the supported range
            raise AccuracyError("bessel_k truncation search failed")

    def f(t):
        return math.exp(float(_bessel_log_integrand(np.array([t]), order, arg)[0]) - log_peak)

    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-13, max_subdivisions=400)
    try:
        scaled = integrate(f, 0.0, hi, spec)
    except AccuracyError:
        # tolerance slightly beyond quadpack's reach for extreme parameters
        scaled = integrate(f, 0.0, hi, QuadratureSpec(1e-300, 1e-11, 400))
    return math.exp(log_peak) * scaled


def find_root(f, bracket: BracketedRoot) -> float:
    """Bisection with a secant acceleration step on a sign-changing bracket."""
    a, b = bracket.lower, bracket.upper
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"no sign change on [{a}, {b}]: f={fa:.3g},{fb:.3g}")
    while b - a > bracket.tol:
        mid = 0.5 * (a + b)
        # Secant proposal; fall back to the midpoint when it leaves [a, b].
        denom = fb - fa
        if denom != 0.0:
            sec = b - fb * (b - a) / denom
            if a < sec < b and abs(sec - mid) < 0.4 * (b - a):
                mid = sec
        fm = f(mid)
        if fm == 0.0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, fa):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return 0.5 * (a + b)


def golden_minimize(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 400) -> float:
    """Golden-section minimiser for a unimodal function on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol * (1.0 + abs(a) + abs(b)):
            return 0.5 * (a + b)
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    raise AccuracyError("golden-section budget exhausted")
