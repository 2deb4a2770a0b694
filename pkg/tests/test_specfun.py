import math

import numpy as np
import pytest
from scipy.special import kv

from treejump import specfun
from treejump.specfun import BracketedRoot, QuadratureSpec


def test_bessel_half_integer_closed_form():
    # K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
    for x in (0.5, 1.0, 2.0, 7.3):
        ref = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
        assert abs(specfun.bessel_k(0.5, x) - ref) <= 1e-10 * ref
    # K_{3/2}(x) = sqrt(pi/(2x)) e^{-x} (1 + 1/x)
    for x in (0.3, 1.0, 4.0):
        ref = math.sqrt(math.pi / (2 * x)) * math.exp(-x) * (1 + 1 / x)
        assert abs(specfun.bessel_k(1.5, x) - ref) <= 1e-10 * ref


def test_bessel_k0_quadrature_oracle():
    # independent oracle: direct adaptive quadrature of the defining integral
    ref = specfun.integrate(
        lambda t: math.exp(-math.cosh(t)), 0.0, 30.0, QuadratureSpec(1e-14, 1e-13, 300)
    )
    assert abs(specfun.bessel_k(0.0, 1.0) - ref) <= 1e-10 * ref


def test_bessel_sign_symmetry_exact():
    assert specfun.bessel_k(-0.3, 2.0) == specfun.bessel_k(0.3, 2.0)
    assert specfun.bessel_k(-12.25, 0.7) == specfun.bessel_k(12.25, 0.7)


@pytest.mark.parametrize(
    "order,arg",
    [(0.0, 0.01), (0.17, 0.5), (0.5, 1.0), (2.0, 3.0), (9.4, 0.2), (25.0, 1.0), (50.0, 10.0)],
)
def test_bessel_against_scipy(order, arg):
    ref = float(kv(order, arg))
    assert abs(specfun.bessel_k(order, arg) - ref) <= 1e-10 * ref


def test_bessel_domain_errors():
    with pytest.raises(specfun.DomainError):
        specfun.bessel_k(0.5, 0.0)
    with pytest.raises(specfun.DomainError):
        specfun.bessel_k(0.5, -1.0)
    with pytest.raises(specfun.UnsupportedError):
        specfun.bessel_k(50.5, 1.0)


def test_log_gamma_values():
    assert specfun.log_gamma(1.0) == 0.0
    assert abs(specfun.log_gamma(0.5) - math.log(math.sqrt(math.pi))) <= 1e-12
    assert abs(specfun.log_gamma(5.0) - math.log(24.0)) <= 1e-12 * math.log(24.0)
    with pytest.raises(specfun.DomainError):
        specfun.log_gamma(0.0)
    with pytest.raises(specfun.DomainError):
        specfun.log_gamma(-2.0)


def test_integrate_basic():
    assert abs(specfun.integrate(lambda x: math.exp(-x), 0.0, np.inf) - 1.0) < 1e-11
    assert abs(specfun.integrate(lambda x: x * x, 0.0, 1.0) - 1.0 / 3.0) < 1e-12


def test_integrate_normalized_density():
    beta = 1.0
    c = math.sqrt(beta / (2 * math.pi))

    def f(t):
        # np arithmetic saturates to inf instead of raising far in the tails
        return float(c * np.exp(-beta * (np.cosh(t) - 1.0) - 0.5 * t))

    assert abs(specfun.integrate(f, -np.inf, np.inf) - 1.0) < 1e-10


def test_integrate_polynomials_exact():
    # degree <= 6 over a finite interval matches the antiderivative
    for k in range(7):
        val = specfun.integrate(lambda x, k=k: x**k, -1.0, 2.0)
        ref = (2.0 ** (k + 1) - (-1.0) ** (k + 1)) / (k + 1)
        assert abs(val - ref) <= 1e-12 * max(1.0, abs(ref))


def test_integrate_error_signals():
    with pytest.raises(specfun.IntegrandError):
        specfun.integrate(lambda x: float("nan"), 0.0, 1.0)
    with pytest.raises(specfun.AccuracyError):
        # highly oscillatory with a one-interval budget
        specfun.integrate(lambda x: math.sin(50 / (x + 0.01)), 0.0, 1.0, QuadratureSpec(1e-14, 1e-14, 1))


def test_quadrature_spec_invariants():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


def test_find_root_simple():
    assert abs(specfun.find_root(lambda x: x - 2.0, BracketedRoot(0.0, 5.0)) - 2.0) < 1e-11
    r = specfun.find_root(lambda x: x * x - 2.0, BracketedRoot(1.0, 2.0))
    assert abs(r - math.sqrt(2.0)) < 1e-11


def test_find_root_bracket_error():
    with pytest.raises(specfun.BracketError):
        specfun.find_root(lambda x: x * x + 1.0, BracketedRoot(-1.0, 1.0))
    with pytest.raises(ValueError):
        BracketedRoot(2.0, 1.0)


def test_find_root_idempotent_under_refinement():
    f = lambda x: math.tanh(x - 0.7)
    r1 = specfun.find_root(f, BracketedRoot(0.0, 5.0))
    r2 = specfun.find_root(f, BracketedRoot(r1 - 1e-6, r1 + 1e-6))
    assert abs(r1 - r2) < 1e-9


def test_golden_minimize():
    x = specfun.golden_minimize(lambda t: (t - 1.3) ** 2, -4.0, 6.0)
    assert abs(x - 1.3) < 1e-9
