import math

import numpy as np
import pytest

from treejump import phase, specfun
from treejump.increments import IncrementLaw


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_psi_endpoints(d, beta):
    assert abs(phase.psi(d, beta, 0.0) - math.log(d)) < 1e-9
    assert abs(phase.psi(d, beta, 1.0) - math.log(d)) < 1e-9


def test_psi_symmetric_about_half():
    for eta in (0.1, 0.3, 0.45):
        a = phase.psi(2, 1.0, eta)
        b = phase.psi(2, 1.0, 1.0 - eta)
        assert abs(a - b) < 1e-9


def test_psi_convex_on_grid():
    etas = np.linspace(0.05, 3.0, 40)
    vals = np.array([phase.psi(2, 1.0, e) for e in etas])
    second = np.diff(vals, 2)
    assert np.all(second > 0)


def test_psi_infimum_at_half():
    v_half = phase.psi(2, 0.8, 0.5)
    for eta in np.linspace(0.05, 2.0, 25):
        assert v_half <= phase.psi(2, 0.8, float(eta)) + 1e-12


def test_psi_prime_at_half_and_finite_differences():
    assert abs(phase.psi_prime(2, 1.0, 0.5)) < 1e-10
    h = 1e-5
    for eta in (0.8, 1.3):
        fd = (phase.psi(2, 1.0, eta + h) - phase.psi(2, 1.0, eta - h)) / (2 * h)
        assert abs(phase.psi_prime(2, 1.0, eta) - fd) < 1e-6


def test_psi_prime_at_one_is_minus_mean():
    # psi'(1) = E[T e^T] = -E[T] by the reflection structure
    for beta in (0.5, 1.5):
        assert abs(phase.psi_prime(2, beta, 1.0) + phase.mean_t(beta)) < 1e-9


@pytest.mark.parametrize("d", [2, 3, 4])
def test_beta_c_defining_equation(d):
    bc = phase.beta_c(d)
    assert abs(phase.psi(d, bc, 0.5)) < 1e-8


@pytest.mark.parametrize("d", [2, 3, 4])
def test_beta_c_quadrature_identity(d):
    # the root also solves  1/d = sqrt(bc/2pi) Int e^{-bc (cosh t - 1)} dt
    bc = phase.beta_c(d)
    spec = specfun.QuadratureSpec(1e-14, 1e-12, 300)

    def f(t):
        return float(np.sqrt(bc / (2 * np.pi)) * np.exp(-bc * (np.cosh(t) - 1.0)))

    integral = specfun.integrate(f, -np.inf, 0.0, spec) + specfun.integrate(f, 0.0, np.inf, spec)
    assert abs(integral - 1.0 / d) < 1e-8


def test_beta_c_decreasing_in_d():
    assert phase.beta_c(3) < phase.beta_c(2)
    assert phase.beta_c(4) < phase.beta_c(3)


def test_eta_star_at_transitions():
    for d in (2, 3):
        assert abs(phase.eta_star(d, phase.beta_c(d)) - 0.5) < 1e-6
        assert abs(phase.eta_star(d, phase.beta_c_erg(d)) - 1.0) < 1e-6


def test_eta_star_increasing_near_beta_c():
    bc = phase.beta_c(2)
    assert phase.eta_star(2, bc + 0.05) > phase.eta_star(2, bc)


def test_eta_star_is_argmin():
    es = phase.eta_star(2, 0.3)
    ratio_min = phase.psi(2, 0.3, es) / es
    for eta in np.linspace(0.1, 2.5, 30):
        assert ratio_min <= phase.psi(2, 0.3, float(eta)) / eta + 1e-9


def test_eta_psi_prime_minus_psi_increasing():
    etas = np.linspace(0.2, 2.0, 15)
    vals = [e * phase.psi_prime(2, 0.5, float(e)) - phase.psi(2, 0.5, float(e)) for e in etas]
    assert np.all(np.diff(vals) > 0)


def test_gamma_at_transitions():
    for d in (2, 3):
        assert abs(phase.gamma(d, phase.beta_c(d))) < 1e-8
        assert abs(phase.gamma(d, phase.beta_c_erg(d)) - math.log(d)) < 1e-6


def test_gamma_unimodal_peak_at_erg():
    d = 2
    bc, berg = phase.beta_c(d), phase.beta_c_erg(d)
    inside = np.linspace(bc * 1.05, berg * 0.97, 6)
    g_inside = [phase.gamma(d, float(b)) for b in inside]
    assert np.all(np.diff(g_inside) > 0)
    beyond = np.linspace(berg * 1.03, berg * 2.5, 5)
    g_beyond = [phase.gamma(d, float(b)) for b in beyond]
    assert np.all(np.diff(g_beyond) < 0)
    assert max(g_inside + g_beyond) <= math.log(d)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_beta_c_erg_characterisations(d):
    berg = phase.beta_c_erg(d)
    assert abs(phase.mean_t(berg) + math.log(d)) < 1e-8
    assert abs(phase.psi_prime(d, berg, 1.0) - phase.psi(d, berg, 1.0)) < 1e-6
    assert berg > phase.beta_c(d)


def test_nu_phases():
    d = 2
    bc, berg = phase.beta_c(d), phase.beta_c_erg(d)
    assert phase.nu(d, 0.5 * bc) == 0.0
    assert phase.nu(d, 1.5 * berg) == 1.0
    mid = 0.5 * (bc + berg)
    assert 0.0 < phase.nu(d, mid) < 1.0


def test_nu_matches_grid_infimum_oracle():
    d = 2
    for beta in (0.05, 0.2, 0.5, 1.0):
        etas = np.linspace(1e-3, 1.0, 201)  # endpoint eta = 1 included
        grid_inf = min(phase.psi(d, beta, float(e)) / (e * math.log(d)) for e in etas)
        ref = max(0.0, grid_inf)
        assert abs(phase.nu(d, beta) - ref) < 5e-4


def test_tau_branches_and_continuity():
    d = 2
    mid = 0.5 * (phase.beta_c(d) + phase.beta_c_erg(d))
    es = phase.eta_star(d, mid)
    left = phase.tau(d, mid, es - 1e-12)
    right = phase.tau(d, mid, es + 1e-12)
    assert abs(left - right) < 1e-9
    # linear below the knot: three-point collinearity
    e1, e2, e3 = 0.2 * es, 0.5 * es, 0.8 * es
    t1, t2, t3 = (phase.tau(d, mid, e) for e in (e1, e2, e3))
    assert abs((t3 - t1) / (e3 - e1) - (t2 - t1) / (e2 - e1)) < 1e-10
    # tau <= psi/log d everywhere on (0,1)
    for e in np.linspace(0.05, 0.95, 19):
        assert phase.tau(d, mid, float(e)) <= phase.psi(d, mid, float(e)) / math.log(d) + 1e-12


def test_tau_domain_error():
    with pytest.raises(specfun.DomainError):
        phase.tau(2, 0.5 * phase.beta_c(2), 0.5)
    with pytest.raises(ValueError):
        phase.tau(2, 0.2, 1.5)


def test_psi_star_properties():
    beta = 1.0
    taus = [0.3, 0.7, 1.0, 1.5, 2.2]
    vals = [phase.psi_star(beta, t) for t in taus]
    assert all(v >= 0.0 for v in vals)
    assert np.all(np.diff(vals) >= 0)
    for t, v in zip(taus, vals):
        bound = 0.375 * beta * math.exp(t) - math.log(2.0 * math.exp(beta / 2.0))
        assert v >= bound - 1e-9


def test_psi_star_chernoff_vs_monte_carlo():
    # P(sum of 10 increments <= -10 tau) <= exp(-10 psi*(tau))
    from treejump.rng import RngStream

    beta, tau, n = 1.0, 1.0, 10
    law = IncrementLaw(beta)
    t = law.sample(RngStream(5, 5), size=1_000_000 * n).reshape(-1, n).sum(axis=1)
    p_emp = float(np.mean(t <= -n * tau))
    bound = math.exp(-n * phase.psi_star(beta, tau))
    se = math.sqrt(p_emp * (1 - p_emp) / len(t))
    assert p_emp <= bound + 4 * se


def test_partial_beta_psi_half_positive():
    h = 1e-5
    for b in (0.05, 0.2, 0.8):
        fd = (phase.psi(2, b + h, 0.5) - phase.psi(2, b - h, 0.5)) / (2 * h)
        assert fd > 0


def test_near_critical_expansion_ratios_stable():
    # eta(bc+e) - 1/2 and psi_{bc+e}(eta) are positive, O(e): ratios stable within 20%
    d = 2
    bc = phase.beta_c(d)
    eps = [1e-2, 1e-3, 1e-4]
    r_eta = []
    r_psi = []
    for e in eps:
        es = phase.eta_star(d, bc + e)
        ps = phase.psi(d, bc + e, es)
        assert es > 0.5 and ps > 0
        r_eta.append((es - 0.5) / e)
        r_psi.append(ps / e)
    for seq in (r_eta, r_psi):
        assert max(seq) / min(seq) < 1.2


def test_phase_point_caching():
    pp = phase.PhasePoint.compute(2, 0.2)
    assert pp.beta_c == phase.beta_c(2)
    assert pp.is_intermediate
    assert abs(pp.gamma - phase.gamma(2, 0.2)) < 1e-12
