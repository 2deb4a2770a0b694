import math

import numpy as np
import pytest

from treejump import specfun
from treejump import superh22 as sh
from treejump.increments import IncrementLaw
from treejump.rng import RngStream


def small_grid(n_vertices=1, nodes=24, halfwidth=2.0):
    return sh.Grid(n_vertices, sh.GridSpec(nodes=nodes, halfwidth=halfwidth))


def test_grassmann_anticommutation_and_nilpotency():
    g = small_grid()
    xi, eta = sh.coord_xi(g, 0), sh.coord_eta(g, 0)
    assert (xi * eta).max_coef_difference(-1.0 * (eta * xi)) == 0.0
    assert not (xi * xi).coefs
    assert not (eta * eta).coefs


def test_product_expansion():
    g = small_grid()
    one = sh.SuperFunction.constant(g, 1.0)
    xi, eta = sh.coord_xi(g, 0), sh.coord_eta(g, 0)
    p = (one + xi * eta) * (one - xi * eta)
    assert p.max_coef_difference(one) == 0.0


def test_mul_associative_with_signs():
    g = sh.Grid(2, sh.GridSpec(nodes=16, halfwidth=2.0))
    a = sh.coord_xi(g, 0) + sh.coord_eta(g, 1) * 2.0
    b = sh.coord_eta(g, 0) - sh.coord_xi(g, 1)
    c = sh.coord_xi(g, 1) * sh.coord_eta(g, 1) + 0.5
    lhs = (a * b) * c
    rhs = a * (b * c)
    assert lhs.max_coef_difference(rhs) < 1e-14


def test_mismatched_grids_error():
    a = sh.coord_xi(small_grid(nodes=16), 0)
    b = sh.coord_eta(small_grid(nodes=24), 0)
    with pytest.raises(sh.GridError):
        a * b


def test_taylor_compose_z_expansion():
    # sqrt(1 + x^2 + y^2 - 2 xi eta) = b - xi eta / b with b the body root
    g = small_grid()
    z = sh.coord_z(g, 0)
    x, y = g.axis_values(0), g.axis_values(1)
    b = np.sqrt(1.0 + x * x + y * y)
    assert np.max(np.abs(np.broadcast_to(z.body, g.shape) - b)) < 1e-14
    soul = np.broadcast_to(z.coefficient(0b11), g.shape)
    assert np.max(np.abs(soul + 1.0 / b)) < 1e-14


def test_taylor_compose_exponential_nilpotent():
    g = small_grid()
    f = sh.coord_xi(g, 0) * sh.coord_eta(g, 0)  # body 0, soul xi eta
    e = sh.sf_exp(f)
    one_plus = sh.SuperFunction.constant(g, 1.0) + f
    assert e.max_coef_difference(one_plus) < 1e-15


def test_taylor_compose_identity():
    g = small_grid()
    f = sh.SuperFunction.body_only(g, np.broadcast_to(g.axis_values(0) ** 2, g.shape).copy()) + (
        sh.coord_xi(g, 0) * sh.coord_eta(g, 0) * 3.0
    )
    ident = sh.taylor_compose([lambda t: t, lambda t: np.ones_like(t), np.zeros_like], f)
    assert ident.max_coef_difference(f) < 1e-14


def test_taylor_compose_requires_even():
    g = small_grid()
    with pytest.raises(ValueError):
        sh.taylor_compose([np.exp, np.exp], sh.coord_xi(g, 0))


def test_uu_identity_scaled():
    g = small_grid(nodes=32, halfwidth=2.0)
    z = sh.coord_z(g, 0)
    uu = (
        -1.0 * (z * z)
        + sh.coord_x(g, 0) * sh.coord_x(g, 0)
        + sh.coord_y(g, 0) * sh.coord_y(g, 0)
        - 2.0 * (sh.coord_xi(g, 0) * sh.coord_eta(g, 0))
    )
    assert uu.max_coef_difference(sh.SuperFunction.constant(g, -1.0)) < 1e-12


def test_berezin_gibbs_normalization_single_vertex():
    for h in (0.5, 1.0):
        grid = sh.Grid(1)
        z = sh.coord_z(grid, 0)
        gibbs = sh.sf_exp((z - 1.0) * (-h))
        assert abs(sh.berezin_integrate(gibbs) - 1.0) < 1e-6


def test_berezin_x2_dynkin_value():
    # single-vertex walk never leaves: <x^2> = int_0^inf e^{-ht} dt = 1/h
    for h in (0.5, 1.0):
        grid = sh.Grid(1, sh.GridSpec(nodes=128))
        vals = sh.h22_expectation(
            [], [h],
            [lambda G: sh.coord_x(G, 0) * sh.coord_x(G, 0)],
            grid=grid, n_vertices=1,
        )
        assert abs(vals[0] - 1.0 / h) < 1e-6


def test_berezin_singular_observable_closed_form():
    for h in (0.1, 1.0):
        grid = sh.Grid(1, [sh.GridSpec(rule="sinh_sqrt"), sh.GridSpec()])
        obs = lambda G: sh.coord_z(G, 0) * sh.SuperFunction.body_only(
            G, np.abs(G.axis_values(0)) ** -0.5
        )
        val = sh.h22_expectation([], [h], [obs], grid=grid, n_vertices=1)[0]
        ref = math.sqrt(h) * sh.single_vertex_closed_form(0.5, h)
        assert abs(val - ref) < 1e-4


def test_single_vertex_closed_form_limit():
    # convergence g_eta(h) -> c_eta is O(h^{(1-eta)/2}); pick h accordingly
    for eta, h in ((0.25, 1e-6), (0.5, 1e-6), (0.75, 1e-12)):
        c = sh.single_vertex_limit_constant(eta)
        g = sh.single_vertex_closed_form(eta, h)
        assert abs(g - c) / c < 1e-3
        assert sh.single_vertex_closed_form(eta, 0.7) > 0.0
    with pytest.raises(ValueError):
        sh.single_vertex_closed_form(1.2, 1.0)


def test_two_vertex_normalization_and_ward_identity():
    grid = sh.Grid(2, sh.GridSpec(nodes=48))
    vals = sh.h22_expectation(
        [(0, 1, 1.0)], [1.0, 1.0],
        [
            lambda G: sh.SuperFunction.constant(G, 1.0),
            lambda G: sh.coord_x(G, 0) * sh.coord_x(G, 1),
            lambda G: sh.coord_x(G, 0) * sh.coord_x(G, 0),
        ],
        grid=grid, n_vertices=2,
    )
    assert abs(vals[0] - 1.0) < 1e-6
    # occupation decomposition: <x0 x1> + <x0^2> = 1/h (48-node grid accuracy)
    assert abs(vals[1] + vals[2] - 1.0) < 1e-5
    assert 0.0 < vals[1] < 1.0


def test_two_vertex_unit_mass_across_couplings():
    # unit partition function across the (beta, h) grid; the slow h = 0.5
    # decay needs the finer grid to reach 1e-6
    grid = sh.Grid(2, sh.GridSpec(nodes=64))
    for beta in (0.5, 1.0):
        for h in (0.5, 1.0):
            val = sh.h22_expectation(
                [(0, 1, beta)], [h, h],
                [lambda G: sh.SuperFunction.constant(G, 1.0)],
                grid=grid, n_vertices=2,
            )[0]
            assert abs(val - 1.0) < 1e-6, (beta, h, val)


def test_horospherical_marginal_single_vertex():
    # <e^{t0} s0^2> = E[e^T S^2] with S | T ~ N(0, e^{-T}/h): equals 1/h
    h = 1.0
    grid = sh.Grid(1, sh.GridSpec(nodes=128))

    def obs(G):
        z = sh.coord_z(G, 0)
        x = sh.coord_x(G, 0)
        y = sh.coord_y(G, 0)
        return y * y * sh.sf_inv(z + x)

    val = sh.h22_expectation([], [h], [obs], grid=grid, n_vertices=1)[0]
    assert abs(val - 1.0 / h) < 1e-6
    # Monte Carlo side of the same identity
    law = IncrementLaw(h)
    t = law.sample(RngStream(30, 0), size=200_000)
    gen = RngStream(30, 1).generator()
    s = gen.normal(size=len(t)) * np.sqrt(np.exp(-t) / h)
    emp = np.exp(t) * s * s
    se = emp.std(ddof=1) / math.sqrt(len(emp))
    assert abs(val - emp.mean()) <= 3 * se


def test_horospherical_table_identities():
    g = small_grid(nodes=24, halfwidth=1.2)
    co = sh.horospherical_coordinates(g, 0)
    assert (co["z"] + co["x"]).max_coef_difference(co["e_t"]) < 1e-12
    uu = (
        -1.0 * (co["z"] * co["z"])
        + co["x"] * co["x"]
        + co["y"] * co["y"]
        - 2.0 * (co["xi"] * co["eta"])
    )
    assert uu.max_coef_difference(sh.SuperFunction.constant(g, -1.0)) < 1e-12


def test_berezin_fubini_order_invariance():
    g = sh.Grid(2, sh.GridSpec(nodes=16, halfwidth=2.0))
    f = (
        (sh.coord_xi(g, 0) * sh.coord_eta(g, 0) + 0.3)
        * (sh.coord_xi(g, 1) * sh.coord_eta(g, 1) + 1.0)
        * sh.SuperFunction.body_only(g, np.broadcast_to(g.axis_values(2), g.shape).copy())
    )
    o1 = f.derive(0).derive(1).derive(2).derive(3)
    o2 = f.derive(2).derive(3).derive(0).derive(1)
    assert o1.max_coef_difference(o2) == 0.0


def test_derivation_leibniz_sign():
    g = small_grid()
    xi, eta = sh.coord_xi(g, 0), sh.coord_eta(g, 0)
    f = xi * eta
    assert f.derive(0).max_coef_difference(eta) == 0.0  # d_xi (xi eta) = eta
    assert f.derive(1).max_coef_difference(-1.0 * xi) == 0.0  # d_eta (xi eta) = -xi


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        sh.GridSpec(nodes=8)
    with pytest.raises(ValueError):
        sh.GridSpec(rule="legendre")
    with pytest.raises(sh.GridError):
        sh.Grid(4)


def test_tail_truncation_error():
    # a fat observable on a tiny domain must trip the tail check
    grid = sh.Grid(1, sh.GridSpec(nodes=16, halfwidth=0.3))
    z = sh.coord_z(grid, 0)
    gibbs = sh.sf_exp((z - 1.0) * (-0.05))
    with pytest.raises((sh.TruncationError, specfun.AccuracyError)):
        sh.berezin_integrate(gibbs)


def test_normalization_autoescalation_failure_path():
    # absurdly small grid: even one escalation cannot rescue h = tiny
    with pytest.raises(specfun.AccuracyError):
        sh.h22_expectation(
            [], [0.001],
            [lambda G: sh.SuperFunction.constant(G, 1.0)],
            grid=sh.Grid(1, sh.GridSpec(nodes=16, halfwidth=1.0)),
            n_vertices=1,
        )
