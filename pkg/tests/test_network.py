import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treejump import network
from treejump.brwfield import TreeShape, sample_field
from treejump.increments import IncrementLaw
from treejump.rng import RngStream


def test_single_edge():
    net = network.two_vertex(3.7)
    assert abs(network.effective_conductance_dense(net, [0], [1]).value - 3.7) < 1e-12


def test_series_pair():
    net = network.path_graph([2.0, 5.0])
    ref = 1.0 / (1 / 2.0 + 1 / 5.0)
    assert abs(network.effective_conductance_dense(net, [0], [2]).value - ref) < 1e-12


def test_parallel_edges():
    # two length-2 paths in parallel between 0 and 3
    net = network.ConductanceNetwork(
        n=4, edges=np.array([[0, 1], [1, 3], [0, 2], [2, 3]]), weights=np.array([1.0, 1.0, 2.0, 2.0])
    )
    assert abs(network.effective_conductance_dense(net, [0], [3]).value - 1.5) < 1e-12


def test_disconnected_flag():
    net = network.ConductanceNetwork(n=4, edges=np.array([[0, 1], [2, 3]]), weights=np.array([1.0, 1.0]))
    res = network.effective_conductance_dense(net, [0], [3])
    assert res.disconnected and res.value == 0.0


def test_invalid_inputs():
    with pytest.raises(ValueError):
        network.ConductanceNetwork(n=2, edges=np.array([[0, 1]]), weights=np.array([0.0]))
    with pytest.raises(ValueError):
        network.ConductanceNetwork(n=2, edges=np.array([[0, 0]]), weights=np.array([1.0]))
    net = network.two_vertex(1.0)
    with pytest.raises(ValueError):
        network.effective_conductance_dense(net, [0], [0])


def test_variational_bound_random_potentials():
    gen = RngStream(8, 0).generator()
    net = network.ConductanceNetwork(
        n=6,
        edges=np.array([[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [0, 2], [1, 4]]),
        weights=gen.uniform(0.5, 2.0, size=7),
    )
    c = network.effective_conductance_dense(net, [0], [5]).value
    for _ in range(100):
        u = gen.normal(size=6)
        u[0], u[5] = 0.0, 1.0
        assert network.dirichlet_energy(net, u) >= c - 1e-12


def test_rayleigh_monotonicity():
    gen = RngStream(9, 0).generator()
    edges = np.array([[0, 1], [1, 2], [0, 2], [2, 3]])
    w = gen.uniform(0.5, 1.5, size=4)
    net = network.ConductanceNetwork(n=4, edges=edges, weights=w)
    base = network.effective_conductance_dense(net, [0], [3]).value
    for k in range(4):
        w2 = w.copy()
        w2[k] *= 1.7
        up = network.effective_conductance_dense(
            network.ConductanceNetwork(n=4, edges=edges, weights=w2), [0], [3]
        ).value
        assert up >= base - 1e-12


def test_tree_conductance_unit_weights():
    env = network.TreeEnvironment(d=2, n=2, edge_weights=(np.ones(2), np.ones(4)))
    assert abs(network.tree_conductance(env, 1) - 2.0) < 1e-14
    assert abs(network.tree_conductance(env, 2) - 4.0 / 3.0) < 1e-14


def test_tree_conductance_vs_dense_random():
    law = IncrementLaw(1.0)
    worst = 0.0
    for r in range(100):
        rng = RngStream(10, r)
        d = 2 if r % 2 == 0 else 3
        n = 3 if d == 3 else 5  # <= 400 vertices
        f = sample_field(TreeShape(d, n), law, rng)
        env = network.TreeEnvironment.from_field_values(d, n, f.gens, 0.8)
        net = env.to_network()
        leaves = np.arange(net.n - d**n, net.n)
        dense = network.effective_conductance_dense(net, [0], leaves).value
        rec = network.tree_conductance(env, n)
        worst = max(worst, abs(dense - rec) / dense)
    assert worst <= 1e-10


def test_tree_conductance_from_field_matches_env_route():
    law = IncrementLaw(0.6)
    f = sample_field(TreeShape(2, 8), law, RngStream(3, 3))
    env = network.TreeEnvironment.from_field_values(2, 8, f.gens, 0.6)
    for m in (1, 4, 8):
        a = network.tree_conductance(env, m)
        b = network.tree_conductance_from_field(f.gens, 2, 0.6, m)
        assert abs(a - b) <= 1e-12 * a


def test_tree_conductance_monotone_in_depth():
    law = IncrementLaw(0.5)
    for r in range(20):
        f = sample_field(TreeShape(2, 7), law, RngStream(11, r))
        env = network.TreeEnvironment.from_field_values(2, 7, f.gens, 0.5)
        vals = [network.tree_conductance(env, m) for m in range(1, 8)]
        assert all(a >= b - 1e-14 for a, b in zip(vals, vals[1:]))


def test_cutset_bound():
    net = network.path_graph([2.0, 5.0])
    bound = network.cutset_upper_bound(net, [0], [2], [0])
    c = network.effective_conductance_dense(net, [0], [2]).value
    assert bound == 2.0 and bound >= c
    with pytest.raises(network.SeparationError):
        network.cutset_upper_bound(net, [0], [2], [])


def test_cutset_bound_tree_generation_one():
    env = network.TreeEnvironment(d=2, n=2, edge_weights=(np.ones(2), np.ones(4)))
    net = env.to_network()
    leaves = [3, 4, 5, 6]
    bound = network.cutset_upper_bound(net, [0], leaves, [0, 1])  # generation-1 edges
    assert abs(bound - 2.0) < 1e-14
    assert bound >= network.effective_conductance_dense(net, [0], leaves).value


@settings(max_examples=30, deadline=None)
@given(
    w=st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=2, max_size=6),
)
def test_series_law_property(w):
    # conductance of a path is the harmonic combination of its edges
    net = network.path_graph(w)
    ref = 1.0 / sum(1.0 / x for x in w)
    val = network.effective_conductance_dense(net, [0], [len(w)]).value
    assert abs(val - ref) <= 1e-10 * ref


def test_escape_local_time_sample_moments():
    rng = RngStream(14, 0).generator()
    x = network.escape_local_time_sample(2.0, rng, size=1_000_000)
    se = x.std(ddof=1) / math.sqrt(len(x))
    assert abs(x.mean() - 0.5) <= 4 * se
    # memorylessness: P(X > s + t)/P(X > s) ~ P(X > t)
    s, t = 0.3, 0.4
    p_joint = np.mean(x > s + t)
    p_s = np.mean(x > s)
    p_t = np.mean(x > t)
    assert abs(p_joint / p_s - p_t) < 0.01


def test_root_local_time_sample_law():
    rng = RngStream(15, 0).generator()
    c = 1.7
    x = network.root_local_time_sample(c, rng, size=500_000)
    # CDF: P(X <= x) = 1 - exp(-c((1+x)^2 - 1)/2)
    from scipy import stats

    res = stats.kstest(x, lambda v: 1.0 - np.exp(-c * ((1.0 + v) ** 2 - 1.0) / 2.0))
    assert res.pvalue > 0.01
    assert float(np.min(x)) >= 0.0


def test_large_conductance_limits():
    rng = RngStream(16, 0).generator()
    assert network.escape_local_time_sample(1e12, rng, size=100).mean() < 1e-10
    assert network.root_local_time_sample(1e12, rng, size=100).mean() < 1e-5
    with pytest.raises(ValueError):
        network.escape_local_time_sample(0.0, rng)


def test_text_format_roundtrip():
    net = network.ConductanceNetwork(
        n=3, edges=np.array([[0, 1], [1, 2]]), weights=np.array([1.25, 0.5])
    )
    text = network.format_network(net)
    assert text.splitlines()[0] == "vertices 3"
    back = network.parse_network(text)
    assert back.n == 3
    assert np.array_equal(back.edges, net.edges)
    assert np.array_equal(back.weights, net.weights)
    with pytest.raises(ValueError):
        network.parse_network("0 1 1.0\n")
