"""Finite weighted graphs and effective conductance.

Dense grounded-Laplacian solves on general graphs, a linear-time
series/parallel recursion on trees, cutset upper bounds, and the
escape-time / root-local-time laws driven by the effective conductance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .rng import RngStream

DENSE_VERTEX_CAP = 5000


class SeparationError(ValueError):
    """Edge set does not separate the two vertex sets."""


class ConductanceResult(NamedTuple):
    value: float
    disconnected: bool


@dataclass
class ConductanceNetwork:
    """Simple undirected graph with strictly positive edge weights."""

    n: int
    edges: np.ndarray  # (m, 2) int array
    weights: np.ndarray  # (m,) float array
    source: int | None = None
    boundary: np.ndarray | None = None
    _indptr: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    _indices: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    _w_csr: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if np.any(self.weights <= 0):
            raise ValueError("edge weights must be strictly positive")
        if np.any(self.edges[:, 0] == self.edges[:, 1]):
            raise ValueError("self-loops not allowed")
        if self.edges.size and (self.edges.min() < 0 or self.edges.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        if self.source is not None and self.boundary is not None:
            if self.source in set(np.asarray(self.boundary).tolist()):
                raise ValueError("source must not lie in the boundary set")

    # -- adjacency ----------------------------------------------------------

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric CSR adjacency (indptr, indices, weights)."""
        if self._indptr is None:
            i = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
            j = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
            w = np.concatenate([self.weights, self.weights])
            order = np.lexsort((j, i))
            i, j, w = i[order], j[order], w[order]
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, i + 1, 1)
            np.cumsum(indptr, out=indptr)
            self._indptr, self._indices, self._w_csr = indptr, j, w
        return self._indptr, self._indices, self._w_csr

    def laplacian(self, weights: np.ndarray | None = None) -> np.ndarray:
        w = self.weights if weights is None else weights
        lap = np.zeros((self.n, self.n))
        i, j = self.edges[:, 0], self.edges[:, 1]
        np.add.at(lap, (i, j), -w)
        np.add.at(lap, (j, i), -w)
        np.add.at(lap, (i, i), w)
        np.add.at(lap, (j, j), w)
        return lap

    def reachable(self, sources, skip_edges: set[int] | None = None) -> np.ndarray:
        """BFS reachability mask; optionally treating some edge ids as removed."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for eid, (a, b) in enumerate(self.edges):
            if skip_edges and eid in skip_edges:
                continue
            adj[a].append(b)
            adj[b].append(a)
        seen = np.zeros(self.n, dtype=bool)
        stack = list(np.atleast_1d(np.asarray(sources, dtype=np.int64)))
        for s in stack:
            seen[s] = True
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        return seen


def effective_conductance_dense(net: ConductanceNetwork, a_set, b_set) -> ConductanceResult:
    """Dirichlet minimum between vertex sets by a grounded-Laplacian solve.

    Returns (value, disconnected); disconnected means no path joins the sets
    and the conductance is exactly zero.
    """
    if net.n > DENSE_VERTEX_CAP:
        raise ValueError(f"dense solve capped at {DENSE_VERTEX_CAP} vertices")
    a = np.unique(np.atleast_1d(np.asarray(a_set, dtype=np.int64)))
    b = np.unique(np.atleast_1d(np.asarray(b_set, dtype=np.int64)))
    if a.size == 0 or b.size == 0:
        raise ValueError("A and B must be nonempty")
    if np.intersect1d(a, b).size:
        raise ValueError("A and B must be disjoint")
    seen = net.reachable(a)
    if not seen[b].any():
        return ConductanceResult(0.0, True)

    u = np.zeros(net.n)
    u[b] = 1.0
    fixed = np.zeros(net.n, dtype=bool)
    fixed[a] = True
    fixed[b] = True
    # Only components meeting A or B enter the solve; anything else is an
    # inert island whose potential is immaterial (set 0, zero energy).
    anchored = net.reachable(np.concatenate([a, b]))
    interior = np.flatnonzero(~fixed & anchored)
    lap = net.laplacian()
    if interior.size:
        lii = lap[np.ix_(interior, interior)]
        rhs = -lap[np.ix_(interior, b)].sum(axis=1)
        u[interior] = scipy.linalg.solve(lii, rhs, assume_a="pos")
    du = u[net.edges[:, 0]] - u[net.edges[:, 1]]
    energy = float(np.sum(net.weights * du * du))
    return ConductanceResult(energy, False)


def dirichlet_energy(net: ConductanceNetwork, potential: np.ndarray) -> float:
    du = potential[net.edges[:, 0]] - potential[net.edges[:, 1]]
    return float(np.sum(net.weights * du * du))


def cutset_upper_bound(net: ConductanceNetwork, a_set, b_set, cut_edge_ids) -> float:
    """Sum of weights over a separating edge set; checked by reachability."""
    cut = set(int(e) for e in cut_edge_ids)
    seen = net.reachable(a_set, skip_edges=cut)
    b = np.atleast_1d(np.asarray(b_set, dtype=np.int64))
    if seen[b].any():
        raise SeparationError("edge set does not separate A from B")
    return float(sum(net.weights[e] for e in cut))


# -- trees -------------------------------------------------------------------


@dataclass(frozen=True)
class TreeEnvironment:
    """Per-edge conductances beta * e^{T_parent + T_child} on a d-ary tree.

    ``edge_weights[k]`` (k = 1..n) holds the d^k weights of the edges from
    generation k-1 to generation k, in flat base-d order (vertex j of
    generation k has parent j // d).
    """

    d: int
    n: int
    edge_weights: tuple[np.ndarray, ...]

    @classmethod
    def from_field_values(cls, d: int, n: int, gens, beta: float) -> "TreeEnvironment":
        ws = []
        for k in range(1, n + 1):
            parent = np.repeat(gens[k - 1], d)
            ws.append(beta * np.exp(parent + gens[k]))
        return cls(d=d, n=n, edge_weights=tuple(ws))

    def vertex_count(self) -> int:
        return (self.d ** (self.n + 1) - 1) // (self.d - 1)

    def to_network(self) -> ConductanceNetwork:
        """Explicit edge list with breadth-first vertex numbering."""
        offsets = np.cumsum([0] + [self.d**k for k in range(self.n + 1)])
        edges = []
        weights = []
        for k in range(1, self.n + 1):
            child = np.arange(self.d**k)
            parent = child // self.d
            edges.append(np.stack([offsets[k - 1] + parent, offsets[k] + child], axis=1))
            weights.append(self.edge_weights[k - 1])
        return ConductanceNetwork(
            n=int(offsets[-1]),
            edges=np.concatenate(edges),
            weights=np.concatenate(weights),
        )


def tree_conductance_from_field(gens, d: int, beta: float, depth: int) -> float:
    """Root-to-slab conductance in the environment beta e^{T_i + T_j}.

    Builds each generation's edge weights on the fly from the field values
    ``gens`` (one array per generation), keeping only one slab of weights
    in flight; same recursion as :func:`tree_conductance`.
    """
    if not 1 <= depth < len(gens):
        raise ValueError("depth out of range")
    through = beta * np.exp(np.repeat(gens[depth - 1], d) + gens[depth])
    for k in range(depth - 1, 0, -1):
        sub = through.reshape(-1, d).sum(axis=1)
        w = beta * np.exp(np.repeat(gens[k - 1], d) + gens[k])
        through = w * sub / (w + sub)
    return float(through.sum())


def tree_conductance(env: TreeEnvironment, depth: int | None = None) -> float:
    """Effective conductance from the root to the generation-``depth`` slab.

    Leaf-to-root series/parallel recursion.  The conductance of the empty
    subtree below the target slab is an "infinite" boundary handled
    structurally (the bottom edges pass their own weight), so no floating
    infinity enters the arithmetic.
    """
    m = env.n if depth is None else int(depth)
    if not 1 <= m <= env.n:
        raise ValueError(f"depth must be in [1, {env.n}]")
    through = env.edge_weights[m - 1]  # series with an infinite subtree
    for k in range(m - 1, 0, -1):
        sub = through.reshape(-1, env.d).sum(axis=1)
        w = env.edge_weights[k - 1]
        through = w * sub / (w + sub)
    return float(through.sum())


# -- local-time laws ----------------------------------------------------------


def escape_local_time_sample(c_eff: float, rng: RngStream | np.random.Generator, size=None):
    """Total time at the start vertex before escape: exponential, mean 1/c_eff.

    The mean-1/C convention is calibrated against direct simulation of the
    two-vertex walk (acceptance suite).
    """
    if c_eff <= 0:
        raise ValueError("c_eff must be positive")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return gen.exponential(1.0 / c_eff, size=size)


def root_local_time_sample(c_eff: float, rng: RngStream | np.random.Generator, size=None):
    """Linear-timescale local time at the root: sqrt(1 + 2Z/c_eff) - 1, Z ~ Exp(1)."""
    if c_eff <= 0:
        raise ValueError("c_eff must be positive")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    z = gen.exponential(1.0, size=size)
    return np.sqrt(1.0 + 2.0 * z / c_eff) - 1.0


# -- text format ---------------------------------------------------------------


def parse_network(text: str) -> ConductanceNetwork:
    """Parse the line format: header 'vertices N', then 'i j w' per edge."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("vertices"):
        raise ValueError("expected header line 'vertices N'")
    n = int(lines[0].split()[1])
    edges = []
    weights = []
    for ln in lines[1:]:
        i, j, w = ln.split()
        edges.append((int(i), int(j)))
        weights.append(float(w))
    return ConductanceNetwork(n=n, edges=np.array(edges, dtype=np.int64).reshape(-1, 2), weights=np.array(weights))


def format_network(net: ConductanceNetwork) -> str:
    lines = [f"vertices {net.n}"]
    for (i, j), w in zip(net.edges, net.weights):
        lines.append(f"{int(i)} {int(j)} {float(w)!r}")
    return "\n".join(lines) + "\n"


def two_vertex(weight: float) -> ConductanceNetwork:
    return ConductanceNetwork(n=2, edges=np.array([[0, 1]]), weights=np.array([weight]))


def path_graph(weights) -> ConductanceNetwork:
    w = np.asarray(weights, dtype=float)
    edges = np.stack([np.arange(len(w)), np.arange(1, len(w) + 1)], axis=1)
    return ConductanceNetwork(n=len(w) + 1, edges=edges, weights=w)
