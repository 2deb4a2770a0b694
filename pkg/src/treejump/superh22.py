"""Exact superexpectations on graphs with at most three vertices.

A superfunction over V vertices is an element of the Grassmann algebra in
2V generators (xi_i, eta_i) whose coefficients are functions of the even
coordinates (x_i, y_i), here sampled on a tensor quadrature grid.  The
z-coordinate is the even square root of 1 + x^2 + y^2 - 2 xi eta, so
u.u = -1 holds identically.  Integration applies the odd derivations
d_eta d_xi per vertex to (prod_i 1/z_i) F and then tensor quadrature over
the even variables, normalised so the Gibbs state has unit mass.

Compositions with scalar functions are exact Taylor polynomials in the
nilpotent part.  The vertex cap keeps the tensor grid affordable; all the
exact identities used downstream live on one or two vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import specfun

VERTEX_CAP = 3
_TWO_PI = 2.0 * math.pi


class GridError(ValueError):
    """Mismatched or inadequate grids."""


class TruncationError(ArithmeticError):
    """Integrand mass leaking past the grid domain."""


@dataclass(frozen=True)
class GridSpec:
    """Per-variable 1-D rule: node count, half-width (in the compactified
    coordinate) and rule tag ('sinh' for smooth integrands, 'sinh_sqrt' to
    absorb an |x|^{-a} singularity at the origin, a < 1)."""

    nodes: int = 64
    halfwidth: float = 12.0
    rule: str = "sinh"

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError("node count must be >= 16")
        if self.halfwidth <= 0:
            raise ValueError("half-width must be positive")
        if self.rule not in ("sinh", "sinh_sqrt"):
            raise ValueError(f"unknown rule {self.rule!r}")

    def build(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights for integrating over the whole real line."""
        m = self.nodes // 2
        u, gw = np.polynomial.legendre.leggauss(m)
        if self.rule == "sinh":
            # x = sinh(u), u in (0, W]
            ue = 0.5 * self.halfwidth * (u + 1.0)
            we = 0.5 * self.halfwidth * gw
            x = np.sinh(ue)
            w = we * np.cosh(ue)
        else:
            # x = sinh(v^2), v in (0, sqrt(W)]: resolves |x|^{-a} at 0
            root = math.sqrt(self.halfwidth)
            ve = 0.5 * root * (u + 1.0)
            we = 0.5 * root * gw
            x = np.sinh(ve * ve)
            w = we * np.cosh(ve * ve) * 2.0 * ve
        nodes = np.concatenate([-x[::-1], x])
        weights = np.concatenate([w[::-1], w])
        return nodes, weights

    def escalated(self) -> "GridSpec":
        return GridSpec(nodes=2 * self.nodes, halfwidth=self.halfwidth, rule=self.rule)


class Grid:
    """Tensor grid over the 2V even variables; axis 2i is x_i, 2i+1 is y_i."""

    def __init__(self, n_vertices: int, specs: GridSpec | Sequence[GridSpec] = GridSpec()):
        if not 1 <= n_vertices <= VERTEX_CAP:
            raise GridError(f"vertex count must be in [1, {VERTEX_CAP}]")
        if isinstance(specs, GridSpec):
            specs = [specs] * (2 * n_vertices)
        if len(specs) != 2 * n_vertices:
            raise GridError("need one GridSpec per even variable")
        self.n_vertices = n_vertices
        self.specs = tuple(specs)
        built = [s.build() for s in specs]
        self.nodes = tuple(b[0] for b in built)
        self.weights = tuple(b[1] for b in built)
        self.shape = tuple(len(b[0]) for b in built)

    def axis_values(self, axis: int) -> np.ndarray:
        shp = [1] * len(self.shape)
        shp[axis] = self.shape[axis]
        return self.nodes[axis].reshape(shp)

    def axis_weights(self, axis: int) -> np.ndarray:
        shp = [1] * len(self.shape)
        shp[axis] = self.shape[axis]
        return self.weights[axis].reshape(shp)

    def escalated(self) -> "Grid":
        return Grid(self.n_vertices, [s.escalated() for s in self.specs])


# -- sign bookkeeping -----------------------------------------------------------


def _merge_sign(a: int, b: int) -> int:
    """Sign of concatenating ascending monomials a and b into ascending order."""
    sign = 1
    bb = b
    while bb:
        low = bb & -bb
        # generators of a strictly above this bit must hop over it
        above = a >> (low.bit_length())
        if bin(above).count("1") & 1:
            sign = -sign
        bb ^= low
    return sign


@dataclass
class SuperFunction:
    """Grassmann-algebra element with grid-sampled even coefficients.

    ``coefs`` maps a generator bitmask (bit 2i = xi_i, bit 2i+1 = eta_i,
    monomials in ascending bit order) to an ndarray broadcastable over the
    grid shape.
    """

    grid: Grid
    coefs: dict[int, np.ndarray]

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "SuperFunction":
        return cls(grid, {0: np.float64(value)})

    @classmethod
    def body_only(cls, grid: Grid, body: np.ndarray) -> "SuperFunction":
        return cls(grid, {0: body})

    @classmethod
    def generator(cls, grid: Grid, bit: int) -> "SuperFunction":
        return cls(grid, {1 << bit: np.float64(1.0)})

    # -- ring operations ---------------------------------------------------

    def _checked(self, other: "SuperFunction") -> None:
        if other.grid.shape != self.grid.shape:
            raise GridError("operands live on different grids")

    def __add__(self, other):
        if np.isscalar(other):
            other = SuperFunction.constant(self.grid, float(other))
        self._checked(other)
        out = dict(self.coefs)
        for m, c in other.coefs.items():
            out[m] = out[m] + c if m in out else c
        return SuperFunction(self.grid, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperFunction(self.grid, {m: -c for m, c in self.coefs.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = SuperFunction.constant(self.grid, float(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return SuperFunction(self.grid, {m: c * float(other) for m, c in self.coefs.items()})
        self._checked(other)
        out: dict[int, np.ndarray] = {}
        for ma, ca in self.coefs.items():
            for mb, cb in other.coefs.items():
                if ma & mb:
                    continue
                m = ma | mb
                term = _merge_sign(ma, mb) * ca * cb
                out[m] = out[m] + term if m in out else term
        return SuperFunction(self.grid, out)

    def __rmul__(self, other):
        if np.isscalar(other):
            return self.__mul__(other)
        return NotImplemented

    # -- structure ----------------------------------------------------------

    @property
    def body(self) -> np.ndarray:
        return self.coefs.get(0, np.float64(0.0))

    def soul(self) -> "SuperFunction":
        return SuperFunction(self.grid, {m: c for m, c in self.coefs.items() if m})

    def is_even(self) -> bool:
        return all(bin(m).count("1") % 2 == 0 for m in self.coefs)

    def coefficient(self, mask: int) -> np.ndarray:
        return np.broadcast_to(self.coefs.get(mask, np.float64(0.0)), self.grid.shape)

    def max_coef_difference(self, other: "SuperFunction") -> float:
        self._checked(other)
        worst = 0.0
        for m in set(self.coefs) | set(other.coefs):
            diff = np.max(np.abs(self.coefficient(m) - other.coefficient(m)))
            worst = max(worst, float(diff))
        return worst

    def derive(self, bit: int) -> "SuperFunction":
        """Left odd derivation with respect to generator ``bit``."""
        out: dict[int, np.ndarray] = {}
        g = 1 << bit
        for m, c in self.coefs.items():
            if not m & g:
                continue
            below = bin(m & (g - 1)).count("1")
            out[m ^ g] = c if below % 2 == 0 else -c
        return SuperFunction(self.grid, out)

    def block(self, lo: int, hi: int) -> "SuperFunction":
        """Slice along grid axis 0 (coefficients of length-1 axes pass through)."""
        sub = _BlockGrid(self.grid, lo, hi)
        out = {}
        for m, c in self.coefs.items():
            arr = np.asarray(c)
            if arr.ndim == len(self.grid.shape) and arr.shape[0] != 1:
                out[m] = arr[lo:hi]
            else:
                out[m] = arr
        return SuperFunction(sub, out)  # type: ignore[arg-type]


class _BlockGrid(Grid):
    """View of a Grid restricted to a slice of axis 0."""

    def __init__(self, parent: Grid, lo: int, hi: int):
        self.n_vertices = parent.n_vertices
        self.specs = parent.specs
        self.nodes = (parent.nodes[0][lo:hi],) + parent.nodes[1:]
        self.weights = (parent.weights[0][lo:hi],) + parent.weights[1:]
        self.shape = (hi - lo,) + parent.shape[1:]


# -- coordinates ------------------------------------------------------------


def coord_x(grid: Grid, i: int) -> SuperFunction:
    return SuperFunction.body_only(grid, grid.axis_values(2 * i))


def coord_y(grid: Grid, i: int) -> SuperFunction:
    return SuperFunction.body_only(grid, grid.axis_values(2 * i + 1))


def coord_xi(grid: Grid, i: int) -> SuperFunction:
    return SuperFunction.generator(grid, 2 * i)


def coord_eta(grid: Grid, i: int) -> SuperFunction:
    return SuperFunction.generator(grid, 2 * i + 1)


def taylor_compose(derivs: Sequence[Callable], f: SuperFunction) -> SuperFunction:
    """g(f) = sum_k g^(k)(body) soul^k / k!, exact by nilpotency; f even.

    ``derivs`` must provide g and its first V derivatives.
    """
    if not f.is_even():
        raise ValueError("composition requires an even superfunction")
    k_max = f.grid.n_vertices
    if len(derivs) < k_max + 1:
        raise ValueError(f"need {k_max + 1} derivative callables")
    body = np.asarray(f.body, dtype=float)
    s = f.soul()
    out = SuperFunction.body_only(f.grid, derivs[0](body))
    power = None
    fact = 1.0
    for k in range(1, k_max + 1):
        power = s if power is None else power * s
        if not power.coefs:
            break
        fact *= k
        out = out + power * (1.0 / fact) * SuperFunction.body_only(f.grid, derivs[k](body))
    return out


def sf_exp(f: SuperFunction) -> SuperFunction:
    return taylor_compose([np.exp] * (f.grid.n_vertices + 1), f)


def sf_sqrt(f: SuperFunction) -> SuperFunction:
    return taylor_compose(
        [np.sqrt, lambda t: 0.5 / np.sqrt(t), lambda t: -0.25 * t**-1.5, lambda t: 0.375 * t**-2.5],
        f,
    )


def sf_inv(f: SuperFunction) -> SuperFunction:
    return taylor_compose(
        [lambda t: 1.0 / t, lambda t: -(t**-2.0), lambda t: 2.0 * t**-3.0, lambda t: -6.0 * t**-4.0],
        f,
    )


def sf_log(f: SuperFunction) -> SuperFunction:
    return taylor_compose([np.log, lambda t: 1.0 / t, lambda t: -(t**-2.0), lambda t: 2.0 * t**-3.0], f)


def coord_z(grid: Grid, i: int) -> SuperFunction:
    """Even square root of 1 + x^2 + y^2 - 2 xi eta."""
    x = coord_x(grid, i)
    y = coord_y(grid, i)
    arg = x * x + y * y + 1.0 - 2.0 * (coord_xi(grid, i) * coord_eta(grid, i))
    return sf_sqrt(arg)


def grassmann_mul(a: SuperFunction, b: SuperFunction) -> SuperFunction:
    return a * b


# -- integration ---------------------------------------------------------------


def _berezin_block(block: SuperFunction) -> np.ndarray:
    """Apply prod_i d_eta_i d_xi_i (vertices ascending) and return the body."""
    f = block
    for i in range(block.grid.n_vertices):
        # rightmost derivation acts first: derive(xi) then derive(eta)
        f = f.derive(2 * i).derive(2 * i + 1)
    return np.asarray(f.body, dtype=float)


def berezin_integrate(f: SuperFunction, tail_tol: float = 1e-8) -> float:
    """Integral over (H^{2|2})^V: odd derivations of (prod 1/z_i) f, then
    tensor quadrature, with a unit-mass normalisation of 1/(2 pi) per vertex.

    Raises TruncationError if the outermost grid shell carries more than
    ``tail_tol`` of the integrand's absolute mass.
    """
    grid = f.grid
    nv = grid.n_vertices
    naxes = 2 * nv
    block_len = _block_len(grid)
    total = 0.0
    abs_total = 0.0
    abs_tail = 0.0
    inner_w = None
    for lo in range(0, grid.shape[0], block_len):
        hi = min(lo + block_len, grid.shape[0])
        fb = f.block(lo, hi)
        invz = SuperFunction.constant(fb.grid, 1.0)
        for i in range(nv):
            invz = invz * sf_inv(coord_z(fb.grid, i))
        top = _berezin_block(invz * fb)
        g = fb.grid
        w = g.axis_weights(0)
        for ax in range(1, naxes):
            w = w * g.axis_weights(ax)
        contrib = np.broadcast_to(top, g.shape) * w
        total += float(contrib.sum())
        ac = np.abs(contrib)
        abs_total += float(ac.sum())
        # outermost two nodes on any axis count as the tail shell
        mask = np.zeros(g.shape, dtype=bool)
        for ax in range(naxes):
            nloc = g.shape[ax]
            idx = [slice(None)] * naxes
            if ax == 0:
                sel = [k for k in (0, 1, grid.shape[0] - 2, grid.shape[0] - 1) if lo <= k < hi]
                if not sel:
                    continue
                idx[0] = np.array(sel) - lo
            else:
                idx[ax] = np.array([0, 1, nloc - 2, nloc - 1])
            mask[tuple(idx)] = True
        abs_tail += float(ac[mask].sum())
    if abs_total > 0 and abs_tail / abs_total > tail_tol:
        raise TruncationError(
            f"tail shell carries {abs_tail / abs_total:.2e} of the integrand mass (> {tail_tol:.0e})"
        )
    return total / _TWO_PI**nv


def _block_len(grid: Grid, target: int = 1 << 22) -> int:
    rest = 1
    for s in grid.shape[1:]:
        rest *= s
    return max(1, target // max(rest, 1))


# -- the Gibbs state -------------------------------------------------------------


def pair_coupling(grid: Grid, i: int, j: int) -> SuperFunction:
    """u_i . u_j with the hyperbolic/symplectic pairing."""
    zi, zj = coord_z(grid, i), coord_z(grid, j)
    term = (
        -1.0 * (zi * zj)
        + coord_x(grid, i) * coord_x(grid, j)
        + coord_y(grid, i) * coord_y(grid, j)
        + coord_eta(grid, i) * coord_xi(grid, j)
        - coord_xi(grid, i) * coord_eta(grid, j)
    )
    return term


def gibbs_energy(grid: Grid, edges: Sequence[tuple[int, int, float]], h: Sequence[float]) -> SuperFunction:
    """sum_ij beta_ij (u_i.u_j + 1) - sum_i h_i (z_i - 1) on the grid."""
    acc = SuperFunction.constant(grid, 0.0)
    for i, j, b in edges:
        acc = acc + (pair_coupling(grid, i, j) + 1.0) * b
    for i, hi in enumerate(h):
        if hi != 0.0:
            acc = acc + (coord_z(grid, i) - 1.0) * (-hi)
    return acc


def h22_expectation(
    edges: Sequence[tuple[int, int, float]],
    h: Sequence[float],
    observables: Sequence[Callable[[Grid], SuperFunction]],
    grid: Grid | None = None,
    n_vertices: int | None = None,
    norm_tol: float = 1e-4,
) -> list[float]:
    """Gibbs expectations of the given observables.

    Each observable is a callable Grid -> SuperFunction so it can be
    instantiated per block.  The normalisation <1> is computed on the same
    sweep; if it strays from 1 by more than ``norm_tol`` the grid is
    escalated once (double nodes) before failing.
    """
    nv = n_vertices if n_vertices is not None else (max(max(i, j) for i, j, _ in edges) + 1 if edges else len(h))
    grid = grid or Grid(nv)
    for attempt in range(2):
        sums = np.zeros(len(observables))
        norm = 0.0
        block_len = _block_len(grid)
        for lo in range(0, grid.shape[0], block_len):
            hi = min(lo + block_len, grid.shape[0])
            sub = _BlockGrid(grid, lo, hi)
            gf = sf_exp(gibbs_energy(sub, edges, h))
            invz = SuperFunction.constant(sub, 1.0)
            for i in range(nv):
                invz = invz * sf_inv(coord_z(sub, i))
            base = invz * gf
            w = sub.axis_weights(0)
            for ax in range(1, 2 * nv):
                w = w * sub.axis_weights(ax)
            norm += float((np.broadcast_to(_berezin_block(base), sub.shape) * w).sum())
            for k, obs in enumerate(observables):
                top = _berezin_block(base * obs(sub))
                sums[k] += float((np.broadcast_to(top, sub.shape) * w).sum())
        norm /= _TWO_PI**nv
        sums /= _TWO_PI**nv
        if abs(norm - 1.0) <= norm_tol:
            return list(sums)
        if attempt == 0:
            grid = grid.escalated()
    raise specfun.AccuracyError(f"normalisation off by {abs(norm - 1.0):.2e} even after grid escalation")


def single_vertex_closed_form(eta: float, h: float) -> float:
    """g_eta(h) = (1/pi) e^h (2h)^{(1-eta)/2} Gamma(1/2 - eta/2) K_{(1-eta)/2}(h)."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0,1)")
    if h <= 0.0:
        raise ValueError("h must be positive")
    gam = math.exp(specfun.log_gamma(0.5 - 0.5 * eta))
    return (1.0 / math.pi) * math.exp(h) * (2.0 * h) ** ((1.0 - eta) / 2.0) * gam * specfun.bessel_k(
        (1.0 - eta) / 2.0, h
    )


def single_vertex_limit_constant(eta: float) -> float:
    """c_eta = (1/pi) 2^{-eta} Gamma(1/2 - eta/2)^2, the h -> 0 limit of g_eta."""
    gam = math.exp(specfun.log_gamma(0.5 - 0.5 * eta))
    return (1.0 / math.pi) * 2.0 ** (-eta) * gam * gam


# -- horospherical coordinates ----------------------------------------------------


def horospherical_coordinates(grid: Grid, i: int = 0) -> dict[str, SuperFunction]:
    """(z, x, y, xi, eta) built from horospherical variables (t, s, psibar, psi).

    Axis 2i is read as t_i and axis 2i+1 as s_i; bits (2i, 2i+1) are the
    odd pair (psibar, psi).  The odd coordinates are paired so that
    u.u = -1 holds under the symplectic pairing.
    """
    t = coord_x(grid, i)  # axis reused as t
    s = coord_y(grid, i)  # axis reused as s
    tb = np.asarray(t.body, dtype=float)
    et = SuperFunction.body_only(grid, np.exp(tb))
    psibar = SuperFunction.generator(grid, 2 * i)
    psi = SuperFunction.generator(grid, 2 * i + 1)
    bump = s * s * 0.5 + psibar * psi
    z = SuperFunction.body_only(grid, np.cosh(tb)) + et * bump
    x = SuperFunction.body_only(grid, np.sinh(tb)) - et * bump
    y = et * s
    return {"z": z, "x": x, "y": y, "xi": et * psi, "eta": et * psibar, "e_t": et}
