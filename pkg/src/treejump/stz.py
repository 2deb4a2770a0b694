"""Random Schrödinger operator coupled to the field through Green ratios.

H_B has off-diagonal entries -beta_ij and diagonal B_i.  When B is built
from a field T (pinned at i0) via B_i = sum_j beta_ij e^{T_j - T_i}, the
vector e^T is annihilated by every row except the pinned one, and the
grounded environment Laplacian factorizes as L_T H_B L_T with
L_T = diag(e^{T}).  Everything here is deterministic dense linear algebra
on small graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .network import ConductanceNetwork

VERTEX_CAP = 200


class GreenDomainError(ValueError):
    """Green-function entries must be positive to define the field."""


@dataclass
class StzOperator:
    """Dense symmetric H_B = -graph Laplacian + potential, for a given B."""

    net: ConductanceNetwork
    b: np.ndarray

    def __post_init__(self):
        if self.net.n > VERTEX_CAP:
            raise ValueError(f"dense operator capped at {VERTEX_CAP} vertices")
        self.b = np.asarray(self.b, dtype=float)

    def matrix(self) -> np.ndarray:
        h = np.zeros((self.net.n, self.net.n))
        i, j = self.net.edges[:, 0], self.net.edges[:, 1]
        np.add.at(h, (i, j), -self.net.weights)
        np.add.at(h, (j, i), -self.net.weights)
        h[np.diag_indices(self.net.n)] = self.b
        return h


def b_from_tfield(net: ConductanceNetwork, t: np.ndarray, pin: int) -> np.ndarray:
    """B_i = sum_{j ~ i} beta_ij e^{T_j - T_i} for i != pin; B_pin is nan (absent)."""
    t = np.asarray(t, dtype=float)
    if t[pin] != 0.0:
        raise ValueError("field must vanish at the pinned vertex")
    b = np.zeros(net.n)
    i, j = net.edges[:, 0], net.edges[:, 1]
    np.add.at(b, i, net.weights * np.exp(t[j] - t[i]))
    np.add.at(b, j, net.weights * np.exp(t[i] - t[j]))
    b[pin] = np.nan
    return b


def complete_b(net: ConductanceNetwork, t: np.ndarray, pin: int, excess: float) -> np.ndarray:
    """Fill the pinned entry: B_pin = sum_j beta_pj e^{T_j} + excess (excess > 0).

    The excess is a free parameter; Green-ratio recovery is invariant to it.
    """
    if excess <= 0:
        raise ValueError("excess must be positive for a positive-definite operator")
    b = b_from_tfield(net, t, pin)
    i, j = net.edges[:, 0], net.edges[:, 1]
    acc = 0.0
    for (a, c), w in zip(net.edges, net.weights):
        if a == pin:
            acc += w * math.exp(t[c])
        elif c == pin:
            acc += w * math.exp(t[a])
    b[pin] = acc + excess
    return b


def environment_laplacian(net: ConductanceNetwork, t: np.ndarray) -> np.ndarray:
    """Graph Laplacian for the conductances beta_ij e^{T_i + T_j}."""
    w = net.weights * np.exp(t[net.edges[:, 0]] + t[net.edges[:, 1]])
    return net.laplacian(w)


def laplacian_factorization_residual(net: ConductanceNetwork, t: np.ndarray, pin: int) -> float:
    """Max-abs residual of  EnvLap|_{V\\pin} - L_T (H_B|_{V\\pin}) L_T, scale-relative.

    Pure algebra for any real field T; residual at float precision.
    """
    b = b_from_tfield(net, t, pin)
    b[pin] = 0.0  # pinned row/column dropped below
    h = StzOperator(net, b).matrix()
    keep = np.array([v for v in range(net.n) if v != pin])
    lt = np.diag(np.exp(t[keep]))
    lap = environment_laplacian(net, t)[np.ix_(keep, keep)]
    resid = lap - lt @ h[np.ix_(keep, keep)] @ lt
    return float(np.max(np.abs(resid)) / max(np.max(np.abs(lap)), 1.0))


def row_identity_residual(net: ConductanceNetwork, t: np.ndarray, pin: int) -> float:
    """Max over i != pin of |(H_B e^T)_i|, scaled; zero is the defining identity."""
    b = b_from_tfield(net, t, pin)
    b[pin] = 0.0
    h = StzOperator(net, b).matrix()
    r = h @ np.exp(t)
    r[pin] = 0.0
    return float(np.max(np.abs(r)) / max(np.max(np.abs(h)), 1.0))


def effective_weight(net: ConductanceNetwork, b: np.ndarray, i0: int, j0: int) -> float:
    """Schur-complement reduced weight between i0 and j0.

    beta_eff = beta_{i0 j0} + [H01 H11^{-1} H10](i0, j0); only entries of B
    away from {i0, j0} are read, so a partial B (nan at i0/j0) is accepted.
    """
    if i0 == j0:
        raise ValueError("need two distinct vertices")
    h = StzOperator(net, np.nan_to_num(b, nan=0.0)).matrix()
    rest = np.array([v for v in range(net.n) if v not in (i0, j0)])
    direct = 0.0
    for (a, c), w in zip(net.edges, net.weights):
        if {int(a), int(c)} == {int(i0), int(j0)}:
            direct += w
    if rest.size == 0:
        return direct
    h11 = h[np.ix_(rest, rest)]
    h01 = h[np.ix_([i0], rest)][0]
    h10 = h[np.ix_(rest, [j0])][:, 0]
    try:
        x = scipy.linalg.solve(h11, h10, assume_a="sym")
    except scipy.linalg.LinAlgError as e:
        raise ArithmeticError(f"singular interior block: {e}") from e
    return float(direct + h01 @ x)


def effective_weight_green(net: ConductanceNetwork, b: np.ndarray, i0: int, j0: int) -> float:
    """Green-function form G(i0,j0) / (G(i0,i0)G(j0,j0) - G(i0,j0)^2); needs full B."""
    h = StzOperator(net, b).matrix()
    g = scipy.linalg.inv(h)
    return float(g[i0, j0] / (g[i0, i0] * g[j0, j0] - g[i0, j0] ** 2))


def green_ratio_field(op: StzOperator, i0: int) -> np.ndarray:
    """T_i = log(G(i0, i) / G(i0, i0)) from one linear solve."""
    h = op.matrix()
    e = np.zeros(op.net.n)
    e[i0] = 1.0
    g_row = scipy.linalg.solve(h, e, assume_a="sym")
    if np.any(g_row <= 0.0):
        raise GreenDomainError("non-positive Green entries; operator not in the coupled regime")
    return np.log(g_row / g_row[i0])


def green_ratio_roundtrip_residual(op: StzOperator, i0: int) -> float:
    """Recover T from Green ratios, rebuild B from T, compare: max |log(B'_i/B_i)|."""
    t = green_ratio_field(op, i0)
    b2 = b_from_tfield(op.net, t, i0)
    mask = np.arange(op.net.n) != i0
    return float(np.max(np.abs(np.log(b2[mask] / op.b[mask]))))
