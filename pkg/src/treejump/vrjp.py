"""Event-driven simulation of the vertex-reinforced jump process.

While the walk sits at x it jumps to a neighbour y at rate
w_xy (1 + L^y_t); the occupied vertex is the only one accruing local time,
so all rates are frozen between jumps and each event is exact (one
exponential holding time, one categorical target).  The exchangeable
timescale is the reparametrisation A(t) = sum_x [(1 + L^x_t)^2 - 1], under
which local times satisfy L = sqrt(1 + L~) - 1 identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .backend import kernels
from .network import ConductanceNetwork, TreeEnvironment
from .rng import RngStream

StopKind = Literal["horizon", "jumps", "hitting"]


class PartialRecoveryError(RuntimeError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"vertices never visited: {self.missing}")


@dataclass(frozen=True)
class StopRule:
    kind: StopKind
    horizon: float = math.inf
    max_jumps: int = 1 << 62
    hit_set: tuple[int, ...] = ()

    @classmethod
    def time(cls, horizon: float) -> "StopRule":
        return cls(kind="horizon", horizon=horizon)

    @classmethod
    def jumps(cls, budget: int) -> "StopRule":
        return cls(kind="jumps", max_jumps=budget)

    @classmethod
    def hitting(cls, vertices, cap: int = 1 << 62) -> "StopRule":
        return cls(kind="hitting", hit_set=tuple(int(v) for v in vertices), max_jumps=cap)


@dataclass
class Trajectory:
    """Jump records plus exact local-time bookkeeping.

    ``vertices[k]`` was departed at ``times[k]`` (k < jumps); the final
    entry of ``vertices`` is the last occupied vertex.  ``local_times``
    sums exactly to ``total_time``.
    """

    vertices: np.ndarray
    times: np.ndarray
    local_times: np.ndarray
    total_time: float
    jumps: int
    timescale: Literal["linear", "exchangeable"]
    start: int

    def export_text(self) -> str:
        """Columnar record "jump_index vertex time" per jump."""
        lines = ["jump_index vertex time"]
        for k in range(self.jumps):
            lines.append(f"{k} {self.vertices[k]} {self.times[k]!r}")
        return "\n".join(lines) + "\n"


def _hit_mask(net_n: int, rule: StopRule):
    if rule.kind != "hitting":
        return None
    mask = np.zeros(net_n, dtype=bool)
    mask[list(rule.hit_set)] = True
    return mask


def _run(net, start, rule, gen, reinforced, record, discount_h=0.0, discount_target=-1):
    indptr, indices, w = net.csr()
    horizon = rule.horizon if rule.kind == "horizon" else math.inf
    local, jumps, t_end, rec_v, rec_t, disc, _reason = kernels.vrjp_walk(
        gen,
        indptr,
        indices,
        w,
        int(start),
        reinforced,
        int(rule.max_jumps),
        float(horizon),
        _hit_mask(net.n, rule),
        record,
        discount_h,
        discount_target,
    )
    return local, jumps, t_end, rec_v, rec_t, disc


def simulate_linear(
    net: ConductanceNetwork,
    start: int,
    stop: StopRule,
    rng: RngStream | np.random.Generator,
    record: bool = True,
) -> Trajectory:
    """Linearly reinforced timescale VRJP with base weights from ``net``."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    local, jumps, t_end, rec_v, rec_t, _ = _run(net, start, stop, gen, True, record)
    return Trajectory(
        vertices=rec_v,
        times=rec_t,
        local_times=local,
        total_time=t_end,
        jumps=jumps,
        timescale="linear",
        start=int(start),
    )


def simulate_linear_summary(
    net: ConductanceNetwork,
    start: int,
    stop: StopRule,
    rng: RngStream | np.random.Generator,
    discount_h: float = 0.0,
    discount_target: int = -1,
):
    """No-record fast path: (local_times, jumps, total_time, discounted).

    ``discounted`` accumulates the e^{-h t}-weighted occupation integral of
    ``discount_target`` when ``discount_h`` > 0.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    local, jumps, t_end, _, _, disc = _run(
        net, start, stop, gen, True, False, discount_h, discount_target
    )
    return local, jumps, t_end, disc


def environment_rates_network(env_net: ConductanceNetwork, t_values: np.ndarray, beta: float):
    """Directed jump rates (1/2) beta e^{T_j - T_i} on the edges of ``env_net``.

    Returned as a CSR triple aligned with env_net.csr() vertex order.
    """
    indptr, indices, _ = env_net.csr()
    rates = np.empty_like(indices, dtype=float)
    for i in range(env_net.n):
        lo, hi = indptr[i], indptr[i + 1]
        rates[lo:hi] = 0.5 * beta * np.exp(t_values[indices[lo:hi]] - t_values[i])
    return indptr, indices, rates


def simulate_markov(
    indptr: np.ndarray,
    indices: np.ndarray,
    rates: np.ndarray,
    start: int,
    stop: StopRule,
    rng: RngStream | np.random.Generator,
    record: bool = True,
    timescale: Literal["linear", "exchangeable"] = "exchangeable",
) -> Trajectory:
    """Markov jump process with fixed (quenched) rates in CSR form."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    horizon = stop.horizon if stop.kind == "horizon" else math.inf
    n = len(indptr) - 1
    local, jumps, t_end, rec_v, rec_t, _, _reason = kernels.vrjp_walk(
        gen,
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(rates, dtype=np.float64),
        int(start),
        False,
        int(stop.max_jumps),
        float(horizon),
        _hit_mask(n, stop),
        record,
        0.0,
        -1,
    )
    return Trajectory(
        vertices=rec_v,
        times=rec_t,
        local_times=local,
        total_time=t_end,
        jumps=jumps,
        timescale=timescale,
        start=int(start),
    )


def simulate_in_environment(
    env: TreeEnvironment | ConductanceNetwork,
    t_values: np.ndarray,
    beta: float,
    start: int,
    stop: StopRule,
    rng: RngStream | np.random.Generator,
    record: bool = True,
) -> Trajectory:
    """Quenched walk with rates (1/2) beta e^{T_j - T_i}; the annealed-law
    counterpart of the exchangeable-timescale VRJP."""
    net = env.to_network() if isinstance(env, TreeEnvironment) else env
    indptr, indices, rates = environment_rates_network(net, t_values, beta)
    return simulate_markov(indptr, indices, rates, start, stop, rng, record, "exchangeable")


# -- timescale change ----------------------------------------------------------


def _per_event_local_times(traj: Trajectory):
    """Local time of the occupied vertex before/after each holding interval."""
    m = traj.jumps
    v = traj.vertices[: m + 1]
    holds = np.diff(traj.times, prepend=0.0)
    # cumulative-by-vertex sums of the holding times, exclusive then inclusive
    before = np.zeros(m)
    order = np.argsort(v[:m], kind="stable")
    sorted_holds = holds[order]
    csum = np.cumsum(sorted_holds) - sorted_holds  # exclusive prefix within groups
    group_start = np.ones(m, dtype=bool)
    group_start[1:] = v[:m][order][1:] != v[:m][order][:-1]
    offset = np.where(group_start, csum, 0.0)
    offset = np.maximum.accumulate(offset)
    before[order] = csum - offset
    return v, holds, before, before + holds


def to_exchangeable(traj: Trajectory) -> Trajectory:
    """Reparametrize a linear-timescale trajectory to the exchangeable one.

    Per holding interval at x the exchangeable clock advances by
    (1 + L^x_after)^2 - (1 + L^x_before)^2, accumulated independently of the
    linear bookkeeping so the square-root identity between the two local
    time fields is a genuine cross-check, not a tautology.
    """
    if traj.timescale != "linear":
        raise ValueError("trajectory is not in the linear timescale")
    v, holds, before, after = _per_event_local_times(traj)
    inc = (1.0 + after) ** 2 - (1.0 + before) ** 2
    new_times = np.cumsum(inc)
    new_local = np.zeros_like(traj.local_times)
    np.add.at(new_local, v[: traj.jumps], inc)
    # the final partial stay (after the last jump) also advances the clock
    last_v = int(v[traj.jumps]) if len(v) > traj.jumps else traj.start
    tail = traj.total_time - (traj.times[-1] if traj.jumps else 0.0)
    if tail > 0:
        l_before = traj.local_times[last_v] - tail
        tinc = (1.0 + traj.local_times[last_v]) ** 2 - (1.0 + l_before) ** 2
        new_local[last_v] += tinc
        total = (new_times[-1] if traj.jumps else 0.0) + tinc
    else:
        total = new_times[-1] if traj.jumps else 0.0
    return Trajectory(
        vertices=traj.vertices,
        times=new_times,
        local_times=new_local,
        total_time=float(total),
        jumps=traj.jumps,
        timescale="exchangeable",
        start=traj.start,
    )


def timescale_identity_residual(traj: Trajectory) -> float:
    """max over jump epochs of |L^x - (sqrt(1 + L~^x) - 1)| at the occupied vertex."""
    if traj.timescale != "linear":
        raise ValueError("pass the linear-timescale trajectory")
    v, holds, before, after = _per_event_local_times(traj)
    inc = (1.0 + after) ** 2 - (1.0 + before) ** 2
    # exchangeable local time of the occupied vertex after each interval,
    # accumulated in the squared domain
    m = traj.jumps
    exch_after = np.zeros(m)
    order = np.argsort(v[:m], kind="stable")
    sinc = inc[order]
    csum = np.cumsum(sinc)
    group_start = np.ones(m, dtype=bool)
    group_start[1:] = v[:m][order][1:] != v[:m][order][:-1]
    offset = np.where(group_start, csum - sinc, 0.0)
    offset = np.maximum.accumulate(offset)
    exch_after[order] = csum - offset
    return float(np.max(np.abs(after - (np.sqrt(1.0 + exch_after) - 1.0)))) if m else 0.0


def recover_tfield(traj: Trajectory, reference: int = 0) -> tuple[np.ndarray, int]:
    """Field estimate from asymptotic local-time ratios.

    Linear timescale:       T_i = log(L^i / L^ref)
    Exchangeable timescale: T_i = (1/2) log(L~^i / L~^ref)
    """
    l = traj.local_times
    if np.any(l <= 0.0):
        raise PartialRecoveryError(np.flatnonzero(l <= 0.0).tolist())
    if traj.timescale == "linear":
        t = np.log(l / l[reference])
    else:
        t = 0.5 * np.log(l / l[reference])
    return t, traj.jumps
