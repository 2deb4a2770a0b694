"""Pure-Python/numpy kernels.

Reference implementations of the hot inner loops; the compiled extension in
``_fast.pyx`` mirrors these draw-for-draw (same uniforms consumed in the same
order), so both backends produce identical samples from identical streams.
Selected at import time by :mod:`treejump.backend`.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

# Stop reasons shared by both backends.
STOP_JUMPS = 0
STOP_HORIZON = 1
STOP_HIT = 2


def increment_slab(gen: np.random.Generator, beta: float, n: int) -> np.ndarray:
    """Draw ``n`` field increments T with e^T ~ inverse Gaussian IG(1, beta).

    Transform method: a chi-square(1) variate plus a single acceptance
    branch picks between the two roots x and 1/x; rejection-free.
    Consumes exactly 3n uniforms (two for the Box-Muller normal, one for
    the branch).
    """
    u1 = 1.0 - gen.random(n)
    u2 = gen.random(n)
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    y = z * z
    x = 1.0 + (y - np.sqrt(4.0 * beta * y + y * y)) / (2.0 * beta)
    u3 = gen.random(n)
    keep = u3 * (1.0 + x) <= 1.0
    x = np.where(keep, x, 1.0 / x)
    return np.log(x)


def neumaier_sum(values: np.ndarray) -> float:
    """Compensated sum; values may spread over many orders of magnitude."""
    return math.fsum(values)


def vrjp_walk(
    gen: np.random.Generator,
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    start: int,
    reinforced: bool,
    max_jumps: int,
    horizon: float,
    hit_mask: np.ndarray | None,
    record: bool,
    discount_h: float,
    discount_target: int,
):
    """Event-driven jump-process loop.

    With ``reinforced`` the jump rate along edge (x, y) is w_xy * (1 + L^y)
    where L^y is the accumulated local time at the target; otherwise rates
    are the constant w_xy (Markov walk in a fixed environment).  Rates are
    constant between jumps, so each event costs one exponential holding
    time plus one categorical draw.

    Returns (local_times, jumps, t_end, rec_v, rec_t, discounted, reason).
    ``rec_v[k]`` is the vertex departed at time ``rec_t[k]``; the final
    occupied vertex is appended to ``rec_v`` without a departure time.
    ``discounted`` accumulates  (e^{-h t0} - e^{-h t1})/h  over the visit
    intervals [t0, t1) spent at ``discount_target`` (0.0 if disabled).
    """
    n = len(indptr) - 1
    local = np.zeros(n)
    t = 0.0
    x = int(start)
    jumps = 0
    disc = 0.0
    rec_v: list[int] = []
    rec_t: list[float] = []
    reason = STOP_JUMPS
    while True:
        lo, hi = indptr[x], indptr[x + 1]
        nbr = indices[lo:hi]
        if reinforced:
            rates = weights[lo:hi] * (1.0 + local[nbr])
        else:
            rates = weights[lo:hi]
        total = float(np.sum(rates))
        if total > 0.0:
            u = 1.0 - gen.random()
            dt = -math.log(u) / total
        else:  # isolated vertex: only a time horizon can stop the walk
            if not math.isfinite(horizon):
                raise ValueError("walk stuck at a vertex with zero total rate and no horizon")
            dt = math.inf
        if math.isfinite(horizon) and t + dt >= horizon:
            dt = horizon - t
            local[x] += dt
            if discount_h > 0.0 and x == discount_target:
                disc += (math.exp(-discount_h * t) - math.exp(-discount_h * (t + dt))) / discount_h
            t = horizon
            reason = STOP_HORIZON
            break
        if discount_h > 0.0 and x == discount_target:
            disc += (math.exp(-discount_h * t) - math.exp(-discount_h * (t + dt))) / discount_h
        t += dt
        local[x] += dt
        v = gen.random() * total
        acc = 0.0
        k = lo
        for k in range(lo, hi):
            acc += rates[k - lo]
            if acc >= v:
                break
        target = int(indices[k])
        if record:
            rec_v.append(x)
            rec_t.append(t)
        jumps += 1
        x = target
        if hit_mask is not None and hit_mask[x]:
            reason = STOP_HIT
            break
        if jumps >= max_jumps:
            reason = STOP_JUMPS
            break
    if record:
        rec_v.append(x)
    return (
        local,
        jumps,
        t,
        np.asarray(rec_v, dtype=np.int64),
        np.asarray(rec_t, dtype=np.float64),
        disc,
        reason,
    )
