"""Counter-based random number streams.

Every stochastic routine in this package draws from an :class:`RngStream`,
a thin wrapper around numpy's Philox counter-based generator keyed by a
``(seed, stream)`` pair.  Distinct pairs give statistically independent
streams; the same pair always reproduces the identical sequence, no matter
which worker or thread consumes it.  Substreams are derived by hashing
integer labels into the stream word, so e.g. replicate ``r`` of experiment
``e`` owns the stream ``mix(mix(base, e), r)`` regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer; bijective scramble of a 64-bit word."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngStream:
    """A reproducible, splittable random stream identified by (seed, stream)."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", self.seed & _MASK64)
        object.__setattr__(self, "stream", self.stream & _MASK64)

    def generator(self) -> np.random.Generator:
        """Fresh numpy Generator positioned at the start of this stream."""
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, *labels: int) -> "RngStream":
        """Derive a substream from integer labels (order matters)."""
        s = self.stream
        for lab in labels:
            s = mix64(s + _GOLDEN * ((lab & _MASK64) + 1))
        return RngStream(self.seed, s)
