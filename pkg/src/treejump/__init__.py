"""treejump: reinforced jump processes, branching random walks and
conductance networks on rooted regular trees, with exact superintegration
checks on tiny graphs and a reproducible experiment harness."""

from .backend import BACKEND
from .rng import RngStream

__version__ = "0.1.0"

__all__ = ["BACKEND", "RngStream", "__version__"]
