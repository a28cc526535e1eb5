"""Exact laws, samplers and randomness audits for casino shelf shufflers."""

__version__ = "0.1.0"

from .exact import ShelfSpec, distances, shelf_prob, shelf_prob_by_valleys
from .permstat import Permutation, SignedPermutation, valleys
from .machine import SignString, compose, sample_batch

__all__ = [
    "__version__", "ShelfSpec", "distances", "shelf_prob", "shelf_prob_by_valleys",
    "Permutation", "SignedPermutation", "valleys", "SignString", "compose", "sample_batch",
]
