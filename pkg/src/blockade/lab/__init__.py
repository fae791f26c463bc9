"""Ground truth and measurement: generators, brute-force oracles, the exponent harness."""

from .generators import FAMILIES, GeneratorSpec, generate
from .oracles import brute_best_restricted, brute_max_hom, has_copy_by_injections

__all__ = ["FAMILIES", "GeneratorSpec", "generate", "brute_best_restricted", "brute_max_hom",
           "has_copy_by_injections"]
