"""Exact computations for square-tiled surfaces (origamis).

SL(2,Z)-orbits and Veech groups, relative/absolute homology, the
Kontsevich-Zorich monodromy of the Teichmueller curve, and re-checkable
certificates (Zariski density, ping-pong free products, unipotent
root groups, kernel witnesses).
"""

from origami_kz.perm import Permutation, PermutationError
from origami_kz.origami import Origami, OrigamiError

__all__ = ["Permutation", "PermutationError", "Origami", "OrigamiError"]
__version__ = "0.1.0"
