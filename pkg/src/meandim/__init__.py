"""Exact combinatorial models of covering dimension and its dynamical
descendants: cover order and refinement, nerves and star covers, box covers
of the cube with the fixed-point-freeness witness, staged block subshifts
with prescribed free-coordinate density, finite marker/walk systems, and the
constructive embedding toolkit.

Everything numerical is exact rational unless a float is explicitly labeled
with its tolerance.
"""

from . import blocks, covers, cube, dynsys, embed, linalg, simplicial
from .errors import BudgetError, InputError, MeandimError, PreconditionError

__all__ = [
    "blocks",
    "covers",
    "cube",
    "dynsys",
    "embed",
    "linalg",
    "simplicial",
    "MeandimError",
    "InputError",
    "PreconditionError",
    "BudgetError",
]

__version__ = "0.1.0"
