"""Divergence-free RBF interpolation on the sphere, direct and RBF-QR.

Point sets are (n, 3) float arrays of unit vectors; fields are (n, 3) arrays
of tangent vectors at those points.
"""

from ._divrbf import *  # noqa: F401,F403
from ._divrbf import DivrbfError  # noqa: F401
