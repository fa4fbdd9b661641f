"""Quasimap SYZ mirrors of toric Calabi-Yau manifolds.

The package computes, from a smooth semi-projective toric Calabi-Yau fan
with Kähler data, the mirror family ``uv = sum_i C_i z^{w_i}``, the Gross
fibration base with its discriminant, Blaschke quasidisks with their areas
and the quasimap superpotential, and checks the wall-crossing gluing.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .fan import (  # noqa: F401
    FanData,
    KahlerData,
    MomentPolytope,
    calabi_yau_vector,
    certify_semiprojective,
    codim2_faces,
    interior_point,
    is_smooth,
    kahler_data,
)
from .fanfile import load_fan, parse_fan_file, serialize_fan_file  # noqa: F401
from .laurent import LaurentPolynomial, QPoly, parse_laurent  # noqa: F401
from .mirror import MirrorFamily, embed_into_cm_mirror, solve_coefficients, verify_constraints  # noqa: F401
