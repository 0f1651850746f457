"""Positive trace-preserving maps on M_n built from affine contractions of the unit ball."""

from .ballmaps import (
    AffineBallMap,
    ExtremePointParams,
    ball_image_max,
    convex_combine,
    extreme_point,
    is_contraction,
    sample_dm,
)
from .bloch import (
    BlochVector,
    GellMannBasis,
    HermitianMatrix,
    Region,
    RegionKind,
    bloch_decode,
    bloch_encode,
    build_basis,
    epsilon_p,
    region_contains,
)
from .maps import (
    DynamicalMap,
    affine_action_extract,
    apply_map,
    build_phi,
    choi_matrix,
    class_membership,
    compose,
    convex_combine_maps,
    identity_map,
    transpose_map,
)

__version__ = "0.1.0"
