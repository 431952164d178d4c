"""Verify, search for and take limits of packings of Moser's rectangles and squares."""
from .limits import (
    BrickLimit,
    DivergenceError,
    LimitReport,
    PackingSequence,
    brick_limit,
    case1_dim_bound,
    clip_brick,
    extract_convergent_subsequence,
    limit_target_homothet,
    orthant_shift,
)
from .motions import (
    RigidMotion,
    apply,
    compose,
    delta_for_point,
    distance,
    invert,
    lipschitz_constant,
    project_to_orthogonal,
)
from .packers import CapacityError, pack_moser_rectangles, pack_moser_squares, shrink_search
from .shapes import (
    Ball,
    Brick,
    Funnel,
    Homothet,
    Piece,
    PieceCollection,
    clearance,
    collection_area,
    contains_piece,
    homothet_exclusion_index,
    membership,
    moser_collection,
    moser_piece,
)
from .verify import PackingCertificate, VerificationReport, interiors_disjoint, is_tiling, verify_packing

__version__ = "0.1.0"

__all__ = [
    "apply",
    "Ball",
    "Brick",
    "brick_limit",
    "BrickLimit",
    "CapacityError",
    "case1_dim_bound",
    "clearance",
    "clip_brick",
    "collection_area",
    "compose",
    "contains_piece",
    "delta_for_point",
    "distance",
    "DivergenceError",
    "extract_convergent_subsequence",
    "Funnel",
    "Homothet",
    "homothet_exclusion_index",
    "interiors_disjoint",
    "invert",
    "is_tiling",
    "limit_target_homothet",
    "LimitReport",
    "lipschitz_constant",
    "membership",
    "moser_collection",
    "moser_piece",
    "orthant_shift",
    "pack_moser_rectangles",
    "pack_moser_squares",
    "PackingCertificate",
    "PackingSequence",
    "Piece",
    "PieceCollection",
    "project_to_orthogonal",
    "RigidMotion",
    "shrink_search",
    "VerificationReport",
    "verify_packing",
]
