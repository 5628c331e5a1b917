"""Explicit hitting sets and PIT for multilinear depth-3, depth-4 and regular formulas."""

__version__ = "0.1.0"

from .algebra import DEFAULT_FIELD, DEFAULT_PRIME, Field, SparseMultilinearPoly
from .formula import (Depth3Formula, Depth4Formula, Leaf, RegularFormula, delta_far, derive_restrict,
                      expand, make_simple, parse, to_text)
from .hashing import HashFamily, HashFn, check_hash_conditions, find_good_hash
from .hitting import (HittingSet, depth3_hs, depth4_hs, lift, pit_blackbox, read_points, regular_hs,
                      small_support_hs, write_points)
from .lowerbound import vanishing_multilinear, verify_certificate
from .oracle import build_corpus, grid_pit
from .reduce import reduce_depth3, reduce_depth4, regular_to_depth4
from .roabp import Roabp, from_sparse_products

__all__ = [
    "DEFAULT_FIELD", "DEFAULT_PRIME", "Field", "SparseMultilinearPoly",
    "Depth3Formula", "Depth4Formula", "Leaf", "RegularFormula", "delta_far", "derive_restrict",
    "expand", "make_simple", "parse", "to_text",
    "HashFamily", "HashFn", "check_hash_conditions", "find_good_hash",
    "HittingSet", "depth3_hs", "depth4_hs", "lift", "pit_blackbox", "read_points", "regular_hs",
    "small_support_hs", "write_points",
    "vanishing_multilinear", "verify_certificate",
    "build_corpus", "grid_pit",
    "reduce_depth3", "reduce_depth4", "regular_to_depth4",
    "Roabp", "from_sparse_products",
]
