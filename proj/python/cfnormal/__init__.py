"""Continued-fraction normal numbers built from concatenated rational expansions."""

from ._core import (
    CFOverflowError,
    InsufficientDigits,
    NotMemberError,
    ResourceError,
    __version__,
    census,
    concat,
    constants,
    convergents,
    count,
    cylinder,
    estimate_deviation_set,
    evaluate,
    expand,
    gauss_map,
    gauss_measure,
    in_cylinder,
    index_of,
    is_normal,
    is_prime,
    lebesgue_measure,
    mirror,
    normality_report,
    pi_prime,
    pi_prime_joint,
    rational_at,
    stream,
)

__all__ = [
    "CFOverflowError",
    "InsufficientDigits",
    "NotMemberError",
    "ResourceError",
    "census",
    "concat",
    "constants",
    "convergents",
    "count",
    "cylinder",
    "estimate_deviation_set",
    "evaluate",
    "expand",
    "gauss_map",
    "gauss_measure",
    "in_cylinder",
    "index_of",
    "is_normal",
    "is_prime",
    "lebesgue_measure",
    "mirror",
    "normality_report",
    "pi_prime",
    "pi_prime_joint",
    "rational_at",
    "stream",
]
