"""Reduced Ricci flow of O(2) x O(n-1)-invariant metrics on S^n."""

from ._warpflow import (
    HYPERSAUSAGE_TIME_SCALE,
    ConfigError,
    DataError,
    Grid,
    NumericError,
    Profile,
    curvatures,
    decode_profile,
    encode_profile,
    evolve,
    hypersausage_exact,
    parse_config,
    round_sphere,
    sausage_slice,
    summary,
    summary_header,
    validate_smoothness,
)

__all__ = [
    "HYPERSAUSAGE_TIME_SCALE",
    "ConfigError",
    "DataError",
    "Grid",
    "NumericError",
    "Profile",
    "curvatures",
    "decode_profile",
    "encode_profile",
    "evolve",
    "hypersausage_exact",
    "parse_config",
    "round_sphere",
    "sausage_slice",
    "summary",
    "summary_header",
    "validate_smoothness",
]
