"""
Constants, errors and JSON serialization for the QIM-compatibility toolkit.
"""

from .constants import (
    DEFAULT_TOL, SIMINC_PARAMS, COMPATIBLE_THRESHOLD, WITNESS_TOL,
    get_siminc_params, validate_noise_sizes, validate_tolerance,
)
from .errors import QIMError, ValidationError, ZeroProbabilityError, FormatError, ScoringError

__all__ = [
    'DEFAULT_TOL', 'SIMINC_PARAMS', 'COMPATIBLE_THRESHOLD', 'WITNESS_TOL',
    'get_siminc_params', 'validate_noise_sizes', 'validate_tolerance',
    'QIMError', 'ValidationError', 'ZeroProbabilityError', 'FormatError', 'ScoringError',
]
