"""
Constants for QIM-compatibility scoring and decision procedures.

This module contains the numerical tolerances, optimizer parameter sets,
verdict thresholds and exit codes shared by the library and the CLI.
"""

import numbers

from .errors import ValidationError

# Probability tolerances
DEFAULT_TOL = 1e-9   # Cutoff below which a probability counts as zero
SUM_TOL = 1e-9       # Allowed deviation of a distribution's total mass from 1
ROW_TOL = 1e-9       # Allowed deviation of a cpd row from 1
NOISE_SUM_TOL = 1e-12  # Allowed deviation of a model's noise distribution from 1

# SIMInc verdict bands (bits)
COMPATIBLE_THRESHOLD = 1e-6   # Below: compatible (after witness verification)
UNKNOWN_THRESHOLD = 1e-3      # Between the two thresholds: unknown
WITNESS_TOL = 1e-6            # Tolerance for verifying optimizer-produced witnesses
BOUND_SLACK = 1e-6            # Slack allowed in the IDef <= SIMInc sanity assertion

# SIMInc optimizer parameter set
SIMINC_PARAMS = {
    'restarts': 16,              # Independent randomized restarts
    'max_iters': 2000,           # Iteration cap per restart
    'step_size': 0.5,            # Initial exponentiated-gradient step
    'step_decay': 'sqrt',        # 'sqrt' -> step/sqrt(t), 'none' -> constant
    'patience': 50,              # Window for the convergence test
    'improvement_tol': 1e-9,     # Bits of improvement required over the window
    'init_concentration': 1.0,   # Dirichlet concentration of random starts
    'max_table_entries': 2 ** 21,  # Cap on support rows x joint noise settings
    'seed': 0,
}

# Exact-case search limits for decide_general
MAX_EXACT_NODES = 4   # Enumerate every dag up to this many nodes
MAX_ORDER_NODES = 6   # Try complete dags along every ordering up to this many
MAX_RESPONSE_FUNCTIONS = 2 ** 20  # Largest function space derandomize_cpd enumerates

# Naming
NOISE_PREFIX = "U__"
PARALLEL_ARC_PREFIX = "par"

# CLI exit codes
EXIT_COMPATIBLE = 0
EXIT_INCOMPATIBLE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64      # Malformed input
EXIT_DATAERR = 65    # Numeric validation failure

# Error messages
ERROR_MESSAGES = {
    'unknown_variable': "Unknown variable name(s): {names}",
    'duplicate_variable': "Duplicate variable name(s): {names}",
    'shared_variable': "Distributions share variable name(s): {names}",
    'bad_sum': "Probabilities sum to {total!r}, expected 1 within {tol}",
    'negative_prob': "Probabilities must be nonnegative",
    'bad_length': "Expected {expected} probabilities, got {got}",
    'zero_event': "Cannot condition on an event of probability zero",
    'bad_noise_size': "Noise-space size for arc {label!r} must be at least 1, got {size}",
    'node_collision': "Node name {name!r} already exists in the hypergraph",
    'unknown_arc': "Unknown arc label(s): {labels}",
    'duplicate_arc': "Duplicate arc label: {label!r}",
    'cyclic_graph': "Graph contains a cycle",
    'arc_map_mismatch': "Witness arc map does not match the hypergraph arcs: {detail}",
    'side_condition': "Side condition of clause ({clause}) does not hold: {detail}",
    'overlapping_targets': (
        "Arcs {first!r} and {second!r} share targets; no single-equation-per-variable "
        "model exists, keep the generalized form"
    ),
    'bad_intervention': "Cannot intervene on {name!r}: {detail}",
    'not_unique': "Context {context} has {count} solutions; arising distribution needs exactly one",
    'bound_violation': "SIMInc value {value:.3e} fell below IDef {idef:.3e}",
    'bad_param': "SIMInc parameter {name!r} must be an integer of at least {minimum}, got {value!r}",
}


def get_siminc_params(**overrides) -> dict:
    """
    Get SIMInc optimizer parameters with optional overrides.

    Args:
        **overrides: Parameter values replacing the defaults

    Returns:
        Dictionary containing all optimizer parameters

    Raises:
        ValueError: If an override names an unknown parameter
        ValidationError: If restarts is below 0 or max_iters below 1
    """
    unknown = set(overrides) - set(SIMINC_PARAMS)
    if unknown:
        raise ValueError(f"Unknown SIMInc parameter(s): {sorted(unknown)}")
    params = SIMINC_PARAMS.copy()
    params.update({k: v for k, v in overrides.items() if v is not None})
    for name, minimum in (('restarts', 0), ('max_iters', 1)):
        value = params[name]
        if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
            raise ValidationError(ERROR_MESSAGES['bad_param'].format(name=name, minimum=minimum, value=value))
    return params


def validate_noise_sizes(sizes: dict) -> bool:
    """
    Validate per-arc noise-space sizes.

    Args:
        sizes: Mapping from arc label to requested noise-space size

    Returns:
        True if every size is an integer of at least 1, False otherwise
    """
    return all(isinstance(k, numbers.Integral) and k >= 1 for k in sizes.values())


def validate_tolerance(tol: float) -> bool:
    """Check that a tolerance is a finite nonnegative number below 1."""
    return 0.0 <= tol < 1.0
