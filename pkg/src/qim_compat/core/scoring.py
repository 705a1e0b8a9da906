"""
Entropy scores for QIM-compatibility.

IDef measures how many more bits the arcs of a hypergraph "explain" than
the distribution contains; a positive value certifies incompatibility.
SIMInc searches over extensions with one noise variable per arc and is zero
exactly when a witness exists. The noise-explicit transform A† sandwiches
SIMInc between the two IDef values.
"""

import concurrent.futures
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .optimizer import SimincObjective, SimplexMirrorDescent
from .witness import Witness
from ..graphs.hypergraph import DirectedHypergraph, dagger, noise_name
from ..prob.distributions import JointDistribution, contingency, marginal
from ..prob.information import conditional_entropy, entropy
from ..utils.constants import (
    BOUND_SLACK, COMPATIBLE_THRESHOLD, DEFAULT_TOL, ERROR_MESSAGES, SUM_TOL, UNKNOWN_THRESHOLD,
    get_siminc_params, validate_noise_sizes, validate_tolerance,
)
from ..utils.errors import ScoringError, ValidationError

logger = logging.getLogger(__name__)


def _check_arcs(A: DirectedHypergraph, d: JointDistribution) -> None:
    mentioned = set().union(*(a.sources | a.targets for a in A.arcs))
    unknown = sorted(mentioned - set(d.names))
    if unknown:
        raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=unknown))


def idef(A: DirectedHypergraph, d: JointDistribution) -> float:
    """
    Information deficiency IDef_A(d) = −H(all) + Σ_a H(Tgt a | Src a).

    Args:
        A: Hypergraph whose arcs mention only variables of d
        d: Joint distribution

    Returns:
        IDef in bits (may be negative)
    """
    _check_arcs(A, d)
    total = -entropy(d)
    for arc in A.arcs:
        total += conditional_entropy(d, sorted(arc.targets), sorted(arc.sources))
    return total


def certify_incompatible(A: DirectedHypergraph, d: JointDistribution, tol: float = DEFAULT_TOL) -> bool:
    """
    Sound incompatibility test: True only when IDef_A(d) > tol.

    A False answer is inconclusive.
    """
    return idef(A, d) > tol


@dataclass
class SimincOptions:
    """
    Parameters of one SIMInc search; defaults come from SIMINC_PARAMS.

    ``tol`` is the value at which a restart stops early and below which
    decide_general accepts the candidate for verification.
    """

    restarts: int = 16
    max_iters: int = 2000
    step_size: float = 0.5
    step_decay: str = 'sqrt'
    patience: int = 50
    improvement_tol: float = 1e-9
    init_concentration: float = 1.0
    max_table_entries: int = 2 ** 21
    seed: int = 0
    noise_sizes: Optional[Dict[str, int]] = None
    tol: float = COMPATIBLE_THRESHOLD
    workers: int = 1

    @classmethod
    def from_params(cls, noise_sizes: Optional[Dict[str, int]] = None,
                    tol: Optional[float] = None, workers: int = 1, **overrides) -> 'SimincOptions':
        """Build options from the configured defaults plus overrides (None keeps a default)."""
        params = get_siminc_params(**overrides)
        options = cls(**params, noise_sizes=noise_sizes, workers=workers)
        if tol is not None:
            if not validate_tolerance(tol):
                raise ValidationError(f"Tolerance must lie in [0, 1), got {tol!r}")
            options.tol = tol
        return options


@dataclass
class SimincResult:
    """Best extension found by a SIMInc search and its objective breakdown."""

    value: float
    witness_candidate: JointDistribution
    restarts_used: int
    converged: bool
    independence_gap: float
    arc_terms: Dict[str, float]
    noise_sizes: Dict[str, int]
    seed: int
    idef_bits: float
    upper_bound: float
    base_vars: Sequence[str] = field(default_factory=tuple)
    tol: float = COMPATIBLE_THRESHOLD
    iterations: int = 0

    @property
    def band(self) -> str:
        """"compatible" at or below tol, "near" below UNKNOWN_THRESHOLD, otherwise "far"."""
        if self.value <= self.tol:
            return 'compatible'
        if self.value < UNKNOWN_THRESHOLD:
            return 'near'
        return 'far'

    @property
    def breakdown(self) -> Dict[str, object]:
        return {'independence_gap': self.independence_gap, 'arcs': dict(self.arc_terms)}

    def witness(self) -> Witness:
        """The candidate packaged as a Witness (noise of arc a is U__<a>)."""
        arc_map = {label: noise_name(label) for label in self.arc_terms}
        return Witness(self.witness_candidate, arc_map, self.base_vars)


def default_noise_sizes(A: DirectedHypergraph, d: JointDistribution) -> Dict[str, int]:
    """
    Response-variable sizes |V(Tgt a)|^|V(Src a)| for every arc.

    Returned as exact Python integers, which may be very large.
    """
    sizes = {}
    for arc in A.arcs:
        n_tgt = int(np.prod([d.variable(t).size for t in arc.targets], dtype=object) or 1)
        n_src = int(np.prod([d.variable(s).size for s in arc.sources], dtype=object) or 1)
        sizes[arc.label] = n_tgt ** n_src
    return sizes


def supported_noise_sizes(A: DirectedHypergraph, d: JointDistribution) -> Dict[str, int]:
    """
    Response-variable sizes restricted to the support of d.

    Arc a gets Π_s |{t : d(Src a = s, Tgt a = t) > 0}| over the source
    settings s of positive probability. Replacing each U_a of a witness by
    the function it induces on supported settings gives a witness with noise
    in this smaller space, so the infimum is still attained.
    """
    sizes = {}
    for arc in A.arcs:
        table = contingency(d, sorted(arc.sources), sorted(arc.targets))
        rows = table[table.sum(axis=1) > 0.0]
        sizes[arc.label] = int(np.prod(np.count_nonzero(rows > 0.0, axis=1), dtype=object))
    return sizes


def fit_noise_sizes(sizes: Dict[str, int], rows: int, max_entries: int) -> Dict[str, int]:
    """
    Halve the largest noise spaces until rows × Π k_a fits in max_entries.

    Args:
        sizes: Requested size per arc label
        rows: Number of supported settings of the model variables
        max_entries: Table-size cap
    """
    fitted = dict(sizes)
    while fitted and rows * int(np.prod(list(fitted.values()), dtype=object)) > max_entries:
        label = max(fitted, key=lambda k: (fitted[k], k))
        if fitted[label] == 1:
            break
        fitted[label] = max(1, fitted[label] // 2)
    if fitted != sizes:
        logger.warning("Noise spaces reduced from %s to %s to fit %d table entries",
                       sizes, fitted, max_entries)
    return fitted


def _resolve_sizes(A: DirectedHypergraph, d: JointDistribution, options: SimincOptions,
                   initial: Sequence[JointDistribution], rows: int) -> Dict[str, int]:
    if options.noise_sizes:
        sizes = supported_noise_sizes(A, d)
        unknown = sorted(set(options.noise_sizes) - set(sizes))
        if unknown:
            raise ValidationError(ERROR_MESSAGES['unknown_arc'].format(labels=unknown))
        sizes = fit_noise_sizes(sizes, rows, options.max_table_entries)
        sizes.update(options.noise_sizes)
    elif initial:
        sizes = {a.label: initial[0].variable(noise_name(a.label)).size for a in A.arcs}
    else:
        sizes = fit_noise_sizes(supported_noise_sizes(A, d), rows, options.max_table_entries)
    if not validate_noise_sizes(sizes):
        label, size = next((l, s) for l, s in sizes.items() if not validate_noise_sizes({l: s}))
        raise ValidationError(ERROR_MESSAGES['bad_noise_size'].format(label=label, size=size))
    return {label: int(size) for label, size in sizes.items()}


def siminc(A: DirectedHypergraph, d: JointDistribution, options: Optional[SimincOptions] = None,
           initial: Sequence[JointDistribution] = (), **overrides) -> SimincResult:
    """
    Locally minimize the SIMInc objective over extensions of d.

    Starts from every extension in ``initial`` and then from
    ``options.restarts`` Dirichlet-random conditional tables, keeping the
    best local minimum. Noise spaces default to the response functions on
    the support of d. A restart stops once its value is at most
    ``options.tol``.

    Args:
        A: Hypergraph whose arcs mention only variables of d
        d: Distribution to extend
        options: Search parameters (defaults from SIMINC_PARAMS)
        initial: Warm-start extensions with noise variables U__<label>
        **overrides: Shorthand for SimincOptions.from_params(...) fields

    Returns:
        SimincResult for the best restart

    Raises:
        ValidationError: On a noise-space size below 1 or unknown variables
        ScoringError: If the value found falls below IDef by more than the slack
    """
    _check_arcs(A, d)
    if options is None:
        options = SimincOptions.from_params(**overrides)
    elif overrides:
        raise ValidationError("Pass either options or keyword overrides, not both")

    rows = int(np.count_nonzero(d.probs > 0.0))
    sizes = _resolve_sizes(A, d, options, initial, rows)
    objective = SimincObjective(A, d, sizes)
    descent = SimplexMirrorDescent(objective, options.step_size, options.step_decay,
                                   options.max_iters, options.patience, options.improvement_tol,
                                   target=options.tol)

    starts = [lambda nu=nu: objective.start_from(nu) for nu in initial]
    for child in np.random.SeedSequence(options.seed).spawn(options.restarts):
        starts.append(lambda child=child: objective.random_start(np.random.default_rng(child),
                                                                 options.init_concentration))

    def run(start):
        return descent.optimize(start())

    if options.workers > 1 and len(starts) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=options.workers) as pool:
            outcomes = list(pool.map(run, starts))
    else:
        outcomes = [run(start) for start in starts]
    if not outcomes:
        raise ValidationError("SIMInc needs at least one restart or initial extension")

    for i, (_, value, converged, iters) in enumerate(outcomes):
        logger.debug("SIMInc restart %d: %.3e bits after %d iterations (converged=%s)",
                     i, value, iters, converged)
    # Ties go to the earliest start so results do not depend on thread timing.
    best = min(range(len(outcomes)), key=lambda i: (outcomes[i][1], i))
    theta, value, converged, iterations = outcomes[best]
    gap, arcs = objective.breakdown(theta)
    candidate = objective.extension(theta)

    lower = idef(A, d)
    if value < lower - BOUND_SLACK:
        raise ScoringError(ERROR_MESSAGES['bound_violation'].format(value=value, idef=lower))
    upper = siminc_upper_bound(A, d, candidate)
    if upper < value - BOUND_SLACK:
        raise ScoringError(f"IDef of the noise-explicit hypergraph {upper:.3e} fell below SIMInc {value:.3e}")

    logger.info("SIMInc best %.3e bits over %d starts (IDef %.3e)", value, len(outcomes), lower)
    return SimincResult(
        value=value,
        witness_candidate=candidate,
        restarts_used=len(outcomes),
        converged=converged,
        independence_gap=gap,
        arc_terms=arcs,
        noise_sizes=sizes,
        seed=options.seed,
        idef_bits=lower,
        upper_bound=upper,
        base_vars=d.names,
        tol=options.tol,
        iterations=iterations,
    )


def siminc_upper_bound(A: DirectedHypergraph, d: JointDistribution, nu: JointDistribution) -> float:
    """
    Upper bound IDef_{A†}(ν) on SIMInc_A(d) for an extension ν.

    The noise-explicit hypergraph is built over all variables of d, so for
    any ν this equals the SIMInc objective evaluated at ν.

    Args:
        A: Hypergraph
        d: Distribution over the model variables
        nu: Extension of d with one noise variable U__<label> per arc

    Returns:
        Bound in bits, never below idef(A, d) up to rounding

    Raises:
        ValidationError: If ν does not extend d within SUM_TOL
        ScoringError: If the bound falls below IDef_A(d)
    """
    _check_arcs(A, d)
    if not marginal(nu, d.names).allclose(d, SUM_TOL):
        raise ValidationError("Extension does not reproduce the distribution on the model variables")
    full = DirectedHypergraph(d.names, A.arcs)
    names: List[str] = list(d.names) + [noise_name(label) for label in A.labels]
    bound = idef(dagger(full), marginal(nu, names))
    lower = idef(A, d)
    if bound < lower - BOUND_SLACK:
        raise ScoringError(ERROR_MESSAGES['bound_violation'].format(value=bound, idef=lower))
    return bound
