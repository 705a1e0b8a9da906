"""
Deciding whether a distribution is QIM-compatible with a hypergraph.

The decision is three-valued. Exact answers come from the dag case
(conditional independencies of the Bayesian network), from reductions for
parallel arcs, and from weakenings of dags; a positive information
deficiency certifies incompatibility; otherwise a SIMInc search may find a
witness. Every Compatible verdict carries a witness that has been verified.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .causal import Equation, GRPSEM, derandomize_cpd, sem_to_witness
from .scoring import SimincOptions, SimincResult, idef, siminc
from .witness import Witness
from ..graphs.hypergraph import (
    DirectedHypergraph, Hyperarc, add_parallel_arcs, as_dag, complete_dag, enumerate_dags, from_digraph,
    is_weakening, noise_name,
)
from ..prob.distributions import (
    JointDistribution, Variable, check_ci, check_determines, contingency, marginal, product,
)
from ..prob.information import independence_gap
from ..utils.constants import (
    DEFAULT_TOL, ERROR_MESSAGES, MAX_EXACT_NODES, MAX_ORDER_NODES,
    WITNESS_TOL,
)
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

COMPATIBLE = "compatible"
INCOMPATIBLE = "incompatible"
UNKNOWN = "unknown"

# Names of the exact characterizations cited by Incompatible verdicts.
CLAUSE_DAG = "dag-independencies"
CLAUSE_DAG_PLUS_ARC = "dag-plus-arc-determination"
CLAUSE_TWO_ARCS = "two-parallel-arcs-determination"


@dataclass
class VerificationReport:
    """Named results of the three witness conditions."""

    marginal_ok: bool
    marginal_error: float
    independence_ok: bool
    independence_gap: float
    determination: Dict[str, bool] = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return self.marginal_ok and self.independence_ok and all(self.determination.values())

    @property
    def failed_arcs(self) -> List[str]:
        return [label for label, ok in self.determination.items() if not ok]

    def as_dict(self) -> Dict[str, object]:
        return {
            'passed': self.passed,
            'tol': self.tol,
            'marginal': {'ok': self.marginal_ok, 'max_abs_error': self.marginal_error},
            'independence': {'ok': self.independence_ok, 'gap_bits': self.independence_gap},
            'determination': dict(self.determination),
        }


@dataclass
class CompatVerdict:
    """
    Three-valued answer of decide_general.

    ``certificate`` describes an Incompatible verdict: either
    {"kind": "idef", "bits": ...} or {"kind": "exact", "clause": ..., "detail": ...}.
    """

    status: str
    witness: Optional[Witness] = None
    certificate: Optional[Dict[str, object]] = None
    siminc: Optional[SimincResult] = None
    stage: str = ""
    report: Optional[VerificationReport] = None

    @property
    def is_compatible(self) -> bool:
        return self.status == COMPATIBLE

    @property
    def is_incompatible(self) -> bool:
        return self.status == INCOMPATIBLE

    @property
    def is_unknown(self) -> bool:
        return self.status == UNKNOWN


def _check_arc_map(A: DirectedHypergraph, w: Witness) -> None:
    if set(w.arc_map) != set(A.labels):
        raise ValidationError(ERROR_MESSAGES['arc_map_mismatch'].format(
            detail=f"arcs {sorted(A.labels)} vs witness {sorted(w.arc_map)}"))


def verify_witness(mu: JointDistribution, A: DirectedHypergraph, w: Witness,
                   tol: float = DEFAULT_TOL) -> VerificationReport:
    """
    Check the three witness conditions.

    (a) the marginal of w on mu's variables equals mu within tol (max abs);
    (b) the noise variables are mutually independent, D(w(U) || Π w(U_a)) <= tol;
    (c) Src a ∪ {U_a} determines Tgt a under w, for every arc.

    Raises:
        ValidationError: If w lacks a variable of mu or its arc map does not fit A
    """
    missing = sorted(set(mu.names) - set(w.base_vars))
    if missing:
        raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=missing))
    _check_arc_map(A, w)

    base = marginal(w.joint, mu.names)
    if base.variables == mu.variables:
        error = float(np.max(np.abs(base.probs - mu.probs), initial=0.0))
    else:
        error = float('inf')
    gap = independence_gap(w.joint, [w.arc_map[label] for label in A.labels])

    determination = {}
    for arc in A.arcs:
        sources = sorted(arc.sources) + [w.arc_map[arc.label]]
        determination[arc.label] = check_determines(w.joint, sources, sorted(arc.targets), tol)

    report = VerificationReport(error <= tol, error, gap <= tol, gap, determination, tol)
    if not report.passed:
        logger.info("Witness rejected: marginal %.2e, independence %.2e, failing arcs %s",
                    error, gap, report.failed_arcs)
    return report


def _as_digraph(G: Union[nx.DiGraph, DirectedHypergraph]) -> nx.DiGraph:
    if isinstance(G, DirectedHypergraph):
        graph = as_dag(G)
        if graph is None:
            raise ValidationError(ERROR_MESSAGES['cyclic_graph'])
        return graph
    if not nx.is_directed_acyclic_graph(G):
        raise ValidationError(ERROR_MESSAGES['cyclic_graph'])
    return G


def _ordered(names: Iterable[str], mu: JointDistribution) -> List[str]:
    order = {n: i for i, n in enumerate(mu.names)}
    return sorted(names, key=order.__getitem__)


def bn_failures(G: Union[nx.DiGraph, DirectedHypergraph], mu: JointDistribution,
                tol: float = DEFAULT_TOL) -> List[str]:
    """Vertices v whose local independence v ⫫ nondescendants | parents fails."""
    graph = _as_digraph(G)
    failures = []
    for v in _ordered(graph.nodes, mu):
        parents = set(graph.predecessors(v))
        others = set(graph.nodes) - nx.descendants(graph, v) - parents - {v}
        if others and not check_ci(mu, [v], _ordered(others, mu), _ordered(parents, mu), tol):
            failures.append(v)
    return failures


def decide_bn(G: Union[nx.DiGraph, DirectedHypergraph], mu: JointDistribution,
              tol: float = DEFAULT_TOL) -> bool:
    """
    Exact compatibility test for the hypergraph of a dag G.

    True iff every vertex is independent of its non-descendants given its
    parents under mu.

    Raises:
        ValidationError: If G has a cycle
    """
    return not bn_failures(G, mu, tol)


def bn_model(G: Union[nx.DiGraph, DirectedHypergraph], mu: JointDistribution) -> GRPSEM:
    """
    Bayesian-network model of mu along G with response-variable noise.

    Noise U__v ranges over functions from parent settings to values of v and
    carries the derandomized cpd mu(v | parents); parent settings of
    probability zero get uniform rows.
    """
    graph = _as_digraph(G)
    if set(graph.nodes) != set(mu.names):
        raise ValidationError("The dag must have exactly the distribution's variables as vertices")

    arcs, noise, equations = [], {}, {}
    for v in mu.names:
        parents = _ordered(graph.predecessors(v), mu)
        target = mu.variable(v)
        table = contingency(mu, parents, [v])
        rows = table.sum(axis=1, keepdims=True)
        cpd = np.where(rows > 0.0, table / np.where(rows > 0.0, rows, 1.0), 1.0 / target.size)
        parent_vars = [mu.variable(p) for p in parents]
        q = derandomize_cpd(cpd, target, parent_vars)
        u = q.variables[0]

        # Value j of U__v is the function whose output at parent setting i is outputs[i, j].
        n_pa = int(np.prod([p.size for p in parent_vars], dtype=np.int64))
        outputs = np.indices((target.size,) * n_pa).reshape(n_pa, u.size)
        equations[v] = Equation(v, parent_vars, u, [target],
                                outputs.reshape(tuple(p.size for p in parent_vars) + (u.size,)))
        noise[v] = q
        arcs.append(Hyperarc(v, parents, [v]))
    return GRPSEM(DirectedHypergraph(mu.names, arcs), mu.variables, noise, equations)


def bn_witness(G: Union[nx.DiGraph, DirectedHypergraph], mu: JointDistribution,
               tol: float = DEFAULT_TOL) -> Witness:
    """
    Constructive witness for a dag whose independencies mu satisfies.

    Raises:
        ValidationError: If decide_bn(G, mu) is false
    """
    failures = bn_failures(G, mu, tol)
    if failures:
        raise ValidationError(ERROR_MESSAGES['side_condition'].format(
            clause=CLAUSE_DAG, detail=f"independence fails at {failures}"))
    return sem_to_witness(bn_model(G, mu))


def transport_witness(A: DirectedHypergraph, A_weak: DirectedHypergraph, mapping: Mapping[str, str],
                      w: Witness) -> Witness:
    """
    Move a witness for A to a weakening of A.

    The noise of each weak arc is the noise of the arc it maps to; noise of
    arcs outside the image is marginalized away.

    Args:
        A: Hypergraph the witness is for
        A_weak: Weakening of A
        mapping: Weak arc label -> arc label of A, as returned by is_weakening
        w: Witness for A

    Raises:
        ValidationError: If the mapping is not an injective weakening map or
            the witness does not fit A
    """
    _check_arc_map(A, w)
    if set(mapping) != set(A_weak.labels):
        raise ValidationError(ERROR_MESSAGES['arc_map_mismatch'].format(
            detail=f"map covers {sorted(mapping)}, weak arcs are {sorted(A_weak.labels)}"))
    images = list(mapping.values())
    if len(set(images)) != len(images):
        raise ValidationError(ERROR_MESSAGES['arc_map_mismatch'].format(detail="map is not injective"))
    for weak_label, label in mapping.items():
        weak, strong = A_weak.arc(weak_label), A.arc(label)
        if not (weak.targets <= strong.targets and weak.sources >= strong.sources):
            raise ValidationError(ERROR_MESSAGES['arc_map_mismatch'].format(
                detail=f"{weak_label!r} does not weaken {label!r}"))

    arc_map = {weak.label: w.arc_map[mapping[weak.label]] for weak in A_weak.arcs}
    kept = set(arc_map.values())
    names = list(w.base_vars) + [n for n in w.joint.names if n in kept]
    return Witness(marginal(w.joint, names), arc_map, w.base_vars)


def _with_constant_arcs(w: Witness, labels: Sequence[str]) -> Witness:
    """Add single-valued noise for arcs whose targets are already determined by their sources."""
    joint = w.joint
    arc_map = dict(w.arc_map)
    taken = set(joint.names)
    for label in labels:
        name = noise_name(label)
        while name in taken:
            name += "_"
        taken.add(name)
        joint = product(joint, JointDistribution([Variable(name, ["0"])], [1.0]))
        arc_map[label] = name
    return Witness(joint, arc_map, w.base_vars)


@dataclass
class ParallelArcReport:
    """Both sides of a parallel-arc characterization, evaluated on one distribution."""

    clause: str
    determines: bool
    base_compatible: Optional[bool]
    augmented: Optional[str] = None

    @property
    def compatible(self) -> Optional[bool]:
        """Compatibility with the augmented hypergraph when the clause is exact."""
        if self.clause == 'a':
            if self.determines and self.base_compatible:
                return True
            return None
        if self.base_compatible is None:
            return None
        return self.determines and self.base_compatible

    @property
    def agree(self) -> bool:
        """False only when the two sides were both computed and contradict each other."""
        if self.augmented is None or self.augmented == UNKNOWN:
            return True
        exact = self.compatible
        return exact is None or exact == (self.augmented == COMPATIBLE)


def _side_condition(A: DirectedHypergraph, X: frozenset) -> bool:
    return not X or any(not a.sources and X <= a.targets for a in A.arcs)


def decide_parallel_func(A: DirectedHypergraph, X: Iterable[str], Y: Iterable[str], n: int,
                         mu: JointDistribution, clause: Optional[str] = None,
                         options: Optional[SimincOptions] = None,
                         check_augmented: bool = False) -> ParallelArcReport:
    """
    Evaluate a characterization of compatibility with A plus n parallel X→Y arcs.

    Clause 'a': determination of Y by X together with compatibility of A
    implies compatibility for every n. Clause 'b' (A is the hypergraph of a
    dag, n = 1) and clause 'c' (X is empty or the target set of an arc with
    no sources contains X, n = 2) are exact: compatibility holds iff X
    determines Y and mu is compatible with A.

    Args:
        A: Base hypergraph
        X, Y: Source and target sets of the added arcs
        n: Number of added arcs
        mu: Distribution
        clause: 'a', 'b' or 'c'; chosen automatically when omitted
        options: SIMInc options for any general decisions needed
        check_augmented: Also run decide_general on the augmented hypergraph

    Raises:
        ValidationError: If the requested clause's side condition does not hold
    """
    X, Y = frozenset(X), frozenset(Y)
    G = as_dag(A)
    side = {'a': True, 'b': G is not None and n == 1, 'c': _side_condition(A, X) and n == 2}
    if clause is None:
        clause = 'b' if side['b'] else 'c' if side['c'] else 'a'
    if clause not in side:
        raise ValidationError(f"Unknown clause {clause!r}")
    if not side[clause]:
        raise ValidationError(ERROR_MESSAGES['side_condition'].format(
            clause=clause, detail=f"n={n}, X={sorted(X)}"))

    determines = check_determines(mu, _ordered(X, mu), _ordered(Y, mu))
    if clause == 'b':
        base = decide_bn(G, mu)
    else:
        verdict = decide_general(A, mu, options)
        base = None if verdict.is_unknown else verdict.is_compatible

    augmented = None
    if check_augmented:
        augmented = decide_general(add_parallel_arcs(A, X, Y, n), mu, options).status
    return ParallelArcReport(clause, determines, base, augmented)


def _verified(mu: JointDistribution, A: DirectedHypergraph, w: Witness, stage: str,
              tol: float = WITNESS_TOL) -> CompatVerdict:
    report = verify_witness(mu, A, w, tol)
    if not report.passed:
        logger.warning("Stage %s produced a witness that failed verification", stage)
        return CompatVerdict(UNKNOWN, stage=stage, report=report)
    logger.info("Compatible via %s", stage)
    return CompatVerdict(COMPATIBLE, witness=w, stage=stage, report=report)


def _exact(clause: str, detail: str, stage: str) -> CompatVerdict:
    logger.info("Incompatible via %s: %s", clause, detail)
    return CompatVerdict(INCOMPATIBLE, certificate={'kind': 'exact', 'clause': clause, 'detail': detail},
                         stage=stage)


def _dag_case(A: DirectedHypergraph, mu: JointDistribution, G: nx.DiGraph) -> CompatVerdict:
    failures = bn_failures(G, mu)
    if failures:
        return _exact(CLAUSE_DAG, f"independence fails at {failures}", 'dag')
    A_G = from_digraph(G)
    w = bn_witness(G, mu)
    return _verified(mu, A, transport_witness(A_G, A, is_weakening(A_G, A), w), 'dag')


def _parallel_pairs(A: DirectedHypergraph) -> Iterator[Tuple[Hyperarc, Hyperarc]]:
    for a, b in itertools.combinations(A.arcs, 2):
        if a.sources == b.sources and a.targets == b.targets:
            yield a, b


def _parallel_case(A: DirectedHypergraph, mu: JointDistribution,
                   options: Optional[SimincOptions]) -> Optional[CompatVerdict]:
    for a, b in _parallel_pairs(A):
        rest = A.without(a.label, b.label)
        if not _side_condition(rest, a.sources):
            continue
        if not check_determines(mu, _ordered(a.sources, mu), _ordered(a.targets, mu)):
            return _exact(CLAUSE_TWO_ARCS, f"{sorted(a.sources)} does not determine {sorted(a.targets)}",
                          'parallel')
        sub = decide_general(rest, mu, options)
        if sub.is_compatible:
            return _verified(mu, A, _with_constant_arcs(sub.witness, [a.label, b.label]), 'parallel')
        if sub.is_incompatible:
            verdict = _exact(CLAUSE_TWO_ARCS, f"rest without {a.label!r}, {b.label!r} is incompatible",
                             'parallel')
            verdict.certificate['rest'] = sub.certificate
            return verdict
        return CompatVerdict(UNKNOWN, siminc=sub.siminc, stage='parallel')

    for e in A.arcs:
        rest = A.without(e.label)
        G = as_dag(rest)
        if G is None:
            continue
        if not check_determines(mu, _ordered(e.sources, mu), _ordered(e.targets, mu)):
            return _exact(CLAUSE_DAG_PLUS_ARC, f"{sorted(e.sources)} does not determine {sorted(e.targets)}",
                          'parallel')
        failures = bn_failures(G, mu)
        if failures:
            return _exact(CLAUSE_DAG_PLUS_ARC, f"independence fails at {failures}", 'parallel')
        A_G = from_digraph(G)
        w = transport_witness(A_G, rest, is_weakening(A_G, rest), bn_witness(G, mu))
        return _verified(mu, A, _with_constant_arcs(w, [e.label]), 'parallel')
    return None


def _witness_entries(G: nx.DiGraph, mu: JointDistribution) -> int:
    n = int(np.prod(mu.shape, dtype=object) or 1)
    for v in G.nodes:
        n_pa = int(np.prod([mu.variable(p).size for p in G.predecessors(v)], dtype=object) or 1)
        n *= mu.variable(v).size ** n_pa
    return n


def _candidate_dags(nodes: Sequence[str]) -> Iterator[nx.DiGraph]:
    if len(nodes) <= MAX_EXACT_NODES:
        yield from enumerate_dags(nodes)
    elif len(nodes) <= MAX_ORDER_NODES:
        for order in itertools.permutations(nodes):
            yield complete_dag(order)


def _weakening_case(A: DirectedHypergraph, mu: JointDistribution, max_entries: int) -> Optional[CompatVerdict]:
    for G in _candidate_dags(list(mu.names)):
        A_G = from_digraph(G)
        mapping = is_weakening(A_G, A)
        if mapping is None or _witness_entries(G, mu) > max_entries:
            continue
        if decide_bn(G, mu):
            logger.debug("Weakening of dag with edges %s", sorted(G.edges))
            return _verified(mu, A, transport_witness(A_G, A, mapping, bn_witness(G, mu)), 'weakening')
    return None


def decide_general(A: DirectedHypergraph, mu: JointDistribution, options: Optional[SimincOptions] = None,
                   initial: Sequence[JointDistribution] = (), tol: float = DEFAULT_TOL) -> CompatVerdict:
    """
    Decide mu ⊨ ◇A as far as the available certificates allow.

    Stages, in order: the dag case; the parallel-arc reductions; the IDef
    certificate (IDef > tol gives Incompatible); a dag that A weakens and
    whose independencies mu satisfies; the SIMInc search, accepted only when
    the value is at most options.tol and the witness verifies. Other search
    results are Unknown, whether "near" (below UNKNOWN_THRESHOLD) or "far".

    Args:
        A: Hypergraph over variables of mu
        mu: Distribution
        options: SIMInc options for the search stage
        initial: Warm-start extensions for the search stage
        tol: Threshold of the IDef certificate

    Returns:
        CompatVerdict; Compatible verdicts carry a verified witness
    """
    mentioned = set().union(*(a.sources | a.targets for a in A.arcs))
    unknown = sorted(mentioned - set(mu.names))
    if unknown:
        raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=unknown))
    A = DirectedHypergraph(mu.names, A.arcs)
    options = options or SimincOptions.from_params()

    if not A.arcs:
        return _verified(mu, A, Witness(mu, {}, mu.names), 'empty')

    G = as_dag(A)
    if G is not None:
        return _dag_case(A, mu, G)

    verdict = _parallel_case(A, mu, options)
    if verdict is not None:
        return verdict

    bits = idef(A, mu)
    if bits > tol:
        logger.info("Incompatible via IDef = %.6f bits", bits)
        return CompatVerdict(INCOMPATIBLE, certificate={'kind': 'idef', 'bits': bits}, stage='idef')

    verdict = _weakening_case(A, mu, options.max_table_entries)
    if verdict is not None and verdict.is_compatible:
        return verdict

    result = siminc(A, mu, options, initial=initial)
    if result.band == 'compatible':
        verdict = _verified(mu, A, result.witness(), 'siminc')
        verdict.siminc = result
        return verdict
    logger.info("Unknown (%s): best SIMInc %.3e bits, IDef %.3e bits", result.band, result.value, bits)
    return CompatVerdict(UNKNOWN, siminc=result, stage='siminc')
