"""
Directed hypergraphs describing independent-mechanism structure.

A hypergraph is a node set plus labelled hyperarcs, each with a source set
and a target set; parallel arcs are distinguished only by their labels.
This module converts graphs to hypergraphs, builds the noise-explicit
transform A† and parallel-arc augmentations, detects weakenings, and
computes the coefficient vector whose inner product with an information
profile is the information deficiency.
"""

import itertools
import logging
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from ..utils.constants import ERROR_MESSAGES, NOISE_PREFIX, PARALLEL_ARC_PREFIX
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

# Label of the single noise-to-nodes arc added by dagger().
JOINT_ARC_LABEL = "joint"


def noise_name(label: str) -> str:
    """Name of the noise variable attached to the arc with this label."""
    return f"{NOISE_PREFIX}{label}"


class Hyperarc:
    """
    A directed hyperedge: one mechanism from a source set to a target set.
    """

    def __init__(self, label: str, sources: Iterable[str] = (), targets: Iterable[str] = ()):
        """
        Initialize a hyperarc.

        Args:
            label: Identifier, unique within its hypergraph
            sources: Source node names (may be empty)
            targets: Target node names (may be empty)
        """
        if not isinstance(label, str) or not label:
            raise ValidationError("Arc label must be a nonempty string")
        self.label = label
        self.sources: FrozenSet[str] = frozenset(sources)
        self.targets: FrozenSet[str] = frozenset(targets)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hyperarc):
            return NotImplemented
        return (self.label, self.sources, self.targets) == (other.label, other.sources, other.targets)

    def __hash__(self) -> int:
        return hash((self.label, self.sources, self.targets))

    def __repr__(self) -> str:
        src = ",".join(sorted(self.sources)) or "∅"
        tgt = ",".join(sorted(self.targets)) or "∅"
        return f"Hyperarc({self.label!r}: {{{src}}} -> {{{tgt}}})"


class DirectedHypergraph:
    """
    A node set together with a list of labelled hyperarcs.
    """

    def __init__(self, nodes: Iterable[str], arcs: Iterable[Hyperarc] = ()):
        """
        Initialize a hypergraph.

        Args:
            nodes: Node names (order is kept, duplicates dropped)
            arcs: Hyperarcs over those nodes

        Raises:
            ValidationError: On duplicate labels or arcs naming unknown nodes
        """
        self.nodes: Tuple[str, ...] = tuple(dict.fromkeys(nodes))
        self.arcs: Tuple[Hyperarc, ...] = tuple(arcs)

        seen = set()
        for arc in self.arcs:
            if arc.label in seen:
                raise ValidationError(ERROR_MESSAGES['duplicate_arc'].format(label=arc.label))
            seen.add(arc.label)
        unknown = sorted(set().union(*(a.sources | a.targets for a in self.arcs)) - set(self.nodes))
        if unknown:
            raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=unknown))
        self._by_label = {a.label: a for a in self.arcs}

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(a.label for a in self.arcs)

    def arc(self, label: str) -> Hyperarc:
        try:
            return self._by_label[label]
        except KeyError:
            raise ValidationError(ERROR_MESSAGES['unknown_arc'].format(labels=[label])) from None

    def without(self, *labels: str) -> 'DirectedHypergraph':
        """Copy with the named arcs removed."""
        for label in labels:
            self.arc(label)
        return DirectedHypergraph(self.nodes, [a for a in self.arcs if a.label not in labels])

    def with_arcs(self, arcs: Iterable[Hyperarc]) -> 'DirectedHypergraph':
        """Copy with extra arcs appended."""
        return DirectedHypergraph(self.nodes, self.arcs + tuple(arcs))

    def fresh_label(self, prefix: str) -> str:
        """A label starting with prefix that no arc uses yet."""
        for i in itertools.count(1):
            label = f"{prefix}{i}"
            if label not in self._by_label:
                return label

    def __iter__(self) -> Iterator[Hyperarc]:
        return iter(self.arcs)

    def __len__(self) -> int:
        return len(self.arcs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectedHypergraph):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and set(self.arcs) == set(other.arcs)

    def __repr__(self) -> str:
        return f"DirectedHypergraph(nodes={list(self.nodes)}, arcs={list(self.arcs)})"


def from_graph(vertices: Iterable[str], directed_edges: Iterable[Tuple[str, str]] = (),
               undirected_edges: Iterable[Tuple[str, str]] = ()) -> DirectedHypergraph:
    """
    Convert a (mixed) graph into its hypergraph of parent-set mechanisms.

    Each vertex u gets one arc labelled u from all vertices with an edge into
    u to {u}; an undirected edge A−B counts as both A→B and B→A.

    Args:
        vertices: Vertex names
        directed_edges: Pairs (v, u) meaning v → u
        undirected_edges: Pairs (a, b) meaning a − b

    Returns:
        Hypergraph with one arc per vertex

    Raises:
        ValidationError: If an edge names a vertex not in vertices
    """
    vertices = list(dict.fromkeys(vertices))
    directed_edges, undirected_edges = list(directed_edges), list(undirected_edges)
    unknown = sorted({x for edge in directed_edges + undirected_edges for x in edge} - set(vertices))
    if unknown:
        raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=unknown))
    parents: Dict[str, set] = {v: set() for v in vertices}
    for v, u in directed_edges:
        parents[u].add(v)
    for a, b in undirected_edges:
        parents[a].add(b)
        parents[b].add(a)
    return DirectedHypergraph(vertices, [Hyperarc(u, parents[u], {u}) for u in vertices])


def from_digraph(graph: nx.DiGraph) -> DirectedHypergraph:
    """Hypergraph of a networkx digraph (one arc per node, labelled by the node)."""
    return from_graph(list(graph.nodes), list(graph.edges))


def as_dag(A: DirectedHypergraph) -> Optional[nx.DiGraph]:
    """
    Recover the dag G with A = A_G, if there is one.

    Returns:
        The dag when every node is the single target of exactly one arc and
        the parent relation is acyclic; None otherwise
    """
    if any(len(a.targets) != 1 for a in A.arcs):
        return None
    targets = [next(iter(a.targets)) for a in A.arcs]
    if sorted(targets) != sorted(A.nodes):
        return None
    graph = nx.DiGraph()
    graph.add_nodes_from(A.nodes)
    for arc, target in zip(A.arcs, targets):
        if target in arc.sources:
            return None
        graph.add_edges_from((s, target) for s in arc.sources)
    return graph if nx.is_directed_acyclic_graph(graph) else None


def enumerate_dags(nodes: Sequence[str]) -> Iterator[nx.DiGraph]:
    """
    Enumerate every labelled dag on the given nodes.

    Exponential in the number of ordered node pairs; intended for at most
    four or five nodes (25 dags on 3 nodes, 543 on 4).
    """
    nodes = list(nodes)
    pairs = [(a, b) for a in nodes for b in nodes if a != b]
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        graph = nx.DiGraph()
        graph.add_nodes_from(nodes)
        graph.add_edges_from(edges)
        if nx.is_directed_acyclic_graph(graph):
            yield graph


def complete_dag(order: Sequence[str]) -> nx.DiGraph:
    """The dag in which every node has all earlier nodes of ``order`` as parents."""
    graph = nx.DiGraph()
    graph.add_nodes_from(order)
    graph.add_edges_from((a, b) for i, b in enumerate(order) for a in order[:i])
    return graph


def dagger(A: DirectedHypergraph) -> DirectedHypergraph:
    """
    Build the noise-explicit hypergraph A†.

    For each arc a, a noise node U__<label> is added together with the arcs
    ∅ → {U_a} (labelled "prior:<label>") and Src a ∪ {U_a} → Tgt a (labelled
    "mech:<label>"); finally one arc "joint" goes from all noise nodes to all
    original nodes. When A has no arcs this leaves the single arc ∅ → nodes.

    Raises:
        ValidationError: If a noise node name collides with an existing node
    """
    noise = [noise_name(a.label) for a in A.arcs]
    for name in noise:
        if name in A.nodes:
            raise ValidationError(ERROR_MESSAGES['node_collision'].format(name=name))

    arcs: List[Hyperarc] = []
    for arc, u in zip(A.arcs, noise):
        arcs.append(Hyperarc(f"prior:{arc.label}", (), {u}))
        arcs.append(Hyperarc(f"mech:{arc.label}", arc.sources | {u}, arc.targets))
    arcs.append(Hyperarc(JOINT_ARC_LABEL, noise, A.nodes))
    return DirectedHypergraph(A.nodes + tuple(noise), arcs)


def add_parallel_arcs(A: DirectedHypergraph, X: Iterable[str], Y: Iterable[str], n: int) -> DirectedHypergraph:
    """
    Augment A with n additional, distinctly labelled arcs from X to Y.

    Args:
        A: Base hypergraph
        X: Source set of the new arcs
        Y: Target set of the new arcs
        n: Number of arcs to add (0 returns an equal hypergraph)
    """
    if n < 0:
        raise ValidationError("Number of parallel arcs must be nonnegative")
    X, Y = frozenset(X), frozenset(Y)
    result = A
    for _ in range(n):
        result = result.with_arcs([Hyperarc(result.fresh_label(PARALLEL_ARC_PREFIX), X, Y)])
    return result


def is_weakening(A: DirectedHypergraph, A_weak: DirectedHypergraph) -> Optional[Dict[str, str]]:
    """
    Find an injective arc map showing that ``A_weak`` is a weakening of A.

    An arc a' may map to an arc a of A when Tgt a' ⊆ Tgt a and Src a' ⊇ Src a.
    The map is found by augmenting-path bipartite matching over arcs sorted
    by label, so the result is deterministic.

    Args:
        A: The stronger hypergraph
        A_weak: Candidate weakening

    Returns:
        Mapping from each arc label of A_weak to an arc label of A, or None
    """
    strong = sorted(A.arcs, key=lambda a: a.label)
    candidates = {
        w.label: [a.label for a in strong if w.targets <= a.targets and w.sources >= a.sources]
        for w in A_weak.arcs
    }
    owner: Dict[str, str] = {}

    def assign(label: str, seen: set) -> bool:
        for target in candidates[label]:
            if target in seen:
                continue
            seen.add(target)
            if target not in owner or assign(owner[target], seen):
                owner[target] = label
                return True
        return False

    for label in sorted(candidates):
        if not assign(label, set()):
            return None
    return {weak: strong_label for strong_label, weak in owner.items()}


class CoefficientVector:
    """
    Integer coefficients v_A over nonempty subsets of variables.

    The inner product with an information profile equals IDef_A.
    """

    def __init__(self, variables: Sequence[str], coeffs: Dict[FrozenSet[str], int]):
        self.variables = tuple(variables)
        self.coeffs = dict(coeffs)

    def __getitem__(self, subset: Iterable[str]) -> int:
        return self.coeffs[frozenset(subset)]

    def dot(self, profile) -> float:
        """Inner product with an InformationProfile."""
        return profile.dot(self.coeffs)

    def as_dict(self) -> Dict[str, int]:
        ordered = sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return {",".join(sorted(w)): c for w, c in ordered}

    def __repr__(self) -> str:
        return f"CoefficientVector({list(self.variables)})"


def coefficient_vector(A: DirectedHypergraph, variables: Sequence[str]) -> CoefficientVector:
    """
    Compute v_A: coeff(W) = −1 + #{a : W ∩ Tgt a ≠ ∅ and W ∩ Src a = ∅}.

    Args:
        A: Hypergraph whose arcs mention only ``variables``
        variables: Ordered variable names indexing the subsets

    Raises:
        ValidationError: If an arc mentions a variable outside ``variables``
    """
    variables = tuple(variables)
    mentioned = set().union(*(a.sources | a.targets for a in A.arcs))
    unknown = sorted(mentioned - set(variables))
    if unknown:
        raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=unknown))

    coeffs: Dict[FrozenSet[str], int] = {}
    n = len(variables)
    for mask in range(1, 1 << n):
        w = frozenset(variables[i] for i in range(n) if mask >> i & 1)
        coeffs[w] = -1 + sum(1 for a in A.arcs if w & a.targets and not w & a.sources)
    return CoefficientVector(variables, coeffs)
