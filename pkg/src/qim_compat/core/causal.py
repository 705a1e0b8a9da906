"""
Generalized randomized structural equations models.

A model has one equation and one independent noise variable per hyperarc of
its structure. Equations are explicit total lookup tables from settings of
(Src a, U_a) to settings of Tgt a. Cyclic structures are allowed: a context
u may then have zero, one or several solutions, all found by enumeration.

This module also converts between models and witnesses, derandomizes
conditional probability tables into response-variable noise, evaluates
interventions and do-events, and checks that conditioning a witness on a
do-event agrees with intervening in the model read off the witness.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .witness import Witness
from ..graphs.hypergraph import DirectedHypergraph, noise_name
from ..prob.distributions import (
    Event, JointDistribution, Variable, condition, contingency, marginal, probability, product,
)
from ..prob.information import mutual_information
from ..utils.constants import (
    DEFAULT_TOL, ERROR_MESSAGES, MAX_RESPONSE_FUNCTIONS, NOISE_SUM_TOL, ROW_TOL,
)
from ..utils.errors import ValidationError, ZeroProbabilityError

logger = logging.getLogger(__name__)

NoiseSetting = Union[Mapping[str, str], Sequence[int]]


def _grids(variables: Sequence[Variable]) -> Dict[str, np.ndarray]:
    """Open index grids, one broadcastable axis per variable."""
    n = len(variables)
    grids = {}
    for i, var in enumerate(variables):
        shape = [1] * n
        shape[i] = var.size
        grids[var.name] = np.arange(var.size).reshape(shape)
    return grids


class Equation:
    """
    Total lookup table f_a: (Src a, U_a) -> Tgt a.

    ``table`` has one axis per source variable followed by the noise axis;
    each entry is the flat index of the target setting.
    """

    def __init__(self, label: str, sources: Sequence[Variable], noise: Variable,
                 targets: Sequence[Variable], table):
        self.label = label
        self.sources = tuple(sources)
        self.noise = noise
        self.targets = tuple(targets)
        self.input_shape = tuple(v.size for v in self.sources) + (noise.size,)
        self.target_shape = tuple(v.size for v in self.targets)
        n_out = int(np.prod(self.target_shape, dtype=np.int64))

        table = np.array(table, dtype=np.int64).reshape(self.input_shape)
        if table.size and (table.min() < 0 or table.max() >= n_out):
            raise ValidationError(f"Equation {label!r} maps outside its target space")
        table.flags.writeable = False
        self.table = table

    @classmethod
    def from_rows(cls, label: str, sources: Sequence[Variable], noise: Variable,
                  targets: Sequence[Variable],
                  rows: Iterator[Tuple[Mapping[str, str], Mapping[str, str]]]) -> 'Equation':
        """
        Build an equation from (inputs, outputs) rows.

        Raises:
            ValidationError: If a row conflicts with another or the table is not total
        """
        sources, targets = tuple(sources), tuple(targets)
        shape = tuple(v.size for v in sources) + (noise.size,)
        out_shape = tuple(v.size for v in targets)
        table = np.full(shape, -1, dtype=np.int64)
        for inputs, outputs in rows:
            index = tuple(v.index(inputs[v.name]) for v in sources) + (noise.index(inputs[noise.name]),)
            coords = tuple(v.index(outputs[v.name]) for v in targets)
            out = int(np.ravel_multi_index(coords, out_shape)) if out_shape else 0
            if table[index] not in (-1, out):
                raise ValidationError(f"Equation {label!r} has conflicting rows for {dict(inputs)}")
            table[index] = out
        if np.any(table < 0):
            raise ValidationError(f"Equation {label!r} is not total")
        return cls(label, sources, noise, targets, table)

    @classmethod
    def from_function(cls, label: str, sources: Sequence[Variable], noise: Variable,
                      targets: Sequence[Variable],
                      fn: Callable[[Dict[str, str]], Mapping[str, str]]) -> 'Equation':
        """Tabulate a Python function of the inputs once, at construction."""
        sources = tuple(sources)
        names = [v.name for v in sources] + [noise.name]
        spaces = [v.values for v in sources] + [noise.values]
        rows = ((dict(zip(names, s)), fn(dict(zip(names, s)))) for s in itertools.product(*spaces))
        return cls.from_rows(label, sources, noise, targets, rows)

    def predict(self, grids: Mapping[str, np.ndarray]) -> Tuple[np.ndarray, ...]:
        """Target coordinates predicted at the (broadcast) input coordinates."""
        index = tuple(grids[v.name] for v in self.sources) + (grids[self.noise.name],)
        flat = self.table[index]
        if not self.targets:
            return ()
        return np.unravel_index(flat, self.target_shape)

    def rows(self) -> Iterator[Tuple[Dict[str, str], Dict[str, str]]]:
        """Iterate (inputs, outputs) label rows in table order."""
        names = [v.name for v in self.sources] + [self.noise.name]
        spaces = [v.values for v in self.sources] + [self.noise.values]
        for setting, out in zip(itertools.product(*spaces), self.table.ravel()):
            coords = np.unravel_index(int(out), self.target_shape) if self.targets else ()
            yield (dict(zip(names, setting)),
                   {v.name: v.values[int(c)] for v, c in zip(self.targets, coords)})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Equation):
            return NotImplemented
        return ((self.label, self.sources, self.noise, self.targets)
                == (other.label, other.sources, other.noise, other.targets)
                and np.array_equal(self.table, other.table))

    def __repr__(self) -> str:
        return f"Equation({self.label!r}, inputs={self.input_shape}, targets={list(self.target_shape)})"


class GRPSEM:
    """
    A generalized randomized probabilistic structural equations model.

    Instances are immutable; ``intervene`` returns a new model whose
    intervened variables are pinned to constants.
    """

    def __init__(self, structure: DirectedHypergraph, variables: Sequence[Variable],
                 noise: Mapping[str, JointDistribution], equations: Mapping[str, Equation],
                 interventions: Optional[Mapping[str, str]] = None):
        """
        Initialize a model.

        Args:
            structure: Hypergraph over the endogenous variables
            variables: Endogenous variables (one per structure node)
            noise: Arc label -> single-variable noise distribution P_a
            equations: Arc label -> lookup table f_a
            interventions: Variable name -> pinned value label

        Raises:
            ValidationError: If the pieces do not fit together
        """
        self.structure = structure
        self.variables = tuple(variables)
        self._by_name = {v.name: v for v in self.variables}
        if set(self._by_name) != set(structure.nodes) or len(self._by_name) != len(self.variables):
            raise ValidationError("Model variables must match the structure's nodes one to one")

        labels = set(structure.labels)
        if set(noise) != labels or set(equations) != labels:
            raise ValidationError(ERROR_MESSAGES['unknown_arc'].format(
                labels=sorted(labels.symmetric_difference(set(noise) | set(equations)))))
        self.noise = {label: noise[label] for label in structure.labels}
        self.equations = {label: equations[label] for label in structure.labels}

        for arc in structure.arcs:
            dist, eq = self.noise[arc.label], self.equations[arc.label]
            if len(dist.variables) != 1 or dist.variables[0] != eq.noise:
                raise ValidationError(f"Noise of arc {arc.label!r} does not match its equation")
            if abs(float(dist.probs.sum()) - 1.0) > NOISE_SUM_TOL:
                raise ValidationError(ERROR_MESSAGES['bad_sum'].format(total=float(dist.probs.sum()),
                                                                        tol=NOISE_SUM_TOL))
            if ({v.name for v in eq.sources} != set(arc.sources)
                    or {v.name for v in eq.targets} != set(arc.targets)):
                raise ValidationError(f"Equation {arc.label!r} does not match its arc")
            if any(self._by_name[v.name] != v for v in eq.sources + eq.targets):
                raise ValidationError(f"Equation {arc.label!r} uses a different value space")

        names = [self.noise[label].variables[0].name for label in structure.labels]
        if len(set(names)) != len(names) or set(names) & set(self._by_name):
            raise ValidationError("Noise variable names must be distinct and not endogenous")

        self.interventions: Dict[str, str] = dict(interventions or {})
        for name, value in self.interventions.items():
            self.variable(name).index(value)
        self._children: Dict[frozenset, 'GRPSEM'] = {}

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def noise_variables(self) -> Tuple[Variable, ...]:
        return tuple(self.noise[label].variables[0] for label in self.structure.labels)

    @property
    def noise_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.noise_variables)

    @property
    def arc_map(self) -> Dict[str, str]:
        return {label: self.noise[label].variables[0].name for label in self.structure.labels}

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=[name])) from None

    def noise_distribution(self) -> JointDistribution:
        """Independent product of the per-arc noise distributions."""
        joint = JointDistribution.unit()
        for label in self.structure.labels:
            joint = product(joint, self.noise[label])
        return joint

    def noise_index(self, u: NoiseSetting) -> Tuple[int, ...]:
        """
        Normalize a joint noise setting to a tuple of value indices.

        Mappings may be keyed by noise variable name or by arc label.
        """
        if isinstance(u, Mapping):
            index = []
            for label, var in zip(self.structure.labels, self.noise_variables):
                key = var.name if var.name in u else label
                if key not in u:
                    raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=[var.name]))
                index.append(var.index(u[key]))
            return tuple(index)
        index = tuple(int(i) for i in u)
        if len(index) != len(self.noise_variables) or any(
                not 0 <= i < v.size for i, v in zip(index, self.noise_variables)):
            raise ValidationError("Noise setting does not fit the model's noise space")
        return index

    def _satisfied(self, grids: Mapping[str, np.ndarray], shape: Tuple[int, ...]) -> np.ndarray:
        ok = np.ones(shape, dtype=bool)
        for eq in self.equations.values():
            for var, coord in zip(eq.targets, eq.predict(grids)):
                if var.name not in self.interventions:
                    ok &= grids[var.name] == coord
        for name, value in self.interventions.items():
            ok &= grids[name] == self.variable(name).index(value)
        return ok

    def solution_mask(self, u: NoiseSetting) -> np.ndarray:
        """Boolean tensor over endogenous settings marking the solutions in context u."""
        grids = _grids(self.variables)
        for var, i in zip(self.noise_variables, self.noise_index(u)):
            grids[var.name] = np.int64(i)
        return self._satisfied(grids, tuple(v.size for v in self.variables))

    def satisfied(self) -> np.ndarray:
        """Boolean tensor over (endogenous, noise) settings satisfying every equation."""
        variables = self.variables + self.noise_variables
        return self._satisfied(_grids(variables), tuple(v.size for v in variables))

    def solutions(self, u: NoiseSetting) -> List[Tuple[str, ...]]:
        """Endogenous settings (label tuples) solving the equations in context u."""
        mask = self.solution_mask(u)
        spaces = [v.values for v in self.variables]
        settings = itertools.product(*spaces)
        return [s for s, ok in zip(settings, mask.ravel()) if ok]

    def intervene(self, assignment: Mapping[str, str]) -> 'GRPSEM':
        """
        Pin variables to constants.

        Raises:
            ValidationError: If a variable is not an arc target, is already
                pinned, or the value is not in its space
        """
        key = frozenset(assignment.items())
        if key in self._children:
            return self._children[key]
        targets = set().union(*(a.targets for a in self.structure.arcs))
        merged = dict(self.interventions)
        for name, value in assignment.items():
            if name not in targets:
                raise ValidationError(ERROR_MESSAGES['bad_intervention'].format(
                    name=name, detail="it is not the target of any arc"))
            if name in merged:
                raise ValidationError(ERROR_MESSAGES['bad_intervention'].format(
                    name=name, detail="it is already intervened on"))
            self.variable(name).index(value)
            merged[name] = str(value)
        child = GRPSEM(self.structure, self.variables, self.noise, self.equations, merged)
        self._children[key] = child
        return child

    def _evaluation_order(self) -> Optional[List[str]]:
        """
        Arc labels in an order that evaluates every variable exactly once.

        Returns None unless every free variable is the target of exactly one
        arc and the source-to-target dependencies are acyclic.
        """
        owner: Dict[str, str] = {}
        for arc in self.structure.arcs:
            for t in arc.targets:
                if t in self.interventions:
                    continue
                if t in owner:
                    return None
                owner[t] = arc.label
        if set(owner) | set(self.interventions) != set(self.names):
            return None
        graph = nx.DiGraph()
        graph.add_nodes_from(self.structure.labels)
        for arc in self.structure.arcs:
            for s in arc.sources:
                if s in owner:
                    graph.add_edge(owner[s], arc.label)
        if not nx.is_directed_acyclic_graph(graph):
            return None
        rank = {label: i for i, label in enumerate(self.structure.labels)}
        return list(nx.lexicographical_topological_sort(graph, key=rank.get))

    def _evaluate_acyclic(self, order: List[str]) -> JointDistribution:
        noise_vars = self.noise_variables
        noise_shape = tuple(v.size for v in noise_vars)
        n_u = int(np.prod(noise_shape, dtype=np.int64))
        u_coords = np.unravel_index(np.arange(n_u), noise_shape) if noise_shape else ()
        coords = {v.name: c for v, c in zip(noise_vars, u_coords)}
        for name, value in self.interventions.items():
            coords[name] = np.full(n_u, self.variable(name).index(value))
        for label in order:
            eq = self.equations[label]
            for var, c in zip(eq.targets, eq.predict(coords)):
                if var.name not in self.interventions:
                    coords[var.name] = np.broadcast_to(c, (n_u,))

        shape = tuple(v.size for v in self.variables)
        x_flat = (np.ravel_multi_index(tuple(coords[n] for n in self.names), shape)
                  if shape else np.zeros(n_u, dtype=np.int64))
        table = np.zeros((int(np.prod(shape, dtype=np.int64)), n_u))
        table[x_flat, np.arange(n_u)] = self.noise_distribution().probs
        return JointDistribution(self.variables + noise_vars, table.ravel())

    def arising_distribution(self) -> JointDistribution:
        """
        Joint distribution over endogenous and noise variables that the model induces.

        Raises:
            ValidationError: If some context of positive probability has zero
                or several solutions
        """
        order = self._evaluation_order()
        if order is not None:
            return self._evaluate_acyclic(order)

        sat = self.satisfied()
        n_x = int(np.prod([v.size for v in self.variables], dtype=np.int64))
        sat = sat.reshape(n_x, -1)
        pu = self.noise_distribution().probs
        counts = sat.sum(axis=0)
        bad = np.flatnonzero((pu > 0.0) & (counts != 1))
        if bad.size:
            u = np.unravel_index(int(bad[0]), tuple(v.size for v in self.noise_variables))
            context = {v.name: v.values[int(i)] for v, i in zip(self.noise_variables, u)}
            raise ValidationError(ERROR_MESSAGES['not_unique'].format(context=context,
                                                                     count=int(counts[bad[0]])))
        return JointDistribution(self.variables + self.noise_variables, (sat * pu).ravel())

    def __repr__(self) -> str:
        pinned = f", do={self.interventions}" if self.interventions else ""
        return f"GRPSEM(variables={list(self.names)}, arcs={list(self.structure.labels)}{pinned})"


def derandomize_cpd(cpd, target: Variable, sources: Sequence[Variable] = (),
                    name: Optional[str] = None) -> JointDistribution:
    """
    Turn a conditional table p(Y | X) into a distribution over functions X -> Y.

    q(g) = Π_x p(Y = g(x) | X = x). Function labels join the output labels
    for each source setting (in storage order) with "|".

    Args:
        cpd: Array of shape (|V(X)|, |V(Y)|) or (sizes of X..., |V(Y)|)
        target: The variable Y
        sources: Variables X (their joint space indexes the cpd rows)
        name: Name of the function-valued variable (default U__<Y>)

    Returns:
        Distribution over one variable with |V(Y)|^|V(X)| values

    Raises:
        ValidationError: If a row is negative or does not sum to 1 within ROW_TOL
    """
    n_x = int(np.prod([v.size for v in sources], dtype=np.int64))
    n_y = target.size
    table = np.asarray(cpd, dtype=np.float64).reshape(n_x, n_y)
    if np.any(table < -ROW_TOL) or np.any(np.abs(table.sum(axis=1) - 1.0) > ROW_TOL):
        raise ValidationError("Every cpd row must be a probability distribution")
    table = np.clip(table, 0.0, None)
    table = table / table.sum(axis=1, keepdims=True)
    if n_y ** n_x > MAX_RESPONSE_FUNCTIONS:
        raise ValidationError(f"Response space of {n_y}^{n_x} functions is too large to enumerate")

    outputs = np.indices((n_y,) * n_x).reshape(n_x, -1)
    probs = np.prod(table[np.arange(n_x)[:, None], outputs], axis=0)
    labels = ["|".join(target.values[i] for i in column) for column in outputs.T]
    var = Variable(name or noise_name(target.name), labels)
    return JointDistribution([var], probs)


def function_outputs(label: str) -> List[str]:
    """Output labels of a function-valued noise value, one per source setting."""
    return label.split("|")


def solutions(M: GRPSEM, u: NoiseSetting) -> List[Tuple[str, ...]]:
    """All endogenous settings satisfying every equation of M in context u."""
    return M.solutions(u)


def in_solution_set(M: GRPSEM, nu: JointDistribution, tol: float = DEFAULT_TOL) -> bool:
    """
    Test nu ∈ SD(M): the equations hold with probability 1 (cells above tol)
    and the noise marginal is the product of the P_a within tol.

    Raises:
        ValidationError: If nu is not over M's endogenous and noise variables
    """
    order = M.names + M.noise_names
    if sorted(nu.names) != sorted(order):
        raise ValidationError("Distribution must be over the model's endogenous and noise variables")
    nu = nu.reorder(order)
    if nu.variables != M.variables + M.noise_variables:
        raise ValidationError("Distribution uses different value spaces than the model")
    if np.any(nu.tensor[~M.satisfied()] > tol):
        return False
    noise = marginal(nu, M.noise_names)
    return bool(np.max(np.abs(noise.probs - M.noise_distribution().probs), initial=0.0) <= tol)


def arising_distribution(M: GRPSEM) -> JointDistribution:
    """The unique distribution M gives rise to (see GRPSEM.arising_distribution)."""
    return M.arising_distribution()


def intervene(M: GRPSEM, assignment: Mapping[str, str]) -> GRPSEM:
    """Model with the equations of the assigned variables replaced by constants."""
    return M.intervene(assignment)


def _intervened_arc(M: GRPSEM, name: str) -> str:
    owners = [a.label for a in M.structure.arcs if name in a.targets]
    if len(owners) != 1:
        raise ValidationError(ERROR_MESSAGES['bad_intervention'].format(
            name=name, detail=f"do-events need exactly one arc targeting it, found {len(owners)}"))
    return owners[0]


def do_event(M: GRPSEM, assignment: Mapping[str, str]) -> Event:
    """
    Noise settings that force every assigned value regardless of the sources.

    Returns:
        Event over M's noise variables: u such that, for every assigned X with
        arc a, f_a(s, u_a)[X] = x for every source setting s

    Raises:
        ValidationError: If a variable is not the target of exactly one arc
    """
    good = {label: np.ones(M.noise[label].variables[0].size, dtype=bool) for label in M.structure.labels}
    for name, value in assignment.items():
        label = _intervened_arc(M, name)
        eq = M.equations[label]
        want = M.variable(name).index(value)
        position = [v.name for v in eq.targets].index(name)
        grids = _grids(eq.sources + (eq.noise,))
        coord = eq.predict(grids)[position]
        forced = np.broadcast_to(coord == want, eq.input_shape)
        good[label] &= forced.reshape(-1, eq.noise.size).all(axis=0)

    mask = np.ones((), dtype=bool)
    for label in M.structure.labels:
        mask = np.multiply.outer(mask, good[label])
    return Event(M.noise_variables, np.flatnonzero(mask.ravel()))


def witness_to_psem(w: Witness, A: DirectedHypergraph, tol: float = DEFAULT_TOL) -> Tuple[GRPSEM, bool]:
    """
    Read a model off a witness.

    Each equation is read from the positive rows of (Src a, U_a) -> Tgt a;
    rows of probability at most tol map to the first target setting.

    Args:
        w: Witness for A
        A: Hypergraph whose arcs have pairwise disjoint targets
        tol: Probability at or below which a row counts as empty

    Returns:
        (model, unique) where unique is True iff no row was empty

    Raises:
        ValidationError: If targets overlap or the arc map does not fit A
    """
    arcs = list(A.arcs)
    for i, a in enumerate(arcs):
        for b in arcs[i + 1:]:
            if a.targets & b.targets:
                raise ValidationError(ERROR_MESSAGES['overlapping_targets'].format(first=a.label, second=b.label))
    if set(w.arc_map) != set(A.labels):
        raise ValidationError(ERROR_MESSAGES['arc_map_mismatch'].format(
            detail=f"arcs {sorted(A.labels)} vs witness {sorted(w.arc_map)}"))

    position = {n: i for i, n in enumerate(w.base_vars)}
    variables = [w.joint.variable(n) for n in w.base_vars]
    noise, equations = {}, {}
    unique = True
    for arc in arcs:
        u_name = w.arc_map[arc.label]
        sources = sorted(arc.sources, key=position.get)
        targets = sorted(arc.targets, key=position.get)
        table = contingency(w.joint, sources + [u_name], targets)
        live = table.sum(axis=1) > tol
        unique = unique and bool(np.all(live))
        outputs = np.where(live, np.argmax(table, axis=1), 0)
        u_var = w.joint.variable(u_name)
        equations[arc.label] = Equation(arc.label, [w.joint.variable(s) for s in sources], u_var,
                                        [w.joint.variable(t) for t in targets], outputs)
        noise[arc.label] = marginal(w.joint, u_name)

    structure = DirectedHypergraph(w.base_vars, arcs)
    return GRPSEM(structure, variables, noise, equations), unique


def sem_to_witness(M: GRPSEM) -> Witness:
    """Package the arising distribution of a uniquely solvable model as a witness."""
    return Witness(M.arising_distribution(), M.arc_map, M.names)


@dataclass
class InterventionReport:
    """Outcome of comparing do-conditioning in a witness with intervention in its model."""

    applicable: bool
    reason: str = ""
    do_probability: float = 0.0
    noise_dependence: float = 0.0
    in_solution_set: bool = False
    unique: bool = False
    total_variation: Optional[float] = None
    box: float = 0.0
    conditional: float = 0.0
    diamond: float = 0.0
    sandwich: bool = False
    empty_contexts: int = 0
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return False
        agree = self.total_variation is None or self.total_variation <= DEFAULT_TOL
        return self.in_solution_set and self.sandwich and agree

    def as_dict(self) -> Dict[str, object]:
        return {
            'applicable': self.applicable,
            'reason': self.reason,
            'do_probability': self.do_probability,
            'noise_dependence_bits': self.noise_dependence,
            'in_solution_set': self.in_solution_set,
            'unique': self.unique,
            'total_variation': self.total_variation,
            'box': self.box,
            'conditional': self.conditional,
            'diamond': self.diamond,
            'sandwich': self.sandwich,
            'empty_contexts': self.empty_contexts,
            'passed': self.passed,
        }


def check_theorem6(w: Witness, M: GRPSEM, assignment: Mapping[str, str], phi=None,
                   tol: float = DEFAULT_TOL) -> InterventionReport:
    """
    Check that conditioning a witness on a do-event matches intervening in M.

    Verifies that (a) w(· | do-event) with the intervened noise replaced by a
    fresh independent copy lies in SD(M_{X←x}), and equals the distribution
    arising from M_{X←x} when that model is uniquely solvable; and (b) the
    sandwich P_M([X←x]φ) ≤ w(φ | do) ≤ P_M(⟨X←x⟩φ) within tol.

    Args:
        w: Witness whose noise variables are M's
        M: Model read off w (e.g. by witness_to_psem)
        assignment: Intervention X ← x
        phi: Pure Boolean formula over endogenous variables (default: true)
        tol: Numerical tolerance

    Returns:
        Report; not applicable when the do-event has probability zero or the
        intervened noise depends on the remaining noise
    """
    from .formulas import Box, Diamond, TRUE, formula_probability, pure_mask

    phi = TRUE if phi is None else phi
    if not phi.is_pure():
        raise ValidationError("The conditioned formula must be a Boolean expression without interventions")

    event = do_event(M, assignment)
    p_do = probability(w.joint, event)
    if p_do <= 0.0:
        return InterventionReport(applicable=False, reason="do-event has probability zero")

    labels = sorted({_intervened_arc(M, name) for name in assignment}, key=M.structure.labels.index)
    hit = [M.arc_map[label] for label in labels]
    rest = [n for n in M.noise_names if n not in hit]
    dependence = mutual_information(w.joint, hit, rest) if rest else 0.0
    if dependence > tol:
        return InterventionReport(applicable=False, do_probability=p_do, noise_dependence=dependence,
                                  reason="intervened noise is not independent of the remaining noise")

    try:
        cond = condition(w.joint, event)
    except ZeroProbabilityError:
        return InterventionReport(applicable=False, reason="do-event has probability zero")
    model = M.intervene(assignment)

    fresh = product(marginal(cond, M.names + tuple(rest)), marginal(w.joint, hit))
    feasible = in_solution_set(model, fresh, tol=max(tol, 1e-12))

    tv = None
    unique = True
    try:
        arising = model.arising_distribution()
        tv = marginal(cond, M.names).total_variation(marginal(arising, M.names))
    except ValidationError:
        unique = False

    mask = pure_mask(phi, M.variables)
    phi_event = Event(M.variables, np.flatnonzero(mask.ravel()))
    middle = probability(marginal(cond, M.names), phi_event)
    box = formula_probability(M, Box(assignment, phi))
    diamond = formula_probability(M, Diamond(assignment, phi))
    sandwich = box <= middle + tol and middle <= diamond + tol
    if unique:
        sandwich = sandwich and abs(box - middle) <= tol and abs(diamond - middle) <= tol

    pu = model.noise_distribution().probs
    empty = 0
    for flat in np.flatnonzero(pu > 0.0):
        u = np.unravel_index(int(flat), tuple(v.size for v in model.noise_variables))
        if not model.solution_mask(u).any():
            empty += 1
    if empty:
        logger.warning("%d contexts of the intervened model have no solutions; "
                       "interventions hold vacuously there", empty)

    return InterventionReport(
        applicable=True, do_probability=p_do, noise_dependence=dependence,
        in_solution_set=feasible, unique=unique, total_variation=tv,
        box=box, conditional=middle, diamond=diamond, sandwich=sandwich, empty_contexts=empty,
    )
