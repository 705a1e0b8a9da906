"""
JSON codecs for distributions, hypergraphs, models, witnesses and reports.

All value labels are written as strings. Probabilities are written with
full float precision so that every document reloads to an identical value.
Malformed documents raise FormatError carrying the line and column when
the JSON parser reports one.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Union

from .errors import FormatError
from ..core.causal import GRPSEM, Equation
from ..core.witness import Witness
from ..graphs.hypergraph import DirectedHypergraph, Hyperarc
from ..prob.distributions import JointDistribution, Variable
from ..utils.constants import NOISE_SUM_TOL, SUM_TOL

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def loads(text: str) -> Any:
    """Parse JSON text, converting parser errors into FormatError."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"Malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None


def load_json(path: PathLike) -> Any:
    """Read and parse a JSON file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"Cannot read {path}: {exc.strerror}") from None
    return loads(text)


def dumps(doc: Any) -> str:
    """Serialize with stable key order and a trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _require(doc: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(doc, dict):
        raise FormatError(f"{where} must be a JSON object")
    if key not in doc:
        raise FormatError(f"{where} is missing {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise FormatError(f"{where}.{key} must be of type {kind.__name__}")
    return value


def _labels(values: List[Any], where: str) -> List[str]:
    if not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in values):
        raise FormatError(f"{where} values must be strings")
    return [str(v) for v in values]


def _numbers(values: List[Any], where: str) -> List[float]:
    if not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in values):
        raise FormatError(f"{where} must contain only numbers")
    return [float(p) for p in values]


# Variables and distributions

def variable_to_json(v: Variable) -> Dict[str, Any]:
    return {'name': v.name, 'values': list(v.values)}


def variable_from_json(doc: Any, where: str = "variable") -> Variable:
    name = _require(doc, 'name', str, where)
    return Variable(name, _labels(_require(doc, 'values', list, where), f"{where}.values"))


def distribution_to_json(d: JointDistribution) -> Dict[str, Any]:
    """Dense form: variable list plus flat probabilities, last variable fastest."""
    return {'variables': [variable_to_json(v) for v in d.variables], 'probs': [float(p) for p in d.probs]}


def distribution_from_json(doc: Any, tol: float = SUM_TOL, where: str = "distribution") -> JointDistribution:
    """
    Load a distribution in dense ("probs") or sparse ("outcomes") form.

    The sparse form lists {"setting": {name: label}, "p": number} entries;
    unlisted settings have probability zero.
    """
    variables = [variable_from_json(v, f"{where}.variables[{i}]")
                 for i, v in enumerate(_require(doc, 'variables', list, where))]
    if 'probs' in doc:
        probs = _numbers(_require(doc, 'probs', list, where), f"{where}.probs")
        return JointDistribution(variables, probs, tol)
    outcomes = _require(doc, 'outcomes', list, where)
    pairs = []
    for i, item in enumerate(outcomes):
        setting = _require(item, 'setting', dict, f"{where}.outcomes[{i}]")
        p = _numbers([_require(item, 'p', (int, float), f"{where}.outcomes[{i}]")], where)[0]
        pairs.append(({k: str(v) for k, v in setting.items()}, p))
    return JointDistribution.from_samples(variables, pairs)


# Hypergraphs

def hypergraph_to_json(A: DirectedHypergraph) -> Dict[str, Any]:
    return {
        'nodes': list(A.nodes),
        'arcs': [{'label': a.label, 'sources': sorted(a.sources), 'targets': sorted(a.targets)}
                 for a in A.arcs],
    }


def hypergraph_from_json(doc: Any, where: str = "hypergraph") -> DirectedHypergraph:
    nodes = _labels(_require(doc, 'nodes', list, where), f"{where}.nodes")
    arcs = []
    for i, item in enumerate(_require(doc, 'arcs', list, where)):
        at = f"{where}.arcs[{i}]"
        label = _require(item, 'label', str, at)
        sources = _labels(item.get('sources', []), f"{at}.sources")
        targets = _labels(item.get('targets', []), f"{at}.targets")
        arcs.append(Hyperarc(label, sources, targets))
    return DirectedHypergraph(nodes, arcs)


# Witnesses

def witness_to_json(w: Witness) -> Dict[str, Any]:
    return {'joint': distribution_to_json(w.joint), 'arc_map': dict(w.arc_map), 'base_vars': list(w.base_vars)}


def witness_from_json(doc: Any, where: str = "witness") -> Witness:
    joint = distribution_from_json(_require(doc, 'joint', dict, where), where=f"{where}.joint")
    arc_map = _require(doc, 'arc_map', dict, where)
    base_vars = _labels(_require(doc, 'base_vars', list, where), f"{where}.base_vars")
    return Witness(joint, {str(k): str(v) for k, v in arc_map.items()}, base_vars)


# Structural equations models

def sem_to_json(M: GRPSEM) -> Dict[str, Any]:
    doc = {
        'hypergraph': hypergraph_to_json(M.structure),
        'variables': [variable_to_json(v) for v in M.variables],
        'noise': [],
        'equations': [],
    }
    for label in M.structure.labels:
        dist = M.noise[label]
        doc['noise'].append({'arc': label, 'name': dist.variables[0].name,
                             'values': list(dist.variables[0].values),
                             'probs': [float(p) for p in dist.probs]})
        doc['equations'].append({'arc': label,
                                 'rows': [{'in': i, 'out': o} for i, o in M.equations[label].rows()]})
    if M.interventions:
        doc['interventions'] = dict(M.interventions)
    return doc


def sem_from_json(doc: Any, where: str = "sem") -> GRPSEM:
    """
    Load a model.

    Endogenous value spaces come from "variables"; when it is absent every
    node is read as binary with values "0" and "1".
    """
    structure = hypergraph_from_json(_require(doc, 'hypergraph', dict, where), f"{where}.hypergraph")
    if 'variables' in doc:
        variables = [variable_from_json(v, f"{where}.variables[{i}]")
                     for i, v in enumerate(_require(doc, 'variables', list, where))]
    else:
        variables = [Variable.binary(n) for n in structure.nodes]
    by_name = {v.name: v for v in variables}
    if set(by_name) != set(structure.nodes):
        raise FormatError(f"{where}.variables must list exactly the hypergraph nodes")

    noise = {}
    for i, item in enumerate(_require(doc, 'noise', list, where)):
        at = f"{where}.noise[{i}]"
        label = _require(item, 'arc', str, at)
        name = item.get('name', f"U__{label}")
        var = Variable(name, _labels(_require(item, 'values', list, at), f"{at}.values"))
        probs = _numbers(_require(item, 'probs', list, at), f"{at}.probs")
        noise[label] = JointDistribution([var], probs, NOISE_SUM_TOL)

    equations = {}
    for i, item in enumerate(_require(doc, 'equations', list, where)):
        at = f"{where}.equations[{i}]"
        label = _require(item, 'arc', str, at)
        if label not in noise:
            raise FormatError(f"{at} names arc {label!r} without noise")
        arc = structure.arc(label)
        order = [v.name for v in variables]
        sources = [by_name[n] for n in sorted(arc.sources, key=order.index)]
        targets = [by_name[n] for n in sorted(arc.targets, key=order.index)]
        rows = []
        for j, row in enumerate(_require(item, 'rows', list, at)):
            inputs = _require(row, 'in', dict, f"{at}.rows[{j}]")
            outputs = _require(row, 'out', dict, f"{at}.rows[{j}]")
            rows.append(({k: str(v) for k, v in inputs.items()}, {k: str(v) for k, v in outputs.items()}))
        try:
            equations[label] = Equation.from_rows(label, sources, noise[label].variables[0], targets, rows)
        except KeyError as exc:
            raise FormatError(f"{at} row is missing variable {exc.args[0]!r}") from None

    interventions = doc.get('interventions') or {}
    return GRPSEM(structure, variables, noise, equations,
                  {str(k): str(v) for k, v in interventions.items()})


# Formulas

def formula_from_json(doc: Any, where: str = "formula"):
    """
    Parse a causal formula.

    Forms: {"atom": [var, value]}, {"true": true}, {"not": f}, {"and": [f, ...]},
    {"or": [f, ...]}, {"box": {var: value}, "body": f}, {"diamond": {...}, "body": f}.
    """
    from ..core.formulas import And, Atom, Box, Diamond, FALSE, Not, Or, TRUE

    if not isinstance(doc, dict):
        raise FormatError(f"{where} must be a JSON object")
    if 'atom' in doc:
        pair = doc['atom']
        if not isinstance(pair, list) or len(pair) != 2:
            raise FormatError(f"{where}.atom must be [variable, value]")
        return Atom(str(pair[0]), str(pair[1]))
    if 'true' in doc:
        return TRUE if doc['true'] else FALSE
    if 'not' in doc:
        return Not(formula_from_json(doc['not'], f"{where}.not"))
    for key, cls in (('and', And), ('or', Or)):
        if key in doc:
            parts = _require(doc, key, list, where)
            return cls(*(formula_from_json(p, f"{where}.{key}[{i}]") for i, p in enumerate(parts)))
    for key, cls in (('box', Box), ('diamond', Diamond)):
        if key in doc:
            assignment = _require(doc, key, dict, where)
            body = formula_from_json(_require(doc, 'body', dict, where), f"{where}.body")
            return cls({str(k): str(v) for k, v in assignment.items()}, body)
    raise FormatError(f"{where} has no recognised connective")


def formula_to_json(phi) -> Dict[str, Any]:
    from ..core.formulas import And, Atom, Box, Const, Diamond, Not, Or

    if isinstance(phi, Atom):
        return {'atom': [phi.var, phi.value]}
    if isinstance(phi, Const):
        return {'true': phi.truth}
    if isinstance(phi, Not):
        return {'not': formula_to_json(phi.body)}
    if isinstance(phi, And):
        return {'and': [formula_to_json(p) for p in phi.parts]}
    if isinstance(phi, Or):
        return {'or': [formula_to_json(p) for p in phi.parts]}
    key = 'box' if isinstance(phi, Box) else 'diamond'
    return {key: dict(phi.assignment), 'body': formula_to_json(phi.body)}


# Reports

def siminc_to_json(result) -> Dict[str, Any]:
    return {
        'value_bits': result.value,
        'idef_bits': result.idef_bits,
        'upper_bound_bits': result.upper_bound,
        'restarts_used': result.restarts_used,
        'converged': result.converged,
        'iterations': result.iterations,
        'tol': result.tol,
        'band': result.band,
        'breakdown': {'independence_gap': result.independence_gap, 'arcs': dict(result.arc_terms)},
        'noise_sizes': dict(result.noise_sizes),
        'witness_candidate': distribution_to_json(result.witness_candidate),
    }


def verdict_to_json(verdict) -> Dict[str, Any]:
    doc: Dict[str, Any] = {'status': verdict.status, 'stage': verdict.stage}
    if verdict.witness is not None:
        doc['witness'] = witness_to_json(verdict.witness)
    if verdict.certificate is not None:
        doc['certificate'] = verdict.certificate
    if verdict.siminc is not None:
        doc['siminc'] = siminc_to_json(verdict.siminc)
    if verdict.report is not None:
        doc['verification'] = verdict.report.as_dict()
    return doc


def write_json(path: PathLike, doc: Mapping[str, Any]) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
