"""
Causal formulas over a structural equations model.

Atoms test an endogenous variable for a value; Not, And and Or combine
formulas; Box([X←x], φ) and Diamond(⟨X←x⟩, φ) evaluate φ after an
intervention. A Boolean expression holds in a context when it is true at
every solution of the (intervened) model there, so it holds vacuously in a
context without solutions. Diamond is the dual ¬[X←x]¬.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence, Tuple, Union

import numpy as np

from ..prob.distributions import Variable
from ..utils.errors import ValidationError

if TYPE_CHECKING:
    from .causal import GRPSEM, NoiseSetting


class Formula:
    """Base class of formula nodes."""

    def is_pure(self) -> bool:
        """True when the formula contains no intervention."""
        raise NotImplementedError


@dataclass(frozen=True)
class Atom(Formula):
    var: str
    value: str

    def is_pure(self) -> bool:
        return True


@dataclass(frozen=True)
class Const(Formula):
    truth: bool

    def is_pure(self) -> bool:
        return True


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def is_pure(self) -> bool:
        return self.body.is_pure()


@dataclass(frozen=True, init=False)
class And(Formula):
    parts: Tuple[Formula, ...]

    def __init__(self, *parts: Formula):
        object.__setattr__(self, 'parts', tuple(parts))

    def is_pure(self) -> bool:
        return all(p.is_pure() for p in self.parts)


@dataclass(frozen=True, init=False)
class Or(Formula):
    parts: Tuple[Formula, ...]

    def __init__(self, *parts: Formula):
        object.__setattr__(self, 'parts', tuple(parts))

    def is_pure(self) -> bool:
        return all(p.is_pure() for p in self.parts)


def _assignment(assignment: Union[Mapping[str, str], Sequence[Tuple[str, str]]]) -> Tuple[Tuple[str, str], ...]:
    items = assignment.items() if isinstance(assignment, Mapping) else assignment
    pairs = tuple(sorted((str(k), str(v)) for k, v in items))
    names = [k for k, _ in pairs]
    if len(set(names)) != len(names):
        raise ValidationError("An intervention assigns each variable at most once")
    return pairs


@dataclass(frozen=True, init=False)
class Box(Formula):
    """[X←x]φ: φ holds at every solution after the intervention."""

    assignment: Tuple[Tuple[str, str], ...]
    body: Formula

    def __init__(self, assignment, body: Formula):
        object.__setattr__(self, 'assignment', _assignment(assignment))
        object.__setattr__(self, 'body', body)

    def is_pure(self) -> bool:
        return False


@dataclass(frozen=True, init=False)
class Diamond(Formula):
    """⟨X←x⟩φ: φ holds at some solution after the intervention."""

    assignment: Tuple[Tuple[str, str], ...]
    body: Formula

    def __init__(self, assignment, body: Formula):
        object.__setattr__(self, 'assignment', _assignment(assignment))
        object.__setattr__(self, 'body', body)

    def is_pure(self) -> bool:
        return False


def pure_mask(phi: Formula, variables: Sequence[Variable]) -> np.ndarray:
    """
    Truth table of a Boolean expression over the joint space of ``variables``.

    Raises:
        ValidationError: If phi contains an intervention or names an unknown variable
    """
    variables = tuple(variables)
    shape = tuple(v.size for v in variables)
    position = {v.name: i for i, v in enumerate(variables)}

    def table(f: Formula) -> np.ndarray:
        if isinstance(f, Const):
            return np.full(shape, f.truth, dtype=bool)
        if isinstance(f, Atom):
            if f.var not in position:
                raise ValidationError(f"Formula mentions unknown variable {f.var!r}")
            i = position[f.var]
            axis = [1] * len(shape)
            axis[i] = shape[i]
            hit = np.arange(shape[i]).reshape(axis) == variables[i].index(f.value)
            return np.broadcast_to(hit, shape)
        if isinstance(f, Not):
            return ~table(f.body)
        if isinstance(f, And):
            out = np.ones(shape, dtype=bool)
            for p in f.parts:
                out = out & table(p)
            return out
        if isinstance(f, Or):
            out = np.zeros(shape, dtype=bool)
            for p in f.parts:
                out = out | table(p)
            return out
        raise ValidationError("Interventions cannot appear inside a Boolean expression")

    return table(phi)


def _holds_everywhere(M: 'GRPSEM', u: Tuple[int, ...], expr: Formula) -> bool:
    solutions = M.solution_mask(u)
    return bool(np.all(pure_mask(expr, M.variables)[solutions]))


def _evaluate(M: 'GRPSEM', u: Tuple[int, ...], phi: Formula) -> bool:
    if phi.is_pure():
        return _holds_everywhere(M, u, phi)
    if isinstance(phi, Box):
        model = M.intervene(dict(phi.assignment)) if phi.assignment else M
        return _evaluate(model, u, phi.body)
    if isinstance(phi, Diamond):
        return not _evaluate(M, u, Box(phi.assignment, Not(phi.body)))
    if isinstance(phi, Not):
        return not _evaluate(M, u, phi.body)
    if isinstance(phi, And):
        return all(_evaluate(M, u, p) for p in phi.parts)
    if isinstance(phi, Or):
        return any(_evaluate(M, u, p) for p in phi.parts)
    raise ValidationError(f"Unsupported formula node {type(phi).__name__}")


def eval_formula(M: 'GRPSEM', u: 'NoiseSetting', phi: Formula) -> bool:
    """
    Truth of a causal formula in context u.

    A Boolean expression outside any intervention is read as [ ]φ.
    """
    return _evaluate(M, M.noise_index(u), phi)


def formula_probability(M: 'GRPSEM', phi: Formula) -> float:
    """P_M(φ): total noise probability of the contexts where φ holds."""
    probs = M.noise_distribution().probs
    shape = tuple(v.size for v in M.noise_variables)
    total = 0.0
    for flat in np.flatnonzero(probs > 0.0):
        u = tuple(int(i) for i in np.unravel_index(int(flat), shape))
        if _evaluate(M, u, phi):
            total += float(probs[flat])
    return total
