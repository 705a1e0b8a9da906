"""
Exact finite discrete joint distributions.

This module implements the substrate every other part of the toolkit
computes on: variables with finite label spaces, dense joint probability
tables (last variable varying fastest), events over joint settings, and the
elementary operations marginalization, conditioning, independent product and
the functional-dependence and conditional-independence tests.
"""

import itertools
import logging
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np

from ..utils.constants import DEFAULT_TOL, ERROR_MESSAGES, SUM_TOL
from ..utils.errors import ValidationError, ZeroProbabilityError

logger = logging.getLogger(__name__)

Names = Union[str, Iterable[str]]


def as_names(names: Names) -> Tuple[str, ...]:
    """Normalize a single name or an iterable of names to a tuple."""
    if isinstance(names, str):
        return (names,)
    return tuple(names)


class Variable:
    """
    A named variable with a finite, ordered space of value labels.

    Value labels are always strings, even when they look numeric.
    """

    def __init__(self, name: str, values: Sequence):
        """
        Initialize a variable.

        Args:
            name: Nonempty identifier
            values: Ordered, distinct value labels (at least one)

        Raises:
            ValidationError: If the name is empty or the labels are empty or repeated
        """
        if not isinstance(name, str) or not name:
            raise ValidationError("Variable name must be a nonempty string")
        labels = tuple(str(v) for v in values)
        if not labels:
            raise ValidationError(f"Variable {name!r} needs at least one value")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"Variable {name!r} has repeated value labels")

        self.name = name
        self.values = labels
        self._index = {v: i for i, v in enumerate(labels)}

    @property
    def size(self) -> int:
        return len(self.values)

    def index(self, value) -> int:
        """Position of a value label within this variable's space."""
        try:
            return self._index[str(value)]
        except KeyError:
            raise ValidationError(f"{value!r} is not a value of {self.name!r}") from None

    @classmethod
    def binary(cls, name: str) -> 'Variable':
        """Create a variable with values "0" and "1"."""
        return cls(name, ("0", "1"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Variable):
            return NotImplemented
        return self.name == other.name and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.name, self.values))

    def __repr__(self) -> str:
        return f"Variable({self.name!r}, {list(self.values)})"


def _check_unique(variables: Sequence[Variable]) -> None:
    names = [v.name for v in variables]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ValidationError(ERROR_MESSAGES['duplicate_variable'].format(names=dupes))


class JointDistribution:
    """
    Exact probability table over an ordered list of variables.

    Probabilities are stored as a flat float64 array in row-major order with
    the last variable varying fastest. The empty variable list is the unit
    distribution with a single outcome of probability 1. Instances are
    immutable.
    """

    def __init__(self, variables: Sequence[Variable], probs, tol: float = SUM_TOL):
        """
        Initialize a joint distribution.

        Args:
            variables: Ordered variables with distinct names
            probs: Flat (or tensor-shaped) nonnegative probabilities
            tol: Allowed deviation of the total mass from 1

        Raises:
            ValidationError: On wrong length, negative entries or bad total
        """
        variables = tuple(variables)
        _check_unique(variables)
        shape = tuple(v.size for v in variables)
        expected = int(np.prod(shape, dtype=np.int64))

        flat = np.array(probs, dtype=np.float64).ravel()
        if flat.size != expected:
            raise ValidationError(ERROR_MESSAGES['bad_length'].format(expected=expected, got=flat.size))
        if not np.all(np.isfinite(flat)) or np.any(flat < -tol):
            raise ValidationError(ERROR_MESSAGES['negative_prob'])
        flat = np.clip(flat, 0.0, None)
        total = float(flat.sum())
        if abs(total - 1.0) > tol:
            raise ValidationError(ERROR_MESSAGES['bad_sum'].format(total=total, tol=tol))
        # Tables already normalized up to rounding are kept bit for bit.
        if abs(total - 1.0) > 1e-12:
            flat = flat / total
        flat.flags.writeable = False

        self.variables = variables
        self.shape = shape
        self._probs = flat
        self._by_name = {v.name: v for v in variables}

    @property
    def probs(self) -> np.ndarray:
        """Read-only flat probability array."""
        return self._probs

    @property
    def tensor(self) -> np.ndarray:
        """Read-only probability tensor with one axis per variable."""
        return self._probs.reshape(self.shape)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable(self, name: str) -> Variable:
        """Look up a variable by name."""
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=[name])) from None

    def axes(self, names: Names) -> Tuple[int, ...]:
        """Axis positions of the named variables, in the order given."""
        names = as_names(names)
        missing = [n for n in names if n not in self._by_name]
        if missing:
            raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=missing))
        order = self.names
        return tuple(order.index(n) for n in names)

    def prob(self, setting: Mapping[str, str]) -> float:
        """
        Probability of a (possibly partial) assignment of value labels.

        Args:
            setting: Mapping from variable name to value label

        Returns:
            Marginal probability of the assignment
        """
        index = [slice(None)] * len(self.variables)
        for name, value in setting.items():
            axis = self.axes(name)[0]
            index[axis] = self.variables[axis].index(value)
        return float(np.sum(self.tensor[tuple(index)]))

    def settings(self) -> Iterator[Tuple[Tuple[str, ...], float]]:
        """Iterate over (joint setting, probability) pairs in storage order."""
        spaces = [v.values for v in self.variables]
        for setting, p in zip(itertools.product(*spaces), self._probs):
            yield setting, float(p)

    def support(self, tol: float = 0.0) -> List[Tuple[str, ...]]:
        """Joint settings with probability above tol."""
        return [s for s, p in self.settings() if p > tol]

    def as_dict(self) -> Dict[Tuple[str, ...], float]:
        """Mapping from joint setting to probability (zero entries omitted)."""
        return {s: p for s, p in self.settings() if p > 0.0}

    def reorder(self, names: Names) -> 'JointDistribution':
        """Same distribution with variables permuted to the given order."""
        names = as_names(names)
        if sorted(names) != sorted(self.names):
            raise ValidationError("Reordering must name every variable exactly once")
        axes = self.axes(names)
        return JointDistribution([self.variables[a] for a in axes],
                                 np.transpose(self.tensor, axes))

    def allclose(self, other: 'JointDistribution', tol: float = DEFAULT_TOL) -> bool:
        """Entrywise comparison after aligning variable order."""
        if sorted(self.names) != sorted(other.names):
            return False
        other = other.reorder(self.names)
        if other.variables != self.variables:
            return False
        return bool(np.max(np.abs(self._probs - other.probs), initial=0.0) <= tol)

    def total_variation(self, other: 'JointDistribution') -> float:
        """Total variation distance to a distribution over the same variables."""
        other = other.reorder(self.names)
        if other.variables != self.variables:
            raise ValidationError("Total variation needs identical value spaces")
        return 0.5 * float(np.sum(np.abs(self._probs - other.probs)))

    @classmethod
    def from_tensor(cls, variables: Sequence[Variable], tensor: np.ndarray) -> 'JointDistribution':
        """Create a distribution from a tensor shaped like the value spaces."""
        return cls(variables, np.asarray(tensor).ravel())

    @classmethod
    def from_function(cls, variables: Sequence[Variable],
                      fn: Callable[[Dict[str, str]], float]) -> 'JointDistribution':
        """
        Create a distribution by evaluating a mass function on every setting.

        Args:
            variables: Ordered variables
            fn: Maps a setting (name -> label) to its probability
        """
        names = [v.name for v in variables]
        probs = [fn(dict(zip(names, s))) for s in itertools.product(*(v.values for v in variables))]
        return cls(variables, probs)

    @classmethod
    def from_samples(cls, variables: Sequence[Variable],
                     outcomes: Iterable[Tuple[Mapping[str, str], float]]) -> 'JointDistribution':
        """
        Create a distribution from weighted outcomes, e.g. an enumeration of coins.

        Args:
            variables: Ordered variables
            outcomes: Pairs (setting, weight); weights of repeated settings add up
        """
        variables = tuple(variables)
        shape = tuple(v.size for v in variables)
        tensor = np.zeros(shape)
        for setting, weight in outcomes:
            index = tuple(v.index(setting[v.name]) for v in variables)
            tensor[index] += weight
        return cls.from_tensor(variables, tensor)

    @classmethod
    def point_mass(cls, variables: Sequence[Variable], setting: Mapping[str, str]) -> 'JointDistribution':
        """Distribution placing all mass on one joint setting."""
        return cls.from_samples(variables, [(setting, 1.0)])

    @classmethod
    def uniform(cls, variables: Sequence[Variable]) -> 'JointDistribution':
        """Uniform distribution over all joint settings."""
        variables = tuple(variables)
        n = int(np.prod([v.size for v in variables], dtype=np.int64))
        return cls(variables, np.full(n, 1.0 / n))

    @classmethod
    def unit(cls) -> 'JointDistribution':
        """The distribution over no variables."""
        return cls((), [1.0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self._probs, other.probs)

    def __hash__(self) -> int:
        return hash((self.variables, self._probs.tobytes()))

    def __repr__(self) -> str:
        return f"JointDistribution({list(self.names)}, support={int(np.count_nonzero(self._probs))})"


class Event:
    """
    A set of joint settings over a stated list of variables.

    Members are stored as flat indices into the joint value space of
    ``variables`` (last variable fastest).
    """

    def __init__(self, variables: Sequence[Variable], indices: Iterable[int]):
        """
        Initialize an event.

        Args:
            variables: Variables the event is stated over
            indices: Flat joint-setting indices of the member settings

        Raises:
            ValidationError: If an index is out of range
        """
        self.variables = tuple(variables)
        _check_unique(self.variables)
        self.shape = tuple(v.size for v in self.variables)
        size = int(np.prod(self.shape, dtype=np.int64))
        members = frozenset(int(i) for i in indices)
        if any(i < 0 or i >= size for i in members):
            raise ValidationError("Event index out of range")
        self.indices = members

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def mask(self) -> np.ndarray:
        """Boolean tensor over the event's variables marking member settings."""
        flat = np.zeros(int(np.prod(self.shape, dtype=np.int64)), dtype=bool)
        flat[list(self.indices)] = True
        return flat.reshape(self.shape)

    @classmethod
    def from_settings(cls, variables: Sequence[Variable],
                      settings: Iterable[Union[Mapping[str, str], Sequence[str]]]) -> 'Event':
        """Create an event from explicit settings (mappings or label tuples)."""
        variables = tuple(variables)
        shape = tuple(v.size for v in variables)
        indices = []
        for setting in settings:
            if isinstance(setting, Mapping):
                setting = [setting[v.name] for v in variables]
            coords = tuple(v.index(s) for v, s in zip(variables, setting))
            indices.append(int(np.ravel_multi_index(coords, shape)) if shape else 0)
        return cls(variables, indices)

    @classmethod
    def from_predicate(cls, variables: Sequence[Variable],
                       predicate: Callable[[Dict[str, str]], bool]) -> 'Event':
        """Create the event of all settings satisfying a predicate."""
        variables = tuple(variables)
        names = [v.name for v in variables]
        spaces = itertools.product(*(v.values for v in variables))
        return cls(variables, [i for i, s in enumerate(spaces) if predicate(dict(zip(names, s)))])

    @classmethod
    def full(cls, variables: Sequence[Variable]) -> 'Event':
        """The sure event over the given variables."""
        variables = tuple(variables)
        return cls(variables, range(int(np.prod([v.size for v in variables], dtype=np.int64))))

    def settings(self) -> List[Tuple[str, ...]]:
        """Member settings as label tuples, in flat-index order."""
        members = []
        for i in sorted(self.indices):
            coords = np.unravel_index(i, self.shape) if self.shape else ()
            members.append(tuple(v.values[int(c)] for v, c in zip(self.variables, coords)))
        return members

    def __contains__(self, index: int) -> bool:
        return index in self.indices

    def __len__(self) -> int:
        return len(self.indices)

    def __repr__(self) -> str:
        return f"Event({list(self.names)}, size={len(self.indices)})"


def marginal(d: JointDistribution, subset: Names) -> JointDistribution:
    """
    Marginalize a distribution onto a subset of its variables.

    Args:
        d: Joint distribution
        subset: Variable names to keep, in the desired output order

    Returns:
        Distribution over ``subset`` in the given order

    Raises:
        ValidationError: If a name is unknown or repeated
    """
    subset = as_names(subset)
    keep = d.axes(subset)
    if len(set(keep)) != len(keep):
        raise ValidationError(ERROR_MESSAGES['duplicate_variable'].format(names=list(subset)))
    drop = tuple(a for a in range(len(d.variables)) if a not in keep)
    tensor = d.tensor.sum(axis=drop) if drop else d.tensor
    # Remaining axes are in d's order; permute them into the requested order.
    remaining = sorted(keep)
    perm = [remaining.index(a) for a in keep]
    tensor = np.transpose(tensor, perm)
    return JointDistribution.from_tensor([d.variables[a] for a in keep], tensor)


def event_mask(d: JointDistribution, e: Event) -> np.ndarray:
    """Broadcast an event's indicator onto the tensor axes of ``d``."""
    axes = d.axes(e.names)
    for axis, var in zip(axes, e.variables):
        if d.variables[axis] != var:
            raise ValidationError(f"Event variable {var.name!r} does not match the distribution's value space")
    mask = e.mask()
    # Put the event axes in d's order, then insert singleton axes for the rest.
    order = np.argsort(axes)
    mask = np.transpose(mask, order) if mask.ndim else mask
    shape = [1] * len(d.variables)
    for axis in axes:
        shape[axis] = d.variables[axis].size
    return mask.reshape(shape)


def probability(d: JointDistribution, e: Event) -> float:
    """Probability of an event under ``d``."""
    return float(np.sum(d.tensor * event_mask(d, e)))


def condition(d: JointDistribution, e: Event) -> JointDistribution:
    """
    Condition a distribution on an event.

    Args:
        d: Joint distribution
        e: Event over a subset of d's variables

    Returns:
        Renormalized restriction of ``d`` to ``e`` over the same variables

    Raises:
        ZeroProbabilityError: If the event has probability zero
    """
    restricted = d.tensor * event_mask(d, e)
    total = float(restricted.sum())
    if total <= 0.0:
        raise ZeroProbabilityError(ERROR_MESSAGES['zero_event'])
    return JointDistribution.from_tensor(d.variables, restricted / total)


def product(d1: JointDistribution, d2: JointDistribution) -> JointDistribution:
    """
    Independent product of two distributions over disjoint variables.

    Args:
        d1: First factor (its variables come first)
        d2: Second factor

    Returns:
        Product distribution over d1's variables followed by d2's

    Raises:
        ValidationError: If the factors share a variable name
    """
    shared = sorted(set(d1.names) & set(d2.names))
    if shared:
        raise ValidationError(ERROR_MESSAGES['shared_variable'].format(names=shared))
    return JointDistribution(d1.variables + d2.variables, np.outer(d1.probs, d2.probs).ravel())


def contingency(d: JointDistribution, rows: Names, cols: Names) -> np.ndarray:
    """
    Joint table P(rows = r, cols = c) as a 2-d array.

    ``rows`` and ``cols`` may overlap or be empty; an empty side has a single
    (trivial) setting.

    Returns:
        Array of shape (|V(rows)|, |V(cols)|)
    """
    rows, cols = as_names(rows), as_names(cols)
    union = tuple(dict.fromkeys(rows + cols))
    m = marginal(d, union)
    sizes = m.shape

    coords = np.indices(sizes).reshape(len(union), -1) if union else np.zeros((0, 1), dtype=int)

    def flat_index(names):
        if not names:
            return np.zeros(coords.shape[1], dtype=np.int64), 1
        pos = [union.index(n) for n in names]
        dims = tuple(sizes[p] for p in pos)
        return np.ravel_multi_index(tuple(coords[p] for p in pos), dims), int(np.prod(dims))

    r_idx, n_rows = flat_index(rows)
    c_idx, n_cols = flat_index(cols)
    table = np.zeros((n_rows, n_cols))
    np.add.at(table, (r_idx, c_idx), m.probs)
    return table


def check_determines(d: JointDistribution, S: Names, T: Names, tol: float = DEFAULT_TOL) -> bool:
    """
    Test whether S functionally determines T under ``d``.

    Args:
        d: Joint distribution
        S: Determining variables (may be empty)
        T: Determined variables (may be empty)
        tol: Probabilities at or below tol count as zero

    Returns:
        True iff every setting s with P(s) > tol has exactly one t with P(s, t) > tol
    """
    table = contingency(d, S, T)
    live = table.sum(axis=1) > tol
    counts = np.count_nonzero(table[live] > tol, axis=1)
    return bool(np.all(counts == 1))


def check_ci(d: JointDistribution, X: Names, Y: Names, Z: Names = (), tol: float = DEFAULT_TOL) -> bool:
    """
    Test the conditional independence X ⫫ Y | Z.

    Args:
        d: Joint distribution
        X, Y: Variable sets tested for independence
        Z: Conditioning set
        tol: Bits of conditional mutual information tolerated

    Returns:
        True iff I(X; Y | Z) <= tol
    """
    from .information import mutual_information

    return mutual_information(d, X, Y, Z) <= tol
