"""
Shannon information quantities over joint distributions.

All quantities are in bits. Conventions: 0·log 0 = 0 and x·log(x/0) = +inf
for x > 0. The information profile decomposes every (conditional) entropy
and mutual information of a distribution into 2^n − 1 signed atoms, one per
nonempty subset of variables.
"""

import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .distributions import JointDistribution, Names, as_names, contingency, marginal, product
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)


def _plogp(p: np.ndarray) -> float:
    """Return -sum p log2 p over positive entries."""
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def entropy(d: JointDistribution, S: Names = None) -> float:
    """
    Entropy of the marginal of ``d`` on S.

    Args:
        d: Joint distribution
        S: Variable names (defaults to all variables of d)

    Returns:
        H(S) in bits, nonnegative
    """
    if S is None:
        return max(_plogp(d.probs), 0.0)
    names = tuple(dict.fromkeys(as_names(S)))
    return max(_plogp(marginal(d, names).probs), 0.0)


def conditional_entropy(d: JointDistribution, T: Names, S: Names = ()) -> float:
    """
    Conditional entropy H(T | S).

    Computed term by term as -sum p(s,t) log2(p(s,t)/p(s)), which is exactly
    zero whenever S determines T.

    Args:
        d: Joint distribution
        T: Target variables
        S: Conditioning variables

    Returns:
        H(T | S) = H(S ∪ T) − H(S) in bits
    """
    table = contingency(d, S, T)
    row = table.sum(axis=1, keepdims=True)
    mask = table > 0.0
    ratio = np.where(mask, table / np.where(row > 0.0, row, 1.0), 1.0)
    return float(-np.sum(table[mask] * np.log2(ratio[mask])))


def co_information(d: JointDistribution, family: Sequence[Names], cond: Names = ()) -> float:
    """
    Co-information (interaction information) of a family of variable sets.

    Defined as −Σ_{∅≠T⊆family} (−1)^{|T|} H(∪T | cond). For one set this is
    H(X | cond); for two sets it is the conditional mutual information; for
    three it is I(X;Y;Z | cond).

    Args:
        d: Joint distribution
        family: Nonempty list of variable sets
        cond: Conditioning variables

    Returns:
        Signed quantity in bits
    """
    family = [as_names(f) for f in family]
    if not family:
        raise ValidationError("co_information needs a nonempty family")
    total = 0.0
    k = len(family)
    for mask in range(1, 1 << k):
        members = [family[i] for i in range(k) if mask >> i & 1]
        union = tuple(dict.fromkeys(n for f in members for n in f))
        sign = -1.0 if bin(mask).count("1") % 2 == 0 else 1.0
        total += sign * conditional_entropy(d, union, cond)
    return total


def mutual_information(d: JointDistribution, X: Names, Y: Names, Z: Names = ()) -> float:
    """
    Conditional mutual information I(X; Y | Z) in bits.

    Args:
        d: Joint distribution
        X, Y: Variable sets
        Z: Conditioning set

    Returns:
        I(X; Y | Z), nonnegative up to rounding
    """
    return co_information(d, [X, Y], Z)


def total_correlation(d: JointDistribution, groups: Sequence[Names]) -> float:
    """
    Multi-information Σ_i H(G_i) − H(∪ G_i) of disjoint variable groups.

    Equals the relative entropy between the joint marginal of the groups and
    the product of their marginals.
    """
    groups = [as_names(g) for g in groups]
    union = tuple(n for g in groups for n in g)
    return sum(entropy(d, g) for g in groups) - entropy(d, union)


def kl_divergence(p: JointDistribution, q: JointDistribution) -> float:
    """
    Relative entropy D(p || q) in bits.

    Args:
        p: Distribution
        q: Distribution over the same variables (reordered if needed)

    Returns:
        D(p || q) >= 0, or +inf when p puts mass outside q's support

    Raises:
        ValidationError: If the variables or value spaces differ
    """
    if sorted(p.names) != sorted(q.names):
        raise ValidationError("kl_divergence needs identical variable lists")
    q = q.reorder(p.names)
    if q.variables != p.variables:
        raise ValidationError("kl_divergence needs identical value spaces")

    pp, qq = p.probs, q.probs
    live = pp > 0.0
    if np.any(qq[live] <= 0.0):
        logger.warning("Support violation in kl_divergence over %s; returning inf", list(p.names))
        return float('inf')
    return max(float(np.sum(pp[live] * np.log2(pp[live] / qq[live]))), 0.0)


def independence_gap(d: JointDistribution, names: Sequence[str]) -> float:
    """
    D(d(names) || Π_i d(name_i)) computed as a relative entropy.

    Used to check mutual independence of noise variables.
    """
    names = list(names)
    if len(names) <= 1:
        return 0.0
    joint = marginal(d, names)
    factors = marginal(d, names[0])
    for n in names[1:]:
        factors = product(factors, marginal(d, n))
    return kl_divergence(joint, factors)


class InformationProfile:
    """
    Signed information atoms of a distribution, one per nonempty subset.

    atom(W) is the co-information of the singletons of W conditioned on all
    variables outside W. Subsets are represented as frozensets of names.
    """

    def __init__(self, variables: Sequence[str], atoms: Mapping[FrozenSet[str], float]):
        """
        Initialize a profile.

        Args:
            variables: Ordered variable names
            atoms: Mapping from every nonempty subset to its atom value (bits)
        """
        self.variables = tuple(variables)
        self.atoms = {frozenset(k): float(v) for k, v in atoms.items()}
        if len(self.atoms) != (1 << len(self.variables)) - 1:
            raise ValidationError("An information profile needs exactly 2^n - 1 atoms")

    def __getitem__(self, subset: Names) -> float:
        return self.atoms[frozenset(as_names(subset))]

    def total(self) -> float:
        """Sum of all atoms, equal to the joint entropy."""
        return float(sum(self.atoms.values()))

    def conditional_entropy(self, T: Names, S: Names = ()) -> float:
        """Reconstruct H(T | S) as the sum of atoms meeting T and avoiding S."""
        T, S = set(as_names(T)), set(as_names(S))
        return float(sum(v for w, v in self.atoms.items() if w & T and not w & S))

    def dot(self, coeffs: Mapping[FrozenSet[str], float]) -> float:
        """Inner product with a coefficient vector keyed by subsets."""
        return float(sum(v * coeffs.get(w, 0.0) for w, v in self.atoms.items()))

    def allclose(self, other: 'InformationProfile', tol: float = 1e-9) -> bool:
        if set(self.variables) != set(other.variables):
            return False
        return all(abs(v - other.atoms[w]) <= tol for w, v in self.atoms.items())

    @staticmethod
    def key(subset: Iterable[str]) -> str:
        """Serialization key: comma-joined sorted names."""
        return ",".join(sorted(subset))

    def as_dict(self) -> Dict[str, float]:
        ordered = sorted(self.atoms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return {self.key(w): v for w, v in ordered}

    def __repr__(self) -> str:
        return f"InformationProfile({list(self.variables)})"


def subset_entropies(d: JointDistribution) -> np.ndarray:
    """
    Entropies of every subset of d's variables, indexed by bitmask.

    Bit i of the mask selects ``d.variables[i]``.
    """
    names = d.names
    n = len(names)
    h = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        h[mask] = entropy(d, [names[i] for i in range(n) if mask >> i & 1])
    return h


def information_profile(d: JointDistribution) -> InformationProfile:
    """
    Compute the information profile of a distribution.

    Atoms are obtained by inclusion-exclusion over the 2^n subset entropies:
    atom(W) = −Σ_{∅≠T⊆W} (−1)^{|T|} [H(T ∪ C) − H(C)] with C the complement of W.

    Args:
        d: Joint distribution over n variables

    Returns:
        Profile with 2^n − 1 atoms
    """
    names = d.names
    n = len(names)
    full = (1 << n) - 1
    h = subset_entropies(d)
    atoms: Dict[FrozenSet[str], float] = {}
    for w in range(1, full + 1):
        c = full & ~w
        value = 0.0
        t = w
        while t:
            sign = 1.0 if bin(t).count("1") % 2 == 1 else -1.0
            value += sign * (h[t | c] - h[c])
            t = (t - 1) & w
        atoms[frozenset(names[i] for i in range(n) if w >> i & 1)] = value
    return InformationProfile(names, atoms)
