"""
Witness extensions: a distribution over the model variables together with
one noise variable per hyperarc.
"""

from typing import Dict, Mapping, Sequence, Tuple

from ..prob.distributions import JointDistribution, marginal
from ..utils.constants import ERROR_MESSAGES
from ..utils.errors import ValidationError


class Witness:
    """
    A candidate witness for QIM-compatibility.

    ``arc_map`` sends every arc label to the name of its noise variable;
    the noise variables are exactly the variables of ``joint`` outside
    ``base_vars``.
    """

    def __init__(self, joint: JointDistribution, arc_map: Mapping[str, str], base_vars: Sequence[str]):
        """
        Initialize a witness.

        Args:
            joint: Distribution over base and noise variables
            arc_map: Arc label -> noise variable name (injective)
            base_vars: Names of the model variables

        Raises:
            ValidationError: If the map is not a bijection onto the noise variables
        """
        base_vars = tuple(base_vars)
        missing = sorted(set(base_vars) - set(joint.names))
        if missing:
            raise ValidationError(ERROR_MESSAGES['unknown_variable'].format(names=missing))
        noise = set(joint.names) - set(base_vars)
        targets = list(arc_map.values())
        if len(set(targets)) != len(targets) or set(targets) != noise:
            raise ValidationError(ERROR_MESSAGES['arc_map_mismatch'].format(
                detail=f"noise variables {sorted(noise)} vs mapped {sorted(targets)}"))

        self.joint = joint
        self.arc_map: Dict[str, str] = dict(arc_map)
        self.base_vars: Tuple[str, ...] = base_vars

    @property
    def noise_vars(self) -> Tuple[str, ...]:
        """Noise variable names in arc-map order."""
        return tuple(self.arc_map.values())

    def noise(self, label: str) -> str:
        try:
            return self.arc_map[label]
        except KeyError:
            raise ValidationError(ERROR_MESSAGES['unknown_arc'].format(labels=[label])) from None

    def base_distribution(self) -> JointDistribution:
        """Marginal on the model variables."""
        return marginal(self.joint, self.base_vars)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Witness):
            return NotImplemented
        return (self.joint == other.joint and self.arc_map == other.arc_map
                and self.base_vars == other.base_vars)

    def __repr__(self) -> str:
        return f"Witness(base={list(self.base_vars)}, arcs={self.arc_map})"
