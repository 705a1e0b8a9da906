"""
QIM-Compatibility Toolkit

Decides whether a finite joint distribution is compatible with a directed
hypergraph of independent mechanisms: each hyperarc gets its own independent
noise source, and its targets must be a function of its sources and that
noise. Provides exact special cases, information-theoretic scores, witness
verification and generalized randomized structural equations models.

License: MIT
"""

__version__ = "1.0.0"

from .prob.distributions import Variable, JointDistribution, Event
from .graphs.hypergraph import Hyperarc, DirectedHypergraph
from .core.witness import Witness
from .core.scoring import idef, siminc, SimincOptions, SimincResult
from .core.compat import decide_general, verify_witness, CompatVerdict
from .core.causal import GRPSEM

__all__ = [
    "Variable",
    "JointDistribution",
    "Event",
    "Hyperarc",
    "DirectedHypergraph",
    "Witness",
    "idef",
    "siminc",
    "SimincOptions",
    "SimincResult",
    "decide_general",
    "verify_witness",
    "CompatVerdict",
    "GRPSEM",
]
