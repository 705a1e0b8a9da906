"""
Core algorithms: scoring, decision procedures and causal models.
"""

from .witness import Witness
from .scoring import idef, certify_incompatible, siminc, siminc_upper_bound, SimincOptions, SimincResult
from .compat import (
    VerificationReport, CompatVerdict, ParallelArcReport, verify_witness, decide_bn, bn_witness,
    decide_parallel_func, transport_witness, decide_general,
)
from .causal import (
    Equation, GRPSEM, InterventionReport, derandomize_cpd, solutions, in_solution_set,
    arising_distribution, intervene, do_event, witness_to_psem, sem_to_witness, check_theorem6,
)
from .formulas import Atom, Not, And, Or, Box, Diamond, TRUE, FALSE, eval_formula, formula_probability

__all__ = [
    'Witness',
    'idef', 'certify_incompatible', 'siminc', 'siminc_upper_bound', 'SimincOptions', 'SimincResult',
    'VerificationReport', 'CompatVerdict', 'ParallelArcReport', 'verify_witness', 'decide_bn',
    'bn_witness', 'decide_parallel_func', 'transport_witness', 'decide_general',
    'Equation', 'GRPSEM', 'InterventionReport', 'derandomize_cpd', 'solutions', 'in_solution_set',
    'arising_distribution', 'intervene', 'do_event', 'witness_to_psem', 'sem_to_witness',
    'check_theorem6',
    'Atom', 'Not', 'And', 'Or', 'Box', 'Diamond', 'TRUE', 'FALSE', 'eval_formula', 'formula_probability',
]
