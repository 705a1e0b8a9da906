"""
Golden example corpus.

Named distributions are built by enumerating the fair coins they are
defined from; named hypergraphs cover the graphs those distributions are
tested against. Every CorpusEntry pairs one of each with the results the
pipeline is expected to reproduce.
"""

import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core.compat import decide_bn, decide_general, verify_witness
from .core.scoring import SimincOptions, idef
from .core.witness import Witness
from .graphs.hypergraph import DirectedHypergraph, Hyperarc, as_dag, from_graph, noise_name
from .prob.distributions import JointDistribution, Variable, check_ci, check_determines
from .prob.information import information_profile
from .utils import serialization

logger = logging.getLogger(__name__)

# Absolute tolerance on expected information quantities (bits).
BITS_TOL = 1e-9


def _bits(*values: int) -> str:
    return "".join(str(v) for v in values)


def _coins(n: int) -> Iterable[Tuple[int, ...]]:
    return itertools.product((0, 1), repeat=n)


def _bit_strings(n: int) -> List[str]:
    return [_bits(*c) for c in _coins(n)]


def _two_bit(name: str) -> Variable:
    return Variable(name, _bit_strings(2))


def xor_distribution() -> JointDistribution:
    """A and C fair coins, B their parity."""
    variables = [Variable.binary(n) for n in "ABC"]
    outcomes = [({'A': str(a), 'B': str(a ^ c), 'C': str(c)}, 0.25) for a, c in _coins(2)]
    return JointDistribution.from_samples(variables, outcomes)


def p_distribution() -> JointDistribution:
    """Three coins shared pairwise: A = (X1, X2), B = (X2, X3), C = (X3, X1)."""
    variables = [_two_bit(n) for n in "ABC"]
    outcomes = [({'A': _bits(x1, x2), 'B': _bits(x2, x3), 'C': _bits(x3, x1)}, 0.125)
                for x1, x2, x3 in _coins(3)]
    return JointDistribution.from_samples(variables, outcomes)


def q_distribution() -> JointDistribution:
    """A = (X1, X2), B = (X1, X3), C = (X1, X2 xor X3)."""
    variables = [_two_bit(n) for n in "ABC"]
    outcomes = [({'A': _bits(x1, x2), 'B': _bits(x1, x3), 'C': _bits(x1, x2 ^ x3)}, 0.125)
                for x1, x2, x3 in _coins(3)]
    return JointDistribution.from_samples(variables, outcomes)


def q_witness() -> Witness:
    """
    Witness of Q for the 3-cycle: U_AB = X3 xor X1, U_BC = X2, U_CA = X3.
    """
    base = [_two_bit(n) for n in "ABC"]
    noise = [Variable.binary(noise_name(label)) for label in ("AB", "BC", "CA")]
    outcomes = []
    for x1, x2, x3 in _coins(3):
        setting = {'A': _bits(x1, x2), 'B': _bits(x1, x3), 'C': _bits(x1, x2 ^ x3),
                   noise_name('AB'): str(x3 ^ x1), noise_name('BC'): str(x2), noise_name('CA'): str(x3)}
        outcomes.append((setting, 0.125))
    joint = JointDistribution.from_samples(base + noise, outcomes)
    return Witness(joint, {label: noise_name(label) for label in ("AB", "BC", "CA")}, ("A", "B", "C"))


def two_roots_counterexample() -> JointDistribution:
    """X and Z fair coins, Y a copy of X."""
    variables = [Variable.binary(n) for n in "XYZ"]
    outcomes = [({'X': str(x), 'Y': str(x), 'Z': str(z)}, 0.25) for x, z in _coins(2)]
    return JointDistribution.from_samples(variables, outcomes)


def two_coins() -> JointDistribution:
    """Independent fair coins X and Y."""
    return JointDistribution.uniform([Variable.binary('X'), Variable.binary('Y')])


def correlated_pair() -> JointDistribution:
    """X a fair coin, Y equal to X with probability 3/4."""
    return JointDistribution([Variable.binary('X'), Variable.binary('Y')], [0.375, 0.125, 0.125, 0.375])


def parallel_arcs_labels(n: int) -> List[str]:
    return [f"fwd{i}" for i in range(1, n + 1)]


def parallel_arcs_witness(n: int = 3) -> Witness:
    """
    Witness for n parallel arcs X -> Y plus one arc Y -> X in which X does not determine Y.

    With coins U0..Un and a, X = (a xor U_i for i >= 1, U0 xor U_i for i >= 1)
    and Y = (a, U0 xor U_i for i >= 1). Y and U0 give X back; X and U_i give Y.
    """
    if n < 1:
        raise ValueError("Need at least one forward arc")
    labels = ['back'] + parallel_arcs_labels(n)
    base = [Variable('X', _bit_strings(2 * n)), Variable('Y', _bit_strings(n + 1))]
    noise = [Variable.binary(noise_name(label)) for label in labels]
    weight = 0.5 ** (n + 2)
    outcomes = []
    for a, *u in _coins(n + 2):
        u0, rest = u[0], u[1:]
        shared = [u0 ^ ui for ui in rest]
        setting = {'X': _bits(*[a ^ ui for ui in rest], *shared), 'Y': _bits(a, *shared)}
        setting.update({noise_name(label): str(ui) for label, ui in zip(labels, u)})
        outcomes.append((setting, weight))
    joint = JointDistribution.from_samples(base + noise, outcomes)
    return Witness(joint, {label: noise_name(label) for label in labels}, ('X', 'Y'))


def build_corpus_distributions() -> Dict[str, JointDistribution]:
    """All named distributions of the corpus."""
    return {
        'xor': xor_distribution(),
        'P': p_distribution(),
        'Q': q_distribution(),
        'two_roots_counterexample': two_roots_counterexample(),
        'parallel_arcs': parallel_arcs_witness(3).base_distribution(),
        'coin': JointDistribution.uniform([Variable.binary('X')]),
        'two_coins': two_coins(),
        'correlated_pair': correlated_pair(),
    }


def build_corpus_witnesses() -> Dict[str, Witness]:
    return {'Q': q_witness(), 'parallel_arcs': parallel_arcs_witness(3)}


def build_corpus_hypergraphs() -> Dict[str, DirectedHypergraph]:
    """All named hypergraphs of the corpus."""
    abc = ['A', 'B', 'C']
    return {
        'chain': from_graph(abc, [('A', 'B'), ('B', 'C')]),
        'collider': from_graph(abc, [('A', 'B'), ('C', 'B')]),
        'undirected_chain': from_graph(abc, undirected_edges=[('A', 'B'), ('B', 'C')]),
        'cycle2': DirectedHypergraph(['X', 'Y'], [Hyperarc('XY', {'X'}, {'Y'}), Hyperarc('YX', {'Y'}, {'X'})]),
        'cycle3': DirectedHypergraph(abc, [Hyperarc('AB', {'A'}, {'B'}), Hyperarc('BC', {'B'}, {'C'}),
                                           Hyperarc('CA', {'C'}, {'A'})]),
        'two_priors': DirectedHypergraph(['X'], [Hyperarc('x1', (), {'X'}), Hyperarc('x2', (), {'X'})]),
        'two_roots': DirectedHypergraph(['X', 'Y'], [Hyperarc('X', (), {'X'}), Hyperarc('Y', (), {'Y'})]),
        'parallel_arcs': DirectedHypergraph(['X', 'Y'], [Hyperarc('back', {'Y'}, {'X'})]
                                            + [Hyperarc(label, {'X'}, {'Y'}) for label in parallel_arcs_labels(3)]),
    }


@dataclass
class CorpusEntry:
    """
    One golden case.

    Recognised ``expected`` keys: idef_bits, verdict, clause, bn (decide_bn
    on the dag hypergraph), witness_verifies, profile_equals (name of another
    distribution), independent ([X, Y, Z, holds]), determines ([S, T, holds]).
    """

    name: str
    distribution: str
    hypergraph: str
    expected: Dict[str, object]
    note: str = ""
    witness: Optional[str] = None

    def as_dict(self) -> Dict[str, object]:
        doc = {'name': self.name, 'distribution': self.distribution, 'hypergraph': self.hypergraph,
               'expected': dict(self.expected), 'note': self.note}
        if self.witness:
            doc['witness'] = self.witness
        return doc


def build_corpus() -> List[CorpusEntry]:
    """The shipped corpus entries."""
    return [
        CorpusEntry('xor-cycle3', 'xor', 'cycle3', {'idef_bits': 1.0, 'verdict': 'incompatible'},
                    "parity of two coins: negative interaction information rules out the 3-cycle"),
        CorpusEntry('xor-collider', 'xor', 'collider', {'bn': True, 'verdict': 'compatible'},
                    "the parity is a Bayesian network on the collider"),
        CorpusEntry('xor-undirected-chain', 'xor', 'undirected_chain',
                    {'verdict': 'compatible', 'independent': [['A'], ['C'], ['B'], False]},
                    "compatible through the collider although A and C are dependent given B"),
        CorpusEntry('q-cycle3', 'Q', 'cycle3', {'idef_bits': 0.0, 'witness_verifies': True},
                    "explicit witness with independent noise on each arc", witness='Q'),
        CorpusEntry('p-cycle3', 'P', 'cycle3', {'idef_bits': 0.0, 'profile_equals': 'Q'},
                    "P and Q share an information profile"),
        CorpusEntry('two-roots-counterexample', 'two_roots_counterexample', 'two_roots',
                    {'idef_bits': 0.0, 'independent': [['X'], ['Y'], [], False], 'verdict': 'unknown'},
                    "zero information deficiency without the independence the graph demands"),
        CorpusEntry('two-roots-coins', 'two_coins', 'two_roots', {'idef_bits': 0.0, 'verdict': 'compatible'},
                    "two independent mechanisms fit two independent coins"),
        CorpusEntry('two-priors-coin', 'coin', 'two_priors',
                    {'idef_bits': 1.0, 'verdict': 'incompatible', 'clause': 'two-parallel-arcs-determination'},
                    "two independent causes of one variable force it to be constant"),
        CorpusEntry('cycle2-correlated', 'correlated_pair', 'cycle2', {'verdict': 'compatible'},
                    "every distribution fits the 2-cycle"),
        CorpusEntry('parallel-arcs', 'parallel_arcs', 'parallel_arcs',
                    {'idef_bits': -1.0, 'witness_verifies': True, 'determines': [['X'], ['Y'], False]},
                    "three parallel arcs X -> Y without Y being a function of X", witness='parallel_arcs'),
    ]


def _close(observed: float, expected: float) -> bool:
    return abs(observed - expected) <= BITS_TOL


def _check_entry(entry: CorpusEntry, d: JointDistribution, A: DirectedHypergraph,
                 distributions: Dict[str, JointDistribution], witnesses: Dict[str, Witness],
                 options: Optional[SimincOptions]) -> Dict[str, Dict[str, object]]:
    checks: Dict[str, Dict[str, object]] = {}

    def record(key: str, observed, ok: bool) -> None:
        checks[key] = {'expected': entry.expected[key], 'observed': observed, 'ok': bool(ok)}

    exp = entry.expected
    if 'idef_bits' in exp:
        value = idef(A, d)
        record('idef_bits', value, _close(value, float(exp['idef_bits'])))
    if 'verdict' in exp or 'clause' in exp:
        verdict = decide_general(A, d, options)
        if 'verdict' in exp:
            record('verdict', verdict.status, verdict.status == exp['verdict'])
        if 'clause' in exp:
            clause = (verdict.certificate or {}).get('clause')
            record('clause', clause, clause == exp['clause'])
    if 'bn' in exp:
        G = as_dag(A)
        holds = G is not None and decide_bn(G, d)
        record('bn', holds, holds == exp['bn'])
    if 'witness_verifies' in exp:
        report = verify_witness(d, A, witnesses[entry.witness])
        record('witness_verifies', report.passed, report.passed == exp['witness_verifies'])
    if 'profile_equals' in exp:
        other = distributions[exp['profile_equals']]
        same = information_profile(d).allclose(information_profile(other), BITS_TOL)
        record('profile_equals', same, same)
    if 'independent' in exp:
        X, Y, Z, want = exp['independent']
        holds = check_ci(d, X, Y, Z)
        record('independent', holds, holds == want)
    if 'determines' in exp:
        S, T, want = exp['determines']
        holds = check_determines(d, S, T)
        record('determines', holds, holds == want)
    return checks


def run_corpus(entries: Optional[Sequence[CorpusEntry]] = None,
               options: Optional[SimincOptions] = None) -> List[Dict[str, object]]:
    """
    Recompute every expectation of the corpus.

    Returns:
        One report per entry with its checks and an overall ``passed`` flag
    """
    entries = build_corpus() if entries is None else entries
    distributions = build_corpus_distributions()
    hypergraphs = build_corpus_hypergraphs()
    witnesses = build_corpus_witnesses()

    reports = []
    for entry in entries:
        checks = _check_entry(entry, distributions[entry.distribution], hypergraphs[entry.hypergraph],
                              distributions, witnesses, options)
        passed = all(c['ok'] for c in checks.values())
        if passed:
            logger.info("Corpus entry %s passed", entry.name)
        else:
            logger.warning("Corpus entry %s failed: %s", entry.name,
                           sorted(k for k, c in checks.items() if not c['ok']))
        reports.append({'name': entry.name, 'passed': passed, 'checks': checks})
    return reports


def write_corpus(directory) -> List[Path]:
    """
    Write the corpus as JSON files under ``directory``.

    Layout: distributions/<name>.json, hypergraphs/<name>.json,
    witnesses/<name>.json and corpus.json listing the entries.
    """
    root = Path(directory)
    written = []
    groups = (
        ('distributions', build_corpus_distributions(), serialization.distribution_to_json),
        ('hypergraphs', build_corpus_hypergraphs(), serialization.hypergraph_to_json),
        ('witnesses', build_corpus_witnesses(), serialization.witness_to_json),
    )
    for sub, items, encode in groups:
        (root / sub).mkdir(parents=True, exist_ok=True)
        for name, item in items.items():
            path = root / sub / f"{name}.json"
            serialization.write_json(path, encode(item))
            written.append(path)
    manifest = root / "corpus.json"
    serialization.write_json(manifest, {'entries': [e.as_dict() for e in build_corpus()]})
    written.append(manifest)
    logger.info("Wrote %d corpus files to %s", len(written), root)
    return written
