#!/usr/bin/env python3
"""
Unit tests for structural equations models.

Covers equations, solutions, interventions, derandomization, do-events,
conversions between witnesses and models, and the comparison between
do-conditioning and intervention.
"""

import unittest
import numpy as np
import sys
import os

from hypothesis import given, settings, strategies as st

# Add the src directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from qim_compat.corpus import build_corpus_hypergraphs, q_witness, xor_distribution
from qim_compat.core.causal import (
    Equation, GRPSEM, derandomize_cpd, function_outputs, solutions, in_solution_set,
    arising_distribution, intervene, do_event, witness_to_psem, sem_to_witness, check_theorem6,
)
from qim_compat.core.compat import bn_model, verify_witness
from qim_compat.core.formulas import Atom
from qim_compat.core.witness import Witness
from qim_compat.graphs.hypergraph import DirectedHypergraph, Hyperarc, from_graph
from qim_compat.prob.distributions import JointDistribution, Variable, marginal, probability
from qim_compat.utils.errors import ValidationError


def xor_model():
    """X = U_X and Y = X xor U_Y with fair coins."""
    X, Y = Variable.binary('X'), Variable.binary('Y')
    ux, uy = Variable.binary('U__X'), Variable.binary('U__Y')
    structure = DirectedHypergraph('XY', [Hyperarc('X', (), {'X'}), Hyperarc('Y', {'X'}, {'Y'})])
    equations = {
        'X': Equation.from_function('X', [], ux, [X], lambda s: {'X': s['U__X']}),
        'Y': Equation.from_function('Y', [X], uy, [Y],
                                    lambda s: {'Y': str(int(s['X']) ^ int(s['U__Y']))}),
    }
    noise = {'X': JointDistribution.uniform([ux]), 'Y': JointDistribution([uy], [0.75, 0.25])}
    return GRPSEM(structure, [X, Y], noise, equations)


def cyclic_model(negate):
    """X = Y and Y = X (or Y = not X) with trivial noise."""
    X, Y = Variable.binary('X'), Variable.binary('Y')
    uf, ug = Variable('U__f', ['0']), Variable('U__g', ['0'])
    structure = DirectedHypergraph('XY', [Hyperarc('f', {'Y'}, {'X'}), Hyperarc('g', {'X'}, {'Y'})])
    flip = (lambda v: str(1 - int(v))) if negate else (lambda v: v)
    equations = {
        'f': Equation.from_function('f', [Y], uf, [X], lambda s: {'X': s['Y']}),
        'g': Equation.from_function('g', [X], ug, [Y], lambda s: {'Y': flip(s['X'])}),
    }
    noise = {'f': JointDistribution([uf], [1.0]), 'g': JointDistribution([ug], [1.0])}
    return GRPSEM(structure, [X, Y], noise, equations)


def random_bn_model(rng, n):
    """Random acyclic model with derandomized noise over n binary variables."""
    names = [f"V{i}" for i in range(n)]
    variables = [Variable.binary(v) for v in names]
    edges = [(names[j], names[i]) for i in range(n) for j in range(i) if rng.random() < 0.5]
    parents = {v: [a for a, b in edges if b == v] for v in names}
    cpds = {v: rng.dirichlet(np.ones(2), size=2 ** len(parents[v])) for v in names}

    def mass(s):
        p = 1.0
        for v in names:
            p *= cpds[v][int("".join(s[u] for u in parents[v]) or "0", 2)][int(s[v])]
        return p

    mu = JointDistribution.from_function(variables, mass)
    return bn_model(from_graph(names, edges), mu)


def root_and_cycle_model(pz=(0.5, 0.5), pf=(1.0, 0.0, 0.0)):
    """
    Z = U_z beside the cycle X = f(Y, U_f), Y = X.

    U_f = 0 copies Y into X; U_f = 1 and 2 set X to 0 and 1.
    """
    Z, X, Y = (Variable.binary(n) for n in 'ZXY')
    uz, uf, ug = Variable.binary('U__z'), Variable('U__f', ['0', '1', '2']), Variable('U__g', ['0'])
    structure = DirectedHypergraph('ZXY', [Hyperarc('z', (), {'Z'}), Hyperarc('f', {'Y'}, {'X'}),
                                           Hyperarc('g', {'X'}, {'Y'})])
    equations = {
        'z': Equation.from_function('z', [], uz, [Z], lambda s: {'Z': s['U__z']}),
        'f': Equation.from_function('f', [Y], uf, [X], lambda s: {
            'X': s['Y'] if s['U__f'] == '0' else str(int(s['U__f']) - 1)}),
        'g': Equation.from_function('g', [X], ug, [Y], lambda s: {'Y': s['X']}),
    }
    noise = {'z': JointDistribution([uz], pz), 'f': JointDistribution([uf], pf),
             'g': JointDistribution([ug], [1.0])}
    return GRPSEM(structure, [Z, X, Y], noise, equations)


def split_witness(M, rng=None):
    """Witness spreading each context's mass over its solutions (evenly, or at random)."""
    pu = M.noise_distribution()
    weights = {}

    def mass(s):
        u = tuple(v.index(s[v.name]) for v in M.noise_variables)
        found = M.solutions(u)
        setting = tuple(s[n] for n in M.names)
        if setting not in found:
            return 0.0
        if u not in weights:
            raw = np.ones(len(found)) if rng is None else rng.dirichlet(np.ones(len(found)))
            weights[u] = raw / raw.sum()
        return pu.prob({v.name: s[v.name] for v in M.noise_variables}) * weights[u][found.index(setting)]

    joint = JointDistribution.from_function(M.variables + M.noise_variables, mass)
    return Witness(joint, M.arc_map, M.names)


class TestEquation(unittest.TestCase):
    """Test cases for Equation lookup tables."""

    def test_rows_round_trip(self):
        """Rows reproduce the tabulated function."""
        eq = xor_model().equations['Y']
        rows = list(eq.rows())
        self.assertEqual(len(rows), 4)
        self.assertIn(({'X': '1', 'U__Y': '1'}, {'Y': '0'}), rows)

    def test_conflicting_rows(self):
        """Two outputs for one input are rejected."""
        X, U = Variable.binary('X'), Variable('U', ['0'])
        rows = [({'U': '0'}, {'X': '0'}), ({'U': '0'}, {'X': '1'})]
        with self.assertRaises(ValidationError):
            Equation.from_rows('a', [], U, [X], rows)

    def test_partial_table(self):
        """Every input needs an output."""
        X, U = Variable.binary('X'), Variable.binary('U')
        with self.assertRaises(ValidationError):
            Equation.from_rows('a', [], U, [X], [({'U': '0'}, {'X': '0'})])


class TestModel(unittest.TestCase):
    """Test cases for GRPSEM."""

    def setUp(self):
        """Set up test fixtures."""
        self.M = xor_model()

    def test_solutions(self):
        """The acyclic model has one solution per context."""
        self.assertEqual(solutions(self.M, {'U__X': '1', 'U__Y': '0'}), [('1', '1')])
        self.assertEqual(self.M.solutions({'X': '0', 'Y': '1'}), [('0', '1')])
        self.assertEqual(self.M.solutions((1, 1)), [('1', '0')])

    def test_bad_context(self):
        """Contexts must name every noise variable with a valid value."""
        with self.assertRaises(ValidationError):
            self.M.solutions({'U__X': '1'})
        with self.assertRaises(ValidationError):
            self.M.solutions((2, 0))

    def test_arising_distribution(self):
        """The arising distribution extends the noise distribution."""
        nu = arising_distribution(self.M)
        self.assertAlmostEqual(nu.prob({'X': '1', 'Y': '1'}), 0.375)
        self.assertTrue(marginal(nu, self.M.noise_names).allclose(self.M.noise_distribution()))
        self.assertTrue(in_solution_set(self.M, nu))

    def test_solution_set_membership(self):
        """Distributions breaking an equation or the noise law are rejected."""
        nu = arising_distribution(self.M)
        uniform = JointDistribution.uniform(nu.variables)
        self.assertFalse(in_solution_set(self.M, uniform))
        with self.assertRaises(ValidationError):
            in_solution_set(self.M, marginal(nu, ['X', 'Y']))

    def test_intervene(self):
        """Intervened variables are pinned in every context."""
        pinned = intervene(self.M, {'X': '0'})
        self.assertEqual(pinned.solutions({'U__X': '1', 'U__Y': '0'}), [('0', '0')])
        self.assertEqual(pinned.interventions, {'X': '0'})
        self.assertIs(self.M.intervene({'X': '0'}), pinned)
        self.assertEqual(self.M.interventions, {})

    def test_bad_interventions(self):
        """Repeated, unknown and out-of-space interventions are rejected."""
        with self.assertRaises(ValidationError):
            self.M.intervene({'X': '0'}).intervene({'X': '1'})
        with self.assertRaises(ValidationError):
            self.M.intervene({'Z': '0'})
        with self.assertRaises(ValidationError):
            self.M.intervene({'X': '2'})

    def test_untargeted_variable(self):
        """Variables no arc targets cannot be intervened on."""
        X, Z = Variable.binary('X'), Variable.binary('Z')
        ux = Variable.binary('U__X')
        M = GRPSEM(DirectedHypergraph('XZ', [Hyperarc('X', (), {'X'})]), [X, Z],
                   {'X': JointDistribution.uniform([ux])},
                   {'X': Equation.from_function('X', [], ux, [X], lambda s: {'X': s['U__X']})})
        with self.assertRaises(ValidationError):
            M.intervene({'Z': '1'})

    def test_mismatched_pieces(self):
        """Noise that does not match the equation is rejected."""
        X = Variable.binary('X')
        ux, other = Variable.binary('U__X'), Variable.binary('V')
        eq = Equation.from_function('X', [], ux, [X], lambda s: {'X': s['U__X']})
        with self.assertRaises(ValidationError):
            GRPSEM(DirectedHypergraph('X', [Hyperarc('X', (), {'X'})]), [X],
                   {'X': JointDistribution.uniform([other])}, {'X': eq})

    def test_cycle_with_two_solutions(self):
        """X = Y, Y = X: both constant settings solve; no unique arising distribution."""
        M = cyclic_model(negate=False)
        self.assertEqual(M.solutions((0, 0)), [('0', '0'), ('1', '1')])
        with self.assertRaises(ValidationError):
            M.arising_distribution()
        self.assertEqual(M.intervene({'X': '1'}).solutions((0, 0)), [('1', '1')])

    def test_cycle_without_solutions(self):
        """X = Y, Y = not X has no solution."""
        M = cyclic_model(negate=True)
        self.assertEqual(M.solutions((0, 0)), [])
        with self.assertRaises(ValidationError):
            M.arising_distribution()


class TestDerandomize(unittest.TestCase):
    """Test cases for derandomize_cpd."""

    def test_no_sources(self):
        """Without sources the functions are just values."""
        q = derandomize_cpd([[0.3, 0.7]], Variable.binary('Y'))
        self.assertEqual(q.variables[0].name, 'U__Y')
        self.assertEqual(q.variables[0].values, ('0', '1'))
        self.assertTrue(np.allclose(q.probs, [0.3, 0.7]))

    def test_one_source(self):
        """Function probabilities are products over source settings."""
        q = derandomize_cpd([[0.9, 0.1], [0.2, 0.8]], Variable.binary('Y'), [Variable.binary('X')], name='G')
        self.assertEqual(q.variables[0].values, ('0|0', '0|1', '1|0', '1|1'))
        self.assertTrue(np.allclose(q.probs, [0.18, 0.72, 0.02, 0.08]))
        self.assertEqual(function_outputs('0|1'), ['0', '1'])

    def test_bad_rows(self):
        """Rows must be distributions."""
        with self.assertRaises(ValidationError):
            derandomize_cpd([[0.5, 0.6]], Variable.binary('Y'))
        with self.assertRaises(ValidationError):
            derandomize_cpd([[1.5, -0.5]], Variable.binary('Y'))

    @settings(max_examples=1000, derandomize=True, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_marginals_recovered(self, seed):
        """P(g(x) = y) under the function distribution equals p(y | x)."""
        rng = np.random.default_rng(seed)
        X = Variable('X', range(int(rng.integers(1, 5))))
        Y = Variable('Y', range(int(rng.integers(2, 4))))
        cpd = rng.dirichlet(np.ones(Y.size), size=X.size)
        q = derandomize_cpd(cpd, Y, [X])
        recovered = np.zeros_like(cpd)
        for label, p in zip(q.variables[0].values, q.probs):
            for x, y in enumerate(function_outputs(label)):
                recovered[x, Y.index(y)] += p
        self.assertTrue(np.allclose(recovered, cpd, atol=1e-12))


class TestDoEvents(unittest.TestCase):
    """Test cases for do_event."""

    def test_root_variable(self):
        """do(X = 0) on a root is the noise value producing 0."""
        coin = JointDistribution.uniform([Variable.binary('X')])
        M = bn_model(from_graph('X'), coin)
        event = do_event(M, {'X': '0'})
        self.assertEqual(event.names, ('U__X',))
        self.assertEqual(event.settings(), [('0',)])

    def test_constant_functions(self):
        """With a parent, only the constant function forces the value."""
        X, Y = Variable.binary('X'), Variable.binary('Y')
        M = bn_model(from_graph('XY', [('X', 'Y')]), JointDistribution([X, Y], [0.4, 0.1, 0.2, 0.3]))
        event = do_event(M, {'Y': '1'})
        self.assertEqual(event.names, ('U__X', 'U__Y'))
        self.assertEqual(event.settings(), [('0', '1|1'), ('1', '1|1')])

    def test_xor_model(self):
        """Y = X xor U_Y is never forced regardless of X."""
        event = do_event(xor_model(), {'Y': '1'})
        self.assertEqual(len(event), 0)
        self.assertEqual(probability(xor_model().noise_distribution(), event), 0.0)


class TestWitnessModels(unittest.TestCase):
    """Test cases for witness_to_psem and sem_to_witness."""

    def test_q_witness_model(self):
        """The witness of Q lies in the solution set of the model read off it."""
        w = q_witness()
        M, unique = witness_to_psem(w, build_corpus_hypergraphs()['cycle3'])
        self.assertTrue(unique)
        self.assertTrue(in_solution_set(M, w.joint))
        self.assertEqual(M.arc_map, w.arc_map)

    def test_overlapping_targets(self):
        """Two arcs onto one variable have no single-equation model."""
        w = Witness(JointDistribution.uniform([Variable('X', ['0']), Variable.binary('U__x1'),
                                               Variable.binary('U__x2')]),
                    {'x1': 'U__x1', 'x2': 'U__x2'}, ['X'])
        with self.assertRaises(ValidationError):
            witness_to_psem(w, build_corpus_hypergraphs()['two_priors'])

    def test_sem_to_witness(self):
        """The arising distribution of a Bayesian-network model verifies."""
        collider = build_corpus_hypergraphs()['collider']
        xor = xor_distribution()
        w = sem_to_witness(bn_model(collider, xor))
        self.assertTrue(verify_witness(xor, collider, w).passed)

    def test_round_trip(self):
        """Reading a model off its own witness gives back the same equations on the support."""
        M = xor_model()
        w = sem_to_witness(M)
        again, unique = witness_to_psem(w, M.structure)
        self.assertTrue(unique)
        self.assertEqual(again.equations['Y'], M.equations['Y'])
        self.assertTrue(arising_distribution(again).allclose(w.joint))


class TestInterventionReport(unittest.TestCase):
    """Test cases for check_theorem6."""

    def test_xor_model(self):
        """Forcing X through its noise matches intervening on X."""
        M = xor_model()
        report = check_theorem6(sem_to_witness(M), M, {'X': '1'}, Atom('Y', '1'))
        self.assertTrue(report.applicable)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.conditional, 0.75)
        self.assertAlmostEqual(report.box, 0.75)
        self.assertEqual(report.as_dict()['passed'], True)

    def test_zero_probability(self):
        """An impossible do-event is reported as not applicable."""
        M = xor_model()
        report = check_theorem6(sem_to_witness(M), M, {'Y': '1'})
        self.assertFalse(report.applicable)
        self.assertFalse(report.passed)

    def test_impure_formula(self):
        """The conditioned formula may not contain interventions."""
        from qim_compat.core.formulas import Box
        M = xor_model()
        with self.assertRaises(ValidationError):
            check_theorem6(sem_to_witness(M), M, {'X': '1'}, Box({'X': '0'}, Atom('Y', '1')))

    def test_cycle_strict_sandwich(self):
        """With two solutions left after intervening, box < conditional < diamond."""
        M = root_and_cycle_model()
        report = check_theorem6(split_witness(M), M, {'Z': '1'}, Atom('X', '0'))
        self.assertTrue(report.applicable)
        self.assertFalse(report.unique)
        self.assertIsNone(report.total_variation)
        self.assertAlmostEqual(report.box, 0.0, delta=1e-12)
        self.assertAlmostEqual(report.conditional, 0.5, delta=1e-12)
        self.assertAlmostEqual(report.diamond, 1.0, delta=1e-12)
        self.assertTrue(report.passed)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_random_cyclic_models(self, seed):
        """On a cyclic model the conditional probability stays between box and diamond."""
        rng = np.random.default_rng(seed)
        M = root_and_cycle_model(rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(3)))
        w = split_witness(M, rng)
        self.assertTrue(in_solution_set(M, w.joint))
        assignment = [{'Z': '1'}, {'X': '0'}, {'X': '1'}, {'Z': '0', 'X': '1'}][int(rng.integers(4))]
        phi = Atom('ZXY'[int(rng.integers(3))], str(int(rng.integers(2))))
        report = check_theorem6(w, M, assignment, phi)
        self.assertTrue(report.applicable)
        self.assertTrue(report.in_solution_set)
        self.assertLessEqual(report.box, report.conditional + 1e-9)
        self.assertLessEqual(report.conditional, report.diamond + 1e-9)
        self.assertTrue(report.passed)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_random_acyclic_models(self, seed):
        """For random acyclic models conditioning on do-events equals intervening."""
        rng = np.random.default_rng(seed)
        M = random_bn_model(rng, int(rng.integers(2, 4)))
        names = list(M.names)
        target = names[int(rng.integers(len(names)))]
        assignment = {target: str(int(rng.integers(2)))}
        phi = Atom(names[int(rng.integers(len(names)))], str(int(rng.integers(2))))
        report = check_theorem6(sem_to_witness(M), M, assignment, phi)
        self.assertTrue(report.applicable)
        self.assertTrue(report.in_solution_set)
        self.assertLessEqual(report.total_variation, 1e-9)
        self.assertAlmostEqual(report.box, report.conditional, delta=1e-9)
        self.assertAlmostEqual(report.diamond, report.conditional, delta=1e-9)
        self.assertTrue(report.passed)


if __name__ == '__main__':
    unittest.main()
