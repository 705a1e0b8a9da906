#!/usr/bin/env python3
"""
Unit tests for the JSON document formats.
"""

import os
import sys
import tempfile
import unittest

import numpy as np

# Add the src directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from qim_compat.corpus import build_corpus_hypergraphs, q_distribution, q_witness, two_coins, xor_distribution
from qim_compat.core.compat import bn_model, decide_general, verify_witness
from qim_compat.core.formulas import Atom, And, Or, Not, Box, Diamond, TRUE, FALSE
from qim_compat.core.scoring import siminc
from qim_compat.graphs.hypergraph import from_graph
from qim_compat.prob.distributions import JointDistribution, Variable
from qim_compat.utils.errors import FormatError, ValidationError
from qim_compat.utils.serialization import (
    loads, dumps, load_json, write_json,
    distribution_to_json, distribution_from_json, hypergraph_to_json, hypergraph_from_json,
    witness_to_json, witness_from_json, sem_to_json, sem_from_json,
    formula_to_json, formula_from_json, siminc_to_json, verdict_to_json,
)


def through_text(doc):
    return loads(dumps(doc))


class TestParsing(unittest.TestCase):
    """Test cases for reading raw JSON."""

    def test_error_position(self):
        """Parser errors carry the line and column."""
        with self.assertRaises(FormatError) as ctx:
            loads('{"a": }')
        self.assertEqual(ctx.exception.line, 1)
        self.assertEqual(ctx.exception.column, 7)
        with self.assertRaises(FormatError) as ctx:
            loads('{\n  "a": }')
        self.assertEqual(ctx.exception.line, 2)

    def test_missing_file(self):
        """Unreadable files are format errors."""
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(FormatError):
                load_json(os.path.join(tmp, 'absent.json'))

    def test_write_and_read(self):
        """Written documents read back with sorted keys."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'doc.json')
            write_json(path, {'b': 1, 'a': [0.5]})
            self.assertEqual(load_json(path), {'a': [0.5], 'b': 1})
            with open(path) as handle:
                self.assertTrue(handle.read().startswith('{\n  "a"'))


class TestDistributions(unittest.TestCase):
    """Test cases for distribution documents."""

    def test_dense_bit_identical(self):
        """Dense documents reproduce the probabilities exactly."""
        rng = np.random.default_rng(7)
        variables = [Variable('A', ['x', 'y', 'z']), Variable.binary('B')]
        d = JointDistribution(variables, rng.dirichlet(np.ones(6)))
        again = distribution_from_json(through_text(distribution_to_json(d)))
        self.assertEqual(again.variables, d.variables)
        self.assertTrue(np.array_equal(again.probs, d.probs))

    def test_sparse(self):
        """Unlisted settings of a sparse document have probability zero."""
        doc = {
            'variables': [{'name': 'X', 'values': ['0', '1']}, {'name': 'Y', 'values': [0, 1]}],
            'outcomes': [{'setting': {'X': '0', 'Y': 0}, 'p': 0.5},
                         {'setting': {'X': '1', 'Y': '1'}, 'p': 0.5}],
        }
        d = distribution_from_json(doc)
        self.assertEqual(list(d.probs), [0.5, 0.0, 0.0, 0.5])
        self.assertEqual(d.variable('Y').values, ('0', '1'))

    def test_schema_errors(self):
        """Missing keys and wrong types are format errors; bad sums are validation errors."""
        variables = [{'name': 'X', 'values': ['0', '1']}]
        with self.assertRaises(FormatError):
            distribution_from_json({'variables': variables})
        with self.assertRaises(FormatError):
            distribution_from_json({'variables': variables, 'probs': ['half', 'half']})
        with self.assertRaises(FormatError):
            distribution_from_json({'variables': [{'name': 'X'}], 'probs': [1.0]})
        with self.assertRaises(FormatError):
            distribution_from_json([1, 2])
        with self.assertRaises(ValidationError):
            distribution_from_json({'variables': variables, 'probs': [0.5, 0.6]})


class TestStructures(unittest.TestCase):
    """Test cases for hypergraph, witness and model documents."""

    def test_hypergraph(self):
        """Hypergraphs survive a round trip; sources default to empty."""
        for A in build_corpus_hypergraphs().values():
            self.assertEqual(hypergraph_from_json(through_text(hypergraph_to_json(A))), A)
        A = hypergraph_from_json({'nodes': ['X'], 'arcs': [{'label': 'p', 'targets': ['X']}]})
        self.assertEqual(A.arc('p').sources, frozenset())

    def test_witness(self):
        """A loaded witness still verifies."""
        w = witness_from_json(through_text(witness_to_json(q_witness())))
        self.assertEqual(w, q_witness())
        self.assertTrue(verify_witness(q_distribution(), build_corpus_hypergraphs()['cycle3'], w).passed)

    def test_witness_mismatch(self):
        """Arc maps must cover exactly the noise variables."""
        doc = witness_to_json(q_witness())
        del doc['arc_map']['AB']
        with self.assertRaises(ValidationError):
            witness_from_json(doc)

    def test_sem(self):
        """Equations, noise and interventions survive a round trip."""
        M = bn_model(build_corpus_hypergraphs()['collider'], xor_distribution()).intervene({'B': '1'})
        again = sem_from_json(through_text(sem_to_json(M)))
        self.assertEqual(again.structure, M.structure)
        self.assertEqual(again.interventions, {'B': '1'})
        for label in M.structure.labels:
            self.assertEqual(again.equations[label], M.equations[label])
            self.assertTrue(again.noise[label].allclose(M.noise[label]))

    def test_sem_binary_default(self):
        """Without a variables list every node is binary."""
        M = bn_model(from_graph('XY', [('X', 'Y')]), two_coins())
        doc = sem_to_json(M)
        del doc['variables']
        self.assertEqual(sem_from_json(doc).variables, M.variables)

    def test_sem_errors(self):
        """Variables must match the nodes; rows must name every input."""
        doc = sem_to_json(bn_model(from_graph('XY', [('X', 'Y')]), two_coins()))
        doc['variables'] = doc['variables'][:1]
        with self.assertRaises(FormatError):
            sem_from_json(doc)
        doc = sem_to_json(bn_model(from_graph('XY', [('X', 'Y')]), two_coins()))
        del doc['equations'][1]['rows'][0]['in']['X']
        with self.assertRaises(FormatError):
            sem_from_json(doc)


class TestFormulasAndReports(unittest.TestCase):
    """Test cases for formula and report documents."""

    def test_formula_round_trip(self):
        """Every connective is written and read back."""
        phi = Diamond({'X': '1'}, And(Atom('Y', '0'), Not(Or(TRUE, FALSE)), Box({}, Atom('X', '1'))))
        self.assertEqual(formula_from_json(through_text(formula_to_json(phi))), phi)

    def test_formula_errors(self):
        """Malformed formulas are format errors."""
        for doc in ({'atom': ['X']}, {'xor': []}, {'box': {'X': '1'}}, [], {'and': {}}):
            with self.assertRaises(FormatError):
                formula_from_json(doc)

    def test_siminc_report(self):
        """SIMInc reports carry the value, the breakdown and the candidate."""
        result = siminc(from_graph('XY'), two_coins(), restarts=1, max_iters=20,
                        noise_sizes={'X': 2, 'Y': 2})
        doc = through_text(siminc_to_json(result))
        self.assertEqual(doc['noise_sizes'], {'X': 2, 'Y': 2})
        self.assertEqual(set(doc['breakdown']['arcs']), {'X', 'Y'})
        self.assertAlmostEqual(doc['value_bits'], result.value)
        self.assertEqual(doc['band'], result.band)
        self.assertEqual(doc['tol'], result.tol)
        self.assertEqual(doc['iterations'], result.iterations)
        self.assertLessEqual(doc['iterations'], 20)
        self.assertEqual(len(distribution_from_json(doc['witness_candidate']).variables), 4)

    def test_verdict(self):
        """A compatible verdict embeds a witness that verifies."""
        collider = build_corpus_hypergraphs()['collider']
        doc = through_text(verdict_to_json(decide_general(collider, xor_distribution())))
        self.assertEqual(doc['status'], 'compatible')
        self.assertEqual(doc['stage'], 'dag')
        self.assertTrue(doc['verification']['passed'])
        w = witness_from_json(doc['witness'])
        self.assertTrue(verify_witness(xor_distribution(), collider, w).passed)


if __name__ == '__main__':
    unittest.main()
