#!/usr/bin/env python3
"""
Tests for the qim-compat command line.
"""

import io
import json
import os
import sys
import tempfile
import unittest

# Add the src directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from qim_compat import __version__
from qim_compat.cli import run
from qim_compat.corpus import (
    build_corpus_hypergraphs, correlated_pair, q_distribution, q_witness, two_roots_counterexample,
    xor_distribution,
)
from qim_compat.core.compat import bn_model
from qim_compat.graphs.hypergraph import from_graph
from qim_compat.utils.constants import EXIT_DATAERR, EXIT_USAGE
from qim_compat.utils.serialization import (
    distribution_to_json, hypergraph_to_json, sem_to_json, witness_to_json, write_json,
)


class CliTestCase(unittest.TestCase):
    """Runs commands against files in a scratch directory."""

    def setUp(self):
        """Set up test fixtures."""
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name
        hypergraphs = build_corpus_hypergraphs()
        self.files = {}
        for name in ('cycle3', 'collider', 'two_roots'):
            self.files[name] = self.write(name, hypergraph_to_json(hypergraphs[name]))
        self.files['xor'] = self.write('xor', distribution_to_json(xor_distribution()))
        self.files['Q'] = self.write('Q', distribution_to_json(q_distribution()))
        self.files['two_roots_counterexample'] = self.write(
            'two_roots_counterexample', distribution_to_json(two_roots_counterexample()))
        self.files['q_witness'] = self.write('q_witness', witness_to_json(q_witness()))
        self.files['q_joint'] = self.write('q_joint', distribution_to_json(q_witness().joint))
        model = bn_model(from_graph('XY', [('X', 'Y')]), correlated_pair())
        self.files['model'] = self.write('model', sem_to_json(model))

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, doc):
        path = os.path.join(self.tmp, f"{name}.json")
        write_json(path, doc)
        return path

    def invoke(self, *argv):
        out = io.StringIO()
        code = run(list(argv), stdout=out)
        text = out.getvalue()
        return code, (json.loads(text) if text else None), text


class TestScoringCommands(CliTestCase):
    """Test cases for profile, idef and siminc."""

    def test_profile(self):
        """The parity profile puts -1 bit on the triple."""
        code, doc, _ = self.invoke('profile', '-d', self.files['xor'])
        self.assertEqual(code, 0)
        self.assertEqual(doc['command'], 'profile')
        self.assertEqual(doc['version'], __version__)
        self.assertAlmostEqual(doc['entropy_bits'], 2.0)
        self.assertAlmostEqual(doc['atoms']['A,B,C'], -1.0)

    def test_idef(self):
        """Parity on the 3-cycle has one bit of information deficiency."""
        code, doc, _ = self.invoke('idef', '-A', self.files['cycle3'], '-d', self.files['xor'])
        self.assertEqual(code, 0)
        self.assertAlmostEqual(doc['idef_bits'], 1.0)
        self.assertEqual(doc['seed'], 0)

    def test_idef_dagger(self):
        """The explicit witness of Q scores zero on the noise-explicit hypergraph."""
        code, doc, _ = self.invoke('idef', '-A', self.files['cycle3'], '-d', self.files['Q'],
                                   '--dagger', self.files['q_joint'])
        self.assertEqual(code, 0)
        self.assertAlmostEqual(doc['idef_dagger_bits'], 0.0, places=9)

    def test_siminc_deterministic(self):
        """The same seed reproduces the same report."""
        argv = ('siminc', '-A', self.files['two_roots'], '-d', self.files['two_roots_counterexample'],
                '--seed', '3', '--restarts', '2', '--max-iters', '50')
        code, doc, first = self.invoke(*argv)
        self.assertEqual(code, 0)
        self.assertEqual(doc['seed'], 3)
        self.assertEqual(doc['siminc']['restarts_used'], 2)
        _, _, second = self.invoke(*argv)
        self.assertEqual(first, second)
        self.assertIn(doc['siminc']['band'], ('compatible', 'near', 'far'))
        self.assertLessEqual(doc['siminc']['iterations'], 50)

    def test_siminc_zero_iterations(self):
        """An iteration cap below one is a validation failure."""
        code, doc, _ = self.invoke('siminc', '-A', self.files['two_roots'], '-d',
                                   self.files['two_roots_counterexample'], '--max-iters', '0')
        self.assertEqual(code, EXIT_DATAERR)
        self.assertIsNone(doc)

    def test_siminc_negative_restarts(self):
        """A negative restart count is a validation failure."""
        code, _, _ = self.invoke('siminc', '-A', self.files['cycle3'], '-d', self.files['xor'],
                                 '--restarts', '-1')
        self.assertEqual(code, EXIT_DATAERR)


class TestCompatCommands(CliTestCase):
    """Test cases for compat and verify-witness."""

    def test_incompatible(self):
        """Parity against the 3-cycle exits 1 with an IDef certificate."""
        code, doc, _ = self.invoke('compat', '-A', self.files['cycle3'], '-d', self.files['xor'])
        self.assertEqual(code, 1)
        self.assertEqual(doc['verdict']['status'], 'incompatible')
        self.assertEqual(doc['verdict']['certificate']['kind'], 'idef')

    def test_compatible(self):
        """Parity on the collider exits 0 with a verified witness."""
        code, doc, _ = self.invoke('compat', '-A', self.files['collider'], '-d', self.files['xor'])
        self.assertEqual(code, 0)
        self.assertEqual(doc['verdict']['status'], 'compatible')
        self.assertTrue(doc['verdict']['verification']['passed'])

    def test_unknown(self):
        """Zero IDef with a failing search exits 2."""
        code, doc, _ = self.invoke('compat', '-A', self.files['two_roots'],
                                   '-d', self.files['two_roots_counterexample'],
                                   '--restarts', '2', '--max-iters', '100')
        self.assertEqual(code, 2)
        self.assertEqual(doc['verdict']['status'], 'unknown')

    def test_verify_witness(self):
        """The shipped witness of Q verifies."""
        code, doc, _ = self.invoke('verify-witness', '-A', self.files['cycle3'], '-d', self.files['Q'],
                                   '-w', self.files['q_witness'])
        self.assertEqual(code, 0)
        self.assertTrue(doc['verification']['passed'])


class TestModelCommands(CliTestCase):
    """Test cases for the sem subcommands."""

    def test_solve(self):
        """Y follows the response function picked by U__Y."""
        code, doc, _ = self.invoke('sem', 'solve', '-m', self.files['model'],
                                   '-u', '{"U__X": "1", "U__Y": "0|1"}')
        self.assertEqual(code, 0)
        self.assertEqual(doc['variables'], ['X', 'Y'])
        self.assertEqual(doc['solutions'], [['1', '1']])

    def test_arise(self):
        """The arising distribution comes back as a witness."""
        code, doc, _ = self.invoke('sem', 'arise', '-m', self.files['model'])
        self.assertEqual(code, 0)
        self.assertEqual(doc['witness']['base_vars'], ['X', 'Y'])
        self.assertEqual(doc['witness']['arc_map'], {'X': 'U__X', 'Y': 'U__Y'})

    def test_intervene(self):
        """Interventions are recorded in the written model."""
        code, doc, _ = self.invoke('sem', 'intervene', '-m', self.files['model'], '--set', 'X=1')
        self.assertEqual(code, 0)
        self.assertEqual(doc['model']['interventions'], {'X': '1'})

    def test_do_event(self):
        """Only the constant response function forces Y = 1."""
        code, doc, _ = self.invoke('sem', 'do-event', '-m', self.files['model'], '--set', 'Y=1')
        self.assertEqual(code, 0)
        self.assertEqual(doc['noise_variables'], ['U__X', 'U__Y'])
        self.assertEqual(doc['settings'], [['0', '1|1'], ['1', '1|1']])
        self.assertAlmostEqual(doc['probability'], 0.25 * 0.75)

    def test_formula(self):
        """Formulas are evaluated by probability or in one context."""
        path = self.write('phi', {'box': {'X': '1'}, 'body': {'atom': ['Y', '1']}})
        code, doc, _ = self.invoke('sem', 'formula', '-m', self.files['model'], '-f', path)
        self.assertEqual(code, 0)
        self.assertAlmostEqual(doc['probability'], 0.75)
        code, doc, _ = self.invoke('sem', 'formula', '-m', self.files['model'], '-f', path,
                                   '-u', '{"U__X": "0", "U__Y": "0|0"}')
        self.assertFalse(doc['holds'])


class TestErrors(CliTestCase):
    """Test cases for exit codes on bad input."""

    def test_malformed_json(self):
        """Unparseable files exit 64 without a report."""
        path = os.path.join(self.tmp, 'broken.json')
        with open(path, 'w') as handle:
            handle.write('{"variables": [')
        code, doc, _ = self.invoke('profile', '-d', path)
        self.assertEqual(code, EXIT_USAGE)
        self.assertIsNone(doc)

    def test_bad_sum(self):
        """Probabilities that do not sum to one exit 65."""
        path = self.write('bad', {'variables': [{'name': 'X', 'values': ['0', '1']}], 'probs': [0.5, 0.6]})
        code, _, _ = self.invoke('profile', '-d', path)
        self.assertEqual(code, EXIT_DATAERR)

    def test_usage_errors(self):
        """Unknown commands, missing options and bad assignments exit 64."""
        self.assertEqual(self.invoke('frobnicate')[0], EXIT_USAGE)
        self.assertEqual(self.invoke('idef', '-A', self.files['cycle3'])[0], EXIT_USAGE)
        self.assertEqual(self.invoke('sem', 'intervene', '-m', self.files['model'], '--set', 'X')[0], EXIT_USAGE)
        self.assertEqual(self.invoke('sem', 'solve', '-m', self.files['model'])[0], EXIT_USAGE)

    def test_bad_intervention(self):
        """Intervening on an unknown variable is a validation error."""
        code, _, _ = self.invoke('sem', 'intervene', '-m', self.files['model'], '--set', 'Z=1')
        self.assertEqual(code, EXIT_DATAERR)


class TestCorpusCommand(CliTestCase):
    """Test cases for the corpus command."""

    def test_corpus(self):
        """Every shipped entry passes and the files are written."""
        target = os.path.join(self.tmp, 'corpus')
        code, doc, _ = self.invoke('corpus', '--restarts', '2', '--max-iters', '100', '--write', target)
        self.assertEqual(code, 0)
        self.assertTrue(doc['passed'])
        self.assertTrue(all(entry['passed'] for entry in doc['entries']))
        self.assertTrue(os.path.exists(os.path.join(target, 'corpus.json')))
        self.assertTrue(os.path.exists(os.path.join(target, 'witnesses', 'Q.json')))


if __name__ == '__main__':
    unittest.main()
