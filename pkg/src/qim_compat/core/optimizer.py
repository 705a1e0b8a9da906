"""
Exponentiated-gradient search for the SIMInc objective.

The search variable is the conditional table θ(u | x) of the joint noise
setting u = (u_a)_a given each supported setting x of the model variables;
the extension is ν(x, u) = μ(x) θ(u | x), so ν(x) = μ(x) holds exactly.
Each row θ(· | x) lives on a simplex and is updated multiplicatively, which
keeps iterates in the interior.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..graphs.hypergraph import DirectedHypergraph, noise_name
from ..prob.distributions import JointDistribution, Variable, marginal
from ..utils.errors import ValidationError

logger = logging.getLogger(__name__)

# Floor applied inside logarithms so that vanished cells stay finite.
LOG_FLOOR = 1e-300
INV_LN2 = 1.0 / np.log(2.0)


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


class SimincObjective:
    """
    The SIMInc objective as a function of θ(u | x).

    value(θ) = [Σ_a H(U_a) − H(U)] + Σ_a H(Tgt a | Src a, U_a)
    evaluated on ν(x, u) = μ(x) θ(u | x).
    """

    def __init__(self, A: DirectedHypergraph, mu: JointDistribution, noise_sizes: Dict[str, int]):
        """
        Initialize the objective.

        Args:
            A: Hypergraph whose arcs mention only variables of ``mu``
            mu: Distribution over the model variables
            noise_sizes: Noise-space size for every arc label
        """
        self.A = A
        self.mu = mu
        self.labels = list(A.labels)
        self.sizes = tuple(int(noise_sizes[label]) for label in self.labels)

        support = np.flatnonzero(mu.probs > 0.0)
        self.support = support
        self.weights = mu.probs[support]
        coords = np.unravel_index(support, mu.shape) if mu.shape else ()
        self._coords = {name: coords[i] for i, name in enumerate(mu.names)}

        # Group index and one-hot membership of each supported row by its Src and Src∪Tgt settings.
        self._groups: List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
        for arc in A.arcs:
            src = sorted(arc.sources)
            both = sorted(arc.sources | arc.targets)
            self._groups.append(self._group(src) + self._group(both))

    @property
    def rows(self) -> int:
        return len(self.support)

    @property
    def columns(self) -> int:
        return int(np.prod(self.sizes, dtype=np.int64))

    def _group(self, names: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        if not names:
            return np.zeros(len(self.support), dtype=np.int64), np.ones((len(self.support), 1))
        dims = tuple(self.mu.variable(n).size for n in names)
        keys = np.ravel_multi_index(tuple(self._coords[n] for n in names), dims)
        # Re-index to the groups actually present.
        uniq, inverse = np.unique(keys, return_inverse=True)
        inverse = inverse.reshape(-1).astype(np.int64)
        onehot = np.zeros((len(self.support), len(uniq)))
        onehot[np.arange(len(self.support)), inverse] = 1.0
        return inverse, onehot

    def joint(self, theta: np.ndarray) -> np.ndarray:
        """ν restricted to supported rows, shaped (rows, k_1, ..., k_m)."""
        nu = theta * self.weights[:, None]
        return nu.reshape((self.rows,) + self.sizes)

    def _marginals(self, nu: np.ndarray):
        m = len(self.sizes)
        noise_joint = nu.sum(axis=0)
        per_arc = []
        for i, (_, in_src, _, in_both) in enumerate(self._groups):
            other = tuple(1 + j for j in range(m) if j != i)
            rows_ua = nu.sum(axis=other) if other else nu  # (rows, k_i)
            p_src = in_src.T @ rows_ua
            p_both = in_both.T @ rows_ua
            axes = tuple(j for j in range(m) if j != i)
            p_u = noise_joint.sum(axis=axes) if axes else noise_joint
            per_arc.append((p_u, p_src, p_both))
        return noise_joint, per_arc

    def breakdown(self, theta: np.ndarray) -> Tuple[float, Dict[str, float]]:
        """
        Evaluate the objective's terms.

        Returns:
            (independence gap in bits, mapping arc label -> H(Tgt | Src, U_a))
        """
        noise_joint, per_arc = self._marginals(self.joint(theta))
        gap = sum(_entropy_bits(p_u) for p_u, _, _ in per_arc) - _entropy_bits(noise_joint.ravel())
        arcs = {
            label: _entropy_bits(p_both.ravel()) - _entropy_bits(p_src.ravel())
            for label, (_, p_src, p_both) in zip(self.labels, per_arc)
        }
        return gap, arcs

    def value(self, theta: np.ndarray) -> float:
        """Objective value in bits."""
        gap, arcs = self.breakdown(theta)
        return gap + sum(arcs.values())

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        """
        Partial derivatives of the objective with respect to θ(u | x).

        Returns:
            Array shaped like ``theta``
        """
        nu = self.joint(theta)
        noise_joint, per_arc = self._marginals(nu)
        m = len(self.sizes)

        # d(-sum P log2 P)/dP = -(log2 P + 1/ln 2), pulled back to every cell.
        def dh(p):
            return -(np.log2(np.maximum(p, LOG_FLOOR)) + INV_LN2)

        grad = np.broadcast_to(-dh(noise_joint), nu.shape).copy()
        for i, (p_u, p_src, p_both) in enumerate(per_arc):
            g_src, _, g_both, _ = self._groups[i]
            shape = [1] * (m + 1)
            shape[1 + i] = self.sizes[i]
            grad += dh(p_u).reshape(shape)
            row_shape = [self.rows] + [1] * m
            row_shape[1 + i] = self.sizes[i]
            grad += (dh(p_both)[g_both] - dh(p_src)[g_src]).reshape(row_shape)
        return grad.reshape(theta.shape) * self.weights[:, None]

    def random_start(self, rng: np.random.Generator, concentration: float) -> np.ndarray:
        """Dirichlet-distributed rows."""
        theta = rng.dirichlet(np.full(self.columns, concentration), size=self.rows)
        return np.maximum(theta, LOG_FLOOR)

    def start_from(self, nu: JointDistribution, smoothing: float = 1e-6) -> np.ndarray:
        """
        Read θ off an extension ν over the model and noise variables.

        Args:
            nu: Extension whose noise variables are named U__<label>
            smoothing: Uniform mass mixed in to keep the start interior
        """
        order = list(self.mu.names) + [noise_name(label) for label in self.labels]
        nu = marginal(nu, order)
        table = nu.probs.reshape(int(np.prod(self.mu.shape, dtype=np.int64)), -1)[self.support]
        if table.shape[1] != self.columns:
            raise ValidationError("Initial extension has noise spaces of the wrong size")
        theta = table / np.maximum(table.sum(axis=1, keepdims=True), LOG_FLOOR)
        theta = (1.0 - smoothing) * theta + smoothing / self.columns
        return theta

    def extension(self, theta: np.ndarray) -> JointDistribution:
        """The extension ν(x, u) as a JointDistribution over model and noise variables."""
        n_x = int(np.prod(self.mu.shape, dtype=np.int64))
        full = np.zeros((n_x, self.columns))
        full[self.support] = theta * self.weights[:, None]
        noise_vars = [Variable(noise_name(label), [str(i) for i in range(k)])
                      for label, k in zip(self.labels, self.sizes)]
        return JointDistribution(self.mu.variables + tuple(noise_vars), full.ravel())


class SimplexMirrorDescent:
    """
    Exponentiated-gradient descent on a product of simplices (one per row).

    Steps use θ ← θ ⊙ exp(−η_t g / w) row-normalized, where w is the row's
    context probability, with η_t = η / sqrt(t) by default and backtracking
    whenever a step would increase the objective.
    """

    def __init__(self, objective: SimincObjective, step_size: float = 0.5,
                 step_decay: str = 'sqrt', max_iters: int = 2000,
                 patience: int = 50, improvement_tol: float = 1e-9, target: float = 0.0):
        self.objective = objective
        self.step_size = step_size
        self.step_decay = step_decay
        self.max_iters = max_iters
        self.patience = patience
        self.improvement_tol = improvement_tol
        self.target = target

    def _step(self, t: int) -> float:
        if self.step_decay == 'sqrt':
            return self.step_size / np.sqrt(t)
        return self.step_size

    def optimize(self, theta: np.ndarray) -> Tuple[np.ndarray, float, bool, int]:
        """
        Run descent from ``theta``.

        Stops early, as converged, once the value is at most ``target``.

        Returns:
            (final θ, final value, converged flag, iterations used)
        """
        obj = self.objective
        weights = obj.weights[:, None]
        value = obj.value(theta)
        history = [value]
        converged = value <= self.target
        t = 0
        if converged:
            return theta, value, converged, t

        for t in range(1, self.max_iters + 1):
            direction = obj.gradient(theta) / weights
            eta = self._step(t)
            for _ in range(30):
                scaled = eta * direction
                scaled -= scaled.min(axis=1, keepdims=True)
                candidate = theta * np.exp(-scaled)
                candidate /= candidate.sum(axis=1, keepdims=True)
                candidate = np.maximum(candidate, LOG_FLOOR)
                new_value = obj.value(candidate)
                if new_value <= value + 1e-15:
                    break
                eta *= 0.5
            else:
                converged = True
                break
            theta, value = candidate, new_value
            history.append(value)
            if value <= self.target:
                converged = True
                break
            if len(history) > self.patience and history[-self.patience - 1] - value < self.improvement_tol:
                converged = True
                break
        return theta, value, converged, t
