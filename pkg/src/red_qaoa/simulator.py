"""Exact statevector simulation of MaxCut QAOA.

Bit ``i`` of a basis index is node ``i`` (little-endian). Bitstrings are
rendered most-significant first, so the rightmost character is node 0.

The cost layer is a diagonal phase ``exp(-i * gamma * cut(z))`` and the mixer
``exp(-i * beta * sum X)`` is applied as one 2x2 rotation per qubit; no
``2**n`` matrix is ever formed.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .graphs import Graph, GraphError

DEFAULT_GUARD = 24
GUARD_ENV = "RED_QAOA_GUARD"


class SimulationGuardError(ValueError):
    """Graph too large for the requested simulator."""


def simulation_guard() -> int:
    value = os.environ.get(GUARD_ENV)
    return int(value) if value else DEFAULT_GUARD


def check_guard(g: Graph, limit: int | None = None) -> None:
    limit = simulation_guard() if limit is None else limit
    if g.node_count > limit:
        raise SimulationGuardError(
            f"{g.node_count} qubits exceeds the simulation guard of {limit} "
            f"(set {GUARD_ENV} to override)")


@dataclass(frozen=True)
class ParamVector:
    """QAOA angles for ``p`` layers, radians."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        gammas = tuple(float(x) for x in self.gammas)
        betas = tuple(float(x) for x in self.betas)
        if len(gammas) != len(betas) or not gammas:
            raise ValueError("need the same positive number of gammas and betas")
        if not all(math.isfinite(x) for x in gammas + betas):
            raise ValueError("QAOA angles must be finite")
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "betas", betas)

    @property
    def p(self) -> int:
        return len(self.gammas)

    def to_array(self) -> np.ndarray:
        """Flat ``[gamma_1..gamma_p, beta_1..beta_p]``."""
        return np.array(self.gammas + self.betas)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ParamVector":
        values = [float(v) for v in values]
        if len(values) % 2:
            raise ValueError("flat parameter vector must have even length")
        p = len(values) // 2
        return cls(tuple(values[:p]), tuple(values[p:]))

    @classmethod
    def zeros(cls, p: int) -> "ParamVector":
        return cls((0.0,) * p, (0.0,) * p)

    def to_dict(self) -> dict:
        return {"gammas": list(self.gammas), "betas": list(self.betas)}


def as_params(params) -> ParamVector:
    return params if isinstance(params, ParamVector) else ParamVector.from_array(params)


def bitstring(z: int, n: int) -> str:
    return format(z, f"0{n}b")


def _edge_cut_indicator(n: int, u: int, v: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return (((idx >> u) ^ (idx >> v)) & 1).astype(np.int32)


@lru_cache(maxsize=64)
def _cut_spectrum_cached(g: Graph) -> np.ndarray:
    idx = np.arange(1 << g.node_count, dtype=np.int64)
    values = np.zeros(idx.size, dtype=np.int32)
    for u, v in g.edges:
        values += (((idx >> u) ^ (idx >> v)) & 1).astype(np.int32)
    values.setflags(write=False)
    return values


def cut_spectrum(g: Graph, guard: int | None = None) -> np.ndarray:
    """Number of cut edges for every basis state (read-only int array)."""
    check_guard(g, guard)
    return _cut_spectrum_cached(g)


def max_cut_bruteforce(g: Graph, guard: int | None = None) -> tuple[int, int]:
    """Exact MaxCut ``(value, witness)``; the witness is the smallest maximiser."""
    values = cut_spectrum(g, guard)
    witness = int(np.argmax(values))
    return int(values[witness]), witness


def apply_mixer(state: np.ndarray, n: int, beta: float) -> None:
    """In-place ``exp(-i beta X)`` on every qubit."""
    c, s = math.cos(beta), -1j * math.sin(beta)
    for q in range(n):
        view = state.reshape(-1, 2, 1 << q)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :]
        view[:, 0, :] = c * lo + s * hi
        view[:, 1, :] = s * lo + c * hi


def qaoa_state(g: Graph, params, guard: int | None = None) -> np.ndarray:
    params = as_params(params)
    values = cut_spectrum(g, guard)
    n = g.node_count
    levels = np.arange(g.edge_count + 1)
    state = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=np.complex128)
    for gamma, beta in zip(params.gammas, params.betas):
        state *= np.exp(-1j * gamma * levels)[values]
        apply_mixer(state, n, beta)
    return state


def qaoa_probabilities(g: Graph, params, guard: int | None = None) -> np.ndarray:
    state = qaoa_state(g, params, guard)
    return state.real ** 2 + state.imag ** 2


def qaoa_expectation(g: Graph, params, guard: int | None = None) -> float:
    """Expected cut size of the ``p``-layer QAOA state."""
    probs = qaoa_probabilities(g, params, guard)
    return float(probs @ cut_spectrum(g, guard))


def cut_moments(g: Graph, params, guard: int | None = None) -> tuple[float, float]:
    """First and second moments of the measured cut size."""
    probs = qaoa_probabilities(g, params, guard)
    values = cut_spectrum(g, guard).astype(np.float64)
    return float(probs @ values), float(probs @ (values * values))


def edge_expectations(g: Graph, params, guard: int | None = None) -> np.ndarray:
    """Per-edge ``<(1 - Z_u Z_v)/2>`` in ``g.edges`` order, from one simulation."""
    probs = qaoa_probabilities(g, params, guard)
    n = g.node_count
    return np.array([probs @ _edge_cut_indicator(n, u, v) for u, v in g.edges])


def local_edge_expectation(g: Graph, edge: tuple[int, int], params, guard: int | None = None) -> float:
    u, v = min(edge), max(edge)
    if not g.has_edge(u, v):
        raise GraphError(f"edge {edge} is not in the graph")
    probs = qaoa_probabilities(g, params, guard)
    return float(probs @ _edge_cut_indicator(g.node_count, u, v))


def qaoa_gradient(g: Graph, params, step: float = 1e-5, guard: int | None = None) -> np.ndarray:
    """Central finite-difference gradient, ordered ``[d/dgamma..., d/dbeta...]``."""
    if step <= 0:
        raise ValueError("finite-difference step must be positive")
    x = as_params(params).to_array()
    grad = np.empty_like(x)
    for i in range(x.size):
        up, down = x.copy(), x.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (qaoa_expectation(g, up, guard) - qaoa_expectation(g, down, guard)) / (2 * step)
    return grad


def edge_gradients(g: Graph, params, step: float = 1e-5, guard: int | None = None) -> np.ndarray:
    """Finite-difference gradients of every local edge energy, shape ``(|E|, 2p)``."""
    x = as_params(params).to_array()
    grads = np.empty((g.edge_count, x.size))
    for i in range(x.size):
        up, down = x.copy(), x.copy()
        up[i] += step
        down[i] -= step
        grads[:, i] = (edge_expectations(g, up, guard) - edge_expectations(g, down, guard)) / (2 * step)
    return grads


def qaoa_sample_counts(g: Graph, params, shots: int, seed: int,
                       guard: int | None = None) -> dict[str, int]:
    """Multinomial measurement histogram keyed by bitstring."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = qaoa_probabilities(g, params, guard)
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    nz = np.flatnonzero(counts)
    return {bitstring(int(z), g.node_count): int(counts[z]) for z in nz}


def ideal_evaluator(g: Graph, params) -> float:
    return qaoa_expectation(g, params)
