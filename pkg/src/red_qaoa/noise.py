"""Synthetic noisy QAOA expectations.

Two evaluators share one :class:`NoiseModel`:

* ``noisy_expectation_dm`` evolves a full density matrix, with a two-qubit
  depolarizing channel after every edge's cost phase, a single-qubit
  depolarizing channel after every mixer rotation, then readout flips and
  multinomial shot noise.
* ``noisy_expectation_global`` is a closed-form global-depolarizing
  surrogate for graphs too big for a density matrix.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .graphs import Graph
from .simulator import (ParamVector, SimulationGuardError, as_params, check_guard, cut_moments,
                        cut_spectrum)

DM_GUARD = 10


@dataclass(frozen=True)
class NoiseModel:
    two_qubit_depol: float = 0.01
    single_qubit_depol: float = 0.001
    readout_flip: float = 0.02
    shots: int | None = 8192  # None means exact expectation

    def __post_init__(self):
        for name in ("two_qubit_depol", "single_qubit_depol"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")
        if not 0.0 <= self.readout_flip <= 0.5:
            raise ValueError(f"readout_flip={self.readout_flip} outside [0, 0.5]")
        if self.shots is not None and (int(self.shots) != self.shots or self.shots < 1):
            raise ValueError("shots must be a positive integer or None for exact")

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls(0.0, 0.0, 0.0, None)

    def to_json(self) -> dict:
        d = asdict(self)
        if d["shots"] is None:
            d["shots"] = "exact"
        return d

    @classmethod
    def from_json(cls, d: dict) -> "NoiseModel":
        defaults = cls()
        shots = d.get("shots", defaults.shots)
        if shots == "exact":
            shots = None
        known = {"two_qubit_depol", "single_qubit_depol", "readout_flip", "shots"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown noise fields: {sorted(unknown)}")
        return cls(
            float(d.get("two_qubit_depol", defaults.two_qubit_depol)),
            float(d.get("single_qubit_depol", defaults.single_qubit_depol)),
            float(d.get("readout_flip", defaults.readout_flip)),
            None if shots is None else int(shots),
        )


def load_noise(arg: str | None) -> NoiseModel | None:
    """Parse a ``--noise`` argument: ``none``, ``default``, a JSON file or inline JSON."""
    if arg is None or arg.lower() == "none":
        return None
    if arg.lower() == "default":
        return NoiseModel()
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return NoiseModel.from_json(json.load(fh))
    return NoiseModel.from_json(json.loads(arg))


# ---------------------------------------------------------------------------
# Density-matrix channels; rho is kept as a (2,)*2n tensor, row axes first.
# Qubit q lives on row axis n-1-q and column axis 2n-1-q.
# ---------------------------------------------------------------------------

def _axes(n: int, q: int) -> tuple[int, int]:
    return n - 1 - q, 2 * n - 1 - q


def _edge_phase(n, rho, u, v, gamma):
    (ru, cu), (rv, cv) = _axes(n, u), _axes(n, v)
    view = np.moveaxis(rho, (ru, rv, cu, cv), (0, 1, 2, 3))
    bits = np.array([[0, 1], [1, 0]])
    row = np.exp(-1j * gamma * bits)
    factor = row[:, :, None, None] * np.conj(row)[None, None, :, :]
    view *= factor.reshape((2, 2, 2, 2) + (1,) * (rho.ndim - 4))


def _depolarize_pair(n, rho, u, v, prob):
    if prob == 0.0:
        return
    (ru, cu), (rv, cv) = _axes(n, u), _axes(n, v)
    view = np.moveaxis(rho, (ru, rv, cu, cv), (0, 1, 2, 3))
    reduced = view[0, 0, 0, 0] + view[0, 1, 0, 1] + view[1, 0, 1, 0] + view[1, 1, 1, 1]
    view *= 1.0 - prob
    for a in (0, 1):
        for b in (0, 1):
            view[a, b, a, b] += (prob / 4.0) * reduced


def _depolarize_qubit(n, rho, q, prob):
    if prob == 0.0:
        return
    view = np.moveaxis(rho, _axes(n, q), (0, 1))
    reduced = view[0, 0] + view[1, 1]
    view *= 1.0 - prob
    view[0, 0] += (prob / 2.0) * reduced
    view[1, 1] += (prob / 2.0) * reduced


def _rotate_x(n, rho, q, beta):
    c, s = math.cos(beta), math.sin(beta)
    dim = 1 << n
    # row index is the slow half of the flat buffer, column index the fast half
    for view, phase in ((rho.reshape(dim >> (q + 1), 2, (1 << q) * dim), -1j * s),
                        (rho.reshape(dim * (dim >> (q + 1)), 2, 1 << q), 1j * s)):
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :]
        view[:, 0, :] *= c
        view[:, 0, :] += phase * hi
        hi *= c
        hi += phase * lo


def noisy_density_matrix(g: Graph, params, noise: NoiseModel, guard: int = DM_GUARD) -> np.ndarray:
    """Final ``2**n x 2**n`` density matrix before readout."""
    if g.node_count > guard:
        raise SimulationGuardError(f"density-matrix path limited to {guard} qubits, got {g.node_count}")
    params = as_params(params)
    n = g.node_count
    dim = 1 << n
    rho = np.full((2,) * (2 * n), 1.0 / dim, dtype=np.complex128)
    for gamma, beta in zip(params.gammas, params.betas):
        for u, v in g.edges:
            _edge_phase(n, rho, u, v, gamma)
            _depolarize_pair(n, rho, u, v, noise.two_qubit_depol)
        for q in range(n):
            _rotate_x(n, rho, q, beta)
            _depolarize_qubit(n, rho, q, noise.single_qubit_depol)
    return rho.reshape(dim, dim)


def apply_readout(probs: np.ndarray, n: int, flip: float) -> np.ndarray:
    """Independent per-qubit bit flips on a basis-state distribution."""
    if flip == 0.0:
        return probs
    out = probs.reshape((2,) * n)
    for axis in range(n):
        out = (1.0 - flip) * out + flip * np.flip(out, axis=axis)
    return out.reshape(-1)


def _shot_average(probs: np.ndarray, values: np.ndarray, shots: int, seed) -> float:
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return float(counts @ values) / shots


def noisy_expectation_dm(g: Graph, params, noise: NoiseModel, seed=0, guard: int = DM_GUARD) -> float:
    rho = noisy_density_matrix(g, params, noise, guard)
    probs = apply_readout(np.real(np.diagonal(rho)).copy(), g.node_count, noise.readout_flip)
    values = cut_spectrum(g).astype(np.float64)
    if noise.shots is None:
        return float(probs @ values)
    return _shot_average(probs, values, noise.shots, seed)


def global_fidelity(g: Graph, p: int, noise: NoiseModel) -> float:
    return ((1.0 - noise.two_qubit_depol) ** (p * g.edge_count)
            * (1.0 - noise.single_qubit_depol) ** (p * g.node_count))


def noisy_expectation_global(g: Graph, params, noise: NoiseModel, seed=0) -> float:
    """``F * E_ideal + (1 - F) * |E| / 2`` plus Gaussian shot noise.

    The shot-noise variance is that of the cut size under the mixture of the
    ideal output distribution (weight ``F``) and the uniform one; it never
    exceeds ``|E|**2 / (4 * shots)``.
    """
    check_guard(g)
    params = as_params(params)
    m = g.edge_count
    fid = global_fidelity(g, params.p, noise)
    first, second = cut_moments(g, params)
    mean = fid * first + (1.0 - fid) * m / 2.0
    if noise.shots is None:
        return mean
    uniform_second = m / 4.0 + m * m / 4.0
    var = max(fid * second + (1.0 - fid) * uniform_second - mean * mean, 0.0)
    return mean + float(np.random.default_rng(seed).normal()) * math.sqrt(var / noise.shots)


def _point_seed(seed: int, params: ParamVector) -> np.random.SeedSequence:
    words = params.to_array().astype(np.float64).view(np.uint32)
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *map(int, words)])


class NoisyEvaluator:
    """Callable ``(graph, params) -> noisy expectation``.

    Shot noise is seeded from ``(seed, params)``, so a given point always
    returns the same value regardless of evaluation order or threading.
    ``method`` picks ``"dm"``, ``"global"`` or ``"auto"`` (density matrix up
    to ``dm_limit`` qubits).
    """

    def __init__(self, noise: NoiseModel, seed: int = 0, method: str = "auto", dm_limit: int = DM_GUARD):
        if method not in ("auto", "dm", "global"):
            raise ValueError(f"unknown noisy method {method!r}")
        self.noise = noise
        self.seed = seed
        self.method = method
        self.dm_limit = dm_limit

    def resolve(self, g: Graph) -> str:
        if self.method != "auto":
            return self.method
        return "dm" if g.node_count <= self.dm_limit else "global"

    def __call__(self, g: Graph, params) -> float:
        params = as_params(params)
        point_seed = _point_seed(self.seed, params)
        if self.resolve(g) == "dm":
            return noisy_expectation_dm(g, params, self.noise, point_seed)
        return noisy_expectation_global(g, params, self.noise, point_seed)
