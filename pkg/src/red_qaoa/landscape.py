"""Energy landscapes: sampling specs, sampling, JSON/CSV serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graphs import Graph
from .simulator import ParamVector, check_guard, qaoa_expectation

GAMMA_PERIOD = 2 * math.pi
BETA_PERIOD = math.pi

Evaluator = Callable[[Graph, ParamVector], float]


@dataclass(frozen=True)
class LandscapeSpec:
    """Where to sample: a ``width x width`` grid (p=1) or ``count`` random points.

    Grid axes include both endpoints of ``gamma in [0, 2pi]`` and
    ``beta in [0, pi]``.
    """

    mode: str
    width: int = 0
    count: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.mode == "grid":
            if self.width < 2:
                raise ValueError("grid width must be >= 2")
        elif self.mode == "random":
            if self.count < 1:
                raise ValueError("random landscapes need at least one point")
        else:
            raise ValueError(f"unknown sampling mode {self.mode!r}")

    @classmethod
    def grid(cls, width: int) -> "LandscapeSpec":
        return cls("grid", width=width)

    @classmethod
    def random(cls, count: int, seed: int) -> "LandscapeSpec":
        return cls("random", count=count, seed=seed)

    def points(self, p: int) -> np.ndarray:
        """Flat parameter rows ``[gammas..., betas...]``, shape ``(N, 2p)``."""
        if p < 1:
            raise ValueError("p must be >= 1")
        if self.mode == "grid":
            if p != 1:
                raise ValueError("grid sampling is defined for p = 1 only")
            gammas = np.linspace(0.0, GAMMA_PERIOD, self.width)
            betas = np.linspace(0.0, BETA_PERIOD, self.width)
            gg, bb = np.meshgrid(gammas, betas, indexing="ij")  # gamma outer, beta inner
            return np.column_stack([gg.ravel(), bb.ravel()])
        rng = np.random.default_rng(self.seed)
        gammas = rng.uniform(0.0, GAMMA_PERIOD, size=(self.count, p))
        betas = rng.uniform(0.0, BETA_PERIOD, size=(self.count, p))
        return np.hstack([gammas, betas])

    def to_dict(self) -> dict:
        if self.mode == "grid":
            return {"mode": "grid", "width": self.width}
        return {"mode": "random", "count": self.count, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "LandscapeSpec":
        if d["mode"] == "grid":
            return cls.grid(int(d["width"]))
        return cls.random(int(d["count"]), int(d["seed"]))


@dataclass(frozen=True, eq=False)
class EnergyLandscape:
    params: np.ndarray
    energies: np.ndarray
    spec: LandscapeSpec
    p: int
    graph_fingerprint: str = ""

    def __len__(self) -> int:
        return len(self.energies)

    def with_energies(self, energies) -> "EnergyLandscape":
        return EnergyLandscape(self.params, np.asarray(energies, dtype=float), self.spec, self.p,
                               self.graph_fingerprint)

    def to_json(self) -> dict:
        p = self.p
        return {
            "graph_fingerprint": self.graph_fingerprint,
            "p": p,
            "spec": self.spec.to_dict(),
            "points": [
                {"gammas": row[:p].tolist(), "betas": row[p:].tolist(), "energy": float(e)}
                for row, e in zip(self.params, self.energies)
            ],
        }

    @classmethod
    def from_json(cls, d: dict) -> "EnergyLandscape":
        pts = d["points"]
        params = np.array([pt["gammas"] + pt["betas"] for pt in pts], dtype=float)
        energies = np.array([pt["energy"] for pt in pts], dtype=float)
        return cls(params.reshape(len(pts), 2 * int(d["p"])), energies,
                   LandscapeSpec.from_dict(d["spec"]), int(d["p"]), d.get("graph_fingerprint", ""))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        p = self.p
        writer.writerow([f"gamma_{i + 1}" for i in range(p)] + [f"beta_{i + 1}" for i in range(p)] + ["energy"])
        for row, e in zip(self.params, self.energies):
            writer.writerow([repr(float(x)) for x in row] + [repr(float(e))])
        return buf.getvalue()


def load_landscape(path) -> EnergyLandscape:
    with open(path, encoding="utf-8") as fh:
        return EnergyLandscape.from_json(json.load(fh))


def sample_landscape(g: Graph, p: int, spec: LandscapeSpec, evaluator: Evaluator | None = None,
                     workers: int = 1) -> EnergyLandscape:
    """Evaluate ``evaluator`` (ideal by default) at every point of ``spec``."""
    check_guard(g)
    evaluator = evaluator or qaoa_expectation
    rows = spec.points(p)

    def run(row):
        return evaluator(g, ParamVector.from_array(row))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            energies = list(pool.map(run, rows))
    else:
        energies = [run(row) for row in rows]
    return EnergyLandscape(rows, np.array(energies, dtype=float), spec, p, g.fingerprint)
