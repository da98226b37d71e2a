"""Parameter search and the reduce -> optimise -> transfer -> refine flow."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .graphs import Graph, GraphError, is_connected
from .landscape import BETA_PERIOD, GAMMA_PERIOD, LandscapeSpec, sample_landscape
from .metrics import DegenerateLandscapeError, approximation_ratio, mse
from .noise import NoiseModel, NoisyEvaluator
from .reduction import DEFAULT_THRESHOLD, ReductionResult, SAConfig, find_reduced_graph
from .simulator import ParamVector, check_guard, max_cut_bruteforce, qaoa_expectation

log = logging.getLogger(__name__)

DEFAULT_RESTARTS = {1: 20, 2: 50, 3: 150}
DEFAULT_REFINE_FRACTION = 0.2


def default_restarts(p: int) -> int:
    return DEFAULT_RESTARTS.get(p, 150)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    max_evals_per_restart: int = 200
    initial_simplex_scale: float = 0.3
    convergence_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_evals_per_restart < 1:
            raise ValueError("restarts and evaluation budget must be positive")
        if self.initial_simplex_scale <= 0 or self.convergence_tol <= 0:
            raise ValueError("simplex scale and tolerance must be positive")

    @property
    def total_budget(self) -> int:
        return self.restarts * self.max_evals_per_restart


@dataclass
class TraceRecord:
    restart: int
    evaluation: int
    params: tuple[float, ...]
    energy: float
    ideal_energy: float
    best_so_far: float
    evaluator: str
    graph: str


@dataclass
class OptimizationTrace:
    records: list[TraceRecord] = field(default_factory=list)
    p: int = 1

    @property
    def evaluations(self) -> int:
        return len(self.records)

    def _best_record(self) -> TraceRecord:
        if not self.records:
            raise ValueError("empty optimisation trace")
        # highest ideal energy; ties go to the earlier restart/evaluation
        return max(self.records, key=lambda r: (r.ideal_energy, -r.restart, -r.evaluation))

    @property
    def best_params(self) -> ParamVector:
        return ParamVector.from_array(self._best_record().params)

    @property
    def best_energy(self) -> float:
        return self._best_record().ideal_energy

    @property
    def best_restart(self) -> int:
        return self._best_record().restart

    def restart_records(self, restart: int) -> list[TraceRecord]:
        return [r for r in self.records if r.restart == restart]

    def to_json(self, include_records: bool = False) -> dict:
        d = {
            "p": self.p,
            "evaluations": self.evaluations,
            "best_params": self.best_params.to_dict() if self.records else None,
            "best_energy": self.best_energy if self.records else None,
            "best_restart": self.best_restart if self.records else None,
        }
        if include_records:
            d["records"] = [asdict(r) for r in self.records]
        return d

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        p = self.p
        writer.writerow(["graph", "evaluator", "restart", "evaluation"]
                        + [f"gamma_{i + 1}" for i in range(p)] + [f"beta_{i + 1}" for i in range(p)]
                        + ["energy", "ideal_energy", "best_so_far"])
        for r in self.records:
            writer.writerow([r.graph, r.evaluator, r.restart, r.evaluation, *map(repr, r.params),
                             repr(r.energy), repr(r.ideal_energy), repr(r.best_so_far)])
        return buf.getvalue()


class _BudgetExhausted(Exception):
    pass


def _run_nelder_mead(g: Graph, x0: np.ndarray, evaluator, max_evals: int, config: OptimizerConfig,
                     trace: OptimizationTrace, restart: int, graph_tag: str) -> None:
    noisy = evaluator is not None
    tag = "noisy" if noisy else "ideal"
    evaluate = evaluator or qaoa_expectation
    best = -math.inf
    count = 0

    def objective(x):
        nonlocal best, count
        if count >= max_evals:
            raise _BudgetExhausted
        params = ParamVector.from_array(x)
        energy = float(evaluate(g, params))
        ideal = qaoa_expectation(g, params) if noisy else energy
        best = max(best, energy)
        trace.records.append(TraceRecord(restart, count, tuple(float(v) for v in x), energy, ideal,
                                         best, tag, graph_tag))
        count += 1
        return -energy

    dim = x0.size
    simplex = np.vstack([x0, x0 + config.initial_simplex_scale * np.eye(dim)])
    try:
        minimize(objective, x0, method="Nelder-Mead",
                 options={"initial_simplex": simplex, "maxfev": max_evals, "maxiter": 10 * max_evals,
                          "xatol": config.convergence_tol, "fatol": config.convergence_tol})
    except _BudgetExhausted:
        pass


def random_initial_point(rng: np.random.Generator, p: int) -> np.ndarray:
    return np.concatenate([rng.uniform(0.0, GAMMA_PERIOD, p), rng.uniform(0.0, BETA_PERIOD, p)])


def optimize_params(g: Graph, p: int, evaluator: Callable | None = None,
                    config: OptimizerConfig = OptimizerConfig(), graph_tag: str = "original",
                    max_evals_per_restart: int | None = None, workers: int = 1) -> OptimizationTrace:
    """Multi-start Nelder-Mead maximisation of the QAOA energy.

    ``evaluator=None`` searches the ideal statevector energy. With a noisy
    evaluator the search follows the noisy values while every record also
    stores the ideal energy, which is what ``best_params`` is chosen by.
    """
    check_guard(g)
    if g.edge_count == 0:
        raise GraphError("cannot optimise QAOA on a graph without edges")
    if p < 1:
        raise ValueError("p must be >= 1")
    budget = config.max_evals_per_restart if max_evals_per_restart is None else max_evals_per_restart
    rng = np.random.default_rng(config.seed)
    starts = [random_initial_point(rng, p) for _ in range(config.restarts)]

    def one(restart):
        part = OptimizationTrace(p=p)
        _run_nelder_mead(g, starts[restart], evaluator, budget, config, part, restart, graph_tag)
        return part.records

    trace = OptimizationTrace(p=p)
    if workers > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=min(workers, config.restarts)) as pool:
            parts = list(pool.map(one, range(config.restarts)))
    else:
        parts = [one(r) for r in range(config.restarts)]
    for records in parts:
        trace.records.extend(records)
    return trace


def refine_params(g: Graph, start: ParamVector, evaluator: Callable | None, max_evals: int,
                  config: OptimizerConfig = OptimizerConfig(), graph_tag: str = "original") -> OptimizationTrace:
    """Single Nelder-Mead run started from ``start``."""
    check_guard(g)
    trace = OptimizationTrace(p=start.p)
    _run_nelder_mead(g, start.to_array(), evaluator, max(1, max_evals), config, trace, 0, graph_tag)
    return trace


def transfer_params(source: OptimizationTrace) -> ParamVector:
    """Best angles of ``source``, reused unchanged (same ``p``) on another graph."""
    if not source.records:
        raise ValueError("cannot transfer parameters from an empty trace")
    return source.best_params


def _make_evaluator(noise: NoiseModel | None, seed: int, method: str):
    return None if noise is None else NoisyEvaluator(noise, seed=seed, method=method)


@dataclass
class PipelineResult:
    reduction: ReductionResult
    reduced_trace: OptimizationTrace
    refined_trace: OptimizationTrace
    transferred_params: ParamVector
    final_params: ParamVector
    final_energy: float
    max_cut: int
    approximation_ratio: float
    baseline_trace: OptimizationTrace | None = None
    baseline_ratio: float | None = None

    @property
    def total_evaluations(self) -> int:
        return self.reduced_trace.evaluations + self.refined_trace.evaluations

    def to_json(self, original: Graph | None = None) -> dict:
        d = {
            "reduction": self.reduction.to_json(original),
            "reduced_trace": self.reduced_trace.to_json(),
            "refined_trace": self.refined_trace.to_json(),
            "transferred_params": self.transferred_params.to_dict(),
            "final_params": self.final_params.to_dict(),
            "final_energy": self.final_energy,
            "max_cut": self.max_cut,
            "approximation_ratio": self.approximation_ratio,
            "total_evaluations": self.total_evaluations,
        }
        if self.baseline_trace is not None:
            d["baseline_trace"] = self.baseline_trace.to_json()
            d["baseline_ratio"] = self.baseline_ratio
            d["baseline_evaluations"] = self.baseline_trace.evaluations
        return d


def run_baseline(g: Graph, p: int, noise: NoiseModel | None = None,
                 opt_config: OptimizerConfig = OptimizerConfig(), noisy_method: str = "auto",
                 workers: int = 1) -> OptimizationTrace:
    """Plain multi-start search on the original graph with the full budget."""
    return optimize_params(g, p, _make_evaluator(noise, opt_config.seed, noisy_method), opt_config,
                           workers=workers)


def run_red_qaoa(g: Graph, p: int = 1, noise: NoiseModel | None = None,
                 sa_config: SAConfig = SAConfig(), threshold: float = DEFAULT_THRESHOLD,
                 opt_config: OptimizerConfig = OptimizerConfig(),
                 refine_budget_fraction: float = DEFAULT_REFINE_FRACTION,
                 noisy_method: str = "auto", baseline: bool = False, workers: int = 1) -> PipelineResult:
    """Reduce, search on the reduced graph, transfer, refine on ``g``.

    With ``T = restarts * max_evals_per_restart``, the reduced-graph search
    gets ``(1 - f)`` of every restart's budget and the refinement gets
    ``f * T``, so the total never exceeds the baseline's ``T``.
    """
    if not 0 <= refine_budget_fraction < 1:
        raise ValueError("refine budget fraction must lie in [0, 1)")
    if g.edge_count == 0:
        raise GraphError("graph has no edges")
    if not is_connected(g):
        raise GraphError("run_red_qaoa needs a connected graph")
    check_guard(g)
    max_cut, _ = max_cut_bruteforce(g)

    reduction = find_reduced_graph(g, threshold, sa_config)
    evaluator = _make_evaluator(noise, opt_config.seed, noisy_method)
    per_restart = max(1, int(opt_config.max_evals_per_restart * (1 - refine_budget_fraction)))
    reduced_trace = optimize_params(reduction.reduced_graph, p, evaluator, opt_config,
                                    graph_tag="reduced", max_evals_per_restart=per_restart, workers=workers)
    transferred = transfer_params(reduced_trace)
    refine_evals = min(int(refine_budget_fraction * opt_config.total_budget),
                       opt_config.total_budget - reduced_trace.evaluations)
    if refine_budget_fraction == 0 or refine_evals < 1:
        refined = OptimizationTrace(p=p)
        e = qaoa_expectation(g, transferred)
        refined.records.append(TraceRecord(0, 0, tuple(transferred.to_array()), e, e, e, "ideal", "original"))
    else:
        refined = refine_params(g, transferred, evaluator, refine_evals, opt_config)
    final = refined.best_params
    final_energy = qaoa_expectation(g, final)
    result = PipelineResult(reduction, reduced_trace, refined, transferred, final, final_energy, max_cut,
                            approximation_ratio(final_energy, max_cut))
    if baseline:
        base = run_baseline(g, p, noise, opt_config, noisy_method, workers)
        result.baseline_trace = base
        result.baseline_ratio = approximation_ratio(qaoa_expectation(g, base.best_params), max_cut)
    return result


def _summary(values: Sequence[float]) -> dict:
    if not values:
        return {}
    arr = np.asarray(values, dtype=float)
    q1, med, q3 = np.percentile(arr, [25, 50, 75])
    return {"mean": float(arr.mean()), "median": float(med), "q1": float(q1), "q3": float(q3),
            "min": float(arr.min()), "max": float(arr.max())}


def bench_reduction_stats(dataset: Sequence[Graph], threshold: float = DEFAULT_THRESHOLD,
                          p_values: Sequence[int] = (1,),
                          sample_spec: LandscapeSpec = LandscapeSpec.random(1024, 0),
                          sa_config: SAConfig = SAConfig()) -> dict:
    """Node/edge reduction and ideal-landscape MSE over a collection of graphs."""
    rows = []
    for idx, g in enumerate(dataset):
        try:
            if g.node_count < 3 or g.edge_count == 0 or not is_connected(g):
                raise GraphError("needs a connected graph with >= 3 nodes and at least one edge")
            check_guard(g)
            red = find_reduced_graph(g, threshold, sa_config)
            h = red.reduced_graph
            row = {
                "index": idx,
                "nodes": g.node_count,
                "edges": g.edge_count,
                "reduced_nodes": h.node_count,
                "reduced_edges": h.edge_count,
                "node_reduction": 1 - h.node_count / g.node_count,
                "edge_reduction": 1 - h.edge_count / g.edge_count,
                "and_ratio": red.and_ratio,
                "warning": red.warning,
                "mse": {},
            }
            for p in p_values:
                spec = sample_spec if sample_spec.mode == "random" or p == 1 else \
                    LandscapeSpec.random(sample_spec.width ** 2, 0)
                row["mse"][p] = mse(sample_landscape(g, p, spec), sample_landscape(h, p, spec))
        except (GraphError, DegenerateLandscapeError, ValueError) as exc:
            log.warning("skipping graph %d: %s", idx, exc)
            continue
        rows.append(row)
    summary = {
        "graphs": len(rows),
        "skipped": len(dataset) - len(rows),
        "threshold": threshold,
        "node_reduction": _summary([r["node_reduction"] for r in rows]),
        "edge_reduction": _summary([r["edge_reduction"] for r in rows]),
        "mse": {p: _summary([r["mse"][p] for r in rows]) for p in p_values} if rows else {},
        "per_graph": rows,
    }
    return summary
