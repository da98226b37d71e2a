"""Simulated-annealing graph reduction on average node degree.

``sa_reduce`` searches connected ``k``-node induced subgraphs whose average
node degree (AND) is closest to the parent's; ``find_reduced_graph``
bisects ``k`` for the smallest subgraph whose AND ratio clears a threshold.
"""

from __future__ import annotations

import logging
import math
import random
from collections import deque
from dataclasses import dataclass, field, replace

from .graphs import (NEIGHBOR_RETRY_BUDGET, Graph, GraphError, MoveExhaustedError, NodeSubset,
                     _propose_swap, average_node_degree, induced_subgraph, is_connected,
                     random_connected_subset)

log = logging.getLogger(__name__)

ALPHA_MIN = 0.85
ALPHA_MAX = 0.999
ADAPTIVE_WINDOW = 50
DEFAULT_THRESHOLD = 0.7
MIN_REDUCED_NODES = 3


@dataclass(frozen=True)
class SAConfig:
    """Annealing schedule.

    ``max_steps=None`` means ``20 * node_count`` for the graph being reduced.
    """

    initial_temperature: float = 1.0
    stopping_temperature: float = 1e-3
    cooling: str = "adaptive"
    alpha: float = 0.95
    max_steps: int | None = None
    seed: int = 0
    neighbor_retry_budget: int = NEIGHBOR_RETRY_BUDGET
    adaptive_window: int = ADAPTIVE_WINDOW
    alpha_min: float = ALPHA_MIN
    alpha_max: float = ALPHA_MAX
    restarts_per_k: int = 3

    def __post_init__(self):
        if not 0 < self.stopping_temperature < self.initial_temperature:
            raise ValueError("need 0 < stopping_temperature < initial_temperature")
        if self.cooling not in ("constant", "adaptive"):
            raise ValueError(f"unknown cooling schedule {self.cooling!r}")
        if not 0 < self.alpha < 1:
            raise ValueError("constant cooling factor must lie in (0, 1)")
        if not 0 < self.alpha_min <= self.alpha_max < 1:
            raise ValueError("need 0 < alpha_min <= alpha_max < 1")
        if self.restarts_per_k < 1 or self.neighbor_retry_budget < 1 or self.adaptive_window < 1:
            raise ValueError("restarts, retry budget and window must be positive")

    def step_budget(self, node_count: int) -> int:
        return self.max_steps if self.max_steps is not None else 20 * node_count


@dataclass
class ReductionResult:
    subset: NodeSubset
    reduced_graph: Graph
    objective_value: float
    and_ratio: float
    steps_taken: int = 0
    accepted_moves: int = 0
    final_objective: float | None = None
    final_subset: NodeSubset | None = None
    seed: int | None = None
    warning: str | None = None
    temperatures: list[float] = field(default_factory=list, repr=False)

    @property
    def k(self) -> int:
        return len(self.subset)

    def to_json(self, original: Graph | None = None) -> dict:
        d = {
            "subset": list(self.subset.members),
            "k": self.k,
            "reduced_edgelist": [list(e) for e in self.reduced_graph.edges],
            "and_ratio": self.and_ratio,
            "objective": self.objective_value,
            "final_objective": self.final_objective,
            "steps": self.steps_taken,
            "accepted_moves": self.accepted_moves,
            "seed": self.seed,
            "warning": self.warning,
        }
        if original is not None:
            d["node_reduction"] = 1 - self.reduced_graph.node_count / original.node_count
            d["edge_reduction"] = (1 - self.reduced_graph.edge_count / original.edge_count
                                   if original.edge_count else 0.0)
        return d


def objective(candidate_and: float, target_and: float) -> float:
    return abs(candidate_and - target_and)


def adaptive_cooling_factor(temperature: float, recent_rejections: int, window: int,
                            alpha_min: float = ALPHA_MIN, alpha_max: float = ALPHA_MAX) -> float:
    """Cooling factor interpolated linearly in the recent rejection rate.

    A window of pure acceptances cools slowly (``alpha_max``); a window of
    pure rejections means the chain is frozen at this temperature and cools
    fast (``alpha_min``).
    """
    if window < 1 or not 0 <= recent_rejections <= window:
        raise ValueError("need 0 <= recent_rejections <= window, window >= 1")
    rate = recent_rejections / window
    return alpha_max - (alpha_max - alpha_min) * rate


def sa_reduce(g: Graph, k: int, config: SAConfig = SAConfig(), rng: random.Random | None = None) -> ReductionResult:
    """Anneal over connected ``k``-subsets, minimising ``|AND(S) - AND(G)|``.

    One move is proposed per temperature step. Strict improvements are
    always taken; anything else is taken when ``rng.random() <
    exp(-delta / T)``, so equal-objective moves pass for any draw below 1.
    The best subset seen is returned; the final chain state is reported in
    ``final_subset``/``final_objective``.
    """
    if not 2 <= k <= g.node_count:
        raise GraphError(f"k={k} outside [2, {g.node_count}]")
    if not is_connected(g):
        raise GraphError("sa_reduce needs a connected graph")
    rng = rng if rng is not None else random.Random(config.seed)
    adj = g._sorted_adjacency
    adj_sets = g.adjacency
    target = average_node_degree(g)

    start = random_connected_subset(g, k, rng)
    members = list(start.members)
    member_set = set(members)
    inner_edges = sum(1 for m in members for nb in adj_sets[m] if nb in member_set) // 2
    current = objective(2.0 * inner_edges / k, target)
    best, best_members = current, tuple(members)

    temperature = config.initial_temperature
    budget = config.step_budget(g.node_count)
    window: deque[bool] = deque(maxlen=config.adaptive_window)
    temperatures = [temperature]
    steps = accepted = 0
    can_move = k < g.node_count

    while temperature > config.stopping_temperature and steps < budget:
        steps += 1
        took = False
        if can_move:
            try:
                pos, added = _propose_swap(adj, members, member_set, rng, config.neighbor_retry_budget)
            except MoveExhaustedError:
                pos = None
            if pos is not None:
                removed = members[pos]
                lost = sum(1 for nb in adj_sets[removed] if nb in member_set)
                gained = sum(1 for nb in adj_sets[added] if nb in member_set and nb != removed)
                cand_edges = inner_edges - lost + gained
                cand = objective(2.0 * cand_edges / k, target)
                if cand < current or rng.random() < math.exp(-(cand - current) / temperature):
                    members[pos] = added
                    member_set.remove(removed)
                    member_set.add(added)
                    inner_edges, current = cand_edges, cand
                    accepted += 1
                    took = True
                    if current < best:
                        best, best_members = current, tuple(members)
        window.append(took)
        if config.cooling == "adaptive":
            rejections = sum(1 for x in window if not x)
            factor = adaptive_cooling_factor(temperature, rejections, len(window),
                                             config.alpha_min, config.alpha_max)
        else:
            factor = config.alpha
        temperature *= factor
        temperatures.append(temperature)

    subset = NodeSubset(best_members, g.node_count)
    reduced = induced_subgraph(g, subset)
    return ReductionResult(
        subset=subset,
        reduced_graph=reduced,
        objective_value=best,
        and_ratio=average_node_degree(reduced) / target if target else 1.0,
        steps_taken=steps,
        accepted_moves=accepted,
        final_objective=current,
        final_subset=NodeSubset(tuple(members), g.node_count),
        seed=config.seed,
        temperatures=temperatures,
    )


def _best_of_restarts(g: Graph, k: int, config: SAConfig) -> ReductionResult:
    best = None
    for r in range(config.restarts_per_k):
        seed = config.seed * 1_000_003 + k * 1009 + r
        res = sa_reduce(g, k, replace(config, seed=seed))
        # lowest objective wins; ties keep the earlier (lower) seed
        if best is None or res.objective_value < best.objective_value:
            best = res
    return best


def full_graph_result(g: Graph, warning: str | None = None) -> ReductionResult:
    subset = NodeSubset(tuple(range(g.node_count)), g.node_count)
    return ReductionResult(subset=subset, reduced_graph=g, objective_value=0.0, and_ratio=1.0,
                           final_objective=0.0, final_subset=subset, warning=warning)


def find_reduced_graph(g: Graph, and_ratio_threshold: float = DEFAULT_THRESHOLD,
                       config: SAConfig = SAConfig()) -> ReductionResult:
    """Smallest ``k`` (by bisection) whose annealed subgraph keeps the AND ratio.

    Probes ``k`` in ``[3, n-1]``; each probe takes the best of
    ``config.restarts_per_k`` annealing runs. If no proper subgraph clears
    the threshold the full graph comes back with ``warning`` set.
    """
    if not 0 < and_ratio_threshold <= 1:
        raise ValueError("AND ratio threshold must lie in (0, 1]")
    if g.node_count < MIN_REDUCED_NODES:
        raise GraphError(f"need at least {MIN_REDUCED_NODES} nodes to reduce")
    if not is_connected(g):
        raise GraphError("find_reduced_graph needs a connected graph")
    lo, hi = MIN_REDUCED_NODES, g.node_count - 1
    found = None
    while lo <= hi:
        k = (lo + hi) // 2
        res = _best_of_restarts(g, k, config)
        if res.and_ratio >= and_ratio_threshold:
            found, hi = res, k - 1
        else:
            lo = k + 1
    if found is None:
        msg = f"no proper subgraph reaches AND ratio {and_ratio_threshold}; returning the full graph"
        log.warning(msg)
        return full_graph_result(g, warning=msg)
    return found
