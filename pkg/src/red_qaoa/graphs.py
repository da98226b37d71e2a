"""Undirected simple graphs, edge-list I/O, generators and subset machinery.

Nodes are dense 0-based integers; an induced subgraph is relabelled
``0..k-1`` following the order of the subset that produced it, so qubit
indices stay contiguous for the simulators.
"""

from __future__ import annotations

import hashlib
import io
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

ENUMERATION_GUARD = 16
NEIGHBOR_RETRY_BUDGET = 32


class GraphError(ValueError):
    """Invalid graph, subset or graph-level precondition."""


class GraphFormatError(GraphError):
    """Malformed edge-list input; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MoveExhaustedError(RuntimeError):
    """No connected single-swap neighbour was found within the retry budget."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..node_count-1``.

    ``edges`` is stored as a sorted tuple of ``(u, v)`` pairs with ``u < v``.
    Duplicate pairs passed to the constructor are collapsed.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if int(self.node_count) != self.node_count or self.node_count < 1:
            raise GraphError(f"node_count must be a positive integer, got {self.node_count!r}")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise GraphError(f"edge ({u}, {v}) out of range for {self.node_count} nodes")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "node_count", int(self.node_count))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def _sorted_adjacency(self) -> tuple[tuple[int, ...], ...]:
        # deterministic iteration order for seeded moves
        return tuple(tuple(sorted(s)) for s in self.adjacency)

    def degrees(self) -> list[int]:
        return [len(s) for s in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256(f"n {self.node_count}\n".encode())
        for u, v in self.edges:
            h.update(f"{u} {v}\n".encode())
        return h.hexdigest()[:16]

    def relabel(self, permutation: Sequence[int]) -> "Graph":
        """Return the graph with node ``i`` renamed to ``permutation[i]``."""
        if sorted(permutation) != list(range(self.node_count)):
            raise GraphError("permutation must be a rearrangement of all node indices")
        return Graph(self.node_count, tuple((permutation[u], permutation[v]) for u, v in self.edges))

    def to_edge_list(self) -> str:
        buf = io.StringIO()
        write_edge_list(self, buf)
        return buf.getvalue()


@dataclass(frozen=True)
class NodeSubset:
    """Ordered selection of distinct nodes from a parent graph."""

    members: tuple[int, ...]
    parent_node_count: int

    def __post_init__(self):
        members = tuple(int(m) for m in self.members)
        if len(set(members)) != len(members):
            raise GraphError("subset members must be distinct")
        for m in members:
            if not 0 <= m < self.parent_node_count:
                raise GraphError(f"subset member {m} out of range for {self.parent_node_count} nodes")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, node: object) -> bool:
        return node in self.members


@dataclass(frozen=True)
class DegreeSummary:
    average_node_degree: Fraction
    degree_sequence: tuple[int, ...] = field(default=())


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------

def load_edge_list(text: str | TextIO) -> Graph:
    """Parse the ``u v`` per line edge-list format.

    Blank lines and ``#`` comments are skipped. A leading ``n <count>`` line
    fixes the node count (isolated nodes allowed); otherwise it is
    ``1 + max index``.
    """
    lines = text.splitlines() if isinstance(text, str) else text.read().splitlines()
    declared = None
    edges = []
    seen_content = False
    max_index = -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if seen_content:
                raise GraphFormatError("'n <count>' header must precede all edges", lineno)
            if len(tokens) != 2:
                raise GraphFormatError(f"malformed header {line!r}", lineno)
            try:
                declared = int(tokens[1])
            except ValueError:
                raise GraphFormatError(f"node count {tokens[1]!r} is not an integer", lineno) from None
            if declared < 1:
                raise GraphFormatError("node count must be positive", lineno)
            seen_content = True
            continue
        seen_content = True
        if len(tokens) != 2:
            raise GraphFormatError(f"expected two node indices, got {line!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"non-integer token in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError("node indices must be nonnegative", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop on node {u}", lineno)
        if declared is not None and max(u, v) >= declared:
            raise GraphFormatError(f"node {max(u, v)} exceeds declared count {declared}", lineno)
        max_index = max(max_index, u, v)
        edges.append((u, v))
    n = declared if declared is not None else max_index + 1
    if n < 1:
        raise GraphError("edge list is empty and has no 'n <count>' header")
    return Graph(n, tuple(edges))


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def write_edge_list(g: Graph, out: TextIO) -> None:
    out.write(f"n {g.node_count}\n")
    for u, v in g.edges:
        out.write(f"{u} {v}\n")


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def generate_erdos_renyi(n: int, edge_probability: float, seed: int) -> Graph:
    """G(n, p) with pairs visited in lexicographic order, one PCG64 draw each."""
    if n < 1:
        raise GraphError("n must be >= 1")
    if not 0.0 <= edge_probability <= 1.0:
        raise GraphError(f"edge probability {edge_probability} outside [0, 1]")
    rows, cols = np.triu_indices(n, k=1)
    draws = np.random.default_rng(seed).random(rows.size)
    keep = draws < edge_probability
    return Graph(n, tuple(zip(rows[keep].tolist(), cols[keep].tolist())))


def generate_connected_erdos_renyi(n: int, edge_probability: float, seed: int,
                                   max_tries: int = 1000) -> Graph:
    """Redraw G(n, p) with successive seeds until the sample is connected."""
    for attempt in range(max_tries):
        g = generate_erdos_renyi(n, edge_probability, seed * max_tries + attempt)
        if is_connected(g):
            return g
    raise GraphError(f"no connected G({n}, {edge_probability}) sample in {max_tries} tries")


def generate_cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def generate_path(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def generate_complete(n: int) -> Graph:
    return Graph(n, tuple(combinations(range(n), 2)))


def generate_star(n: int) -> Graph:
    """Hub 0 joined to leaves ``1..n-1``."""
    return Graph(n, tuple((0, i) for i in range(1, n)))


# ---------------------------------------------------------------------------
# Degree statistics and subgraphs
# ---------------------------------------------------------------------------

def average_node_degree(g: Graph) -> float:
    return 2.0 * g.edge_count / g.node_count


def degree_summary(g: Graph) -> DegreeSummary:
    return DegreeSummary(Fraction(2 * g.edge_count, g.node_count), tuple(g.degrees()))


def _check_subset(g: Graph, s: NodeSubset | Sequence[int]) -> tuple[int, ...]:
    if isinstance(s, NodeSubset):
        if s.parent_node_count != g.node_count:
            raise GraphError("subset belongs to a graph with a different node count")
        return s.members
    return NodeSubset(tuple(s), g.node_count).members


def induced_subgraph(g: Graph, s: NodeSubset | Sequence[int]) -> Graph:
    members = _check_subset(g, s)
    if not members:
        raise GraphError("cannot induce a subgraph on an empty subset")
    index = {node: i for i, node in enumerate(members)}
    adj = g.adjacency
    edges = []
    for node, i in index.items():
        for nb in adj[node]:
            j = index.get(nb)
            if j is not None and i < j:
                edges.append((i, j))
    return Graph(len(members), tuple(edges))


def _component_size(adj, start: int, allowed: set[int] | None = None) -> int:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nb in adj[node]:
            if nb not in seen and (allowed is None or nb in allowed):
                seen.add(nb)
                queue.append(nb)
    return len(seen)


def is_connected(g: Graph) -> bool:
    return _component_size(g.adjacency, 0) == g.node_count


def _subset_connected(adj, members: Iterable[int]) -> bool:
    allowed = set(members)
    if not allowed:
        return False
    return _component_size(adj, next(iter(allowed)), allowed) == len(allowed)


def random_connected_subset(g: Graph, k: int, seed: int | random.Random) -> NodeSubset:
    """Grow a connected ``k``-subset from a random start by frontier sampling."""
    if not 1 <= k <= g.node_count:
        raise GraphError(f"subset size {k} outside [1, {g.node_count}]")
    if not is_connected(g):
        raise GraphError("random_connected_subset needs a connected graph")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    adj = g._sorted_adjacency
    start = rng.randrange(g.node_count)
    members = [start]
    chosen = {start}
    frontier: list[int] = []
    in_frontier: set[int] = set()

    def extend(node):
        for nb in adj[node]:
            if nb not in chosen and nb not in in_frontier:
                in_frontier.add(nb)
                frontier.append(nb)

    extend(start)
    while len(members) < k:
        i = rng.randrange(len(frontier))
        node = frontier[i]
        frontier[i] = frontier[-1]
        frontier.pop()
        in_frontier.discard(node)
        members.append(node)
        chosen.add(node)
        extend(node)
    return NodeSubset(tuple(members), g.node_count)


def _swap_keeps_connected(adj, member_set: set[int], removed: int, added: int) -> bool:
    """Whether ``member_set - {removed} + {added}`` is connected.

    Assumes ``member_set`` is connected, so every component left after
    dropping ``removed`` contains one of its neighbours. Breadth-first
    searches grow from each of those neighbours and from ``added`` in lock
    step and merge on contact; the answer is known once all have merged or
    one merged group runs out of nodes.
    """
    starts = [nb for nb in adj[removed] if nb in member_set]
    if not starts:
        return True
    starts.append(added)
    m = len(starts)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {s: i for i, s in enumerate(starts)}
    queues = [deque([s]) for s in starts]
    groups = m
    while True:
        for i in range(m):
            queue = queues[i]
            if not queue:
                continue
            node = queue.popleft()
            for nb in adj[node]:
                if nb == removed or (nb not in member_set and nb != added):
                    continue
                o = owner.get(nb)
                if o is None:
                    owner[nb] = i
                    queue.append(nb)
                    continue
                ri, ro = find(i), find(o)
                if ri != ro:
                    parent[ri] = ro
                    groups -= 1
                    if groups == 1:
                        return True
            if not queue:
                root = find(i)
                if not any(queues[j] for j in range(m) if find(j) == root):
                    return False


def _propose_swap(adj, members: Sequence[int], member_set: set[int], rng: random.Random,
                  retry_budget: int) -> tuple[int, int]:
    """Pick ``(position, new_node)`` for a connected single-node swap.

    The incoming node is a random outside neighbour of a random surviving
    member, so it always attaches to the remaining subset.
    """
    k = len(members)
    for _ in range(retry_budget):
        pos = rng.randrange(k)
        removed = members[pos]
        if k == 1:
            nbrs = adj[removed]
            if not nbrs:
                continue
            added = nbrs[rng.randrange(len(nbrs))]
            return pos, added
        anchor_pos = rng.randrange(k - 1)
        if anchor_pos >= pos:
            anchor_pos += 1
        nbrs = adj[members[anchor_pos]]
        added = nbrs[rng.randrange(len(nbrs))]
        if added in member_set:
            continue
        if _swap_keeps_connected(adj, member_set, removed, added):
            return pos, added
    raise MoveExhaustedError(f"no connected neighbour found in {retry_budget} attempts")


def neighbor_subset(current: NodeSubset, g: Graph, rng: random.Random,
                    retry_budget: int = NEIGHBOR_RETRY_BUDGET) -> NodeSubset:
    """Replace one member of a connected subset, keeping it connected."""
    members = list(_check_subset(g, current))
    if not 1 <= len(members) < g.node_count:
        raise GraphError("neighbor_subset needs 1 <= |subset| < node_count")
    pos, added = _propose_swap(g._sorted_adjacency, members, set(members), rng, retry_budget)
    members[pos] = added
    return NodeSubset(tuple(members), g.node_count)


def enumerate_connected_subsets(g: Graph, k: int, guard: int | None = ENUMERATION_GUARD) -> list[NodeSubset]:
    """All connected ``k``-subsets in lexicographic order (brute force)."""
    if guard is not None and g.node_count > guard:
        raise GraphError(f"enumeration guarded at {guard} nodes (graph has {g.node_count})")
    if not 1 <= k <= g.node_count:
        raise GraphError(f"subset size {k} outside [1, {g.node_count}]")
    adj = g.adjacency
    return [NodeSubset(c, g.node_count) for c in combinations(range(g.node_count), k)
            if _subset_connected(adj, c)]
